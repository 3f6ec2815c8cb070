"""On-disk persistence: raw datasets, profiles, session streams, artifacts.

Artifacts are content-addressed (sha256 prefix); sessions are append-only
JSON streams, one directory per session.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .profiling import DatasetProfile

_MEDIA_SUFFIX = {
    "image/png": ".png",
    "application/json": ".json",
    "audio/wav": ".wav",
    "audio/ogg": ".ogg",
}


class DataStore:
    def __init__(self, root: str | Path):
        # Resolved so worker processes see stable paths regardless of their CWD.
        self.root = Path(root).resolve()
        for sub in ("datasets", "sessions", "artifacts"):
            (self.root / sub).mkdir(parents=True, exist_ok=True)

    # -- datasets ---------------------------------------------------------

    def save_dataset(self, profile: DatasetProfile, content: bytes) -> None:
        folder = self.root / "datasets" / profile.dataset_id
        folder.mkdir(parents=True, exist_ok=True)
        (folder / "raw.csv").write_bytes(content)
        (folder / "profile.json").write_text(
            json.dumps(profile.to_dict(), indent=2), encoding="utf-8"
        )

    def dataset_path(self, dataset_id: str) -> str:
        path = self.root / "datasets" / dataset_id / "raw.csv"
        if not path.exists():
            raise KeyError(f"unknown dataset {dataset_id}")
        return str(path)

    def load_profile(self, dataset_id: str) -> DatasetProfile:
        path = self.root / "datasets" / dataset_id / "profile.json"
        if not path.exists():
            raise KeyError(f"unknown dataset {dataset_id}")
        return DatasetProfile.from_dict(json.loads(path.read_text(encoding="utf-8")))

    # -- artifacts ----------------------------------------------------------

    def save_artifact(self, data: bytes, media_type: str) -> str:
        artifact_id = hashlib.sha256(data).hexdigest()[:16]
        suffix = _MEDIA_SUFFIX.get(media_type, ".bin")
        folder = self.root / "artifacts"
        (folder / f"{artifact_id}{suffix}").write_bytes(data)
        (folder / f"{artifact_id}.meta").write_text(media_type, encoding="utf-8")
        return artifact_id

    def load_artifact(self, artifact_id: str) -> tuple[bytes, str]:
        folder = self.root / "artifacts"
        meta = folder / f"{artifact_id}.meta"
        if not meta.exists():
            raise KeyError(f"unknown artifact {artifact_id}")
        media_type = meta.read_text(encoding="utf-8").strip()
        suffix = _MEDIA_SUFFIX.get(media_type, ".bin")
        return (folder / f"{artifact_id}{suffix}").read_bytes(), media_type

    # -- sessions -----------------------------------------------------------

    def save_session_meta(self, session_id: str, meta: dict) -> None:
        folder = self.root / "sessions" / session_id
        folder.mkdir(parents=True, exist_ok=True)
        (folder / "meta.json").write_text(json.dumps(meta), encoding="utf-8")

    def append_turn(self, session_id: str, record_doc: dict) -> None:
        folder = self.root / "sessions" / session_id
        folder.mkdir(parents=True, exist_ok=True)
        with (folder / "records.jsonl").open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record_doc) + "\n")
