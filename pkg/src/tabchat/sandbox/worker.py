"""In-sandbox runtime: loads the dataset as `df`, executes snippets with
guards active, captures the final expression or figure, and speaks the
newline-delimited JSON protocol on stdio.

Run as a subprocess: python -m tabchat.sandbox.worker --whitelist pandas,numpy,matplotlib

The module is deliberately self-contained (stdlib + data libraries only)
and communicates with its supervisor exclusively through the wire
protocol, never through shared Python state.
"""

from __future__ import annotations

import argparse
import ast
import base64
import builtins
import contextlib
import io
import json
import numbers
import os
import signal
import sys
import tempfile
import traceback

try:
    import resource
except ImportError:  # non-POSIX; external supervision still applies
    resource = None

TABLE_ROW_CAP = 200
TEXT_PAYLOAD_CAP = 20000

KNOWN_ALIASES = {"pandas": "pd", "numpy": "np", "matplotlib": "plt", "seaborn": "sns"}

_REAL_IMPORT = builtins.__import__


class BlockedImport(ImportError):
    pass


class WorkerState:
    def __init__(self):
        self.loaded_binding = None
        self.guard_flags = {
            "imports_hooked": False,
            "os_disabled": False,
            "net_disabled": False,
            "fs_disabled": False,
        }
        self.frames_served = 0
        self.namespace: dict | None = None


def _blocked(message):
    def guard(*_args, **_kwargs):
        raise RuntimeError(message)

    return guard


def _make_import_guard(whitelist):
    allowed = set(whitelist)

    def guarded_import(name, globals=None, locals=None, fromlist=(), level=0):
        if level:
            raise BlockedImport("relative imports are not available in the sandbox")
        root = name.partition(".")[0]
        if root not in allowed:
            raise BlockedImport(f"import of '{name}' is not allowed in the sandbox")
        return _REAL_IMPORT(name, globals, locals, fromlist, level)

    return guarded_import


def _restricted_builtins(whitelist):
    safe = dict(vars(builtins))
    for name in ("exit", "quit", "help", "license", "copyright", "credits"):
        safe.pop(name, None)
    safe["__import__"] = _make_import_guard(whitelist)
    safe["open"] = _blocked("file access is disabled in the sandbox")
    safe["exec"] = _blocked("dynamic code execution is disabled in the sandbox")
    safe["eval"] = _blocked("dynamic code execution is disabled in the sandbox")
    safe["compile"] = _blocked("dynamic code execution is disabled in the sandbox")
    safe["input"] = _blocked("interactive input is not available in the sandbox")
    safe["breakpoint"] = _blocked("debugging is not available in the sandbox")
    return safe


def _disable_process_spawning():
    import subprocess

    os.system = _blocked("shell access is disabled in the sandbox")
    for name in dir(os):
        if name.startswith(("exec", "spawn", "fork", "posix_spawn")):
            setattr(os, name, _blocked("process creation is disabled in the sandbox"))
    subprocess.Popen = _blocked("subprocess execution is disabled in the sandbox")
    subprocess.run = _blocked("subprocess execution is disabled in the sandbox")
    subprocess.call = _blocked("subprocess execution is disabled in the sandbox")
    subprocess.check_call = _blocked("subprocess execution is disabled in the sandbox")
    subprocess.check_output = _blocked("subprocess execution is disabled in the sandbox")


def _disable_network():
    import socket

    socket.socket = _blocked("network access is disabled in the sandbox")
    socket.create_connection = _blocked("network access is disabled in the sandbox")
    socket.socketpair = _blocked("network access is disabled in the sandbox")
    socket.create_server = _blocked("network access is disabled in the sandbox")


def _apply_rlimits(memory_bytes, cpu_seconds):
    if resource is None:
        return
    baseline = _current_address_space()
    limit = baseline + memory_bytes if baseline else 2 * memory_bytes
    try:
        resource.setrlimit(resource.RLIMIT_AS, (limit, limit))
    except (ValueError, OSError):
        pass
    cpu = max(1, int(cpu_seconds))
    try:
        resource.setrlimit(resource.RLIMIT_CPU, (cpu, cpu + 2))
    except (ValueError, OSError):
        pass


def _lock_filesystem_writes():
    if resource is None:
        return
    # Pipes are unaffected by RLIMIT_FSIZE, so the protocol keeps working.
    try:
        signal.signal(signal.SIGXFSZ, signal.SIG_IGN)
    except (ValueError, AttributeError, OSError):
        pass
    try:
        resource.setrlimit(resource.RLIMIT_FSIZE, (0, 0))
    except (ValueError, OSError):
        pass


def _current_address_space():
    try:
        with open("/proc/self/status", encoding="ascii") as fh:
            for line in fh:
                if line.startswith("VmSize:"):
                    return int(line.split()[1]) * 1024
    except OSError:
        pass
    return 0


def _preload(whitelist):
    """Import the runtime substrate before guards and quotas tighten."""
    os.environ.setdefault("MPLCONFIGDIR", tempfile.mkdtemp(prefix="tabchat-mpl-"))
    os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
    os.environ.setdefault("OMP_NUM_THREADS", "1")
    modules = {}
    import pandas

    modules["pandas"] = pandas
    if "numpy" in whitelist:
        import numpy

        modules["numpy"] = numpy
    if "matplotlib" in whitelist:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        modules["matplotlib"] = plt
        _warm_font_cache(plt)
    if "seaborn" in whitelist:
        try:
            import seaborn

            modules["seaborn"] = seaborn
        except ImportError:
            pass
    return modules


def _warm_font_cache(plt):
    fig = plt.figure(figsize=(2, 2))
    ax = fig.add_subplot(111)
    ax.set_title("init")
    ax.plot([0, 1], [0, 1])
    buf = io.BytesIO()
    fig.savefig(buf, format="png", dpi=96)
    plt.close(fig)


def _json_safe(value):
    try:
        json.dumps(value)
        return value
    except (TypeError, ValueError):
        return str(value)


def classify_value(value, stdout_text=""):
    """Map a captured value to (kind, payload)."""
    import pandas as pd

    if type(value).__module__ == "numpy" and getattr(value, "shape", None) == ():
        value = value.item()  # 0-d numpy scalars, including bool_
    if isinstance(value, pd.Series):
        value = value.to_frame().reset_index()
    if isinstance(value, pd.DataFrame):
        total = len(value)
        head = value.head(TABLE_ROW_CAP)
        rows = json.loads(head.to_json(orient="records", date_format="iso"))
        return "table", {
            "rows": rows,
            "total_rows": total,
            "truncated": total > TABLE_ROW_CAP,
        }
    if isinstance(value, bool):
        return "scalar", value
    if isinstance(value, numbers.Number):
        if isinstance(value, numbers.Integral):
            return "scalar", int(value)
        return "scalar", float(value)
    if value is None:
        text = stdout_text.strip() or "None"
        return "text", text[:TEXT_PAYLOAD_CAP]
    return "text", str(value)[:TEXT_PAYLOAD_CAP]


def capture_figure():
    """Serialize the most recent open figure, if any, then close all."""
    if "matplotlib.pyplot" not in sys.modules:
        return None
    plt = sys.modules["matplotlib.pyplot"]
    nums = plt.get_fignums()
    if not nums:
        return None
    fig = plt.figure(nums[-1])
    axes_list = fig.get_axes()
    if axes_list:
        first = axes_list[0]
        axes = {
            "title": first.get_title(),
            "x_label": first.get_xlabel(),
            "y_label": first.get_ylabel(),
        }
    else:
        axes = {"title": "", "x_label": "", "y_label": ""}
    buf = io.BytesIO()
    fig.savefig(buf, format="png", dpi=96)
    plt.close("all")
    return base64.b64encode(buf.getvalue()).decode("ascii"), axes


def _close_figures():
    if "matplotlib.pyplot" in sys.modules:
        sys.modules["matplotlib.pyplot"].close("all")


def execute_snippet(code, namespace):
    """Compile-then-split: run the body, then evaluate a trailing expression."""
    tree = ast.parse(code)
    trailing = None
    if tree.body and isinstance(tree.body[-1], ast.Expr):
        trailing = ast.Expression(tree.body.pop().value)
        ast.fix_missing_locations(trailing)
    captured = io.StringIO()
    with contextlib.redirect_stdout(captured):
        if tree.body:
            exec(compile(tree, "<snippet>", "exec"), namespace)
        value = (
            eval(compile(trailing, "<snippet>", "eval"), namespace)
            if trailing is not None
            else None
        )
    return value, captured.getvalue()


def run_once(frame, state):
    """Execute one exec frame and build the response document."""
    import time

    code = frame["code"]
    started = time.perf_counter()
    response = {
        "id": frame["id"],
        "status": "runtime_error",
        "kind": None,
        "payload": None,
        "axes": None,
        "error": None,
        "duration_ms": 0,
    }
    try:
        value, stdout_text = execute_snippet(code, state.namespace)
        figure = capture_figure()
        if figure is not None:
            payload, axes = figure
            response.update(status="ok", kind="figure", payload=payload, axes=axes)
        else:
            kind, payload = classify_value(value, stdout_text)
            response.update(status="ok", kind=kind, payload=_json_safe(payload))
    except BlockedImport as exc:
        _close_figures()
        response.update(status="blocked_import", error=str(exc))
    except MemoryError:
        _close_figures()
        response.update(status="resource_limit", error="MemoryError: allocation failed")
    except BaseException:
        _close_figures()
        lines = traceback.format_exception_only(*sys.exc_info()[:2])
        response.update(status="runtime_error", error=lines[-1].strip() if lines else "")
    response["duration_ms"] = int((time.perf_counter() - started) * 1000)
    return response


def _write_frame(out, doc):
    out.write(json.dumps(doc, ensure_ascii=True) + "\n")
    out.flush()


def _handle_load(frame, state, modules, whitelist):
    import pandas as pd

    df = pd.read_csv(frame["path"])
    namespace = {
        "__name__": "__sandbox__",
        "__builtins__": _restricted_builtins(whitelist),
        frame["binding"]: df,
    }
    for lib, alias in KNOWN_ALIASES.items():
        if lib in whitelist and lib in modules:
            namespace[alias] = modules[lib]
    state.namespace = namespace
    state.loaded_binding = frame["binding"]
    state.guard_flags["imports_hooked"] = True
    return {"status": "ok", "guards": dict(state.guard_flags)}


def serve(stdin, stdout, state, modules, whitelist):
    while True:
        line = stdin.readline()
        if not line:
            break
        if not line.strip():
            continue
        try:
            frame = json.loads(line)
            if not isinstance(frame, dict):
                raise ValueError("frame must be an object")
            op = frame.get("op")
            if op == "load":
                try:
                    ack = _handle_load(frame, state, modules, whitelist)
                except Exception as exc:
                    ack = {"status": "error", "error": f"{type(exc).__name__}: {exc}"}
                _write_frame(stdout, ack)
                continue
            if op == "exec":
                if state.namespace is None:
                    _write_frame(
                        stdout,
                        {
                            "id": str(frame.get("id", "")),
                            "status": "protocol_error",
                            "kind": None,
                            "payload": None,
                            "axes": None,
                            "error": "exec before load was acknowledged",
                            "duration_ms": 0,
                        },
                    )
                    continue
                response = run_once(frame, state)
                state.frames_served += 1
                _write_frame(stdout, response)
                continue
            raise ValueError(f"unknown op {op!r}")
        except BaseException as exc:  # catch-all: exactly one frame per request
            request_id = ""
            try:
                request_id = str(frame.get("id", ""))  # type: ignore[union-attr]
            except Exception:
                pass
            _write_frame(
                stdout,
                {
                    "id": request_id,
                    "status": "protocol_error",
                    "kind": None,
                    "payload": None,
                    "axes": None,
                    "error": f"{type(exc).__name__}: {exc}",
                    "duration_ms": 0,
                },
            )


def main(argv=None):
    parser = argparse.ArgumentParser(description="tabchat sandbox worker")
    parser.add_argument("--whitelist", default="pandas,numpy,matplotlib")
    parser.add_argument("--memory-bytes", type=int, default=1024**3)
    parser.add_argument("--cpu-seconds", type=int, default=15)
    args = parser.parse_args(argv)
    whitelist = tuple(w.strip() for w in args.whitelist.split(",") if w.strip())

    # Relative paths (and planted modules) must never reach the host CWD.
    scratch = tempfile.mkdtemp(prefix="tabchat-sandbox-")
    cwd = os.getcwd()
    os.chdir(scratch)
    sys.path = [p for p in sys.path if p not in ("", cwd, scratch)]

    state = WorkerState()
    modules = _preload(whitelist)
    _apply_rlimits(args.memory_bytes, args.cpu_seconds)
    _disable_process_spawning()
    state.guard_flags["os_disabled"] = True
    _disable_network()
    state.guard_flags["net_disabled"] = True
    _lock_filesystem_writes()
    state.guard_flags["fs_disabled"] = True

    serve(sys.stdin, sys.stdout, state, modules, whitelist)
    return 0


if __name__ == "__main__":
    sys.exit(main())
