"""The 48-task evaluation catalog: 16 tasks per dataset, split 26
visualization / 13 analytical / 9 narrative, with the canned responses
the fixture gateways replay.

Checkers are descriptors; numeric ground truths are computed directly
from the dataset files when a suite is built.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    dataset: str
    query: str
    category: str  # visualization | analytical | narrative
    checker: tuple
    code: str | None = None
    narration: str | None = None


def _hist(column: str, title: str, bins: str = "") -> str:
    args = f"df['{column}']" + (f", bins={bins}" if bins else "")
    return (
        f"plt.hist({args})\n"
        f"plt.xlabel('{column}')\n"
        "plt.ylabel('count')\n"
        f"plt.title('{title}')\n"
        "plt.show()"
    )


CATALOG: list[CatalogEntry] = [
    # ------------------------------ students ------------------------------
    CatalogEntry(
        id="students-01",
        dataset="students",
        query="Plot a histogram of math score",
        category="visualization",
        checker=("axes", {"x_label": "math score", "y_label": "count"}),
        code=_hist("math score", "Distribution of math score"),
    ),
    CatalogEntry(
        id="students-02",
        dataset="students",
        query="Plot math score vs reading score",
        category="visualization",
        checker=("axes", {"x_label": "math score", "y_label": "reading score"}),
        code=(
            "plt.scatter(df['math score'], df['reading score'])\n"
            "plt.xlabel('math score')\n"
            "plt.ylabel('reading score')\n"
            "plt.title('Math vs Reading Score')\n"
            "plt.show()"
        ),
    ),
    CatalogEntry(
        id="students-03",
        dataset="students",
        query="Scatter writing score against reading score colored by gender",
        category="visualization",
        checker=("axes", {"x_label": "reading score", "y_label": "writing score"}),
        code=(
            "plt.scatter(df['reading score'], df['writing score'], "
            "c=df['gender'].map({'female': 'red', 'male': 'blue'}))\n"
            "plt.xlabel('reading score')\n"
            "plt.ylabel('writing score')\n"
            "plt.title('Writing vs Reading Score by Gender')\n"
            "plt.show()"
        ),
    ),
    CatalogEntry(
        id="students-04",
        dataset="students",
        query="Show a boxplot of math score by lunch",
        category="visualization",
        checker=("axes", {"x_label": "lunch", "y_label": "math score"}),
        code=(
            "levels = sorted(df['lunch'].unique())\n"
            "plt.boxplot([df[df['lunch'] == v]['math score'] for v in levels])\n"
            "plt.xticks(range(1, len(levels) + 1), levels)\n"
            "plt.xlabel('lunch')\n"
            "plt.ylabel('math score')\n"
            "plt.title('Math Score by Lunch')\n"
            "plt.show()"
        ),
    ),
    CatalogEntry(
        id="students-05",
        dataset="students",
        query="Plot average math score by parental level of education as a bar chart",
        category="visualization",
        checker=("axes", {"x_label": "parental level of education"}),
        code=(
            "df.groupby('parental level of education')['math score'].mean().plot(kind='bar')\n"
            "plt.xlabel('parental level of education')\n"
            "plt.ylabel('average math score')\n"
            "plt.title('Average Math Score by Parental Education')\n"
            "plt.show()"
        ),
    ),
    CatalogEntry(
        id="students-06",
        dataset="students",
        query="Histogram of writing score",
        category="visualization",
        checker=("axes", {"x_label": "writing score", "y_label": "count"}),
        code=_hist("writing score", "Distribution of writing score", bins="20"),
    ),
    CatalogEntry(
        id="students-07",
        dataset="students",
        query="Correlation heatmap of the three scores",
        category="visualization",
        checker=("axes", {"title": "Score Correlations"}),
        code=(
            "cols = ['math score', 'reading score', 'writing score']\n"
            "plt.imshow(df[cols].corr(), cmap='coolwarm')\n"
            "plt.colorbar()\n"
            "plt.xticks(range(3), cols, rotation=45)\n"
            "plt.yticks(range(3), cols)\n"
            "plt.title('Score Correlations')\n"
            "plt.show()"
        ),
    ),
    CatalogEntry(
        id="students-08",
        dataset="students",
        query="Bar chart of counts by race/ethnicity",
        category="visualization",
        checker=("axes", {"x_label": "race/ethnicity", "y_label": "count"}),
        code=(
            "df['race/ethnicity'].value_counts().sort_index().plot(kind='bar')\n"
            "plt.xlabel('race/ethnicity')\n"
            "plt.ylabel('count')\n"
            "plt.title('Students per Group')\n"
            "plt.show()"
        ),
    ),
    CatalogEntry(
        id="students-09",
        dataset="students",
        query="Boxplot of reading score by test preparation course",
        category="visualization",
        checker=("axes", {"x_label": "test preparation course", "y_label": "reading score"}),
        code=(
            "levels = sorted(df['test preparation course'].unique())\n"
            "plt.boxplot([df[df['test preparation course'] == v]['reading score'] for v in levels])\n"
            "plt.xticks(range(1, len(levels) + 1), levels)\n"
            "plt.xlabel('test preparation course')\n"
            "plt.ylabel('reading score')\n"
            "plt.title('Reading Score by Test Preparation')\n"
            "plt.show()"
        ),
    ),
    CatalogEntry(
        id="students-10",
        dataset="students",
        query="What is the average math score?",
        category="analytical",
        checker=("numeric", ("mean", "math score")),
        code="df['math score'].mean()",
    ),
    CatalogEntry(
        id="students-11",
        dataset="students",
        query="What is the maximum writing score?",
        category="analytical",
        checker=("numeric", ("max", "writing score")),
        code="df['writing score'].max()",
    ),
    CatalogEntry(
        id="students-12",
        dataset="students",
        query="How many students completed the test preparation course?",
        category="analytical",
        checker=("numeric", ("count_eq", "test preparation course", "completed")),
        code="(df['test preparation course'] == 'completed').sum()",
    ),
    CatalogEntry(
        id="students-13",
        dataset="students",
        query="Show the first five rows",
        category="analytical",
        checker=("kind", "table"),
        code="df.head()",
    ),
    CatalogEntry(
        id="students-14",
        dataset="students",
        query="What columns does this dataset have?",
        category="narrative",
        checker=("narration",),
        narration=(
            "It has gender, race/ethnicity, parental level of education, lunch, "
            "test preparation course, and scores for math, reading and writing."
        ),
    ),
    CatalogEntry(
        id="students-15",
        dataset="students",
        query="What does the lunch column mean?",
        category="narrative",
        checker=("narration",),
        narration=(
            "It records each student's lunch program, either standard or free/reduced."
        ),
    ),
    CatalogEntry(
        id="students-16",
        dataset="students",
        query="Summarize what this dataset is about.",
        category="narrative",
        checker=("narration",),
        narration=(
            "Each row is one student with their background and their math, "
            "reading and writing exam scores."
        ),
    ),
    # ------------------------------ products ------------------------------
    CatalogEntry(
        id="products-01",
        dataset="products",
        query="Plot a histogram of feat_1",
        category="visualization",
        checker=("axes", {"x_label": "feat_1", "y_label": "count"}),
        code=_hist("feat_1", "Distribution of feat_1"),
    ),
    CatalogEntry(
        id="products-02",
        dataset="products",
        query="Scatter feat_2 against feat_3",
        category="visualization",
        checker=("axes", {"x_label": "feat_2", "y_label": "feat_3"}),
        code=(
            "plt.scatter(df['feat_2'], df['feat_3'])\n"
            "plt.xlabel('feat_2')\n"
            "plt.ylabel('feat_3')\n"
            "plt.title('feat_2 vs feat_3')\n"
            "plt.show()"
        ),
    ),
    CatalogEntry(
        id="products-03",
        dataset="products",
        query="Histogram of feat_10",
        category="visualization",
        checker=("axes", {"x_label": "feat_10", "y_label": "count"}),
        code=_hist("feat_10", "Distribution of feat_10"),
    ),
    CatalogEntry(
        id="products-04",
        dataset="products",
        query="Bar chart of the average of feat_1 through feat_5",
        category="visualization",
        checker=("axes", {"x_label": "feature", "y_label": "average value"}),
        code=(
            "df[['feat_1', 'feat_2', 'feat_3', 'feat_4', 'feat_5']].mean().plot(kind='bar')\n"
            "plt.xlabel('feature')\n"
            "plt.ylabel('average value')\n"
            "plt.title('Average of feat_1 through feat_5')\n"
            "plt.show()"
        ),
    ),
    CatalogEntry(
        id="products-05",
        dataset="products",
        query="Boxplot of feat_7",
        category="visualization",
        checker=("axes", {"y_label": "feat_7"}),
        code=(
            "plt.boxplot(df['feat_7'])\n"
            "plt.ylabel('feat_7')\n"
            "plt.title('Spread of feat_7')\n"
            "plt.show()"
        ),
    ),
    CatalogEntry(
        id="products-06",
        dataset="products",
        query="Plot the distribution of feat_20",
        category="visualization",
        checker=("axes", {"x_label": "feat_20", "y_label": "count"}),
        code=_hist("feat_20", "Distribution of feat_20", bins="30"),
    ),
    CatalogEntry(
        id="products-07",
        dataset="products",
        query="Scatter feat_5 vs feat_6",
        category="visualization",
        checker=("axes", {"x_label": "feat_5", "y_label": "feat_6"}),
        code=(
            "plt.scatter(df['feat_5'], df['feat_6'])\n"
            "plt.xlabel('feat_5')\n"
            "plt.ylabel('feat_6')\n"
            "plt.title('feat_5 vs feat_6')\n"
            "plt.show()"
        ),
    ),
    CatalogEntry(
        id="products-08",
        dataset="products",
        query="Plot a scatter of the first two principal components of the features",
        category="visualization",
        checker=("kind", "figure"),
        code=(
            "from sklearn.decomposition import PCA\n"
            "features = df.drop(columns=['id'])\n"
            "pca = PCA(n_components=2)\n"
            "points = pca.fit_transform(features)\n"
            "plt.scatter(points[:, 0], points[:, 1])\n"
            "plt.xlabel('PC1')\n"
            "plt.ylabel('PC2')\n"
            "plt.title('PCA of Product Features')\n"
            "plt.show()"
        ),
    ),
    CatalogEntry(
        id="products-09",
        dataset="products",
        query="Correlation heatmap of feat_1 through feat_10",
        category="visualization",
        checker=("axes", {"title": "Correlations of feat_1 through feat_10"}),
        code=(
            "cols = ['feat_1', 'feat_2', 'feat_3', 'feat_4', 'feat_5', "
            "'feat_6', 'feat_7', 'feat_8', 'feat_9', 'feat_10']\n"
            "plt.imshow(df[cols].corr(), cmap='viridis')\n"
            "plt.colorbar()\n"
            "plt.title('Correlations of feat_1 through feat_10')\n"
            "plt.show()"
        ),
    ),
    CatalogEntry(
        id="products-10",
        dataset="products",
        query="Find the product id with the maximum value in feat_3",
        category="analytical",
        checker=("numeric", ("id_of_max", "feat_3", "id")),
        code="df.loc[df['feat_3'].idxmax(), 'id']",
    ),
    CatalogEntry(
        id="products-11",
        dataset="products",
        query="What is the mean of feat_11?",
        category="analytical",
        checker=("numeric", ("mean", "feat_11")),
        code="df['feat_11'].mean()",
    ),
    CatalogEntry(
        id="products-12",
        dataset="products",
        query="How many products have feat_1 greater than 5?",
        category="analytical",
        checker=("numeric", ("count_gt", "feat_1", 5)),
        code="(df['feat_1'] > 5).sum()",
    ),
    CatalogEntry(
        id="products-13",
        dataset="products",
        query="Show the first ten rows",
        category="analytical",
        checker=("kind", "table"),
        code="df.head(10)",
    ),
    CatalogEntry(
        id="products-14",
        dataset="products",
        query="What does each row represent?",
        category="narrative",
        checker=("narration",),
        narration=(
            "Each row is one product, identified by id, described by 93 numeric "
            "feature counts."
        ),
    ),
    CatalogEntry(
        id="products-15",
        dataset="products",
        query="How many feature columns are there?",
        category="narrative",
        checker=("narration",),
        narration="There are 93 feature columns, feat_1 through feat_93, plus the id.",
    ),
    CatalogEntry(
        id="products-16",
        dataset="products",
        query="What kind of values do the features hold?",
        category="narrative",
        checker=("narration",),
        narration=(
            "The features are non-negative integer counts; most values are small "
            "and many are zero."
        ),
    ),
    # ------------------------------ flights -------------------------------
    CatalogEntry(
        id="flights-01",
        dataset="flights",
        query="Create a scatter plot of departure vs arrival delay with a trend line",
        category="visualization",
        checker=("axes", {"x_label": "DepDelay", "y_label": "ArrDelay"}),
        code=(
            "plt.scatter(df['DepDelay'], df['ArrDelay'])\n"
            "x = df['DepDelay']\n"
            "y = df['ArrDelay']\n"
            "slope, intercept = np.polyfit(x, y, 1)\n"
            "plt.plot(x, slope * x + intercept, color='red')\n"
            "plt.xlabel('DepDelay')\n"
            "plt.ylabel('ArrDelay')\n"
            "plt.title('Departure vs Arrival Delay')\n"
            "plt.show()"
        ),
    ),
    CatalogEntry(
        id="flights-02",
        dataset="flights",
        query="Plot a histogram of arrival delays",
        category="visualization",
        checker=("axes", {"x_label": "ArrDelay", "y_label": "count"}),
        code=_hist("ArrDelay", "Distribution of Arrival Delay", bins="30"),
    ),
    CatalogEntry(
        id="flights-03",
        dataset="flights",
        query="Histogram of departure delays",
        category="visualization",
        checker=("axes", {"x_label": "DepDelay", "y_label": "count"}),
        code=_hist("DepDelay", "Distribution of Departure Delay", bins="30"),
    ),
    CatalogEntry(
        id="flights-04",
        dataset="flights",
        query="Bar chart of flights per carrier",
        category="visualization",
        checker=("axes", {"x_label": "UniqueCarrier", "y_label": "flights"}),
        code=(
            "df['UniqueCarrier'].value_counts().sort_index().plot(kind='bar')\n"
            "plt.xlabel('UniqueCarrier')\n"
            "plt.ylabel('flights')\n"
            "plt.title('Flights per Carrier')\n"
            "plt.show()"
        ),
    ),
    CatalogEntry(
        id="flights-05",
        dataset="flights",
        query="Boxplot of arrival delay by day of week",
        category="visualization",
        checker=("axes", {"x_label": "DayOfWeek", "y_label": "ArrDelay"}),
        code=(
            "days = sorted(df['DayOfWeek'].unique())\n"
            "plt.boxplot([df[df['DayOfWeek'] == d]['ArrDelay'] for d in days])\n"
            "plt.xticks(range(1, len(days) + 1), days)\n"
            "plt.xlabel('DayOfWeek')\n"
            "plt.ylabel('ArrDelay')\n"
            "plt.title('Arrival Delay by Day of Week')\n"
            "plt.show()"
        ),
    ),
    CatalogEntry(
        id="flights-06",
        dataset="flights",
        query="Histogram of flight distance",
        category="visualization",
        checker=("axes", {"x_label": "Distance", "y_label": "count"}),
        code=_hist("Distance", "Distribution of Distance", bins="30"),
    ),
    CatalogEntry(
        id="flights-07",
        dataset="flights",
        query="Plot average departure delay by month",
        category="visualization",
        checker=("axes", {"x_label": "Month", "y_label": "average DepDelay"}),
        code=(
            "df.groupby('Month')['DepDelay'].mean().plot(marker='o')\n"
            "plt.xlabel('Month')\n"
            "plt.ylabel('average DepDelay')\n"
            "plt.title('Average Departure Delay by Month')\n"
            "plt.show()"
        ),
    ),
    CatalogEntry(
        id="flights-08",
        dataset="flights",
        query="Scatter air time against distance",
        category="visualization",
        checker=("axes", {"x_label": "Distance", "y_label": "AirTime"}),
        code=(
            "plt.scatter(df['Distance'], df['AirTime'])\n"
            "plt.xlabel('Distance')\n"
            "plt.ylabel('AirTime')\n"
            "plt.title('Air Time vs Distance')\n"
            "plt.show()"
        ),
    ),
    CatalogEntry(
        id="flights-09",
        dataset="flights",
        query="What is the average arrival delay?",
        category="analytical",
        checker=("numeric", ("mean", "ArrDelay")),
        code="df['ArrDelay'].mean()",
    ),
    CatalogEntry(
        id="flights-10",
        dataset="flights",
        query="What is the maximum departure delay?",
        category="analytical",
        checker=("numeric", ("max", "DepDelay")),
        code="df['DepDelay'].max()",
    ),
    CatalogEntry(
        id="flights-11",
        dataset="flights",
        query="How many flights were cancelled?",
        category="analytical",
        checker=("numeric", ("sum", "Cancelled")),
        code="df['Cancelled'].sum()",
    ),
    CatalogEntry(
        id="flights-12",
        dataset="flights",
        query="What is the average flight distance?",
        category="analytical",
        checker=("numeric", ("mean", "Distance")),
        code="df['Distance'].mean()",
    ),
    CatalogEntry(
        id="flights-13",
        dataset="flights",
        query="Show the number of flights per carrier as a table",
        category="analytical",
        checker=("kind", "table"),
        code="df['UniqueCarrier'].value_counts().reset_index()",
    ),
    CatalogEntry(
        id="flights-14",
        dataset="flights",
        query="What does the carrier column mean?",
        category="narrative",
        checker=("narration",),
        narration=(
            "UniqueCarrier is the short code of the airline that operated the "
            "flight, for example UA or DL."
        ),
    ),
    CatalogEntry(
        id="flights-15",
        dataset="flights",
        query="Summarize the relationship between departure and arrival delays.",
        category="narrative",
        checker=("narration",),
        narration=(
            "Flights that leave late usually arrive late; arrival delay follows "
            "departure delay closely, with small differences made up in the air."
        ),
    ),
    CatalogEntry(
        id="flights-16",
        dataset="flights",
        query="What time period does this data cover?",
        category="narrative",
        checker=("narration",),
        narration=(
            "All rows are from 2008, with the Month column spanning January "
            "through December."
        ),
    ),
]

BY_ID = {entry.id: entry for entry in CATALOG}

# Fixture designations: one clear plotting request the mid-size model
# misroutes, and one task whose code trips the import guard.
MISROUTED_BY_7B = ("flights-08",)
BLOCKED_IMPORT_TASK = "products-08"

CLARIFICATION = (
    "Could you clarify exactly what you want to see? I can run the analysis "
    "once I know."
)
