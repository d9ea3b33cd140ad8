"""Random-forest classifier over feature rows, with evaluation metrics.

Trees use axis-aligned threshold splits chosen by Gini impurity; each tree
trains on a bootstrap resample and considers a random feature subset at
every node. All randomness derives from (seed, tree index) so training is
reproducible and trees are independent units of work.
"""

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.stats import rankdata

from .errors import ConfigError
from .features import FeatureVector
from .pipeline import LabeledDataset

FORMAT_VERSION = 1


@dataclass
class ForestConfig:
    n_trees: int = 100
    max_depth: int | None = None
    min_leaf: int = 1
    features_per_split: int = 3
    seed: int = 42

    def __post_init__(self):
        if self.n_trees < 1:
            raise ConfigError(f"n_trees must be >= 1, got {self.n_trees}")
        if self.min_leaf < 1:
            raise ConfigError(f"min_leaf must be >= 1, got {self.min_leaf}")
        if self.features_per_split < 1:
            raise ConfigError(
                f"features_per_split must be >= 1, got {self.features_per_split}"
            )

    def describe(self) -> str:
        depth = "unlimited" if self.max_depth is None else str(self.max_depth)
        return (
            f"n_trees={self.n_trees} max_depth={depth} min_leaf={self.min_leaf} "
            f"features_per_split={self.features_per_split} seed={self.seed}"
        )


@dataclass
class _Node:
    feature: int = -1
    threshold: float = 0.0
    left: "_Node | None" = None
    right: "_Node | None" = None
    counts: np.ndarray | None = None  # leaf class-count vector

    @property
    def is_leaf(self) -> bool:
        return self.left is None


@dataclass
class TrainedForest:
    trees: list
    class_names: list
    config: ForestConfig
    n_features: int


def _best_split(x, y, n_classes, feature_ids, min_leaf):
    """Best (impurity gain) split among the candidate features.

    Returns (score, feature, threshold) or None when no feature admits a
    split that leaves min_leaf rows on both sides. The score is the sum of
    per-side squared class counts over side size; maximizing it minimizes
    the weighted Gini impurity.
    """
    n = y.size
    best = None
    for f in feature_ids:
        order = np.argsort(x[:, f], kind="stable")
        xs = x[order, f]
        onehot = np.zeros((n, n_classes))
        onehot[np.arange(n), y[order]] = 1.0
        cum = np.cumsum(onehot, axis=0)
        total = cum[-1]
        nl = np.arange(1, n, dtype=np.float64)
        left = cum[:-1]
        right = total - left
        score = (left * left).sum(axis=1) / nl + (right * right).sum(axis=1) / (n - nl)
        valid = xs[1:] != xs[:-1]
        if min_leaf > 1:
            valid = valid.copy()
            valid[: min_leaf - 1] = False
            if min_leaf > 1:
                valid[n - min_leaf :] = False
        if not valid.any():
            continue
        score = np.where(valid, score, -np.inf)
        pos = int(np.argmax(score))
        if best is None or score[pos] > best[0]:
            threshold = (xs[pos] + xs[pos + 1]) / 2.0
            best = (float(score[pos]), int(f), threshold)
    return best


def _grow(x, y, n_classes, config, rng, depth):
    counts = np.bincount(y, minlength=n_classes).astype(np.float64)
    if (
        y.size < 2 * config.min_leaf
        or counts.max() == y.size
        or (config.max_depth is not None and depth >= config.max_depth)
    ):
        return _Node(counts=counts)
    mtry = min(config.features_per_split, x.shape[1])
    feature_ids = rng.choice(x.shape[1], size=mtry, replace=False)
    best = _best_split(x, y, n_classes, feature_ids, config.min_leaf)
    if best is None:
        return _Node(counts=counts)
    _, feature, threshold = best
    go_left = x[:, feature] <= threshold
    return _Node(
        feature=feature,
        threshold=threshold,
        left=_grow(x[go_left], y[go_left], n_classes, config, rng, depth + 1),
        right=_grow(x[~go_left], y[~go_left], n_classes, config, rng, depth + 1),
    )


def _fit_tree(x, y, n_classes, config, tree_index):
    rng = np.random.default_rng([config.seed, tree_index])
    idx = rng.integers(0, y.size, size=y.size)
    return _grow(x[idx], y[idx], n_classes, config, rng, depth=0)


def train(train_set: LabeledDataset, config: ForestConfig | None = None) -> TrainedForest:
    """Fit a forest on a labeled dataset; deterministic given config.seed."""
    config = config or ForestConfig()
    x, y = train_set.to_matrix()
    present = np.unique(y)
    if len(train_set.class_names) < 2 or present.size < 2:
        raise ConfigError("training requires at least 2 classes")
    class_counts = np.bincount(y, minlength=len(train_set.class_names))
    thin = [train_set.class_names[c] for c in present if class_counts[c] < 2]
    if thin:
        raise ConfigError(f"every training class needs >= 2 rows, thin classes: {thin}")
    n_classes = len(train_set.class_names)
    trees = [_fit_tree(x, y, n_classes, config, t) for t in range(config.n_trees)]
    return TrainedForest(
        trees=trees,
        class_names=list(train_set.class_names),
        config=config,
        n_features=x.shape[1],
    )


def _tree_proba(node: _Node, x: np.ndarray, idx: np.ndarray, out: np.ndarray) -> None:
    if node.is_leaf:
        out[idx] = node.counts / node.counts.sum()
        return
    go_left = x[idx, node.feature] <= node.threshold
    if go_left.any():
        _tree_proba(node.left, x, idx[go_left], out)
    if not go_left.all():
        _tree_proba(node.right, x, idx[~go_left], out)


def predict_proba_matrix(forest: TrainedForest, x: np.ndarray) -> np.ndarray:
    """Per-class probabilities: average of per-tree leaf class frequencies."""
    x = np.asarray(x, dtype=np.float64)
    acc = np.zeros((x.shape[0], len(forest.class_names)))
    scratch = np.empty_like(acc)
    rows = np.arange(x.shape[0])
    for tree in forest.trees:
        _tree_proba(tree, x, rows, scratch)
        acc += scratch
    return acc / len(forest.trees)


def predict_proba(forest: TrainedForest, features: FeatureVector) -> np.ndarray:
    """Probability vector for a single feature vector; sums to 1."""
    return predict_proba_matrix(forest, features.as_array()[None, :])[0]


# ---------------------------------------------------------------------------
# Evaluation


def binary_roc_auc(scores: np.ndarray, is_positive: np.ndarray) -> float:
    """One-vs-rest ROC-AUC by the rank-statistic (Mann-Whitney) formula.

    Tied scores receive midranks, which matches trapezoidal integration of
    the ROC curve exactly.
    """
    scores = np.asarray(scores, dtype=np.float64)
    is_positive = np.asarray(is_positive, dtype=bool)
    n_pos = int(is_positive.sum())
    n_neg = scores.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ConfigError("ROC-AUC needs at least one positive and one negative")
    ranks = rankdata(scores)
    u = ranks[is_positive].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


@dataclass
class EvalReport:
    accuracy: float  # percent
    roc_auc: float  # macro one-vs-rest
    confusion: np.ndarray  # rows true, cols predicted
    class_names: list
    precision: list
    recall: list
    n_test: int
    forest_description: str = ""

    def to_text(self) -> str:
        lines = [
            "evaluation report",
            "assumptions: roc_auc = macro one-vs-rest rank statistic; "
            "argmax ties -> lowest class index",
            f"forest: {self.forest_description}",
            f"test rows: {self.n_test}",
            f"accuracy: {self.accuracy:.2f}%",
            f"macro roc_auc: {self.roc_auc:.4f}",
            "confusion matrix (rows=true, cols=predicted):",
        ]
        width = max(len(name) for name in self.class_names) + 2
        header = " " * width + "".join(f"{name:>{width}}" for name in self.class_names)
        lines.append(header)
        for i, name in enumerate(self.class_names):
            cells = "".join(f"{int(v):>{width}}" for v in self.confusion[i])
            lines.append(f"{name:>{width}}{cells}")
        lines.append("per-class precision / recall:")
        for i, name in enumerate(self.class_names):
            lines.append(f"  {name}: {self.precision[i]:.4f} / {self.recall[i]:.4f}")
        return "\n".join(lines) + "\n"

    def confusion_csv(self) -> str:
        lines = ["true\\predicted," + ",".join(self.class_names)]
        for i, name in enumerate(self.class_names):
            lines.append(name + "," + ",".join(str(int(v)) for v in self.confusion[i]))
        return "\n".join(lines) + "\n"


def evaluate(forest: TrainedForest, test_set: LabeledDataset) -> EvalReport:
    """Accuracy, macro ROC-AUC, confusion matrix, and per-class rates."""
    if not test_set.rows:
        raise ConfigError("test set is empty")
    unknown = sorted({row.label for row in test_set.rows} - set(forest.class_names))
    if unknown:
        raise ConfigError(f"test classes absent from training: {unknown}")
    index = {name: i for i, name in enumerate(forest.class_names)}
    x = np.array([row.features.as_array() for row in test_set.rows])
    y = np.array([index[row.label] for row in test_set.rows], dtype=np.intp)
    proba = predict_proba_matrix(forest, x)
    preds = np.argmax(proba, axis=1)

    k = len(forest.class_names)
    confusion = np.zeros((k, k), dtype=np.int64)
    np.add.at(confusion, (y, preds), 1)
    accuracy = 100.0 * float(np.trace(confusion)) / y.size

    precision, recall = [], []
    for c in range(k):
        tp = confusion[c, c]
        col = confusion[:, c].sum()
        row = confusion[c, :].sum()
        precision.append(float(tp / col) if col else 0.0)
        recall.append(float(tp / row) if row else 0.0)

    aucs = []
    for c in range(k):
        positives = y == c
        if 0 < positives.sum() < y.size:
            aucs.append(binary_roc_auc(proba[:, c], positives))
    if not aucs:
        raise ConfigError("ROC-AUC undefined: test set has a single class")

    return EvalReport(
        accuracy=accuracy,
        roc_auc=float(np.mean(aucs)),
        confusion=confusion,
        class_names=list(forest.class_names),
        precision=precision,
        recall=recall,
        n_test=int(y.size),
        forest_description=forest.config.describe(),
    )


# ---------------------------------------------------------------------------
# Persistence


def _node_to_obj(node: _Node):
    if node.is_leaf:
        return {"counts": [int(c) for c in node.counts]}
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "left": _node_to_obj(node.left),
        "right": _node_to_obj(node.right),
    }


def _node_from_obj(obj) -> _Node:
    if "counts" in obj:
        return _Node(counts=np.array(obj["counts"], dtype=np.float64))
    return _Node(
        feature=int(obj["feature"]),
        threshold=float(obj["threshold"]),
        left=_node_from_obj(obj["left"]),
        right=_node_from_obj(obj["right"]),
    )


def save_forest(forest: TrainedForest, path) -> None:
    """Serialize to versioned JSON; reloading reproduces predictions exactly."""
    payload = {
        "format_version": FORMAT_VERSION,
        "class_names": forest.class_names,
        "n_features": forest.n_features,
        "config": asdict(forest.config),
        "trees": [_node_to_obj(t) for t in forest.trees],
    }
    Path(path).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")


def load_forest(path) -> TrainedForest:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    version = payload.get("format_version")
    if version != FORMAT_VERSION:
        raise ConfigError(f"unsupported model format version: {version}")
    return TrainedForest(
        trees=[_node_from_obj(t) for t in payload["trees"]],
        class_names=list(payload["class_names"]),
        config=ForestConfig(**payload["config"]),
        n_features=int(payload["n_features"]),
    )
