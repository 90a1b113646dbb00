"""Ranking dataset handling: SVMlight/LETOR parsing, normalization, synthesis.

The on-disk format is one document per line::

    <grade> qid:<id> <fid>:<val> <fid>:<val> ... # optional comment

with integer grades in [0, 4], 1-based feature ids, and documents grouped
by query id.  Missing feature ids are treated as 0.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

MIN_GRADE = 0
MAX_GRADE = 4


@dataclass
class Query:
    """One query: a document feature matrix plus relevance grades."""

    qid: str
    features: np.ndarray  # (n_docs, feature_dim)
    relevance: np.ndarray  # (n_docs,) integer grades in [0, 4]

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.relevance = np.asarray(self.relevance, dtype=np.int64)
        if self.features.ndim != 2 or self.features.shape[0] == 0:
            raise ValueError(f"query {self.qid}: features must be a non-empty 2-D matrix")
        if self.relevance.shape != (self.features.shape[0],):
            raise ValueError(f"query {self.qid}: relevance length does not match document count")
        if not np.all(np.isfinite(self.features)):
            raise ValueError(f"query {self.qid}: non-finite feature value")
        if self.relevance.min() < MIN_GRADE or self.relevance.max() > MAX_GRADE:
            raise ValueError(f"query {self.qid}: relevance grade outside [{MIN_GRADE}, {MAX_GRADE}]")

    @property
    def n_docs(self) -> int:
        return self.features.shape[0]


@dataclass
class Dataset:
    """Train/test query collections sharing one feature dimension."""

    train: list[Query] = field(default_factory=list)
    test: list[Query] = field(default_factory=list)
    feature_dim: int = 0

    def __post_init__(self):
        if self.feature_dim < 1:
            raise ValueError("feature_dim must be >= 1")
        for q in list(self.train) + list(self.test):
            if q.features.shape[1] != self.feature_dim:
                raise ValueError(
                    f"query {q.qid}: feature dimension {q.features.shape[1]} != {self.feature_dim}"
                )


def _parse_line(line: str, lineno: int):
    """Parse one data line into (grade, qid, {fid: value})."""
    comment = line.find("#")
    if comment >= 0:
        line = line[:comment]
    tokens = line.split()
    if not tokens:
        return None
    if len(tokens) < 2 or not tokens[1].startswith("qid:"):
        raise ValueError(f"line {lineno}: expected '<grade> qid:<id> ...', got {line.strip()!r}")
    try:
        grade = int(tokens[0])
    except ValueError:
        raise ValueError(f"line {lineno}: grade {tokens[0]!r} is not an integer") from None
    if grade < MIN_GRADE or grade > MAX_GRADE:
        raise ValueError(f"line {lineno}: grade {grade} outside [{MIN_GRADE}, {MAX_GRADE}]")
    qid = tokens[1][len("qid:"):]
    if not qid:
        raise ValueError(f"line {lineno}: empty query id")
    values: dict[int, float] = {}
    for token in tokens[2:]:
        fid_str, sep, val_str = token.partition(":")
        if not sep:
            raise ValueError(f"line {lineno}: malformed feature token {token!r}")
        try:
            fid = int(fid_str)
            val = float(val_str)
        except ValueError:
            raise ValueError(f"line {lineno}: malformed feature token {token!r}") from None
        if fid < 1:
            raise ValueError(f"line {lineno}: feature id must be >= 1, got {fid}")
        values[fid] = val
    return grade, qid, values


def parse_letor(path: str | os.PathLike, feature_dim: int | None = None) -> tuple[list[Query], int]:
    """Parse a LETOR/SVMlight file into queries grouped by qid.

    Documents keep file order within each query; queries are ordered by
    first appearance.  Returns ``(queries, feature_dim)`` where the
    dimension is the largest feature id seen unless an explicit
    ``feature_dim`` is given (useful to align train and test files).
    """
    rows = []
    max_fid = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parsed = _parse_line(line, lineno)
            if parsed is None:
                continue
            rows.append(parsed)
            if parsed[2]:
                max_fid = max(max_fid, max(parsed[2]))
    if not rows:
        raise ValueError(f"{path}: no documents found")
    dim = feature_dim if feature_dim is not None else max_fid
    if dim < 1:
        raise ValueError(f"{path}: could not infer a feature dimension")
    if max_fid > dim:
        raise ValueError(f"{path}: feature id {max_fid} exceeds feature_dim {dim}")

    grouped: dict[str, list[tuple[int, dict[int, float]]]] = {}
    for grade, qid, values in rows:
        grouped.setdefault(qid, []).append((grade, values))

    queries = []
    for qid, docs in grouped.items():
        features = np.zeros((len(docs), dim))
        grades = np.zeros(len(docs), dtype=np.int64)
        for i, (grade, values) in enumerate(docs):
            grades[i] = grade
            for fid, val in values.items():
                features[i, fid - 1] = val
        queries.append(Query(qid=qid, features=features, relevance=grades))
    return queries, dim


def write_letor(queries: list[Query], path: str | os.PathLike) -> None:
    """Serialize queries in the same format :func:`parse_letor` reads.

    Every feature id is written explicitly (zeros included) so the feature
    dimension round-trips, and floats use ``repr`` so values round-trip
    exactly.
    """
    with open(path, "w", encoding="utf-8") as fh:
        for q in queries:
            for grade, doc in zip(q.relevance, q.features):
                feats = " ".join(f"{fid + 1}:{float(v)!r}" for fid, v in enumerate(doc))
                fh.write(f"{int(grade)} qid:{q.qid} {feats}\n")


def normalize_query_level(queries: list[Query]) -> list[Query]:
    """Min-max normalize each feature to [0, 1] within each query.

    A feature that is constant within a query maps to 0.  Idempotent.
    """
    out = []
    for q in queries:
        lo = q.features.min(axis=0)
        hi = q.features.max(axis=0)
        span = hi - lo
        safe = np.where(span > 0, span, 1.0)
        normalized = np.where(span > 0, (q.features - lo) / safe, 0.0)
        out.append(Query(qid=q.qid, features=normalized, relevance=q.relevance.copy()))
    return out


def sample_query(dataset: Dataset, rng: np.random.Generator) -> Query:
    """Uniformly sample one training query."""
    if not dataset.train:
        raise ValueError("dataset has no training queries")
    return dataset.train[rng.integers(len(dataset.train))]


def synthetic_generating_weights(feature_dim: int, seed: int) -> np.ndarray:
    """The hidden weight vector a synthetic dataset's grades are derived from."""
    rng = np.random.default_rng(seed)
    v = rng.normal(size=feature_dim)
    return v / np.linalg.norm(v)


QUINTILE_GRADE_BINS = (0.2, 0.4, 0.6, 0.8)


def make_synthetic(
    num_queries: int,
    docs_per_query: int,
    feature_dim: int,
    seed: int,
    hardness: float = 0.0,
    grade_bins: tuple[float, ...] = QUINTILE_GRADE_BINS,
) -> Dataset:
    """Generate a learnable synthetic dataset, deterministic per seed.

    Draws a hidden unit weight vector ``w``, gives every document
    independent standard-normal features, and assigns grades by binning
    the hidden relevance score into within-query quantiles (``grade_bins``
    are the cumulative rank-fraction thresholds separating grades 0..4,
    equal quintiles by default).  With the default ``hardness`` of 0 the
    relevance score is exactly ``w @ d``, so a ranker using ``w`` orders
    every query ideally.  A positive ``hardness`` adds a quadratic
    interaction along a second hidden direction, which no linear model can
    express; this caps achievable NDCG below 1 and makes the benchmark
    behave like feature sets that only partially explain relevance.

    ``num_queries`` queries are generated for each of train and test.
    """
    if num_queries < 1 or docs_per_query < 1 or feature_dim < 1:
        raise ValueError("num_queries, docs_per_query and feature_dim must all be >= 1")
    if len(grade_bins) != 4 or list(grade_bins) != sorted(grade_bins):
        raise ValueError("grade_bins must be 4 increasing rank-fraction thresholds")
    if hardness and feature_dim < 2:
        raise ValueError("hardness > 0 needs feature_dim >= 2 for an orthogonal direction")
    rng = np.random.default_rng(seed)
    hidden = rng.normal(size=feature_dim)
    hidden /= np.linalg.norm(hidden)
    cross = None
    if hardness:
        cross = rng.normal(size=feature_dim)
        cross -= (cross @ hidden) * hidden
        cross /= np.linalg.norm(cross)
    bins = np.asarray(grade_bins)

    def gen_split(prefix: str) -> list[Query]:
        queries = []
        for i in range(num_queries):
            features = rng.normal(size=(docs_per_query, feature_dim))
            signal = features @ hidden
            if cross is not None:
                signal = signal + hardness * ((features @ cross) ** 2 - 1.0)
            ranks = np.argsort(np.argsort(signal))
            fractions = (ranks + 1) / docs_per_query
            grades = (fractions[:, None] > bins[None, :]).sum(axis=1)
            queries.append(Query(qid=f"{prefix}{i + 1}", features=features, relevance=grades))
        return queries

    return Dataset(train=gen_split("tr"), test=gen_split("te"), feature_dim=feature_dim)


def load_dataset(
    train_path: str | os.PathLike,
    test_path: str | os.PathLike,
    normalize: bool = True,
) -> Dataset:
    """Load train/test files, align feature dimensions, optionally normalize."""
    train, dim_train = parse_letor(train_path)
    test, dim_test = parse_letor(test_path)
    dim = max(dim_train, dim_test)
    if dim_train != dim:
        train, _ = parse_letor(train_path, feature_dim=dim)
    if dim_test != dim:
        test, _ = parse_letor(test_path, feature_dim=dim)
    if normalize:
        train = normalize_query_level(train)
        test = normalize_query_level(test)
    return Dataset(train=train, test=test, feature_dim=dim)
