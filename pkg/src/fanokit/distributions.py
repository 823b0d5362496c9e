"""Finite probability objects: distributions, joints, channels.

Outcome labels are opaque hashables and are never coerced; weights are float64
arrays frozen after validation. Sums are checked with math.fsum so the 1e-12
mass tolerance is meaningful even for hundreds of atoms.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateLabel,
    NegativeWeight,
    StateSpaceTooLarge,
    SumNotOne,
)

Label = Hashable

MASS_TOLERANCE = 1e-12
DEFAULT_STATE_CAP = 10 ** 6


def _check_labels(labels: Iterable[Label], what: str) -> tuple:
    out = tuple(labels)
    if len(set(out)) != len(out):
        raise DuplicateLabel(f"{what}: outcome labels must be distinct")
    return out


def _check_weights(weights, what: str, expect_total: float = 1.0) -> np.ndarray:
    arr = np.array(weights, dtype=np.float64)
    if arr.ndim != 1:
        raise NegativeWeight(f"{what}: weights must be a flat sequence")
    if not np.all(np.isfinite(arr)):
        raise NegativeWeight(f"{what}: weights must be finite")
    if np.any(arr < 0):
        raise NegativeWeight(f"{what}: weights must be nonnegative")
    total = math.fsum(arr.tolist())
    if abs(total - expect_total) > MASS_TOLERANCE:
        raise SumNotOne(f"{what}: weights sum to {total!r}, expected {expect_total}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class FiniteDistribution:
    """Probability distribution on a finite ordered outcome set."""

    outcomes: tuple
    weights: np.ndarray
    _index: dict = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        outcomes = _check_labels(self.outcomes, "distribution")
        weights = _check_weights(self.weights, "distribution")
        if len(outcomes) != len(weights):
            raise NegativeWeight(
                "distribution: %d outcomes but %d weights"
                % (len(outcomes), len(weights))
            )
        if len(outcomes) == 0:
            raise SumNotOne("distribution: outcome set must be nonempty")
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "_index", {x: i for i, x in enumerate(outcomes)})

    def __len__(self) -> int:
        return len(self.outcomes)

    def index(self, label: Label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise DuplicateLabel(f"distribution: unknown outcome {label!r}") from None

    def probability(self, label: Label) -> float:
        return float(self.weights[self.index(label)])

    def support(self) -> tuple:
        """Outcomes with strictly positive weight."""
        return tuple(x for x, w in zip(self.outcomes, self.weights) if w > 0)

    def to_json_obj(self) -> dict:
        return {"outcomes": list(self.outcomes), "weights": list(map(float, self.weights))}


def make_distribution(labels: Sequence[Label], weights: Sequence[float],
                      renormalize: bool = False) -> FiniteDistribution:
    """Build a distribution, optionally scaling weights to unit mass."""
    if renormalize:
        arr = [float(w) for w in weights]
        if any(w < 0 or not math.isfinite(w) for w in arr):
            raise NegativeWeight("weights: must be finite and nonnegative")
        total = math.fsum(arr)
        if total <= 0:
            raise SumNotOne("weights: total mass must be positive to renormalize")
        weights = [w / total for w in arr]
    return FiniteDistribution(tuple(labels), np.array(weights, dtype=np.float64))


def uniform_distribution(labels: Sequence[Label]) -> FiniteDistribution:
    labels = tuple(labels)
    if not labels:
        raise SumNotOne("uniform distribution needs at least one outcome")
    return FiniteDistribution(labels, np.full(len(labels), 1.0 / len(labels)))


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Joint distribution on a product of two finite outcome sets."""

    row_outcomes: tuple
    col_outcomes: tuple
    weights: np.ndarray

    def __post_init__(self):
        rows = _check_labels(self.row_outcomes, "joint rows")
        cols = _check_labels(self.col_outcomes, "joint cols")
        arr = np.array(self.weights, dtype=np.float64)
        if arr.shape != (len(rows), len(cols)):
            raise NegativeWeight(
                "joint: weight matrix shape %r does not match %d x %d labels"
                % (arr.shape, len(rows), len(cols))
            )
        if not np.all(np.isfinite(arr)):
            raise NegativeWeight("joint: weights must be finite")
        if np.any(arr < 0):
            raise NegativeWeight("joint: weights must be nonnegative")
        total = math.fsum(arr.ravel().tolist())
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise SumNotOne(f"joint: weights sum to {total!r}, expected 1")
        arr.flags.writeable = False
        object.__setattr__(self, "row_outcomes", rows)
        object.__setattr__(self, "col_outcomes", cols)
        object.__setattr__(self, "weights", arr)

    def row_marginal(self) -> FiniteDistribution:
        w = np.array([math.fsum(row.tolist()) for row in self.weights])
        return FiniteDistribution(self.row_outcomes, w)

    def col_marginal(self) -> FiniteDistribution:
        w = np.array([math.fsum(col.tolist()) for col in self.weights.T])
        return FiniteDistribution(self.col_outcomes, w)

    def probability(self, row: Label, col: Label) -> float:
        i = self.row_outcomes.index(row)
        j = self.col_outcomes.index(col)
        return float(self.weights[i, j])

    def to_json_obj(self) -> dict:
        return {
            "rows": list(self.row_outcomes),
            "cols": list(self.col_outcomes),
            "weights": [list(map(float, row)) for row in self.weights],
        }


def marginals(joint: JointDistribution) -> tuple[FiniteDistribution, FiniteDistribution]:
    return joint.row_marginal(), joint.col_marginal()


def product_of_marginals(joint: JointDistribution) -> JointDistribution:
    """Independent coupling with the same marginals."""
    r, c = marginals(joint)
    return JointDistribution(joint.row_outcomes, joint.col_outcomes,
                             np.outer(r.weights, c.weights))


def joint_from_prior_and_channel(prior: FiniteDistribution, channel: "Channel") -> JointDistribution:
    """P(x, y) = prior(x) * channel(y | x); prior labels must match channel inputs."""
    if prior.outcomes != channel.input_outcomes:
        raise DuplicateLabel("prior outcomes must match channel inputs, in order")
    return JointDistribution(prior.outcomes, channel.output_outcomes,
                             prior.weights[:, None] * channel.matrix)


def event_probability(dist, predicate: Callable[..., bool]) -> float:
    """Mass of the event selected by the predicate.

    For a FiniteDistribution the predicate takes one label; for a
    JointDistribution it takes (row_label, col_label).
    """
    if isinstance(dist, FiniteDistribution):
        picked = [float(w) for x, w in zip(dist.outcomes, dist.weights) if predicate(x)]
    elif isinstance(dist, JointDistribution):
        picked = [
            float(dist.weights[i, j])
            for i, x in enumerate(dist.row_outcomes)
            for j, y in enumerate(dist.col_outcomes)
            if predicate(x, y)
        ]
    else:
        raise TypeError("event_probability expects a distribution or joint")
    return min(math.fsum(picked), 1.0)


@dataclass(frozen=True, eq=False)
class Channel:
    """Row-stochastic transition kernel between finite outcome sets."""

    input_outcomes: tuple
    output_outcomes: tuple
    matrix: np.ndarray

    def __post_init__(self):
        ins = _check_labels(self.input_outcomes, "channel inputs")
        outs = _check_labels(self.output_outcomes, "channel outputs")
        arr = np.array(self.matrix, dtype=np.float64)
        if arr.shape != (len(ins), len(outs)):
            raise NegativeWeight(
                "channel: matrix shape %r does not match %d x %d labels"
                % (arr.shape, len(ins), len(outs))
            )
        for i, row in enumerate(arr):
            _check_weights(row.copy(), f"channel row {ins[i]!r}")
        if not arr.flags.writeable:
            arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "input_outcomes", ins)
        object.__setattr__(self, "output_outcomes", outs)
        object.__setattr__(self, "matrix", arr)

    def row(self, label: Label) -> FiniteDistribution:
        i = self.input_outcomes.index(label)
        return FiniteDistribution(self.output_outcomes, self.matrix[i].copy())

    def to_json_obj(self) -> dict:
        return {
            "inputs": list(self.input_outcomes),
            "outputs": list(self.output_outcomes),
            "rows": [list(map(float, row)) for row in self.matrix],
        }


def product_channel(channel: Channel, n: int, cap: int = DEFAULT_STATE_CAP) -> Channel:
    """n-fold memoryless extension; output labels are n-tuples.

    n = 1 returns the channel unchanged (original labels, not 1-tuples).
    """
    if n < 1:
        raise StateSpaceTooLarge("n: number of uses must be >= 1")
    if n == 1:
        return channel
    m = len(channel.output_outcomes)
    if m ** n > cap:
        raise StateSpaceTooLarge(
            "n: product output space %d^%d exceeds the %d-state cap" % (m, n, cap)
        )
    outputs = tuple(itertools.product(channel.output_outcomes, repeat=n))
    rows = np.empty((len(channel.input_outcomes), m ** n))
    for i, base_row in enumerate(channel.matrix):
        w = base_row
        for _ in range(n - 1):
            w = np.outer(w, base_row).ravel()
        rows[i] = w
    return Channel(channel.input_outcomes, outputs, rows)


# -- JSON parsing -----------------------------------------------------------

def _label_from_json(value: Any) -> Label:
    if isinstance(value, list):
        return tuple(_label_from_json(v) for v in value)
    return value


def distribution_from_json(obj: dict) -> FiniteDistribution:
    if not isinstance(obj, dict) or "outcomes" not in obj or "weights" not in obj:
        raise SumNotOne('distribution: expected {"outcomes": [...], "weights": [...]}')
    labels = [_label_from_json(x) for x in obj["outcomes"]]
    return make_distribution(labels, obj["weights"])


def joint_from_json(obj: dict) -> JointDistribution:
    for key in ("rows", "cols", "weights"):
        if not isinstance(obj, dict) or key not in obj:
            raise SumNotOne('joint: expected {"rows", "cols", "weights"}')
    rows = tuple(_label_from_json(x) for x in obj["rows"])
    cols = tuple(_label_from_json(x) for x in obj["cols"])
    return JointDistribution(rows, cols, np.array(obj["weights"], dtype=np.float64))


def channel_from_json(obj: dict) -> Channel:
    for key in ("inputs", "outputs", "rows"):
        if not isinstance(obj, dict) or key not in obj:
            raise SumNotOne('channel: expected {"inputs", "outputs", "rows"}')
    ins = tuple(_label_from_json(x) for x in obj["inputs"])
    outs = tuple(_label_from_json(x) for x in obj["outputs"])
    return Channel(ins, outs, np.array(obj["rows"], dtype=np.float64))
