"""Source -> channel -> estimator chains: exact enumeration, Monte Carlo
simulation, and the certification harness that runs every applicable bound.

The chain is X ~ prior, Y = (Y_1..Y_n) conditionally i.i.d. given X through
the channel, Xhat = estimator(Y). Estimators always receive the observation
block as an n-tuple (scalars are wrapped for n = 1).
"""
from __future__ import annotations

import dataclasses
import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Any

import numpy as np

from .distributions import (
    DEFAULT_STATE_CAP,
    Channel,
    FiniteDistribution,
    JointDistribution,
    event_probability,
    joint_from_prior_and_channel,
)
from .divergences import (
    _kl_nats,
    _ln_base,
    _mi_nats_from_matrix,
    conditional_entropy,
)
from .errors import (
    DuplicateLabel,
    FanoError,
    InconsistentBounds,
    StateSpaceTooLarge,
)
from .relations import (
    DistanceRelation,
    Relation,
    ball_counts,
    equality_relation,
    relation_bounds,
)
from . import bounds as _bounds


@dataclass(frozen=True)
class MapEstimator:
    """Deterministic estimator: observation tuple -> reconstruction label."""

    mapping: dict
    output_labels: tuple

    def lookup(self, y_tuple: tuple):
        if y_tuple in self.mapping:
            return self.mapping[y_tuple]
        if len(y_tuple) == 1 and y_tuple[0] in self.mapping:
            return self.mapping[y_tuple[0]]
        raise FanoError(f"estimator: no value for observation block {y_tuple!r}")


@dataclass(frozen=True)
class MLEstimator:
    """Picks the source symbol with the largest channel likelihood of the
    observed block; ties go to the lowest source index."""


@dataclass(frozen=True)
class ChannelEstimator:
    """Randomized estimator given as a channel from observation blocks to
    reconstruction labels."""

    channel: Channel

    def row_index(self, y_tuple: tuple) -> int:
        ins = self.channel.input_outcomes
        try:
            return ins.index(y_tuple)
        except ValueError:
            pass
        if len(y_tuple) == 1:
            try:
                return ins.index(y_tuple[0])
            except ValueError:
                pass
        raise FanoError(f"estimator: channel has no row for observation block {y_tuple!r}")


@dataclass(frozen=True)
class Experiment:
    prior: FiniteDistribution
    channel: Channel
    estimator: Any
    relation: Relation
    n_samples: int = 1
    base: float = math.e

    def __post_init__(self):
        if self.prior.outcomes != self.channel.input_outcomes:
            raise DuplicateLabel(
                "experiment: prior outcomes must match channel inputs, in order"
            )
        if int(self.n_samples) < 1:
            raise FanoError(f"n: sample count must be >= 1, got {self.n_samples!r}")
        object.__setattr__(self, "n_samples", int(self.n_samples))
        _ln_base(self.base)


@dataclass(frozen=True)
class ChainSummary:
    """Quantities of one chain. Information fields are in the experiment's
    base. mi_xy is between the source and the whole observation block;
    mi_y1 is the single-use value. Data processing (mi_xxhat <= mi_xy) is
    asserted for exact summaries; empirical summaries carry plug-in values
    and are exempt.
    """

    joint_xxhat: JointDistribution
    p_rel: float
    mi_xy: float
    mi_y1: float
    mi_xxhat: float
    h_x_given_xhat: float
    beta: float
    exact: bool
    mc_stderr: float = 0.0

    def __post_init__(self):
        if self.exact and self.mi_xxhat > self.mi_xy + 1e-10:
            raise InconsistentBounds(
                "summary: reconstruction mutual information %r exceeds the "
                "observation value %r; data processing violated"
                % (self.mi_xxhat, self.mi_xy)
            )


def compute_beta(channel: Channel, base: float = math.e) -> float:
    """Largest KL divergence between two rows of the channel."""
    ln_b = _ln_base(base)
    worst = 0.0
    rows = [row.tolist() for row in channel.matrix]
    for a, b in itertools.permutations(rows, 2):
        worst = max(worst, _kl_nats(zip(a, b)))
    return worst if base == math.e else worst / ln_b


def _output_tuples(channel: Channel, n: int) -> tuple[np.ndarray, list]:
    """Index matrix (m^n x n) in row-major block order plus the tuple labels."""
    m = len(channel.output_outcomes)
    grids = np.meshgrid(*([np.arange(m)] * n), indexing="ij")
    T = np.stack(grids, axis=-1).reshape(-1, n)
    labels = [tuple(channel.output_outcomes[k] for k in row) for row in T.tolist()]
    return T, labels


def _block_weights(row: np.ndarray, n: int) -> np.ndarray:
    w = row
    for _ in range(n - 1):
        w = np.outer(w, row).ravel()
    return w


def _resolve_estimator(est, channel: Channel, T: np.ndarray, labels: list):
    """Returns (xhat_labels, xhat_index_array or None, stochastic_matrix or None)."""
    if isinstance(est, MapEstimator):
        idx_of = {lab: i for i, lab in enumerate(est.output_labels)}
        picks = np.empty(len(labels), dtype=np.intp)
        for j, lab in enumerate(labels):
            value = est.lookup(lab)
            try:
                picks[j] = idx_of[value]
            except KeyError:
                raise FanoError(
                    f"estimator: value {value!r} missing from output_labels"
                ) from None
        return est.output_labels, picks, None
    if isinstance(est, MLEstimator):
        with np.errstate(divide="ignore"):
            ln_rows = np.log(channel.matrix)
        ll = ln_rows[:, T].sum(axis=2)
        picks = np.argmax(ll, axis=0)
        return channel.input_outcomes, picks, None
    if isinstance(est, ChannelEstimator):
        E = np.empty((len(labels), len(est.channel.output_outcomes)))
        for j, lab in enumerate(labels):
            E[j] = est.channel.matrix[est.row_index(lab)]
        return est.channel.output_outcomes, None, E
    raise FanoError(f"estimator: unsupported estimator {est!r}")


def enumerate_chain(exp: Experiment, cap: int = DEFAULT_STATE_CAP) -> ChainSummary:
    """Exact chain quantities by enumerating every observation block."""
    nx = len(exp.prior)
    m = len(exp.channel.output_outcomes)
    n = exp.n_samples
    if nx * m ** n > cap:
        raise StateSpaceTooLarge(
            "n: chain state space %d * %d^%d exceeds the %d-state cap"
            % (nx, m, n, cap)
        )
    T, labels = _output_tuples(exp.channel, n)
    xhat_labels, picks, E = _resolve_estimator(exp.estimator, exp.channel, T, labels)
    k = len(xhat_labels)
    block = np.empty((nx, len(labels)))
    for i in range(nx):
        block[i] = _block_weights(exp.channel.matrix[i], n)
    W = np.empty((nx, k))
    prior_w = exp.prior.weights
    for i in range(nx):
        if picks is not None:
            W[i] = prior_w[i] * np.bincount(picks, weights=block[i], minlength=k)
        else:
            W[i] = prior_w[i] * (block[i] @ E)
    total = math.fsum(W.ravel().tolist())
    if total != 1.0 and abs(total - 1.0) <= 1e-9:
        W = W / total
    joint = JointDistribution(exp.prior.outcomes, xhat_labels, W)

    ln_b = _ln_base(exp.base)
    scale = (lambda v: v) if exp.base == math.e else (lambda v: v / ln_b)
    mi_xy = _mi_nats_from_matrix(prior_w[:, None] * block)
    joint1 = joint_from_prior_and_channel(exp.prior, exp.channel)
    mi_y1 = _mi_nats_from_matrix(np.asarray(joint1.weights))
    return ChainSummary(
        joint_xxhat=joint,
        p_rel=event_probability(joint, exp.relation),
        mi_xy=scale(mi_xy),
        mi_y1=scale(mi_y1),
        mi_xxhat=scale(_mi_nats_from_matrix(W)),
        h_x_given_xhat=conditional_entropy(joint, exp.base),
        beta=compute_beta(exp.channel, exp.base),
        exact=True,
    )


def _inverse_cdf(cum: np.ndarray, u: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(cum, u, side="right")
    return np.minimum(idx, len(cum) - 1)


def simulate_chain(exp: Experiment, trials: int, seed: int = 0) -> ChainSummary:
    """Monte Carlo chain summary from a counter-based stream.

    The empirical joint, event probability, and information fields are
    plug-in estimates; beta is exact (a channel property). mc_stderr is the
    binomial standard error of p_rel.
    """
    trials = int(trials)
    if trials < 1:
        raise FanoError(f"trials: must be >= 1, got {trials!r}")
    rng = np.random.Generator(np.random.Philox(key=[int(seed), 0]))
    nx = len(exp.prior)
    m = len(exp.channel.output_outcomes)
    n = exp.n_samples

    cum_prior = np.cumsum(exp.prior.weights)
    x_idx = _inverse_cdf(cum_prior, rng.random(trials))
    cum_rows = np.cumsum(exp.channel.matrix, axis=1)
    y = np.empty((trials, n), dtype=np.intp)
    for kk in range(n):
        u = rng.random(trials)
        for i in range(nx):
            mask = x_idx == i
            if mask.any():
                y[mask, kk] = _inverse_cdf(cum_rows[i], u[mask])

    est = exp.estimator
    if isinstance(est, MLEstimator):
        with np.errstate(divide="ignore"):
            ln_rows = np.log(exp.channel.matrix)
        ll = np.zeros((nx, trials))
        for kk in range(n):
            ll += ln_rows[:, y[:, kk]]
        xhat_idx = np.argmax(ll, axis=0)
        xhat_labels = exp.channel.input_outcomes
    else:
        out_labels = exp.channel.output_outcomes
        blocks = [tuple(out_labels[k] for k in row) for row in y.tolist()]
        if isinstance(est, MapEstimator):
            xhat_labels = est.output_labels
            idx_of = {lab: i for i, lab in enumerate(xhat_labels)}
            xhat_idx = np.array([idx_of[est.lookup(b)] for b in blocks], dtype=np.intp)
        elif isinstance(est, ChannelEstimator):
            xhat_labels = est.channel.output_outcomes
            cum_est = np.cumsum(est.channel.matrix, axis=1)
            u = rng.random(trials)
            xhat_idx = np.empty(trials, dtype=np.intp)
            for j, b in enumerate(blocks):
                xhat_idx[j] = _inverse_cdf(cum_est[est.row_index(b)], u[j:j + 1])[0]
        else:
            raise FanoError(f"estimator: unsupported estimator {est!r}")

    counts = np.zeros((nx, len(xhat_labels)))
    np.add.at(counts, (x_idx, xhat_idx), 1.0)
    W = counts / trials
    joint = JointDistribution(exp.prior.outcomes, xhat_labels, W)
    p_rel = event_probability(joint, exp.relation)
    stderr = math.sqrt(max(p_rel * (1.0 - p_rel), 0.0) / trials)

    counts_y1 = np.zeros((nx, m))
    np.add.at(counts_y1, (x_idx, y[:, 0]), 1.0)
    pair_counts = Counter(zip(x_idx.tolist(), map(tuple, y.tolist())))
    x_counts = Counter(x_idx.tolist())
    block_counts = Counter(map(tuple, y.tolist()))
    mi_xy = max(0.0, math.fsum(
        (c / trials) * (math.log(c / trials)
                        - math.log(x_counts[xi] / trials)
                        - math.log(block_counts[blk] / trials))
        for (xi, blk), c in pair_counts.items()))

    ln_b = _ln_base(exp.base)
    scale = (lambda v: v) if exp.base == math.e else (lambda v: v / ln_b)
    return ChainSummary(
        joint_xxhat=joint,
        p_rel=p_rel,
        mi_xy=scale(mi_xy),
        mi_y1=scale(_mi_nats_from_matrix(counts_y1 / trials)),
        mi_xxhat=scale(_mi_nats_from_matrix(W)),
        h_x_given_xhat=conditional_entropy(joint, exp.base),
        beta=compute_beta(exp.channel, exp.base),
        exact=False,
        mc_stderr=stderr,
    )


def certify(exp: Experiment, trials: int | None = None, seed: int = 0,
            tolerance: float = 1e-9, cap: int = DEFAULT_STATE_CAP) -> list:
    """Evaluate every applicable bound for the chain and return the reports.

    trials = None enumerates exactly (error past the state cap, suggesting
    trials). With trials set, the chain is simulated; pass/fail then uses
    exact model information quantities (single-use mutual information, beta)
    and the empirical event probability judged within tolerance plus three
    standard errors. Plug-in information estimates never gate pass/fail.
    """
    if trials is None:
        try:
            summary = enumerate_chain(exp, cap=cap)
        except StateSpaceTooLarge as exc:
            raise StateSpaceTooLarge(
                f"{exc}; rerun with trials set to use the Monte Carlo path"
            ) from None
    else:
        summary = simulate_chain(exp, trials, seed)

    base = exp.base
    n = exp.n_samples
    rel = exp.relation
    joint = summary.joint_xxhat
    rb = relation_bounds(rel, exp.prior, joint.col_outcomes)
    window_ok = rb.p_max > 0.0 and rb.p_min < 1.0 and rb.p_min + rb.p_max < 1.0
    reports: list = []

    def add(report, instance_id):
        reports.append(dataclasses.replace(report, instance_id=instance_id))

    if summary.exact:
        if window_ok:
            add(_bounds.fano_relation_bound(
                joint, rel, rb, observation_mi=summary.mi_xy, base=base,
                tolerance=tolerance), "relation-mi-reconstruction")
            add(_bounds.check_kl_diffusion(summary.p_rel, _bounds.BoundInputs(
                divergence=summary.mi_xy, alpha="kl", p_min=rb.p_min,
                p_max=rb.p_max, base=base), tolerance), "relation-mi-observation")
            add(_bounds.independent_samples_bound(
                exp.prior, exp.channel, n, exp.estimator, rel, rb, base=base,
                tolerance=tolerance, cap=cap), "samples-mi-per-use")
            if math.isinf(summary.beta):
                add(_bounds.BoundReport(
                    mode="check", bound_value=math.inf, observed=summary.p_rel,
                    slack=math.inf, solver_tolerance=tolerance,
                    notes="worst-case pairwise divergence is infinite; vacuous",
                    alpha="kl", p_min=rb.p_min, p_max=rb.p_max,
                    divergence=math.inf), "samples-worst-pair")
            else:
                add(_bounds.check_kl_diffusion(summary.p_rel, _bounds.BoundInputs(
                    divergence=n * summary.beta, alpha="kl", p_min=rb.p_min,
                    p_max=rb.p_max, base=base), tolerance), "samples-worst-pair")
        add(_bounds.entropy_version_bound(joint, rel, rb, base=base),
            "entropy-version")
        uniform = all(
            abs(float(w) - 1.0 / len(exp.prior)) <= 1e-12
            for w in exp.prior.weights)
        if (isinstance(rel, DistanceRelation) and uniform
                and joint.row_outcomes == joint.col_outcomes):
            add(_bounds.distance_fano_bound(joint, rel.rho, rel.t, base=base),
                "distance")
            m_size = len(joint.row_outcomes)
            _, n_max = ball_counts(rel.rho, rel.t, joint.row_outcomes)
            if 1 <= n_max < m_size:
                p_exceed = event_probability(
                    joint, lambda x, xhat: rel.rho(x, xhat) > rel.t)
                add(_bounds.mi_distance_bound(
                    summary.mi_xy, m_size, n_max, p_t=p_exceed, mode="check",
                    base=base, tolerance=tolerance), "distance-mi")
        return reports

    # Monte Carlo path: model-exact divergences, empirical event probability
    slack_window = tolerance + 3.0 * summary.mc_stderr
    note = ("observed probability is a Monte Carlo estimate "
            "(stderr %.17g); judged within 3 standard errors" % summary.mc_stderr)
    joint1 = joint_from_prior_and_channel(exp.prior, exp.channel)
    mi_y1_exact = _mi_nats_from_matrix(np.asarray(joint1.weights))
    if base != math.e:
        mi_y1_exact /= _ln_base(base)
    if window_ok:
        for div, name in ((n * mi_y1_exact, "samples-mi-per-use"),
                          (n * summary.beta, "samples-worst-pair")):
            if math.isinf(div):
                rep = _bounds.BoundReport(
                    mode="check", bound_value=math.inf, observed=summary.p_rel,
                    slack=math.inf, solver_tolerance=slack_window,
                    notes="divergence is infinite; vacuous. " + note,
                    alpha="kl", p_min=rb.p_min, p_max=rb.p_max, divergence=div)
            else:
                rep = _bounds.check_kl_diffusion(summary.p_rel, _bounds.BoundInputs(
                    divergence=div, alpha="kl", p_min=rb.p_min, p_max=rb.p_max,
                    base=base), slack_window)
                rep = dataclasses.replace(rep, notes=(rep.notes + "; " + note
                                                      if rep.notes else note))
            add(rep, name)
    return reports


# -- random instances -------------------------------------------------------

def random_experiment(seed: int, nx: int = 3, ny: int = 3, n: int = 1,
                      estimator_kind: str = "ml", base: float = math.e) -> Experiment:
    """Deterministic random chain: symmetric-Dirichlet prior and channel rows,
    equality relation, and an ML or random-map estimator."""
    rng = np.random.Generator(np.random.Philox(key=[int(seed), 0]))
    prior = FiniteDistribution(tuple(range(nx)), rng.dirichlet(np.ones(nx)))
    rows = np.vstack([rng.dirichlet(np.ones(ny)) for _ in range(nx)])
    channel = Channel(tuple(range(nx)), tuple(range(ny)), rows)
    if estimator_kind == "ml":
        est: Any = MLEstimator()
    elif estimator_kind == "map":
        blocks = itertools.product(range(ny), repeat=n)
        mapping = {blk: int(rng.integers(nx)) for blk in blocks}
        est = MapEstimator(mapping, tuple(range(nx)))
    else:
        raise FanoError(f"estimator_kind: expected 'ml' or 'map', got {estimator_kind!r}")
    return Experiment(prior=prior, channel=channel, estimator=est,
                      relation=equality_relation(), n_samples=n, base=base)


# -- JSON parsing -----------------------------------------------------------

def estimator_from_json(obj: dict):
    from .distributions import channel_from_json
    if not isinstance(obj, dict) or "kind" not in obj:
        raise FanoError('estimator: expected an object with a "kind" field')
    kind = obj["kind"]
    if kind == "ml":
        return MLEstimator()
    if kind == "map":
        pairs = obj.get("pairs")
        if pairs is None:
            raise FanoError('estimator: map estimator requires "pairs"')
        mapping = {}
        for key, value in pairs:
            key = _tuple_label(key)
            if not isinstance(key, tuple):
                key = (key,)
            mapping[key] = _tuple_label(value)
        if "outputs" in obj:
            outputs = tuple(_tuple_label(v) for v in obj["outputs"])
        else:
            seen = []
            for v in mapping.values():
                if v not in seen:
                    seen.append(v)
            outputs = tuple(seen)
        return MapEstimator(mapping, outputs)
    if kind == "channel":
        if "channel" not in obj:
            raise FanoError('estimator: channel estimator requires "channel"')
        return ChannelEstimator(channel_from_json(obj["channel"]))
    raise FanoError(f"estimator: unknown kind {kind!r}")


def _tuple_label(value):
    if isinstance(value, list):
        return tuple(_tuple_label(v) for v in value)
    return value


def experiment_from_json(obj: dict) -> Experiment:
    from .distributions import channel_from_json, distribution_from_json
    from .relations import relation_from_json
    for key in ("prior", "channel", "estimator", "relation"):
        if not isinstance(obj, dict) or key not in obj:
            raise FanoError(f'experiment: missing field "{key}"')
    return Experiment(
        prior=distribution_from_json(obj["prior"]),
        channel=channel_from_json(obj["channel"]),
        estimator=estimator_from_json(obj["estimator"]),
        relation=relation_from_json(obj["relation"]),
        n_samples=int(obj.get("n", 1)),
        base=float(obj.get("base", math.e)),
    )
