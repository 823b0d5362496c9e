"""Exhaustive and targeted verification harnesses.

The sweep enumerates every rational-grid distribution pair, every nontrivial
event, both admissible occupancy windows, and every configured order, then
checks the diffusion bounds through the same evaluators the library exposes.
A violation is a signed excess (observed - bound) above tolerance, in nats.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .bounds import _kl_rhs_nats, _renyi_rhs_nats
from .distributions import FiniteDistribution
from .divergences import _kl_nats, _renyi_nats, kl_divergence
from .errors import GridTooLarge, NumericalInstability

MAX_SWEEP_INSTANCES = 5_000_000


@dataclass(frozen=True)
class SweepSpec:
    outcome_counts: tuple = (2, 3, 4)
    weight_grid_denominator: int = 8
    alphas: tuple = (0.25, 0.5, 2.0, 4.0)
    tolerance: float = 1e-9
    seed: int = 0


@dataclass
class SweepSummary:
    instances: int
    violations: int
    max_violation: float
    worst_instance: dict | None
    elapsed_ms: float

    def to_json_obj(self, include_timing: bool = True) -> dict:
        obj = {
            "instances": self.instances,
            "violations": self.violations,
            "max_violation": self.max_violation,
            "worst_instance": self.worst_instance,
        }
        if include_timing:
            obj["elapsed_ms"] = self.elapsed_ms
        return obj


def _compositions(total: int, parts: int, minimum: int):
    """Ordered integer compositions of `total` into `parts` parts >= minimum."""
    if parts == 1:
        if total >= minimum:
            yield (total,)
        return
    for first in range(minimum, total - minimum * (parts - 1) + 1):
        for rest in _compositions(total - first, parts - 1, minimum):
            yield (first,) + rest


def _planned_instances(spec: SweepSpec) -> int:
    d = spec.weight_grid_denominator
    total = 0
    for k in spec.outcome_counts:
        n_p = math.comb(d + k - 1, k - 1)
        n_q = math.comb(d - 1, k - 1)
        events = 2 ** k - 2
        total += n_p * n_q * events * 2 * (len(spec.alphas) + 1)
    return total


def sweep_diffusion(spec: SweepSpec,
                    max_instances: int = MAX_SWEEP_INSTANCES) -> SweepSummary:
    """Grid sweep of the diffusion bounds.

    For each pair (P on the full grid, Q on the full-support grid) and each
    proper nonempty event E, two occupancy windows are tried: the tight one
    (Q(E), Q(E)) when 2 Q(E) < 1, and the slack one (0, Q(E)). Each window is
    checked at every configured order plus the KL form.
    """
    d = spec.weight_grid_denominator
    if d < 1:
        raise GridTooLarge(f"weight_grid_denominator: must be >= 1, got {d!r}")
    planned = _planned_instances(spec)
    if planned > max_instances:
        raise GridTooLarge(
            f"sweep: {planned} planned instances exceed the cap {max_instances}"
        )
    for a in spec.alphas:
        if a == 1.0 or a <= 0.0 or math.isinf(a):
            raise NumericalInstability(
                f"alphas: sweep orders must be finite, positive and != 1, got {a!r}"
            )

    started = time.perf_counter()
    instances = 0
    violations = 0
    max_excess = -math.inf
    worst: dict | None = None

    for k in sorted(spec.outcome_counts):
        masks = [m for m in range(1, 2 ** k - 1)]
        mask_bits = {m: [i for i in range(k) if m >> i & 1] for m in masks}
        for p_parts in _compositions(d, k, 0):
            p_vec = [a / d for a in p_parts]
            for q_parts in _compositions(d, k, 1):
                q_vec = [a / d for a in q_parts]
                atoms = list(zip(p_vec, q_vec))
                divs = [("kl", None, _kl_nats(atoms))]
                divs += [(a, a, _renyi_nats(atoms, a)) for a in spec.alphas]
                for mask in masks:
                    bits = mask_bits[mask]
                    p_event = math.fsum(p_vec[i] for i in bits)
                    q_event = math.fsum(q_vec[i] for i in bits)
                    windows = []
                    if q_event + q_event < 1.0:
                        windows.append(("tight", q_event, q_event))
                    windows.append(("slack", 0.0, q_event))
                    for tag, p_min, p_max in windows:
                        for alpha_key, alpha, div in divs:
                            if alpha is None:
                                rhs = _kl_rhs_nats(div, p_event, p_min, p_max)
                            else:
                                rhs = _renyi_rhs_nats(div, alpha, p_event,
                                                      p_min, p_max)
                            excess = p_event - rhs
                            instances += 1
                            if excess > spec.tolerance:
                                violations += 1
                            if excess > max_excess:
                                max_excess = excess
                                worst = {
                                    "id": "k%d-p%s-q%s-e%d-%s-a%s" % (
                                        k,
                                        ".".join(map(str, p_parts)),
                                        ".".join(map(str, q_parts)),
                                        mask, tag, alpha_key),
                                    "k": k,
                                    "p": p_vec,
                                    "q": q_vec,
                                    "event": bits,
                                    "p_min": p_min,
                                    "p_max": p_max,
                                    "alpha": alpha_key,
                                    "p_event": p_event,
                                    "bound_value": rhs,
                                    "excess": excess,
                                }
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    return SweepSummary(
        instances=instances,
        violations=violations,
        max_violation=max_excess,
        worst_instance=worst,
        elapsed_ms=elapsed_ms,
    )


@dataclass(frozen=True)
class SupportCheck:
    passed: bool
    slack: float
    divergence: float
    support_term: float


def verify_support_bound(P: FiniteDistribution, Q: FiniteDistribution,
                         tolerance: float = 1e-12) -> SupportCheck:
    """KL(P, Q) >= -ln Q(supp P); slack is LHS - RHS, tight for point masses."""
    lhs = kl_divergence(P, Q)
    q_mass = math.fsum(
        q for p, q in zip(P.weights.tolist(), Q.weights.tolist()) if p > 0)
    rhs = math.inf if q_mass <= 0.0 else max(0.0, -math.log(min(q_mass, 1.0)))
    if math.isinf(lhs) and math.isinf(rhs):
        slack = 0.0
    else:
        slack = lhs - rhs
    return SupportCheck(passed=slack >= -tolerance, slack=slack,
                        divergence=lhs, support_term=rhs)


@dataclass(frozen=True)
class PowerSumCheck:
    passed: bool
    max_violation: float
    points: int


def verify_power_sum(alphas: Iterable[float] = (0.25, 0.5, 1.0, 2.0, 4.0),
                     grid_points: int = 1001) -> PowerSumCheck:
    """p^a + (1-p)^a is >= 1 for a <= 1, <= 1 for a >= 1, exactly 1 at a = 1,
    on a uniform p grid over [0, 1]."""
    worst = 0.0
    count = 0
    step = 1.0 / (grid_points - 1)
    for a in alphas:
        for i in range(grid_points):
            p = i * step
            s = p ** a + (1.0 - p) ** a
            count += 1
            if a == 1.0:
                worst = max(worst, abs(s - 1.0))
            elif a < 1.0:
                worst = max(worst, 1.0 - s)
            else:
                worst = max(worst, s - 1.0)
    return PowerSumCheck(passed=worst <= 0.0, max_violation=worst, points=count)


@dataclass(frozen=True)
class LimitRow:
    k: int
    alpha: float
    bound_value: float
    gap: float


@dataclass(frozen=True)
class LimitTable:
    rows: tuple
    kl_value: float
    decreasing: bool
    converged: bool


def verify_limit(P: FiniteDistribution, Q: FiniteDistribution,
                 event: Callable, p_min: float, p_max: float,
                 k_max: int = 6, side: str = "below",
                 tolerance: float = 1e-4) -> LimitTable:
    """Convergence of the order-alpha bound to the KL bound as the order
    approaches 1 through alpha_k = 1 -/+ 10^-k.

    Raises NumericalInstability for orders within 1e-9 of 1; the evaluator
    itself relies on expm1 so the admissible range is stable.
    """
    if side not in ("below", "above"):
        raise NumericalInstability(f"side: expected 'below' or 'above', got {side!r}")
    from .divergences import renyi_divergence

    p_event = math.fsum(
        w for x, w in zip(P.outcomes, P.weights.tolist()) if event(x))
    kl_rhs = _kl_rhs_nats(kl_divergence(P, Q), p_event, p_min, p_max)
    rows = []
    for k in range(1, k_max + 1):
        offset = 10.0 ** (-k)
        alpha = 1.0 - offset if side == "below" else 1.0 + offset
        if abs(alpha - 1.0) < 1e-9:
            raise NumericalInstability(
                f"k: order 1 {'-' if side == 'below' else '+'} 1e-{k} is inside "
                "the 1e-9 band around 1; the evaluation is not meaningful there"
            )
        div = renyi_divergence(P, Q, alpha)
        rhs = _renyi_rhs_nats(div, alpha, p_event, p_min, p_max)
        rows.append(LimitRow(k=k, alpha=alpha, bound_value=rhs,
                             gap=abs(rhs - kl_rhs)))
    # judged from the second row on: at the coarsest order the below-one
    # correction factor can leave the value on the far side of the limit,
    # so the first gap is not comparable with the rest
    decreasing = all(rows[i + 1].gap <= rows[i].gap + 1e-15
                     for i in range(1, len(rows) - 1))
    converged = bool(rows) and rows[-1].gap <= tolerance
    return LimitTable(rows=tuple(rows), kl_value=kl_rhs,
                      decreasing=decreasing, converged=converged)
