"""Local-lemma criteria: the weighted (asymmetric) form, the symmetric form,
and the closed-form criteria used by the application solvers.

Large binomials and factorial ratios are handled in log space with a 1e-9
relative tolerance on the boundary; for n <= 20 the exact rational path is
used instead.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .events import STANDARD, BadEvent, EventIndex, prob_omega_float
from .events import falling_factorial as falling

REL_TOL = 1e-9
EXACT_LIMIT = 20

WeightMap = Mapping[int, float]


def validate_weights(mu: WeightMap) -> None:
    for key, value in mu.items():
        if not (value >= 0 and math.isfinite(value)):
            raise ValueError(f"weight for event {key} must be finite and >= 0, got {value}")


@dataclass
class CriterionReport:
    satisfied: bool
    slack: dict[int, float]
    worst_event: int | None
    epsilon: float
    tolerance: float = REL_TOL
    rhs: dict[int, float] = field(default_factory=dict, repr=False)

    def summary(self) -> dict:
        return {
            "satisfied": self.satisfied,
            "worst_event": self.worst_event,
            "worst_slack": self.slack.get(self.worst_event) if self.worst_event is not None else None,
            "epsilon": self.epsilon,
            "events": len(self.slack),
        }

    def to_json(self, one_based: bool = True) -> dict:
        d = self.summary()
        off = 1 if one_based else 0
        d["slack"] = {str(k + off): v for k, v in sorted(self.slack.items())}
        if d["worst_event"] is not None:
            d["worst_event"] += off
        return d


def check_asymmetric(
    events: Sequence[BadEvent],
    sizes: Sequence[int],
    mu: WeightMap,
    mode: str = STANDARD,
    tol: float = REL_TOL,
) -> CriterionReport:
    """Evaluate ``μ(B) ≥ P(B)·∏_{B'~B}(1+μ(B'))`` for every event.

    ``tol`` is relative to the right-hand side. ``epsilon`` is the largest
    ε ≥ 0 with ``μ(B) ≥ (1+ε)·RHS(B)`` for all B, or -1 when unsatisfied.
    """
    validate_weights(mu)
    index = events if isinstance(events, EventIndex) else EventIndex(events)
    for e in index.events:
        if e.id not in mu:
            raise ValueError(f"missing weight for event {e.id}")
    slack: dict[int, float] = {}
    rhs_all: dict[int, float] = {}
    satisfied = True
    ratio = math.inf
    worst = None
    for e in index.events:
        rhs = prob_omega_float(e, sizes)
        for nb in index.neighborhood(e, mode):
            rhs *= 1.0 + mu[nb.id]
        s = mu[e.id] - rhs
        slack[e.id] = s
        rhs_all[e.id] = rhs
        if s < -tol * rhs:
            satisfied = False
        ratio = min(ratio, mu[e.id] / rhs)
        if worst is None or s / rhs < slack[worst] / rhs_all[worst]:
            worst = e.id
    if not satisfied:
        epsilon = -1.0
    elif ratio == math.inf:
        epsilon = math.inf
    else:
        epsilon = max(ratio - 1.0, 0.0)
    return CriterionReport(satisfied, slack, worst, epsilon, tol, rhs_all)


def fixed_point_weights(
    events: Sequence[BadEvent],
    sizes: Sequence[int],
    mode: str = STANDARD,
    max_iter: int = 100_000,
    tol: float = 1e-15,
) -> dict[int, float] | None:
    """Smallest μ with ``μ(B) = P(B)·∏_{B'~B}(1+μ(B'))`` (iteration from 0).

    Such μ sits exactly on the criterion boundary. Returns None when the
    iteration diverges, i.e. no weights satisfy the criterion.
    """
    index = events if isinstance(events, EventIndex) else EventIndex(events)
    probs = {e.id: prob_omega_float(e, sizes) for e in index.events}
    nbrs = {e.id: [b.id for b in index.neighborhood(e, mode)] for e in index.events}
    mu = {i: 0.0 for i in probs}
    for _ in range(max_iter):
        new = {}
        for i, p in probs.items():
            v = p
            for j in nbrs[i]:
                v *= 1.0 + mu[j]
            new[i] = v
        if any(v > 1e12 for v in new.values()):
            return None
        delta = max((abs(new[i] - mu[i]) for i in mu), default=0.0)
        mu = new
        if delta <= tol * max(1.0, max(mu.values(), default=0.0)):
            return mu
    return None


def check_symmetric(p: float, d: int) -> bool:
    """``e·p·(d+1) ≤ 1``."""
    if not 0 <= p <= 1 or d < 0:
        raise ValueError("need 0 <= p <= 1 and d >= 0")
    return math.e * p * (d + 1) <= 1 + 1e-12


def mu_from_x(x: float) -> float:
    """Convert the ``x(B) ∈ [0,1)`` form of the criterion to weights."""
    if not 0 <= x < 1:
        raise ValueError(f"x must lie in [0, 1), got {x}")
    return x / (1 - x)


def solve_alpha(P: float, c: float, m: int, tol: float = 1e-12) -> float | None:
    """Smallest α > 0 with ``α ≥ P·(1 + cα)^m``, or None if there is none."""
    if P <= 0 or c < 0 or m < 1:
        raise ValueError("need P > 0, c >= 0, m >= 1")
    if c == 0:
        return P
    if m == 1:
        return P / (1 - P * c) if P * c < 1 else None

    def f(a: float) -> float:
        return P * (1 + c * a) ** m - a

    # f is convex; its minimum on α ≥ 0 is at the stationary point
    base = 1.0 / (P * c * m)
    if base <= 1.0:
        return None
    hi = (base ** (1.0 / (m - 1)) - 1.0) / c
    if f(hi) > 0:
        return None
    lo = 0.0
    while hi - lo > tol * max(hi, 1e-300):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return hi


def log_binom(n: int, k: int) -> float:
    if k < 0 or k > n:
        return -math.inf
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _logsumexp(values: Sequence[float]) -> float:
    finite = [v for v in values if v != -math.inf]
    if not finite:
        return -math.inf
    top = max(finite)
    return top + math.log(sum(math.exp(v - top) for v in finite))


def szabo_lhs(n: int, s: int, r: int, delta: int) -> float:
    """Left-hand side of the partial-resampling s-transversal criterion."""
    if n <= EXACT_LIMIT:
        frac = Fraction(
            2 * r * n * math.comb(delta, r - 1) + math.comb(delta, r),
            math.comb(s, r) * falling(n, r),
        )
        return math.e * float(frac)
    log_terms = [
        math.log(2 * r * n) + log_binom(delta, r - 1),
        log_binom(delta, r),
    ]
    log_lhs = (
        1.0
        - log_binom(s, r)
        - (math.lgamma(n + 1) - math.lgamma(n - r + 1))
        + _logsumexp(log_terms)
    )
    return math.exp(log_lhs) if log_lhs > -700 else 0.0


def check_szabo(n: int, s: int, r: int, delta: int) -> bool:
    """``e·C(s,r)⁻¹·(n-r)!/n!·(2rn·C(Δ,r-1) + C(Δ,r)) ≤ 1``."""
    if not (1 <= r <= s) or delta < 0 or delta > n * n or r > n:
        raise ValueError("need 1 <= r <= s, r <= n and 0 <= delta <= n^2")
    return szabo_lhs(n, s, r, delta) <= 1 + REL_TOL


def max_szabo_delta(n: int, s: int, r: int | None = None) -> int:
    """Largest Δ ≤ n² passing :func:`check_szabo` (-1 if none)."""
    if r is None:
        r = math.isqrt(s - 1) + 1 if s > 1 else 1
    best = -1
    lo, hi = 0, n * n
    if not check_szabo(n, s, r, 0):
        return -1
    # the left side is increasing in Δ
    while lo <= hi:
        mid = (lo + hi) // 2
        if check_szabo(n, s, r, mid):
            best = mid
            lo = mid + 1
        else:
            hi = mid - 1
    return best


def packing_lhs(m1: int, m2: int, d1: int, d2: int) -> int:
    return (d1 + 1) * m2 + (d2 + 1) * m1


def check_packing(m1: int, m2: int, d1: int, d2: int, n: int, r: int) -> bool:
    """``(d1+1)·m2 + (d2+1)·m1 < C(n,r)/e`` (strict)."""
    if min(m1, m2, d1, d2, n, r) < 0:
        raise ValueError("arguments must be non-negative")
    lhs = packing_lhs(m1, m2, d1, d2)
    if lhs == 0:
        return r <= n
    if r > n:
        return False
    if n <= EXACT_LIMIT:
        return lhs * math.e < math.comb(n, r)
    return math.log(lhs) < log_binom(n, r) - 1.0 - REL_TOL


def latin_alpha(n: int, delta: int) -> float | None:
    """Root of ``α ≥ (1/(n(n-1)))·(1 + n(Δ-1)α)^4``, None when Δ is too large."""
    if n < 2:
        return None
    return solve_alpha(1.0 / (n * (n - 1)), n * max(delta - 1, 0), 4)


def strong_coloring_alpha(b: int, delta: int) -> float | None:
    """Root of ``α ≥ (1/b²)·(1 + bΔα)^4``."""
    return solve_alpha(1.0 / (b * b), b * delta, 4)


# Weights for conjugate transversals: μ_A·n⁴ and μ_B·n³.
CONJUGATE_MU_A = 2.83036
CONJUGATE_MU_B = 1.96163
CONJUGATE_RATIO = 0.027


def conjugate_criterion(n: int, delta: int) -> dict:
    """Evaluate the two polynomial inequalities behind conjugate transversals.

    Uses the fixed weights above and the worst-case neighbourhood sums
    ``t ≤ 2n³Δμ_A``, ``s ≤ n³Δμ_A``, ``b ≤ n²(Δ/2)μ_B``. The inequalities
    only hold for n large enough, so a finite-n failure is reported, not
    raised.
    """
    if n < 5:
        return {"satisfied": False, "ratio_ok": False, "reason": "n too small"}
    mu_a = CONJUGATE_MU_A / n**4
    mu_b = CONJUGATE_MU_B / n**3
    t = 2 * n**3 * delta * mu_a
    s = n**3 * delta * mu_a
    b = n**2 * (delta / 2) * mu_b
    rhs_a = (1 + t) ** 4 * (1 + b + s * b + s + s * s + s + s) ** 2 / falling(n, 4)
    rhs_b = (1 + t) ** 3 * (1 + b + s * b + s * b + s + s * s + s * s + s + s * s + s) / falling(n, 3)
    ok_a = mu_a >= rhs_a * (1 - REL_TOL)
    ok_b = mu_b >= rhs_b * (1 - REL_TOL)
    return {
        "satisfied": ok_a and ok_b,
        "ratio_ok": delta <= CONJUGATE_RATIO * n,
        "mu_a": mu_a,
        "mu_b": mu_b,
        "rhs_a": rhs_a,
        "rhs_b": rhs_b,
    }
