"""Closed-form and solver-based VC-dimension bounds for 1NN(d, m).

``lower_bound`` collects the constructive lower bounds; the upper bounds
come from solving ``2^m * n^q = 2^n`` for its largest real root via the
W_{-1} branch of the Lambert W function, plus a looser closed form that
avoids special functions. All solver math is done in natural logs; the
single base-2 conversion constant is ``LN2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NumericalError, UnsupportedParametersError

# The one natural-log <-> base-2 conversion constant used by the solvers.
LN2 = math.log(2.0)

# Supported parameter grid; outside it, operations raise rather than
# extrapolate.
D_MIN, D_MAX = 2, 64
M_MIN, M_MAX = 3, 10**6

# Convention constant for the agnostic-PAC sample-size estimate. This is
# plumbing, not a sharp constant; it only fixes the scale of the estimate.
DEFAULT_PAC_CONSTANT = 4.0

_LAMBERT_MAX_ITER = 100
_LAMBERT_RTOL = 1e-12
_TIGHT_RTOL = 1e-9  # relative residual, base-2 log space


def _require_grid(d: int, m: int) -> None:
    if not (isinstance(d, (int, np.integer)) and isinstance(m, (int, np.integer))):
        raise UnsupportedParametersError("d and m must be integers")
    if not (D_MIN <= d <= D_MAX):
        raise UnsupportedParametersError(f"d={d} outside supported range [{D_MIN}, {D_MAX}]")
    if not (M_MIN <= m <= M_MAX):
        raise UnsupportedParametersError(f"m={m} outside supported range [{M_MIN}, {M_MAX}]")


def lower_bound(d: int, m: int) -> int:
    """Best constructive lower bound for the VC dimension of 1NN(d, m).

    d * m + 2 - d in general; 2 * m + 1 in the plane for m >= 4. At
    (d, m) = (2, 3) the value 6 is exact.
    """
    _require_grid(d, m)
    best = d * m + 2 - d
    if d == 2 and m >= 4:
        best = max(best, 2 * m + 1)
    return best


def shatter_q(d: int, m: int) -> float:
    """Exponent q of the shatter-coefficient bound 2^m * n^q."""
    _require_grid(d, m)
    if d == 2:
        return float(9 * (m - 2))
    return float((d + 1) * m * (m - 1) / 2)


def chatzigeorgiou_seed(u) -> np.ndarray | float:
    """Closed-form lower bound -1 - sqrt(2u) - u for W_{-1}(-e^(-u-1)), u > 0.

    Strict for all u > 0; used to seed the Halley iteration on-branch.
    """
    u = np.asarray(u, dtype=np.float64)
    out = -1.0 - np.sqrt(2.0 * u) - u
    return out if out.ndim else float(out)


def _lambert_wm1_array(y: np.ndarray) -> np.ndarray:
    """W_{-1}(y) for y in [-1/e, 0), elementwise."""
    y = np.asarray(y, dtype=np.float64)
    if np.any(y >= 0.0):
        raise InvalidInputError("lambert_wm1 requires y < 0")
    # u >= 0 parameterises y = -exp(-u - 1); allow a few ulps of slack at
    # the branch point.
    u = -1.0 - np.log(-y)
    if np.any(u < -1e-12):
        raise InvalidInputError("lambert_wm1 requires y >= -1/e")
    u = np.maximum(u, 0.0)

    # Solve g(t) = t - log(t) - (1 + u) = 0 for t = -w >= 1, seeded from
    # above by the closed-form bound; Halley steps with a Newton fallback
    # whenever a step would leave the branch.
    t = 1.0 + np.sqrt(2.0 * u) + u
    for _ in range(_LAMBERT_MAX_ITER):
        g = t - np.log(t) - 1.0 - u
        gp = (t - 1.0) / t
        gpp = 1.0 / (t * t)
        denom = 2.0 * gp * gp - g * gpp
        with np.errstate(divide="ignore", invalid="ignore"):
            halley = np.where(denom != 0.0, 2.0 * g * gp / denom, 0.0)
            newton = np.where(gp != 0.0, g / gp, 0.0)
        step = np.where(t - halley > 1.0, halley, newton)
        t_next = np.maximum(t - step, 1.0)
        if np.all(np.abs(t_next - t) <= 1e-16 * t_next):
            t = t_next
            break
        t = t_next
    g = t - np.log(t) - 1.0 - u
    # |w e^w - y| / |y| = |exp(-g) - 1|
    resid = np.abs(np.expm1(-g))
    if np.any(resid > _LAMBERT_RTOL):
        worst = float(np.max(resid))
        raise NumericalError(f"lambert_wm1 failed to converge: residual {worst:.3e}")
    return -t


def lambert_wm1(y: float) -> float:
    """The W_{-1} branch of the Lambert W function.

    Solves w * e^w = y for w <= -1, for y in [-1/e, 0). Relative residual
    is at most 1e-12.
    """
    return float(_lambert_wm1_array(np.array([y]))[0])


def _tight_upper_real_array(d: int, ms: np.ndarray) -> np.ndarray:
    ms = np.asarray(ms, dtype=np.float64)
    q = np.where(d == 2, 9.0 * (ms - 2.0), (d + 1) * ms * (ms - 1.0) / 2.0)
    y = -(LN2 / q) * np.exp2(-ms / q)
    w = _lambert_wm1_array(y)
    return -(q / LN2) * w


def tight_upper_curve(d: int, ms) -> np.ndarray:
    """Vectorised real-valued tight upper bound over an array of m values."""
    ms = np.asarray(ms)
    for m in (int(ms.min()), int(ms.max())):
        _require_grid(d, m)
    return _tight_upper_real_array(d, ms)


def upper_bound_tight(d: int, m: int) -> tuple[float, int]:
    """Tight upper bound: the largest real n solving 2^m * n^q = 2^n.

    Returns ``(n_star, floor(n_star))``. The integer part is the tightest
    valid integer bound, since the VC dimension is an integer and every
    integer beyond n_star fails 2^m * n^q >= 2^n. Verifies the defining
    equation to 1e-9 relative in base-2 log space and that floor(n_star)
    is the largest integer crossing.
    """
    _require_grid(d, m)
    q = shatter_q(d, m)
    n_star = float(_tight_upper_real_array(d, np.array([m], dtype=np.float64))[0])
    resid = abs(m + q * math.log2(n_star) - n_star) / n_star
    if resid > _TIGHT_RTOL:
        raise NumericalError(
            f"tight upper bound residual {resid:.3e} exceeds {_TIGHT_RTOL:.0e} at (d={d}, m={m})"
        )

    def crossing(n: int) -> bool:
        return m + q * math.log2(n) >= n

    n_int = math.floor(n_star)
    if crossing(n_int + 1):
        n_int += 1
    elif not crossing(n_int):
        n_int -= 1
    if not (crossing(n_int) and not crossing(n_int + 1)):
        raise NumericalError(f"integer crossing inconsistent at (d={d}, m={m})")
    return n_star, n_int


def loose_upper_curve(d: int, ms) -> np.ndarray:
    """Vectorised loose upper bound over an array of m values."""
    ms = np.asarray(ms, dtype=np.float64)
    for m in (int(ms.min()), int(ms.max())):
        _require_grid(d, m)
    q = np.where(d == 2, 9.0 * (ms - 2.0), (d + 1) * ms * (ms - 1.0) / 2.0)
    qp = q / LN2
    inner = ms / qp + np.log(qp) - 1.0
    if np.any(inner <= 0.0):
        raise NumericalError("loose bound undefined: m/q' + log q' - 1 <= 0")
    return qp * (np.sqrt(2.0 * inner) + ms / qp + np.log(qp))


def upper_bound_loose(d: int, m: int) -> float:
    """Looser closed-form upper bound q' (sqrt(2(m/q' + log q' - 1)) + m/q' + log q').

    q' = q / ln 2; natural logarithms throughout. Always at least the
    tight bound, and asymptotically ~ q' log q'.
    """
    _require_grid(d, m)
    return float(loose_upper_curve(d, np.array([m], dtype=np.float64))[0])


def shatter_coefficient_bound_log2(d: int, m: int, n: int) -> float:
    """log2 of the shatter-coefficient bound 2^m * n^q."""
    _require_grid(d, m)
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    return m + shatter_q(d, m) * math.log2(n)


def shatter_coefficient_bound(d: int, m: int, n: int) -> float:
    """The shatter-coefficient bound 2^m * n^q (may overflow to inf)."""
    log2_val = shatter_coefficient_bound_log2(d, m, n)
    if log2_val > 1023:
        return math.inf
    return 2.0 ** log2_val


def sample_size_estimate(
    vc: int, epsilon: float, delta: float, constant: float = DEFAULT_PAC_CONSTANT
) -> float:
    """Agnostic-PAC style training-set size estimate C (vc + ln(1/delta)) / eps^2.

    The constant is a documented convention (see DEFAULT_PAC_CONSTANT);
    only the scaling in vc, epsilon and delta is meaningful.
    """
    if vc < 1:
        raise InvalidInputError("vc must be >= 1")
    if not 0.0 < epsilon < 1.0:
        raise InvalidInputError("epsilon must be in (0, 1)")
    if not 0.0 < delta < 1.0:
        raise InvalidInputError("delta must be in (0, 1)")
    return constant * (vc + math.log(1.0 / delta)) / (epsilon * epsilon)


@dataclass(frozen=True)
class BoundsReport:
    """All bounds for one (d, m), plus solver diagnostics."""

    d: int
    m: int
    lower: int
    q: float
    upper_tight_real: float
    upper_tight: int
    upper_loose: float
    solver_residual: float

    def __post_init__(self):
        if self.lower > self.upper_tight:
            raise NumericalError(
                f"bounds do not bracket at (d={self.d}, m={self.m}): "
                f"{self.lower} > {self.upper_tight}"
            )
        if self.upper_tight_real > self.upper_loose:
            raise NumericalError("tight bound exceeds loose bound")


def compute_bounds(d: int, m: int) -> BoundsReport:
    """Evaluate every bound at one (d, m) and cross-check their ordering."""
    _require_grid(d, m)
    q = shatter_q(d, m)
    n_star, n_int = upper_bound_tight(d, m)
    resid = abs(m + q * math.log2(n_star) - n_star) / n_star
    return BoundsReport(
        d=d,
        m=m,
        lower=lower_bound(d, m),
        q=q,
        upper_tight_real=n_star,
        upper_tight=n_int,
        upper_loose=upper_bound_loose(d, m),
        solver_residual=resid,
    )
