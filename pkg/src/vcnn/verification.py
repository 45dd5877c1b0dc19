"""Shattering verification: exhaustive sweeps and randomized lower-bound search.

``verify_shattering`` enumerates every labelling of an arrangement, asks a
generator for a witness prototype set, and checks it with the margin-aware
realisation test; the result is a self-contained certificate that can be
re-verified later without the generator.

``search_lower_bound`` is the randomized complement to the constructive
witnesses: it samples point sets and hill-climbs prototype placements per
labelling. Finding a certificate proves the lower bound for that n; not
finding one proves nothing and is always reported as a budget-limited
negative, never as impossibility. Deterministic for a fixed seed: every
labelling derives its own child seed, so results do not depend on
evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .classifier import DEFAULT_MU, LabeledPrototypeSet, Labeling, evaluate_margins
from .constructions import Arrangement
from .errors import ConstructionInfeasibleError, InvalidInputError

# 2^n labelings must stay enumerable at desk scale.
_MAX_EXHAUSTIVE_N = 22
_MAX_COEFFICIENT_N = 16


@dataclass
class ShatterCertificate:
    """Exhaustive evidence that an arrangement is shattered.

    ``witnesses`` maps each labelling bitmask to the prototype set that
    realises it; ``verified`` is True only when every labelling passed at
    margin ``mu``. Certificates re-verify from their serialized form alone.
    """

    arrangement: Arrangement
    mu: float
    witnesses: dict[int, LabeledPrototypeSet] = field(default_factory=dict)
    min_margin: float = float("inf")
    verified: bool = False
    first_failure: int | None = None
    failure_reason: str | None = None


def verify_shattering(arrangement: Arrangement, generator, mu: float = DEFAULT_MU) -> ShatterCertificate:
    """Run ``generator(arrangement, labeling)`` over all 2^n labelings.

    Stops at the first failing labelling and records it; failure is data,
    not an exception.
    """
    n = arrangement.n
    if n > _MAX_EXHAUSTIVE_N:
        raise InvalidInputError(f"2^{n} labelings is beyond desk scale")
    cert = ShatterCertificate(arrangement=arrangement, mu=mu)
    for bits in range(1 << n):
        labeling = Labeling(bits, n)
        try:
            witness = generator(arrangement, labeling)
        except ConstructionInfeasibleError as exc:
            cert.first_failure = bits
            cert.failure_reason = str(exc)
            return cert
        got, margins = evaluate_margins(witness, arrangement.points)
        if not (np.all(got == labeling.to_array()) and np.all(margins >= mu)):
            cert.first_failure = bits
            cert.failure_reason = (
                f"witness misclassifies or undercuts margin (min {float(margins.min()):.3e})"
            )
            return cert
        cert.witnesses[bits] = witness
        worst = float(margins.min())
        if worst < cert.min_margin:
            cert.min_margin = worst
    cert.verified = True
    return cert


@dataclass(frozen=True)
class SearchConfig:
    """Budget and seeding for the randomized lower-bound search."""

    d: int
    m: int
    n: int
    trials: int = 24          # prototype restarts per labelling
    point_sets: int = 3       # independently sampled point sets
    steps: int = 120          # hill-climb sweeps per restart
    step_init: float = 0.25   # initial coordinate step, in scene units
    step_decay: float = 0.5
    rng_seed: int = 0
    mu: float = DEFAULT_MU

    def __post_init__(self):
        if self.d < 1 or self.m < 1 or self.n < 1:
            raise InvalidInputError("d, m, n must be >= 1")
        if self.trials < 1 or self.point_sets < 1 or self.steps < 1:
            raise InvalidInputError("budgets must be >= 1")
        if self.mu <= 0:
            raise InvalidInputError("mu must be positive")


def _restart_pool(rng: np.random.Generator, points: np.ndarray, target: np.ndarray, cfg: SearchConfig):
    """Initial prototype positions and labels for every restart.

    Half the restarts start from jittered sample points carrying the
    target labels (a condensing-style initializer), the rest are uniform
    in the twice-inflated bounding box with random labels.
    """
    n, d = points.shape
    span = points.max(axis=0) - points.min(axis=0)
    scale = max(float(span.max()), 1e-6)
    idx = rng.integers(0, n, size=(cfg.trials, cfg.m))
    inits = points[idx] + rng.normal(0.0, 0.02 * scale, size=(cfg.trials, cfg.m, d))
    labels = target[idx]
    n_uniform = cfg.trials // 2
    if n_uniform:
        centre = 0.5 * (points.max(axis=0) + points.min(axis=0))
        lo = centre - span
        hi = centre + span
        inits[-n_uniform:] = rng.uniform(lo, hi, size=(n_uniform, cfg.m, d))
        labels[-n_uniform:] = rng.choice(np.array([-1, 1]), size=(n_uniform, cfg.m))
    return inits, labels.astype(np.int64)


def _search_one_labeling(points: np.ndarray, target: np.ndarray, rng: np.random.Generator, cfg: SearchConfig):
    """Best witness for one labelling, or None within budget."""
    inits, init_labels = _restart_pool(rng, points, target, cfg)
    scale = max(float((points.max(axis=0) - points.min(axis=0)).max()), 1e-6)
    best, protos, ridx = kernels.search_labeling(
        points,
        target,
        inits,
        init_labels,
        cfg.steps,
        cfg.step_init * scale,
        cfg.step_decay,
        2.0 * cfg.mu,
        1e-6 * scale,
    )
    if best < 2.0 * cfg.mu:
        return None
    try:
        return LabeledPrototypeSet(protos, init_labels[ridx])
    except InvalidInputError:
        return None


def search_lower_bound(cfg: SearchConfig):
    """Certify by search that some n-point set in R^d is shattered by 1NN(d, m).

    Returns ``(n, certificate)`` when every labelling of some sampled
    point set is realised at margin mu, and ``(0, None)`` otherwise. A
    negative outcome only means the budget was exhausted.
    """
    if cfg.n > _MAX_EXHAUSTIVE_N:
        raise InvalidInputError(f"2^{cfg.n} labelings is beyond desk scale")
    for ps in range(cfg.point_sets):
        points = np.random.default_rng([cfg.rng_seed, ps]).uniform(-1.0, 1.0, size=(cfg.n, cfg.d))
        witnesses: dict[int, LabeledPrototypeSet] = {}
        min_margin = float("inf")
        complete = True
        for bits in range(1 << cfg.n):
            labeling = Labeling(bits, cfg.n)
            rng = np.random.default_rng([cfg.rng_seed, ps, bits])
            witness = _search_one_labeling(points, labeling.to_array(), rng, cfg)
            if witness is None:
                complete = False
                break
            got, margins = evaluate_margins(witness, points)
            if not (np.all(got == labeling.to_array()) and np.all(margins >= cfg.mu)):
                complete = False
                break
            witnesses[bits] = witness
            min_margin = min(min_margin, float(margins.min()))
        if complete:
            arrangement = Arrangement(
                kind="search", points=points, radius=1.0, param=cfg.m
            )
            cert = ShatterCertificate(
                arrangement=arrangement,
                mu=cfg.mu,
                witnesses=witnesses,
                min_margin=min_margin,
                verified=True,
            )
            return cfg.n, cert
    return 0, None


def shatter_coefficient_exhaustive(points, m: int, cfg: SearchConfig) -> int:
    """Count the labelings of ``points`` the search can realise with m prototypes.

    A lower bound on the shatter coefficient: search failures undercount,
    successes are margin-verified so the count never exceeds the truth.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if n > _MAX_COEFFICIENT_N:
        raise InvalidInputError(f"2^{n} labelings is beyond desk scale for counting")
    cfg = SearchConfig(
        d=points.shape[1],
        m=m,
        n=n,
        trials=cfg.trials,
        point_sets=1,
        steps=cfg.steps,
        step_init=cfg.step_init,
        step_decay=cfg.step_decay,
        rng_seed=cfg.rng_seed,
        mu=cfg.mu,
    )
    count = 0
    for bits in range(1 << n):
        labeling = Labeling(bits, n)
        rng = np.random.default_rng([cfg.rng_seed, 0, bits])
        witness = _search_one_labeling(points, labeling.to_array(), rng, cfg)
        if witness is None:
            continue
        got, margins = evaluate_margins(witness, points)
        if np.all(got == labeling.to_array()) and np.all(margins >= cfg.mu):
            count += 1
    return count
