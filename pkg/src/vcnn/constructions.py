"""Constructive shattering witnesses for planar 1NN prototype classifiers.

Two arrangements are built here, plus the generic polytope-to-prototypes
reflection trick they both rest on.

The ``takacs`` arrangement places 2N+1 points on a circle and one at the
centre. Any labelling is realised by cutting each run of off-centre-label
circle points with a chord (two chords when a run subtends too wide an
arc), assembling the chords into a polytope around the centre, and
reflecting the centre across every facet: at most N+1 prototypes.

The ``gunn`` arrangement is a regular (2m-1)-gon plus two interior points
straddling the centre on the axis perpendicular to the direction of a
marked vertex. Labellings where the interior pair agree reduce to the
circle construction with an (m-1)-facet budget. Labellings where they
disagree use a strip between two parallel lines that captures the
minority interior point together with one or two minority vertices,
realised by one minority prototype flanked by two majority reflections,
all inside the circumcircle; every remaining minority vertex (or adjacent
pair) is cut off by one line and claimed by reflecting the nearer
majority prototype across it, landing outside the circumcircle. Unused
prototype budget is parked far away. At most m prototypes in every case.

All free placements are fixed deterministically with explicit clearances
so the verification margins stay fat.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classifier import DEFAULT_MU, LabeledPrototypeSet, Labeling, evaluate_margins
from .errors import (
    ConstructionInfeasibleError,
    InvalidInputError,
    InvalidWitnessError,
    UnsupportedParametersError,
)
from .geometry import (
    DEFAULT_TOL,
    ConvexPolytope,
    Halfspace,
    as_point,
    reflect,
    regular_polygon_vertices,
)

# All fractions of the circumradius R.
_SPLIT_GAP = 0.02    # below this chord clearance an arc is cut with two chords
_CLEAR_MIN = 1e-3    # minimum separation clearance accepted by the builders
_PAD_OFFSET = 2.0    # distance of padding facets from the centre
_PARK_RADIUS = 100.0 # distance of parked surplus prototypes
_RIM = 0.99          # strip prototypes must stay inside this fraction of R
_PUSH_OUT = 1.02     # reflected cut prototypes are pushed at least this far out

_TILT_RANGE = 0.5    # radians scanned when a strip needs tilting
_TILT_STEPS = 251


@dataclass(frozen=True, eq=False)
class Arrangement:
    """A concrete planar point set to be shattered, with its special indices."""

    kind: str             # "takacs" | "gunn" | "search"
    points: np.ndarray    # (n, 2)
    radius: float
    param: int            # N for takacs, m for gunn
    center_index: int | None = None
    inner_indices: tuple[int, int] | None = None
    apex_index: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "points", np.asarray(self.points, dtype=np.float64))

    @property
    def n(self) -> int:
        return self.points.shape[0]


def takacs_arrangement(n_facets: int, radius: float = 1.0) -> Arrangement:
    """2N+1 equally spaced circle points plus the centre; 2N+2 points total."""
    if n_facets < 2:
        raise UnsupportedParametersError(f"need N >= 2 facets, got {n_facets}")
    if radius <= 0:
        raise InvalidInputError("radius must be positive")
    circle = regular_polygon_vertices(2 * n_facets + 1, radius)
    points = np.vstack([circle, np.zeros((1, 2))])
    return Arrangement(
        kind="takacs",
        points=points,
        radius=radius,
        param=n_facets,
        center_index=2 * n_facets + 1,
    )


def centre_to_longest_diagonal(n_vertices: int, radius: float = 1.0) -> float:
    """Distance from the centre of a regular odd n-gon to a longest diagonal."""
    if n_vertices < 5 or n_vertices % 2 == 0:
        raise InvalidInputError("defined for odd n >= 5")
    return radius * math.sin(math.pi / (2 * n_vertices))


def inner_pair_offset(m: int, radius: float = 1.0) -> float:
    """Half the centre-to-longest-diagonal distance of the (2m-1)-gon.

    Placing the two interior points at this distance guarantees neither is
    separated from the centre by any diagonal.
    """
    return 0.5 * centre_to_longest_diagonal(2 * m - 1, radius)


def strip_width(m: int, radius: float = 1.0) -> float:
    """Distance from the centre to the wider strip chord: R sin(3 pi / (2(2m-1))).

    This is the worst-case width of the two-parallel-line strip used in the
    unequal-interior-label construction; it decreases in m and is below
    0.63 R for every m >= 4, which is what keeps all three strip prototypes
    inside the circumcircle.
    """
    if m < 4:
        raise UnsupportedParametersError("strip width defined for m >= 4")
    return radius * math.sin(3.0 * math.pi / (2.0 * (2 * m - 1)))


def gunn_arrangement(m: int, radius: float = 1.0) -> Arrangement:
    """Regular (2m-1)-gon with apex at angle pi/2 plus two interior points.

    The interior pair sits at (+delta, 0) and (-delta, 0) with delta half
    the centre-to-longest-diagonal distance; 2m+1 points total.
    """
    if m < 4:
        raise UnsupportedParametersError(f"need m >= 4, got {m}")
    if radius <= 0:
        raise InvalidInputError("radius must be positive")
    n_v = 2 * m - 1
    verts = regular_polygon_vertices(n_v, radius, phase=math.pi / 2.0)
    delta = inner_pair_offset(m, radius)
    points = np.vstack([verts, [[delta, 0.0], [-delta, 0.0]]])
    return Arrangement(
        kind="gunn",
        points=points,
        radius=radius,
        param=m,
        inner_indices=(n_v, n_v + 1),
        apex_index=0,
    )


def polytope_to_prototypes(
    polytope: ConvexPolytope, interior, inside_label: int, tol: float = DEFAULT_TOL
) -> LabeledPrototypeSet:
    """Prototype set whose decision region for ``inside_label`` is ``polytope``.

    One prototype at ``interior`` carries ``inside_label``; each facet
    contributes the reflection of ``interior`` across its hyperplane with
    the opposite label. The Voronoi cell of the interior prototype is then
    exactly the polytope, so 1NN classification agrees with membership.
    """
    interior = as_point(interior)
    if inside_label not in (-1, 1):
        raise InvalidInputError("inside_label must be +1 or -1")
    if interior.size != polytope.dim:
        raise InvalidInputError("interior point dimension mismatch")
    slack = -(polytope.side_values(interior[None, :])[0])
    if slack.min() <= tol:
        raise InvalidWitnessError(
            f"interior point violates strict interiority (slack {slack.min():.3e})"
        )
    protos = [interior] + [reflect(interior, f) for f in polytope.facets]
    labels = [inside_label] + [-inside_label] * polytope.n_facets
    return LabeledPrototypeSet(np.array(protos), np.array(labels))


# ---------------------------------------------------------------------------
# chord machinery shared by the circle constructions


def _circular_runs(mask: np.ndarray) -> list[list[int]]:
    """Maximal runs of True in circular index order."""
    n = mask.size
    if not mask.any():
        return []
    if mask.all():
        return [list(range(n))]
    # start scanning just past a run boundary
    start = 0
    while not (mask[start] and not mask[start - 1]):
        start += 1
    runs: list[list[int]] = []
    current: list[int] = []
    for k in range(n):
        i = (start + k) % n
        if mask[i]:
            current.append(i)
        elif current:
            runs.append(current)
            current = []
    if current:
        runs.append(current)
    return runs


def _run_chords(circle: np.ndarray, run: list[int], kept: np.ndarray, radius: float) -> list[Halfspace]:
    """Chords cutting ``run`` off from every kept point, splitting wide arcs."""
    n_c = circle.shape[0]
    step = 2.0 * math.pi / n_c
    first = circle[run[0]]
    mid_angle = math.atan2(first[1], first[0]) + 0.5 * (len(run) - 1) * step
    u = np.array([math.cos(mid_angle), math.sin(mid_angle)])
    min_in = float((circle[run] @ u).min())
    max_kept = float((kept @ u).max())
    if min_in - max_kept >= _SPLIT_GAP * radius:
        return [Halfspace(u, 0.5 * (min_in + max_kept))]
    if len(run) == 1:
        raise ConstructionInfeasibleError("cannot separate a single circle point (bug)")
    half = (len(run) + 1) // 2
    return _run_chords(circle, run[:half], kept, radius) + _run_chords(
        circle, run[half:], kept, radius
    )


def _disc_facets(
    circle: np.ndarray,
    circle_labels: np.ndarray,
    inside_label: int,
    kept_extra: np.ndarray,
    budget: int,
    radius: float,
) -> list[Halfspace]:
    """Facets of a polytope keeping the inside-labelled points, padded to budget."""
    mask = circle_labels != inside_label
    runs = _circular_runs(mask)
    if len(runs) > budget:
        raise ConstructionInfeasibleError(
            f"{len(runs)} runs exceed the {budget}-facet budget (bug)"
        )
    kept = np.vstack([circle[~mask], kept_extra, np.zeros((1, 2))])
    facets: list[Halfspace] = []
    for run in runs:
        facets.extend(_run_chords(circle, run, kept, radius))
    if len(facets) > budget:
        raise ConstructionInfeasibleError(
            f"{len(facets)} chords exceed the {budget}-facet budget (bug)"
        )
    # pad with far redundant facets: every non-constant labelling uses the
    # full budget, so the prototype count depends only on the labelling
    # being constant or not
    golden = 2.399963229728653
    for j in range(budget - len(facets)):
        ang = 0.7 + golden * j
        facets.append(Halfspace(np.array([math.cos(ang), math.sin(ang)]), _PAD_OFFSET * radius))
    return facets


def _check_realizes(s: LabeledPrototypeSet, points: np.ndarray, labeling: Labeling, mu: float) -> None:
    got, margins = evaluate_margins(s, points)
    want = labeling.to_array()
    if not (np.all(got == want) and np.all(margins >= mu)):
        raise ConstructionInfeasibleError(
            f"labelling {labeling.bits:#x} not realised (internal bug): "
            f"min margin {float(margins.min()):.3e}"
        )


def takacs_shatter(arrangement: Arrangement, labeling: Labeling, mu: float = DEFAULT_MU) -> LabeledPrototypeSet:
    """Prototype set realising ``labeling`` on a takacs arrangement.

    Constant labellings use a single prototype; everything else uses the
    full N-facet polytope around the centre, i.e. N+1 prototypes.
    """
    if arrangement.kind != "takacs":
        raise InvalidInputError(f"expected a takacs arrangement, got {arrangement.kind!r}")
    if labeling.size != arrangement.n:
        raise InvalidInputError("labelling size must match the arrangement")
    labels = labeling.to_array()
    pts = arrangement.points
    n_facets = arrangement.param
    centre = arrangement.center_index
    if np.all(labels == labels[0]):
        s = LabeledPrototypeSet(pts[centre][None, :], labels[:1])
    else:
        inside = int(labels[centre])
        n_c = 2 * n_facets + 1
        facets = _disc_facets(
            pts[:n_c], labels[:n_c], inside, pts[centre][None, :], n_facets, arrangement.radius
        )
        s = polytope_to_prototypes(ConvexPolytope(tuple(facets)), pts[centre], inside)
    _check_realizes(s, pts, labeling, mu)
    return s


# ---------------------------------------------------------------------------
# strip machinery for the unequal-interior-label cases


def _rotated(u: np.ndarray, phi: float) -> np.ndarray:
    c, s = math.cos(phi), math.sin(phi)
    return np.array([c * u[0] - s * u[1], s * u[0] + c * u[1]])


def _band_quality(in_pts: np.ndarray, out_pts: np.ndarray, u: np.ndarray, radius: float):
    """Clearance of the projection band spanned by in_pts against out_pts."""
    in_proj = in_pts @ u
    out_proj = out_pts @ u
    lo_in = float(in_proj.min())
    hi_in = float(in_proj.max())
    if np.any((out_proj > lo_in) & (out_proj < hi_in)):
        return None
    below = out_proj[out_proj <= lo_in]
    above = out_proj[out_proj >= hi_in]
    gap_lo = min(lo_in - float(below.max()) if below.size else radius, radius)
    gap_hi = min(float(above.min()) - hi_in if above.size else radius, radius)
    return min(gap_lo, gap_hi), lo_in, hi_in, gap_lo, gap_hi


def _place_strip(in_pts: np.ndarray, out_pts: np.ndarray, u: np.ndarray,
                 anchor: np.ndarray, radius: float):
    """Line offsets for one candidate direction, scored by worst clearance.

    Offsets take half the projection gap on each side, then are capped so
    the strip prototype and both of its reflections stay strictly inside
    the circumcircle (their projections are mid, mid - width, mid + width
    on an axis through ``anchor``). Returns ``(score, lo, hi)`` or None.
    """
    band = _band_quality(in_pts, out_pts, u, radius)
    if band is None:
        return None
    _, lo_in, hi_in, gap_lo, gap_hi = band
    lo0 = lo_in - 0.5 * gap_lo
    hi0 = hi_in + 0.5 * gap_hi
    perp = anchor - float(anchor @ u) * u
    cap_sq = (_RIM * radius) ** 2 - float(perp @ perp)
    if cap_sq <= 0.0:
        return None
    cap = math.sqrt(cap_sq)
    hi = min(hi0, (2.0 * cap + lo0) / 3.0)
    lo = max(lo0, (hi - 2.0 * cap) / 3.0)
    # worst clearance of either line to the nearest sample on either side
    score = min(lo_in - lo, lo - (lo_in - gap_lo), hi - hi_in, (hi_in + gap_hi) - hi)
    if score < 0.5 * _CLEAR_MIN * radius:
        return None
    return score, lo, hi


def _build_strip(
    in_pts: np.ndarray,
    out_pts: np.ndarray,
    u0: np.ndarray,
    anchor: np.ndarray,
    radius: float,
):
    """Two parallel lines capturing exactly ``in_pts``, or None.

    Returns ``(u, lo, hi)``: the strip is ``{x : lo < u.x < hi}``. The
    natural direction is used whenever it admits a valid placement; when
    it does not (the two interior points project together, or a point
    sits on a band edge), the direction is tilted by the grid angle whose
    complete placement maximises the worst-case clearance.
    """
    placed = _place_strip(in_pts, out_pts, u0, anchor, radius)
    if placed is not None:
        return u0, placed[1], placed[2]
    best = None
    best_u = None
    for phi in sorted(np.linspace(-_TILT_RANGE, _TILT_RANGE, _TILT_STEPS), key=abs):
        if phi == 0.0:
            continue
        cand_u = _rotated(u0, phi)
        cand = _place_strip(in_pts, out_pts, cand_u, anchor, radius)
        if cand is not None and (best is None or cand[0] > best[0]):
            best = cand
            best_u = cand_u
    if best is None:
        return None
    return best_u, best[1], best[2]


def _strip_prototypes(u: np.ndarray, lo: float, hi: float, anchor: np.ndarray):
    """The strip's inner prototype plus its two reflections across the lines."""
    mid = 0.5 * (lo + hi)
    width = hi - lo
    core = anchor + (mid - float(anchor @ u)) * u
    return core, core - width * u, core + width * u


def _cut_prototype(
    group_pts: np.ndarray,
    other_pts: np.ndarray,
    u: np.ndarray,
    whites: list[np.ndarray],
    radius: float,
    mu: float,
):
    """A minority prototype claiming ``group_pts`` beyond a single cut line.

    The line is perpendicular to ``u`` between the group and everything
    else; the prototype is the reflection of whichever majority prototype
    yields the larger worst-case margin on the group. The line is pushed
    toward the group as far as clearance allows when that is needed to
    land the reflection outside the circumcircle.
    """
    min_in = float((group_pts @ u).min())
    max_out = float((other_pts @ u).max())
    gap = min_in - max_out
    if gap < _CLEAR_MIN * radius:
        return None
    c_mid = 0.5 * (min_in + max_out)
    c_max = min_in - 0.25 * gap
    target = _PUSH_OUT * radius
    d_w = np.stack(
        [np.sqrt(((group_pts - wx) ** 2).sum(axis=1)) for wx in whites]
    ).min(axis=0)
    best = None
    best_key = (False, -np.inf)
    for w in whites:
        pw = float(w @ u)
        # the reflected prototype must land on the group side, so the cut
        # line has to clear both the kept points and this prototype
        c_min = max(max_out + 0.25 * gap, pw + 0.02 * gap)
        if c_min >= c_max:
            continue
        candidates = [min(max(c_mid, c_min), c_max)]
        # largest root of |w + 2 t u|^2 = target^2 in t = c - pw: the line
        # offset from which the reflection clears the circumcircle
        inner = pw * pw - float(w @ w) + target * target
        if inner > 0.0:
            c2 = pw + 0.5 * (-pw + math.sqrt(inner))
            if c_min <= c2 <= c_max:
                candidates.append(c2)
        for c in candidates:
            b = w + 2.0 * (c - pw) * u
            d_b = np.sqrt(((group_pts - b) ** 2).sum(axis=1))
            margin = float((d_w - d_b).min())
            if margin < 2.0 * mu:
                continue
            key = (bool(np.linalg.norm(b) > radius), margin)
            if key > best_key:
                best_key = key
                best = b
    return best


def _partners(vertices: np.ndarray, d_idx: int, b_point: np.ndarray) -> tuple[int, int]:
    """The two strip partner vertices of ``d_idx`` on the side of ``b_point``.

    The far partner terminates the longest diagonal from the vertex that
    passes on the same side of the diameter through the vertex as
    ``b_point``; the near partner is one step back along that side.
    """
    n_v = vertices.shape[0]
    v = vertices[d_idx]
    normal = np.array([-v[1], v[0]])
    side_b = math.copysign(1.0, float(normal @ b_point))
    half = (n_v - 1) // 2
    for direction in (1, -1):
        far = (d_idx + direction * half) % n_v
        if math.copysign(1.0, float(normal @ vertices[far])) == side_b:
            near = (d_idx + direction * (half - 1)) % n_v
            return far, near
    raise ConstructionInfeasibleError("no longest diagonal on the inner point's side (bug)")


def _pair_groups(indices: list[int], n_v: int) -> list[list[int]]:
    """Split minority vertices into cut groups: adjacent pairs, then singles."""
    mask = np.zeros(n_v, dtype=bool)
    mask[indices] = True
    groups: list[list[int]] = []
    for run in _circular_runs(mask):
        for i in range(0, len(run), 2):
            groups.append(run[i : i + 2])
    return groups


def _try_strip_plan(
    arrangement: Arrangement,
    labeling: Labeling,
    black: int,
    strip_indices: list[int],
    u0: np.ndarray,
    anchor: np.ndarray,
    groups: list[list[int]],
    park: int,
    mu: float,
):
    """Assemble and validate one full unequal-interior-label construction."""
    pts = arrangement.points
    radius = arrangement.radius
    n_v = 2 * arrangement.param - 1
    strip_in = pts[strip_indices]
    out_pts = pts[[i for i in range(arrangement.n) if i not in strip_indices]]
    strip = _build_strip(strip_in, out_pts, u0, anchor, radius)
    if strip is None:
        return None
    u, lo, hi = strip
    core, w_dn, w_up = _strip_prototypes(u, lo, hi, anchor)
    if max(np.linalg.norm(core), np.linalg.norm(w_dn), np.linalg.norm(w_up)) >= radius:
        return None
    protos = [core]
    labels = [black]
    whites = [w_dn, w_up]
    step = 2.0 * math.pi / n_v
    for group in groups:
        group_pts = pts[group]
        first = pts[group[0]]
        mid_angle = math.atan2(first[1], first[0]) + 0.5 * (len(group) - 1) * step
        u_cut = np.array([math.cos(mid_angle), math.sin(mid_angle)])
        others = np.array([pts[i] for i in range(arrangement.n) if i not in group])
        b = _cut_prototype(group_pts, others, u_cut, whites, radius, mu)
        if b is None:
            return None
        protos.append(b)
        labels.append(black)
    for j in range(park):
        ang = -math.pi / 2.0 + 0.13 * (j + 1)
        protos.append(_PARK_RADIUS * radius * np.array([math.cos(ang), math.sin(ang)]))
        labels.append(black)
    protos.extend(whites)
    labels.extend([-black, -black])
    try:
        s = LabeledPrototypeSet(np.array(protos), np.array(labels))
    except InvalidInputError:
        return None
    got, margins = evaluate_margins(s, pts)
    if np.all(got == labeling.to_array()) and np.all(margins >= mu):
        return s
    return None


def gunn_shatter(arrangement: Arrangement, labeling: Labeling, mu: float = DEFAULT_MU) -> LabeledPrototypeSet:
    """Prototype set realising ``labeling`` on a gunn arrangement, <= m prototypes.

    Equal interior labels reduce to the circle construction with an
    (m-1)-facet budget. Unequal interior labels relabel the minority class
    and build a strip construction; with a full minority class of m points
    the strip holds the minority interior point and two minority vertices,
    otherwise it holds the interior point and one chosen vertex (or the
    interior point alone) and remaining minority vertices are cut in
    adjacent pairs, parking any unused budget far away.
    """
    if arrangement.kind != "gunn":
        raise InvalidInputError(f"expected a gunn arrangement, got {arrangement.kind!r}")
    if labeling.size != arrangement.n:
        raise InvalidInputError("labelling size must match the arrangement")
    labels = labeling.to_array()
    pts = arrangement.points
    m = arrangement.param
    n_v = 2 * m - 1
    radius = arrangement.radius
    i1, i2 = arrangement.inner_indices

    if np.all(labels == labels[0]):
        s = LabeledPrototypeSet(np.zeros((1, 2)), labels[:1])
        _check_realizes(s, pts, labeling, mu)
        return s

    if labels[i1] == labels[i2]:
        inside = int(labels[i1])
        facets = _disc_facets(
            pts[:n_v], labels[:n_v], inside, pts[[i1, i2]], m - 1, radius
        )
        s = polytope_to_prototypes(ConvexPolytope(tuple(facets)), np.zeros(2), inside)
        _check_realizes(s, pts, labeling, mu)
        return s

    # interior labels differ: "black" is the minority class (2m+1 is odd,
    # so there is no tie), and the black interior point is in it
    black = 1 if int((labels == 1).sum()) < int((labels == -1).sum()) else -1
    b_idx = i1 if labels[i1] == black else i2
    w_idx = i2 if labels[i1] == black else i1
    b_pt, w_pt = pts[b_idx], pts[w_idx]
    black_vertices = [v for v in range(n_v) if labels[v] == black]
    k = len(black_vertices) + 1
    c_idx = int(np.argmin(np.sqrt(((pts[:n_v] - w_pt) ** 2).sum(axis=1))))

    s = None
    if k == m:
        # full minority class: strip over a vertex and one of its partners
        for p_idx in black_vertices:
            if p_idx == c_idx:
                continue
            for partner in _partners(pts[:n_v], p_idx, b_pt):
                if labels[partner] != black:
                    continue
                remaining = sorted(set(black_vertices) - {p_idx, partner})
                chord = pts[partner] - pts[p_idx]
                u0 = np.array([-chord[1], chord[0]])
                u0 /= np.linalg.norm(u0)
                if float(u0 @ (pts[p_idx] + pts[partner])) < 0.0:
                    u0 = -u0
                s = _try_strip_plan(
                    arrangement,
                    labeling,
                    black,
                    [p_idx, partner, b_idx],
                    u0,
                    np.zeros(2),
                    [[v] for v in remaining],
                    0,
                    mu,
                )
                if s is not None:
                    break
            if s is not None:
                break

    if s is None:
        # strip holds the interior minority point and at most one vertex
        if not black_vertices:
            u0 = b_pt / np.linalg.norm(b_pt)
            s = _try_strip_plan(
                arrangement, labeling, black, [b_idx], u0, b_pt, [], m - 3, mu
            )
        else:
            def cuts_after(v_star: int) -> int:
                rest = [v for v in black_vertices if v != v_star]
                return len(_pair_groups(rest, n_v))

            for v_star in sorted(black_vertices, key=lambda v: (cuts_after(v), v)):
                groups = _pair_groups([v for v in black_vertices if v != v_star], n_v)
                if len(groups) > m - 3:
                    continue
                chord = pts[v_star] - b_pt
                u0 = np.array([-chord[1], chord[0]])
                u0 /= np.linalg.norm(u0)
                s = _try_strip_plan(
                    arrangement,
                    labeling,
                    black,
                    [b_idx, v_star],
                    u0,
                    0.5 * (b_pt + pts[v_star]),
                    groups,
                    m - 3 - len(groups),
                    mu,
                )
                if s is not None:
                    break

    if s is None:
        raise ConstructionInfeasibleError(
            f"labelling {labeling.bits:#x} not realised by any strip plan (bug)"
        )
    if s.m > m:
        raise ConstructionInfeasibleError("prototype budget exceeded (bug)")
    _check_realizes(s, pts, labeling, mu)
    return s
