"""Band structures over the torus and the quantitative spectral checks.

A band structure samples the fiber matrix on a uniform grid (always extended
by the 2^d corner points with components in {0, pi}), sorts eigenvalues at
every point, and takes per-branch envelopes.  Branches of numerically zero
width are flat bands; gaps are the maximal open intervals missing from the
union of the open bands.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvariantViolation,
    ParameterError,
    PreconditionError,
)
from .floquet import TWO_PI, fiber_stack
from .graph import (
    PeriodicGraphSpec,
    bridge_count,
    classify,
    degrees,
    is_connected_periodic,
    periodic_bipartite,
)
from .linalg import eigh_stack

FLAT_TOL_COEFF = 1e-9
FLAT_MERGE_TOL = 1e-7
CHECK_TOL = 1e-8
UNIFORM_EXTREMIZER_TOL = 1e-8
ENTRY_VARIATION_TOL = 1e-9
REFINE_ITERATIONS = 40


@dataclass(frozen=True)
class TorusGrid:
    """Uniform per-axis sampling of the torus plus the {0, pi}^d corner set."""

    dimension: int
    points_per_axis: int

    def __post_init__(self):
        if self.dimension < 1:
            raise ParameterError("grid dimension must be >= 1")
        if self.points_per_axis < 2:
            raise ParameterError("grid needs at least 2 points per axis")

    @staticmethod
    def default_for(dimension: int) -> "TorusGrid":
        # Divisible by 12, so multiples of pi/2 and 2*pi/3 land exactly on
        # grid points and the closed-form extremizers are sampled exactly.
        if dimension <= 2:
            m = 96
        elif dimension == 3:
            m = 24
        else:
            m = 12
        return TorusGrid(dimension, m)

    def points(self) -> np.ndarray:
        axis = TWO_PI * (np.arange(self.points_per_axis) / self.points_per_axis)
        mesh = np.meshgrid(*([axis] * self.dimension), indexing="ij")
        pts = np.stack([g.ravel() for g in mesh], axis=-1)
        have = set(map(tuple, pts.tolist()))
        extras = [
            corner
            for corner in itertools.product((0.0, math.pi), repeat=self.dimension)
            if corner not in have
        ]
        if extras:
            pts = np.vstack([pts, np.asarray(extras)])
        return pts


@dataclass(frozen=True)
class BandInterval:
    """Envelope of one sorted eigenvalue branch, with its extremizers."""

    n: int
    low: float
    high: float
    argmin: tuple[float, ...] | None = None
    argmax: tuple[float, ...] | None = None

    @property
    def width(self) -> float:
        return self.high - self.low


@dataclass(frozen=True)
class FlatBand:
    value: float
    multiplicity: int


@dataclass(frozen=True)
class BandStructure:
    """Per-branch envelopes plus the separated open-band / flat-band view."""

    kind: str
    bands: tuple[BandInterval, ...]
    open_bands: tuple[BandInterval, ...]
    flat_bands: tuple[FlatBand, ...]
    gaps: tuple[tuple[float, float], ...]
    spectrum_measure: float
    flat_tol: float
    grid: TorusGrid | None = None

    @property
    def band_length_sum(self) -> float:
        return float(sum(b.width for b in self.bands))

    @property
    def gap_length_sum(self) -> float:
        return float(sum(hi - lo for lo, hi in self.gaps))

    @property
    def hull(self) -> tuple[float, float]:
        return self.bands[0].low, self.bands[-1].high


@dataclass(frozen=True)
class InequalityCheck:
    """One verified relation lhs <= rhs, with the raw slack preserved."""

    name: str
    lhs: float
    rhs: float
    slack: float
    passed: bool


@dataclass(frozen=True)
class EstimateReport:
    name: str
    checks: tuple[InequalityCheck, ...]
    params: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _check(name: str, lhs: float, rhs: float, tol: float = CHECK_TOL) -> InequalityCheck:
    slack = float(rhs) - float(lhs)
    return InequalityCheck(name, float(lhs), float(rhs), slack, slack >= -tol)


def _deviation(name: str, deviation: float, tol: float) -> InequalityCheck:
    # Equality-style check: |deviation| must vanish up to tol.
    dev = abs(float(deviation))
    return InequalityCheck(name, dev, 0.0, -dev, dev <= tol)


def grid_eigenvalues(
    spec: PeriodicGraphSpec, thetas: np.ndarray, kind: str, jobs: int = 1
) -> np.ndarray:
    """Sorted fiber eigenvalues at every torus point, shape (P, nu).

    With jobs > 1 the stack is split into contiguous chunks evaluated on a
    thread pool; per-matrix convergence makes the result bit-identical to the
    single-job run.
    """
    stack = fiber_stack(spec, thetas, kind)
    if jobs <= 1 or stack.shape[0] < 2 * jobs:
        return eigh_stack(stack)[0]
    chunks = np.array_split(stack, jobs)
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(lambda chunk: eigh_stack(chunk)[0], chunks))
    return np.concatenate(parts, axis=0)


def fiber_eigenvalues(spec: PeriodicGraphSpec, theta, kind: str = "schrodinger") -> np.ndarray:
    """Sorted eigenvalues of one fiber matrix."""
    arr = np.atleast_2d(np.asarray(theta, dtype=float))
    return eigh_stack(fiber_stack(spec, arr, kind))[0][0]


def _interval_union(opens, min_gap: float):
    """Measure of a union of closed intervals and the open gaps between them."""
    if not opens:
        return 0.0, ()
    measure = 0.0
    gaps = []
    cur_lo, cur_hi = opens[0]
    for lo, hi in opens[1:]:
        if lo > cur_hi + min_gap:
            gaps.append((cur_hi, lo))
            measure += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        else:
            cur_hi = max(cur_hi, hi)
    measure += cur_hi - cur_lo
    return float(measure), tuple(gaps)


def _assemble_structure(
    kind: str,
    grid: TorusGrid | None,
    lows: np.ndarray,
    highs: np.ndarray,
    argmins,
    argmaxs,
    flat_tol: float | None,
    merge_tol: float,
) -> BandStructure:
    nu = len(lows)
    scale = max(float(np.abs(lows).max()), float(np.abs(highs).max()))
    tol = flat_tol if flat_tol is not None else FLAT_TOL_COEFF * (1.0 + scale)
    bands = tuple(
        BandInterval(
            n + 1,
            float(lows[n]),
            float(highs[n]),
            argmins[n] if argmins is not None else None,
            argmaxs[n] if argmaxs is not None else None,
        )
        for n in range(nu)
    )
    open_bands = []
    flat_groups: list[list[float]] = []
    previous_flat = False
    for band in bands:
        if band.width <= tol:
            value = 0.5 * (band.low + band.high)
            if previous_flat and abs(flat_groups[-1][-1] - value) <= merge_tol:
                flat_groups[-1].append(value)
            else:
                flat_groups.append([value])
            previous_flat = True
        else:
            open_bands.append(band)
            previous_flat = False
    flats = tuple(
        FlatBand(float(sum(group) / len(group)), len(group)) for group in flat_groups
    )
    measure, gaps = _interval_union([(b.low, b.high) for b in open_bands], tol)
    return BandStructure(
        kind=kind,
        bands=bands,
        open_bands=tuple(open_bands),
        flat_bands=flats,
        gaps=gaps,
        spectrum_measure=measure,
        flat_tol=tol,
        grid=grid,
    )


def _refine_extremum(spec, kind, branch, theta, step, want_max):
    """Coordinate descent from a grid point, halving the step on stalls."""
    theta = np.asarray(theta, dtype=float).copy()
    sign = -1.0 if want_max else 1.0
    best = sign * fiber_eigenvalues(spec, theta, kind)[branch]
    for _ in range(REFINE_ITERATIONS):
        moved = False
        for axis in range(theta.shape[0]):
            for delta in (step, -step):
                trial = theta.copy()
                trial[axis] += delta
                value = sign * fiber_eigenvalues(spec, trial, kind)[branch]
                if value < best:
                    best = value
                    theta = trial
                    moved = True
        if not moved:
            step *= 0.5
    return sign * best, tuple(float(x) for x in theta)


def compute_band_structure(
    spec: PeriodicGraphSpec,
    kind: str = "schrodinger",
    grid: TorusGrid | None = None,
    flat_tol: float | None = None,
    merge_tol: float = FLAT_MERGE_TOL,
    refine: bool = False,
    jobs: int = 1,
) -> BandStructure:
    """Sample the fiber over the torus grid and extract bands, flats and gaps."""
    if not is_connected_periodic(spec):
        raise PreconditionError("periodic cover is disconnected")
    if grid is None:
        grid = TorusGrid.default_for(spec.dimension)
    elif grid.dimension != spec.dimension:
        raise ParameterError("grid dimension does not match the graph")
    thetas = grid.points()
    values = grid_eigenvalues(spec, thetas, kind, jobs=jobs)
    low_idx = values.argmin(axis=0)
    high_idx = values.argmax(axis=0)
    lows = values.min(axis=0)
    highs = values.max(axis=0)
    argmins = [tuple(float(x) for x in thetas[i]) for i in low_idx]
    argmaxs = [tuple(float(x) for x in thetas[i]) for i in high_idx]
    if refine:
        step = TWO_PI / grid.points_per_axis
        for n in range(values.shape[1]):
            lo, arg_lo = _refine_extremum(spec, kind, n, argmins[n], step, False)
            hi, arg_hi = _refine_extremum(spec, kind, n, argmaxs[n], step, True)
            lows[n], argmins[n] = lo, arg_lo
            highs[n], argmaxs[n] = hi, arg_hi
    return _assemble_structure(kind, grid, lows, highs, argmins, argmaxs, flat_tol, merge_tol)


def verify_total_band_bound(
    spec: PeriodicGraphSpec,
    kind: str = "schrodinger",
    grid: TorusGrid | None = None,
    jobs: int = 1,
    check_tol: float = CHECK_TOL,
    band_structure: BandStructure | None = None,
) -> EstimateReport:
    """Spectrum measure <= total band length <= twice the oriented bridge count."""
    bs = band_structure or compute_band_structure(spec, kind, grid, jobs=jobs)
    count, _ = bridge_count(spec)
    band_sum = bs.band_length_sum
    checks = (
        _check("spectrum-measure<=band-length-sum", bs.spectrum_measure, band_sum, check_tol),
        _check("band-length-sum<=2*bridge-count", band_sum, 2.0 * count, check_tol),
    )
    return EstimateReport(
        "total-band-length-bound",
        checks,
        {
            "bridge_count": count,
            "band_length_sum": band_sum,
            "spectrum_measure": bs.spectrum_measure,
            "equality_attained": abs(band_sum - 2.0 * count) <= check_tol,
        },
    )


def verify_gap_bound(
    spec: PeriodicGraphSpec,
    grid: TorusGrid | None = None,
    jobs: int = 1,
    check_tol: float = CHECK_TOL,
    band_structure: BandStructure | None = None,
    laplacian_structure: BandStructure | None = None,
) -> EstimateReport:
    """Total gap length dominates the hull length minus twice the bridge count."""
    bs = band_structure or compute_band_structure(spec, "schrodinger", grid, jobs=jobs)
    if laplacian_structure is None:
        if all(q == 0.0 for q in spec.potentials()):
            laplacian_structure = bs
        else:
            laplacian_structure = compute_band_structure(spec, "laplacian", grid, jobs=jobs)
    count, _ = bridge_count(spec)
    potentials = spec.potentials()
    spread = max(potentials) - min(potentials)
    hull_lo, hull_hi = bs.hull
    hull = hull_hi - hull_lo
    top_laplacian = laplacian_structure.bands[-1].high
    floor = max(top_laplacian - spread, spread - 2.0 * max(degrees(spec)))
    checks = (
        _check("band-hull-minus-bridges<=gap-length-sum", hull - 2.0 * count, bs.gap_length_sum, check_tol),
        _check("potential-degree-floor<=band-hull", floor, hull, check_tol),
    )
    return EstimateReport(
        "gap-length-bound",
        checks,
        {
            "bridge_count": count,
            "gap_length_sum": bs.gap_length_sum,
            "band_hull": hull,
            "floor_constant": floor,
            "potential_spread": spread,
        },
    )


def check_first_band_nondegenerate(
    spec: PeriodicGraphSpec,
    grid: TorusGrid | None = None,
    jobs: int = 1,
    band_structure: BandStructure | None = None,
):
    """(entry-modulus variation found, first band open).

    A varying entry modulus forces an open first band; the converse can fail,
    so both flags are reported.  The implication itself is enforced.
    """
    if grid is None:
        grid = TorusGrid.default_for(spec.dimension)
    thetas = grid.points()
    moduli = np.abs(fiber_stack(spec, thetas, "laplacian"))
    variation = moduli.max(axis=0) - moduli.min(axis=0)
    condition = bool((variation > ENTRY_VARIATION_TOL).any())
    bs = band_structure or compute_band_structure(spec, "schrodinger", grid, jobs=jobs)
    nondegenerate = bool(bs.bands[0].width > ENTRY_VARIATION_TOL)
    if condition and not nondegenerate:
        raise InvariantViolation(
            "an entry modulus varies but the first band is numerically degenerate"
        )
    return condition, nondegenerate


def loop_band_endpoints(
    spec: PeriodicGraphSpec,
    grid: TorusGrid | None = None,
    jobs: int = 1,
    flat_tol: float | None = None,
    merge_tol: float = FLAT_MERGE_TOL,
) -> BandStructure:
    """Band envelopes of a loop graph from at most two eigendecompositions.

    Lower endpoints always come from the zero fiber.  Upper endpoints come
    from the phase-flipping corner when the classifier found one; otherwise
    they fall back to grid maxima.
    """
    cls = classify(spec)
    if not cls.is_loop_graph:
        raise PreconditionError("not a loop graph: a cell-crossing edge is not a loop")
    d = spec.dimension
    zero = (0.0,) * d
    lows = fiber_eigenvalues(spec, zero, "schrodinger")
    argmins = [zero] * spec.num_vertices
    if cls.precise_quasimomentum is not None:
        flip = cls.precise_quasimomentum
        highs = fiber_eigenvalues(spec, flip, "schrodinger")
        argmaxs = [flip] * spec.num_vertices
    else:
        if grid is None:
            grid = TorusGrid.default_for(d)
        thetas = grid.points()
        values = grid_eigenvalues(spec, thetas, "schrodinger", jobs=jobs)
        highs = values.max(axis=0)
        argmaxs = [tuple(float(x) for x in thetas[i]) for i in values.argmax(axis=0)]
    return _assemble_structure(
        "schrodinger", grid, np.asarray(lows), np.asarray(highs), argmins, argmaxs, flat_tol, merge_tol
    )


def bipartite_loop_endpoints(
    spec: PeriodicGraphSpec,
    flat_tol: float | None = None,
    merge_tol: float = FLAT_MERGE_TOL,
) -> BandStructure:
    """Laplacian band envelopes of a bipartite regular loop graph.

    Lower endpoints are the zero-fiber eigenvalues; upper endpoints mirror
    them through the regular degree.
    """
    bipartite, _ = periodic_bipartite(spec)
    if not bipartite:
        raise PreconditionError("periodic cover is not bipartite")
    deg = degrees(spec)
    if len(set(deg)) != 1:
        raise PreconditionError("graph is not regular")
    count, bridges = bridge_count(spec)
    if not all(e.tail == e.head for e in bridges):
        raise PreconditionError("not a loop graph: a cell-crossing edge is not a loop")
    kappa = deg[0]
    zero = (0.0,) * spec.dimension
    lows = fiber_eigenvalues(spec, zero, "laplacian")
    highs = 2.0 * kappa - lows[::-1]
    argmins = [zero] * spec.num_vertices
    return _assemble_structure(
        "laplacian", None, lows, highs, argmins, None, flat_tol, merge_tol
    )


@dataclass(frozen=True)
class LargeCouplingReport:
    """Spectrum of the strongly coupled operator versus its two-term expansion."""

    t: float
    band_sum_limit: float
    spectrum_measure: float
    measure_minus_limit: float
    max_deviation: float


def large_coupling_analysis(
    spec: PeriodicGraphSpec,
    t: float,
    grid: TorusGrid | None = None,
    jobs: int = 1,
) -> LargeCouplingReport:
    """Compare exact bands of the operator with potential scaled by t against
    the expansion t*q_n + diag_n(theta) - (1/t) * sum_j |offdiag_jn|^2 / (q_j - q_n).
    """
    potentials = np.asarray(spec.potentials())
    if len(set(potentials.tolist())) != spec.num_vertices:
        raise PreconditionError("potentials must be pairwise distinct")
    if t == 0.0:
        raise ParameterError("coupling constant t must be nonzero")
    if grid is None:
        grid = TorusGrid.default_for(spec.dimension)
    thetas = grid.points()
    lap = fiber_stack(spec, thetas, "laplacian")
    idx = np.arange(spec.num_vertices)
    coupled = lap.copy()
    coupled[:, idx, idx] += t * potentials
    values = eigh_stack(coupled)[0] if jobs <= 1 else _chunked_eigs(coupled, jobs)

    order = np.argsort(potentials, kind="stable")
    expansion = np.empty_like(values)
    for rank, vertex in enumerate(order):
        diag = lap[:, vertex, vertex].real
        correction = np.zeros(len(thetas))
        for j in range(spec.num_vertices):
            if j == vertex:
                continue
            correction += np.abs(lap[:, j, vertex]) ** 2 / (
                potentials[j] - potentials[vertex]
            )
        expansion[:, rank] = t * potentials[vertex] + diag - correction / t
    deviation = float(np.abs(values - expansion).max())

    diag_ranges = [
        float(lap[:, n, n].real.max() - lap[:, n, n].real.min())
        for n in range(spec.num_vertices)
    ]
    limit = float(sum(diag_ranges))
    lows = values.min(axis=0)
    highs = values.max(axis=0)
    scale = max(float(np.abs(lows).max()), float(np.abs(highs).max()))
    measure, _ = _interval_union(
        list(zip(lows.tolist(), highs.tolist())), FLAT_TOL_COEFF * (1.0 + scale)
    )
    return LargeCouplingReport(float(t), limit, measure, measure - limit, deviation)


def find_uniform_extremizers(
    spec: PeriodicGraphSpec,
    kind: str = "schrodinger",
    grid: TorusGrid | None = None,
    jobs: int = 1,
    tol: float = UNIFORM_EXTREMIZER_TOL,
    band_structure: BandStructure | None = None,
):
    """Corner points minimizing (resp. maximizing) every branch at once.

    Scans {0, pi}^d; either entry is None when no corner works.
    """
    bs = band_structure or compute_band_structure(spec, kind, grid, jobs=jobs)
    lows = np.asarray([b.low for b in bs.bands])
    highs = np.asarray([b.high for b in bs.bands])
    theta_minus = None
    theta_plus = None
    for corner in itertools.product((0.0, math.pi), repeat=spec.dimension):
        values = fiber_eigenvalues(spec, corner, kind)
        if theta_minus is None and np.abs(values - lows).max() <= tol:
            theta_minus = corner
        if theta_plus is None and np.abs(values - highs).max() <= tol:
            theta_plus = corner
    return theta_minus, theta_plus


def _uniform_extremizers_or_raise(spec, label, grid, jobs, band_structure=None):
    bs = band_structure or compute_band_structure(spec, "schrodinger", grid, jobs=jobs)
    theta_minus, theta_plus = find_uniform_extremizers(spec, band_structure=bs)
    for side, theta in (("lower", theta_minus), ("upper", theta_plus)):
        if theta is None:
            extrema = (
                np.asarray([b.low for b in bs.bands])
                if side == "lower"
                else np.asarray([b.high for b in bs.bands])
            )
            best_corner, best_dev, best_band = None, math.inf, -1
            for corner in itertools.product((0.0, math.pi), repeat=spec.dimension):
                deltas = np.abs(fiber_eigenvalues(spec, corner, "schrodinger") - extrema)
                if deltas.max() < best_dev:
                    best_dev = float(deltas.max())
                    best_corner = corner
                    best_band = int(deltas.argmax())
            raise PreconditionError(
                f"graph {label}: no corner point attains every {side} band endpoint "
                f"(best corner {best_corner} misses band {best_band + 1} by {best_dev:.3e})"
            )
    return bs, theta_minus, theta_plus


def _entry_l1(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.abs(a - b).sum())


def stability_constants(
    spec_a: PeriodicGraphSpec,
    spec_b: PeriodicGraphSpec,
    grid_a: TorusGrid | None = None,
    grid_b: TorusGrid | None = None,
    jobs: int = 1,
    check_tol: float = CHECK_TOL,
) -> EstimateReport:
    """Band-edge and gap-length variation between two graphs, bounded by the
    entrywise l1 distance of their fiber matrices at the shared extremizers.

    Both graphs must admit uniform lower and upper extremizing corners.  When
    the pair is additionally bipartite-regular (potential-free) or
    precise-vs-bipartite, the specialized two-sided bounds are checked too.
    """
    if spec_a.num_vertices != spec_b.num_vertices:
        raise PreconditionError(
            f"vertex count mismatch: {spec_a.num_vertices} != {spec_b.num_vertices}"
        )
    bs_a, minus_a, plus_a = _uniform_extremizers_or_raise(spec_a, "A", grid_a, jobs)
    bs_b, minus_b, plus_b = _uniform_extremizers_or_raise(spec_b, "B", grid_b, jobs)

    def fiber(spec, theta):
        return fiber_stack(spec, np.atleast_2d(np.asarray(theta)), "schrodinger")[0]

    lows_a = fiber_eigenvalues(spec_a, minus_a, "schrodinger")
    highs_a = fiber_eigenvalues(spec_a, plus_a, "schrodinger")
    lows_b = fiber_eigenvalues(spec_b, minus_b, "schrodinger")
    highs_b = fiber_eigenvalues(spec_b, plus_b, "schrodinger")
    c_total = _entry_l1(fiber(spec_a, minus_a), fiber(spec_b, minus_b)) + _entry_l1(
        fiber(spec_a, plus_a), fiber(spec_b, plus_b)
    )

    gaps_a = lows_a[1:] - highs_a[:-1]
    gaps_b = lows_b[1:] - highs_b[:-1]
    edge_gap_variation = (
        abs(lows_a[0] - lows_b[0])
        + abs(highs_a[-1] - highs_b[-1])
        + float(np.abs(gaps_a - gaps_b).sum())
    )
    length_variation = float(
        np.abs((highs_a - lows_a) - (highs_b - lows_b)).sum()
    )
    checks = [
        _check("edge-and-gap-variation<=2C", edge_gap_variation, 2.0 * c_total, check_tol),
        _check("band-length-variation<=2C", length_variation, 2.0 * c_total, check_tol),
    ]
    params = {
        "c_total": c_total,
        "theta_minus_a": minus_a,
        "theta_plus_a": plus_a,
        "theta_minus_b": minus_b,
        "theta_plus_b": plus_b,
    }

    cls_a = classify(spec_a)
    cls_b = classify(spec_b)
    zero_a = all(q == 0.0 for q in spec_a.potentials())
    zero_b = all(q == 0.0 for q in spec_b.potentials())

    def zero_fiber(spec, kind):
        theta = (0.0,) * spec.dimension
        return fiber_stack(spec, np.atleast_2d(np.asarray(theta)), kind)[0]

    bip_a = cls_a.periodic_bipartite and cls_a.is_regular and cls_a.is_loop_graph and zero_a
    bip_b = cls_b.periodic_bipartite and cls_b.is_regular and cls_b.is_loop_graph and zero_b
    if bip_a and bip_b and cls_a.regular_degree == cls_b.regular_degree:
        c_pair = _entry_l1(zero_fiber(spec_a, "laplacian"), zero_fiber(spec_b, "laplacian"))
        checks.append(
            _check(
                "bipartite-pair-gap-variation<=4C0",
                float(np.abs(gaps_a - gaps_b).sum()),
                4.0 * c_pair,
                check_tol,
            )
        )
        checks.append(
            _check(
                "bipartite-pair-band-variation<=4C0",
                length_variation,
                4.0 * c_pair,
                check_tol,
            )
        )
        params["c_bipartite_pair"] = c_pair

    def mixed_case(precise_spec, precise_cls, lows_p, highs_p, gaps_p, bip_spec, bip_cls, gaps_q):
        kappa = bip_cls.regular_degree
        flip = precise_cls.precise_quasimomentum
        base = zero_fiber(bip_spec, "laplacian")
        c_mixed = _entry_l1(zero_fiber(precise_spec, "schrodinger"), base) + _entry_l1(
            fiber(precise_spec, flip) + base,
            2.0 * kappa * np.eye(precise_spec.num_vertices),
        )
        lhs_edges = (
            abs(lows_p[0])
            + abs(2.0 * kappa - highs_p[-1])
            + float(np.abs(gaps_p - gaps_q).sum())
        )
        checks.append(
            _check("precise-vs-bipartite-gap-variation<=2C1", lhs_edges, 2.0 * c_mixed, check_tol)
        )
        checks.append(
            _check("precise-vs-bipartite-band-variation<=2C1", length_variation, 2.0 * c_mixed, check_tol)
        )
        params["c_precise_vs_bipartite"] = c_mixed

    if cls_a.precise_quasimomentum is not None and bip_b:
        mixed_case(spec_a, cls_a, lows_a, highs_a, gaps_a, spec_b, cls_b, gaps_b)
    elif cls_b.precise_quasimomentum is not None and bip_a:
        mixed_case(spec_b, cls_b, lows_b, highs_b, gaps_b, spec_a, cls_a, gaps_a)

    return EstimateReport("stability-bounds", tuple(checks), params)


@dataclass(frozen=True)
class DiracConeReport:
    """Quadratic-remainder audit of the conical touching in the honeycomb fiber."""

    radius: float
    max_error: float
    max_error_half: float
    ratio: float
    touch_eigenvalues: tuple[float, float]


def dirac_expansion_check(q1: float, radius: float, samples: int = 64) -> DiracConeReport:
    """Expand the honeycomb fiber around its conical point.

    With staggered potential (q1, -q1) the fiber equals 3*I plus the 2-D
    Dirac symbol sigma_1 t_1 + sigma_2 t_2 + q1 sigma_3 up to O(|t|^2); this
    measures the remainder on circles |t| = radius and radius/2.
    """
    from .lattices import hexagonal

    if radius <= 0.0:
        raise ParameterError("radius must be positive")
    spec = hexagonal(q=(q1, -q1))
    cone = np.array([TWO_PI / 3.0, -TWO_PI / 3.0])
    touch = fiber_eigenvalues(spec, cone, "schrodinger")

    root3 = math.sqrt(3.0)

    def remainder(t1: float, t2: float) -> float:
        # Inverse of t1 = sqrt(3)(s1 - s2)/2, t2 = -(s1 + s2)/2, the linear
        # momentum map under which the off-diagonal entry is t1 - i*t2 up to
        # quadratic terms.
        s1 = t1 / root3 - t2
        s2 = -t1 / root3 - t2
        theta = cone + np.array([s1, s2])
        fiber = fiber_stack(spec, theta[None], "schrodinger")[0]
        dirac = np.array(
            [[q1, t1 - 1j * t2], [t1 + 1j * t2, -q1]], dtype=complex
        )
        delta = fiber - 3.0 * np.eye(2) - dirac
        return float(np.sqrt((np.abs(delta) ** 2).sum()))

    def ring_max(r: float) -> float:
        worst = 0.0
        for k in range(samples):
            angle = TWO_PI * k / samples
            worst = max(worst, remainder(r * math.cos(angle), r * math.sin(angle)))
        return worst

    max_error = ring_max(radius)
    max_error_half = ring_max(radius / 2.0)
    ratio = max_error_half / max_error if max_error > 0.0 else math.nan
    return DiracConeReport(
        radius, max_error, max_error_half, ratio, (float(touch[0]), float(touch[1]))
    )


def check_flat_band_block(
    spec: PeriodicGraphSpec,
    split,
    kind: str = "schrodinger",
    grid: TorusGrid | None = None,
    jobs: int = 1,
    band_structure: BandStructure | None = None,
):
    """Constant eigenvalues of the fiber block on `split` force flat bands.

    `split` must leave out exactly one border vertex.  Every constant block
    eigenvalue of multiplicity m >= 2 is returned as (value, m) after
    checking the full operator exhibits it as a flat band of multiplicity at
    least m - 1.
    """
    split = tuple(int(i) for i in split)
    nv = spec.num_vertices
    if len(split) != nv - 1 or len(set(split)) != len(split):
        raise ParameterError("split must isolate exactly one border vertex")
    if not all(0 <= i < nv for i in split):
        raise ParameterError("split references an invalid vertex index")
    if grid is None:
        grid = TorusGrid.default_for(spec.dimension)
    thetas = grid.points()
    stack = fiber_stack(spec, thetas, kind)
    block = stack[:, split, :][:, :, split]
    values = eigh_stack(block)[0] if jobs <= 1 else _chunked_eigs(block, jobs)
    lows = values.min(axis=0)
    highs = values.max(axis=0)
    scale = max(float(np.abs(lows).max()), float(np.abs(highs).max()))
    tol = FLAT_TOL_COEFF * (1.0 + scale)
    groups: list[list[float]] = []
    previous = False
    for n in range(nv - 1):
        if highs[n] - lows[n] <= tol:
            value = 0.5 * (lows[n] + highs[n])
            if previous and abs(groups[-1][-1] - value) <= FLAT_MERGE_TOL:
                groups[-1].append(value)
            else:
                groups.append([value])
            previous = True
        else:
            previous = False
    found = [
        (float(sum(g) / len(g)), len(g)) for g in groups if len(g) >= 2
    ]
    bs = band_structure or compute_band_structure(spec, kind, grid, jobs=jobs)
    for value, mult in found:
        matched = any(
            abs(fb.value - value) <= 1e-6 and fb.multiplicity >= mult - 1
            for fb in bs.flat_bands
        )
        if not matched:
            raise InvariantViolation(
                f"block eigenvalue {value} of multiplicity {mult} is not a flat band "
                f"of multiplicity >= {mult - 1}"
            )
    return tuple(found)


def _chunked_eigs(stack: np.ndarray, jobs: int) -> np.ndarray:
    chunks = np.array_split(stack, jobs)
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(lambda chunk: eigh_stack(chunk)[0], chunks))
    return np.concatenate(parts, axis=0)


def estimate_suite(
    spec: PeriodicGraphSpec,
    kind: str = "schrodinger",
    grid: TorusGrid | None = None,
    jobs: int = 1,
    check_tol: float = CHECK_TOL,
    flat_tol: float | None = None,
    refine: bool = False,
):
    """Classification, band structure, and every applicable estimate report.

    Returns (classification, band_structure, reports).
    """
    cls = classify(spec)
    if not cls.is_connected:
        raise PreconditionError("periodic cover is disconnected")
    if grid is None:
        grid = TorusGrid.default_for(spec.dimension)
    bs = compute_band_structure(
        spec, kind, grid, flat_tol=flat_tol, refine=refine, jobs=jobs
    )
    zero = (0.0,) * spec.dimension
    reports = []

    if kind == "normalized":
        zero_vals = fiber_eigenvalues(spec, zero, "normalized")
        checks = (
            _check("0<=normalized-min", 0.0, bs.bands[0].low, check_tol),
            _check("normalized-max<=2", bs.bands[-1].high, 2.0, check_tol),
            _deviation("minimum-attained-at-zero-point", bs.bands[0].low - zero_vals[0], check_tol),
        )
        reports.append(EstimateReport("normalized-containment", checks))
        return cls, bs, tuple(reports)

    potentials = spec.potentials()
    q_zero = all(q == 0.0 for q in potentials)
    if kind == "laplacian" or (q_zero and kind == "schrodinger"):
        bs0 = bs
    else:
        bs0 = compute_band_structure(
            spec, "laplacian", grid, flat_tol=flat_tol, refine=refine, jobs=jobs
        )

    reports.append(
        verify_total_band_bound(spec, kind, grid, jobs, check_tol, band_structure=bs)
    )
    reports.append(
        verify_gap_bound(
            spec, grid, jobs, check_tol, band_structure=bs, laplacian_structure=bs0
        )
    )

    zero_vals0 = fiber_eigenvalues(spec, zero, "laplacian")
    zero_vals = fiber_eigenvalues(spec, zero, kind)
    containment = (
        _check("0<=laplacian-min", 0.0, bs0.bands[0].low, check_tol),
        _check("laplacian-max<=2*max-degree", bs0.bands[-1].high, 2.0 * cls.max_degree, check_tol),
        _deviation("laplacian-zero-eigenvalue-at-zero-point", zero_vals0[0], check_tol),
        _deviation("minimum-attained-at-zero-point", bs.bands[0].low - zero_vals[0], check_tol),
    )
    reports.append(EstimateReport("spectral-containment", containment))

    if cls.is_loop_graph:
        lows = np.asarray([b.low for b in bs.bands])
        dev = float(np.abs(lows - zero_vals).max())
        checks = [_deviation("loop-lower-endpoints-at-zero-point", dev, check_tol)]
        params = {}
        if cls.precise_quasimomentum is not None:
            two_beta = 2.0 * cls.bridge_count
            checks.append(
                _deviation(
                    "flip-corner-band-length-identity",
                    bs.band_length_sum - two_beta,
                    check_tol,
                )
            )
            _, bridges = bridge_count(spec)
            single_vertex = len({e.tail for e in bridges}) <= 1
            params["bridges_at_single_vertex"] = single_vertex
            if single_vertex:
                checks.append(
                    _deviation(
                        "flip-corner-measure-identity",
                        bs.spectrum_measure - two_beta,
                        check_tol,
                    )
                )
        reports.append(EstimateReport("loop-graph-endpoints", tuple(checks), params))

    if cls.periodic_bipartite and cls.is_regular:
        kappa = cls.regular_degree
        checks = [
            _check(
                "bipartite-gap-floor<=laplacian-gap-sum",
                2.0 * (kappa - cls.bridge_count),
                bs0.gap_length_sum,
                check_tol,
            )
        ]
        if cls.fundamental_bipartite or cls.is_loop_graph:
            # Band endpoints mirror through the degree only when the quotient
            # 2-colors (every fiber is symmetric) or when endpoints come from
            # the zero fiber and its mirror.
            lows0 = np.asarray([b.low for b in bs0.bands])
            highs0 = np.asarray([b.high for b in bs0.bands])
            symmetry_dev = float(np.abs(lows0 + highs0[::-1] - 2.0 * kappa).max())
            checks.append(_deviation("bipartite-band-symmetry", symmetry_dev, check_tol))
        if cls.is_loop_graph:
            mirrored = bipartite_loop_endpoints(spec)
            lows_m = np.asarray([b.low for b in mirrored.bands])
            highs_m = np.asarray([b.high for b in mirrored.bands])
            dev = max(
                float(np.abs(lows_m - lows0).max()),
                float(np.abs(highs_m - highs0).max()),
            )
            checks.append(_deviation("bipartite-loop-endpoint-match", dev, check_tol))
        reports.append(EstimateReport("bipartite-regular-structure", tuple(checks)))

    return cls, bs, tuple(reports)
