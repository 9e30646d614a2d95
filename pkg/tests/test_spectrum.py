import math

import numpy as np
import pytest

from graphbands import (
    ParameterError,
    PreconditionError,
    TorusGrid,
    bipartite_loop_endpoints,
    check_first_band_nondegenerate,
    check_flat_band_block,
    classify,
    compute_band_structure,
    dirac_expansion_check,
    fiber_eigenvalues,
    find_uniform_extremizers,
    large_coupling_analysis,
    loop_band_endpoints,
    stability_constants,
    verify_gap_bound,
    verify_total_band_bound,
    with_potentials,
)
from graphbands import EdgeRecord, PeriodicGraphSpec, VertexInfo
from graphbands.lattices import (
    FiniteGraph,
    bcc,
    bipartite_chain,
    cubic,
    decorate,
    fcc,
    hexagonal,
    star,
    subdivided,
    triangular,
)

PI = math.pi


def band_tuples(bs):
    return [(b.low, b.high) for b in bs.bands]


def test_grid_contains_corners():
    grid = TorusGrid(3, 5)  # odd count: corners are not native points
    pts = set(map(tuple, grid.points().tolist()))
    for corner in [(0.0, 0.0, 0.0), (PI, PI, PI), (0.0, PI, 0.0)]:
        assert corner in pts
    with pytest.raises(ParameterError):
        TorusGrid(2, 1)


def test_default_grid_sizes():
    assert TorusGrid.default_for(1).points_per_axis == 96
    assert TorusGrid.default_for(2).points_per_axis == 96
    assert TorusGrid.default_for(3).points_per_axis == 24
    assert TorusGrid.default_for(4).points_per_axis == 12


def test_hexagonal_band_structure():
    bs = compute_band_structure(hexagonal(), "laplacian")
    assert np.allclose(band_tuples(bs), [(0.0, 3.0), (3.0, 6.0)], atol=1e-9)
    assert bs.flat_bands == ()
    assert bs.gaps == ()
    assert bs.spectrum_measure == pytest.approx(6.0, abs=1e-9)


def test_hexagonal_with_staggered_potential():
    bs = compute_band_structure(hexagonal(q=(1.0, -1.0)))
    expected = [(3.0 - math.sqrt(10.0), 2.0), (4.0, 3.0 + math.sqrt(10.0))]
    assert np.allclose(band_tuples(bs), expected, atol=1e-9)
    assert len(bs.gaps) == 1
    assert np.allclose(bs.gaps[0], (2.0, 4.0), atol=1e-9)


def test_bcc_band_structure():
    bs = compute_band_structure(bcc(), "laplacian")
    assert np.allclose(band_tuples(bs), [(0.0, 8.0), (12.0, 20.0)], atol=1e-9)
    assert np.allclose(bs.gaps, [(8.0, 12.0)], atol=1e-9)


def test_fcc_flat_band():
    bs = compute_band_structure(fcc(), "laplacian")
    assert len(bs.flat_bands) == 1
    assert bs.flat_bands[0].value == pytest.approx(4.0, abs=1e-9)
    assert bs.flat_bands[0].multiplicity == 2
    assert np.allclose(
        [(b.low, b.high) for b in bs.open_bands], [(0.0, 4.0), (16.0, 24.0)], atol=1e-9
    )
    assert np.allclose(bs.gaps, [(4.0, 16.0)], atol=1e-9)


def test_subdivided_one_extra_vertex():
    bs = compute_band_structure(subdivided(2, 1), "laplacian")
    assert len(bs.flat_bands) == 1
    assert bs.flat_bands[0].value == pytest.approx(2.0, abs=1e-9)
    assert bs.flat_bands[0].multiplicity == 1
    assert np.allclose(
        [(b.low, b.high) for b in bs.open_bands], [(0.0, 2.0), (4.0, 6.0)], atol=1e-9
    )


def test_star_band_structure():
    bs = compute_band_structure(star(2, 3), "laplacian")
    x = 5.5
    root = math.sqrt(x * x - 8.0)
    assert np.allclose(
        band_tuples(bs), [(0.0, x - root), (1.0, 1.0), (3.0, x + root)], atol=1e-9
    )
    assert bs.flat_bands[0].value == pytest.approx(1.0, abs=1e-9)
    assert bs.spectrum_measure == pytest.approx(8.0, abs=1e-9)
    # The isolated flat value sits inside the gap without splitting it.
    assert len(bs.gaps) == 1
    assert np.allclose(bs.gaps[0], (x - root, 3.0), atol=1e-9)


def test_cubic_band_structures():
    for d in (1, 2, 3):
        bs = compute_band_structure(cubic(d), "laplacian")
        assert np.allclose(band_tuples(bs), [(0.0, 4.0 * d)], atol=1e-9)


def test_triangular_band_structure():
    bs = compute_band_structure(triangular(), "laplacian")
    assert np.allclose(band_tuples(bs), [(0.0, 9.0)], atol=1e-9)


def test_disconnected_cover_rejected():
    spec = PeriodicGraphSpec(
        2,
        (VertexInfo("a"),),
        (EdgeRecord(0, 0, (2, 0)), EdgeRecord(0, 0, (0, 1))),
    )
    with pytest.raises(PreconditionError):
        compute_band_structure(spec)


def test_grid_refinement_containment():
    coarse = compute_band_structure(hexagonal(), "laplacian", TorusGrid(2, 12))
    fine = compute_band_structure(hexagonal(), "laplacian", TorusGrid(2, 24))
    for a, b in zip(coarse.bands, fine.bands):
        assert a.low >= b.low - 1e-12
        assert a.high <= b.high + 1e-12


def test_jobs_do_not_change_results():
    grid = TorusGrid(2, 24)
    ref = compute_band_structure(star(2, 3), grid=grid, jobs=1)
    for jobs in (2, 3, 4):
        par = compute_band_structure(star(2, 3), grid=grid, jobs=jobs)
        assert band_tuples(par) == band_tuples(ref)


def test_refine_improves_off_grid_extrema():
    # On a coarse grid missing the true maximizer, refinement must push the
    # top endpoint toward 9 without overshooting.
    coarse = TorusGrid(2, 16)  # 2*pi/3 is not a multiple of 2*pi/16
    plain = compute_band_structure(triangular(), "laplacian", coarse)
    refined = compute_band_structure(triangular(), "laplacian", coarse, refine=True)
    assert plain.bands[0].high < 9.0 - 1e-6
    assert refined.bands[0].high == pytest.approx(9.0, abs=1e-6)
    assert refined.bands[0].high <= 9.0 + 1e-9


def test_total_band_bound_reports():
    report = verify_total_band_bound(cubic(2), "laplacian")
    assert report.passed
    assert report.params["equality_attained"]
    assert report.params["band_length_sum"] == pytest.approx(8.0, abs=1e-9)

    report = verify_total_band_bound(hexagonal(), "laplacian")
    assert report.passed
    assert not report.params["equality_attained"]
    assert report.params["band_length_sum"] == pytest.approx(6.0, abs=1e-9)
    assert report.params["bridge_count"] == 4

    report = verify_total_band_bound(triangular(), "laplacian")
    assert report.passed
    assert report.params["band_length_sum"] == pytest.approx(9.0, abs=1e-9)
    assert report.params["bridge_count"] == 6


def test_gap_bound_star_equality():
    report = verify_gap_bound(star(2, 3))
    assert report.passed
    expected = math.sqrt(22.25) - 2.5
    assert report.params["gap_length_sum"] == pytest.approx(expected, abs=1e-9)
    hull_minus = report.params["band_hull"] - 2.0 * report.params["bridge_count"]
    assert report.params["gap_length_sum"] == pytest.approx(hull_minus, abs=1e-9)


def test_gap_bound_bcc_large_potential():
    report = verify_gap_bound(bcc(q=(32.0, 0.0)))
    assert report.passed
    assert report.params["gap_length_sum"] == pytest.approx(20.0, abs=1e-9)


def test_gap_bound_trivial_for_hexagonal():
    report = verify_gap_bound(hexagonal())
    assert report.passed
    assert report.params["gap_length_sum"] == 0.0
    # Hull minus twice the bridge count is negative here.
    assert report.checks[0].lhs < 0.0


def test_first_band_condition_detection():
    assert check_first_band_nondegenerate(cubic(2)) == (True, True)
    assert check_first_band_nondegenerate(hexagonal()) == (True, True)
    condition, nondegenerate = check_first_band_nondegenerate(subdivided(2, 2))
    assert condition is False
    assert nondegenerate is True
    condition, _ = check_first_band_nondegenerate(subdivided(2, 1))
    assert condition is True


def test_loop_band_endpoints_star():
    bs = loop_band_endpoints(star(2, 3))
    x = 5.5
    root = math.sqrt(x * x - 8.0)
    assert np.allclose(
        band_tuples(bs), [(0.0, x - root), (1.0, 1.0), (3.0, x + root)], atol=1e-12
    )
    grid_bs = compute_band_structure(star(2, 3))
    assert np.allclose(band_tuples(bs), band_tuples(grid_bs), atol=1e-9)


def test_loop_band_endpoints_cubic():
    for d in (1, 2, 3):
        bs = loop_band_endpoints(cubic(d))
        assert np.allclose(band_tuples(bs), [(0.0, 4.0 * d)], atol=1e-12)


def test_loop_band_endpoints_requires_loop_graph():
    with pytest.raises(PreconditionError):
        loop_band_endpoints(hexagonal())


def test_loop_band_endpoints_imprecise_fallback():
    bs = loop_band_endpoints(triangular())
    assert np.allclose(band_tuples(bs), [(0.0, 9.0)], atol=1e-9)


def test_precise_loop_band_sum_identity():
    for spec in (cubic(2), star(2, 4), bipartite_chain(2, 3)):
        cls = classify(spec)
        assert cls.precise_quasimomentum is not None
        bs = loop_band_endpoints(spec)
        assert bs.band_length_sum == pytest.approx(
            2.0 * cls.bridge_count, abs=1e-9
        )


def test_bipartite_loop_endpoints_match_grid():
    for spec in (cubic(2), cubic(3), bipartite_chain(2, 3)):
        mirrored = bipartite_loop_endpoints(spec)
        grid_bs = compute_band_structure(spec, "laplacian")
        assert np.allclose(band_tuples(mirrored), band_tuples(grid_bs), atol=1e-9)


def test_bipartite_loop_endpoints_name_failing_precondition():
    with pytest.raises(PreconditionError, match="bipartite"):
        bipartite_loop_endpoints(triangular())
    with pytest.raises(PreconditionError, match="regular"):
        bipartite_loop_endpoints(star(2, 3))
    with pytest.raises(PreconditionError, match="loop"):
        bipartite_loop_endpoints(hexagonal())


def test_uniform_extremizers():
    # Phase-flipping loop graphs extremize every branch at 0 and the corner.
    assert find_uniform_extremizers(star(2, 3)) == ((0.0, 0.0), (PI, PI))
    assert find_uniform_extremizers(cubic(3)) == ((0.0,) * 3, (PI,) * 3)
    # Hexagonal branches bottom out at different points; no uniform corner.
    assert find_uniform_extremizers(hexagonal(), kind="laplacian") == (None, None)
    # Both branch maxima sit at the all-pi corner even though the minima split.
    minus, plus = find_uniform_extremizers(bcc(), kind="laplacian")
    assert minus is None
    assert plus == (PI, PI, PI)


def test_large_coupling_hexagonal():
    spec = hexagonal(q=(1.0, -1.0))
    for t in (100.0, 400.0):
        report = large_coupling_analysis(spec, t)
        exact = 2.0 * (math.sqrt(9.0 + t * t) - t)
        assert report.spectrum_measure == pytest.approx(exact, rel=1e-9)
        assert report.band_sum_limit == 0.0


def test_large_coupling_star_limit_and_remainder():
    spec = star(2, 3, q=(2.0, 4.0, 0.0))
    deviations = {}
    for t in (100.0, 200.0, 400.0):
        report = large_coupling_analysis(spec, t)
        deviations[t] = report.max_deviation
        assert report.band_sum_limit == pytest.approx(8.0, abs=1e-12)
    assert abs(deviations[400.0] - 8.0) < 8.0  # sanity: deviations shrink
    assert 0.2 <= deviations[200.0] / deviations[100.0] <= 0.3
    assert 0.2 <= deviations[400.0] / deviations[200.0] <= 0.3


def test_large_coupling_requires_distinct_potentials():
    with pytest.raises(PreconditionError):
        large_coupling_analysis(star(2, 3), 100.0)


def test_stability_identical_specs():
    report = stability_constants(star(2, 3), star(2, 3))
    assert report.passed
    assert report.params["c_total"] == 0.0
    for check in report.checks[:2]:
        assert check.lhs == 0.0


def test_stability_potential_difference():
    report = stability_constants(star(2, 3, q=(0.3, 0.0, 0.0)), star(2, 3))
    assert report.passed
    assert report.params["c_total"] == pytest.approx(0.6, abs=1e-12)


def test_stability_mixed_precise_vs_bipartite():
    report = stability_constants(star(2, 3), bipartite_chain(2, 3))
    assert report.passed
    assert "c_precise_vs_bipartite" in report.params
    names = {c.name for c in report.checks}
    assert "precise-vs-bipartite-gap-variation<=2C1" in names


def test_stability_bipartite_pair():
    report = stability_constants(bipartite_chain(2, 3), bipartite_chain(2, 3))
    assert report.passed
    assert "c_bipartite_pair" in report.params


def test_stability_vertex_count_mismatch():
    with pytest.raises(PreconditionError, match="mismatch"):
        stability_constants(hexagonal(), fcc())


def test_stability_requires_uniform_extremizers():
    with pytest.raises(PreconditionError, match="band"):
        stability_constants(hexagonal(), hexagonal())


def test_dirac_cone_report():
    report = dirac_expansion_check(0.5, 1e-2)
    assert report.touch_eigenvalues[0] == pytest.approx(2.5, abs=1e-12)
    assert report.touch_eigenvalues[1] == pytest.approx(3.5, abs=1e-12)
    assert 0.15 <= report.ratio <= 0.35
    massless = dirac_expansion_check(0.0, 1e-3)
    assert massless.touch_eigenvalues[0] == pytest.approx(3.0, abs=1e-12)
    with pytest.raises(ParameterError):
        dirac_expansion_check(0.5, 0.0)


def test_flat_band_block_fcc():
    found = check_flat_band_block(fcc(), (0, 1, 2))
    assert len(found) == 1
    assert found[0][0] == pytest.approx(4.0, abs=1e-9)
    assert found[0][1] == 3


def test_flat_band_block_subdivided():
    for n in (1, 2):
        spec = subdivided(2, n)
        split = tuple(range(2 * n))
        found = check_flat_band_block(spec, split)
        expected = sorted(2.0 - 2.0 * math.cos(PI * k / (n + 1)) for k in range(1, n + 1))
        assert [round(v, 9) for v, _ in found] == [round(v, 9) for v in expected]
        assert all(mult == 2 for _, mult in found)


def test_flat_band_block_star_with_repeated_potential():
    spec = star(2, 4, q=(0.5, 0.5, 0.0, 0.0))
    found = check_flat_band_block(spec, (0, 1, 2))
    assert (1.5, 2) in [(round(v, 9), m) for v, m in found]


def test_flat_band_block_validates_split():
    with pytest.raises(ParameterError):
        check_flat_band_block(fcc(), (0, 1))
    with pytest.raises(ParameterError):
        check_flat_band_block(fcc(), (0, 1, 9))


def test_spectrum_minimum_at_zero_everywhere():
    rng = np.random.default_rng(31)
    for spec in (hexagonal(), bcc(), fcc(), star(2, 3), subdivided(2, 2)):
        q = rng.uniform(-3.0, 3.0, size=spec.num_vertices)
        shifted = with_potentials(spec, q)
        bs = compute_band_structure(shifted)
        zero_vals = fiber_eigenvalues(shifted, (0.0,) * spec.dimension)
        assert bs.bands[0].low >= zero_vals[0] - 1e-9
        assert bs.bands[0].low == pytest.approx(zero_vals[0], abs=1e-9)


def test_zero_never_flat_for_laplacian():
    for spec in (cubic(2), hexagonal(), fcc(), star(2, 3), subdivided(2, 2)):
        bs = compute_band_structure(spec, "laplacian")
        assert bs.bands[0].width > 1e-6
        assert bs.bands[0].low == pytest.approx(0.0, abs=1e-9)


def test_laplacian_containment():
    for spec in (hexagonal(), bcc(), fcc(), subdivided(2, 1)):
        bs = compute_band_structure(spec, "laplacian")
        kappa = max(d for d in __import__("graphbands").degrees(spec))
        assert bs.bands[0].low >= -1e-9
        assert bs.bands[-1].high <= 2.0 * kappa + 1e-9


def test_adjacency_bound():
    from graphbands import degrees
    from graphbands.spectrum import grid_eigenvalues

    for spec in (hexagonal(), triangular(), star(2, 3)):
        grid = TorusGrid(spec.dimension, 12)
        values = grid_eigenvalues(spec, grid.points(), "adjacency")
        kappa = max(degrees(spec))
        assert values.min() >= -kappa - 1e-9
        assert values.max() <= kappa + 1e-9


def test_shifted_eigenvalue_bounds_with_potential():
    # Potentials normalized to start at zero squeeze each branch between the
    # sorted potential and the potential plus twice the top degree, and
    # between the potential-free branch and branch plus the largest value.
    from graphbands import degrees

    rng = np.random.default_rng(32)
    spec = star(2, 3)
    for _ in range(5):
        q = rng.uniform(0.0, 4.0, size=3)
        q -= q.min()
        shifted = with_potentials(spec, q)
        q_sorted = np.sort(q)
        kappa = max(degrees(spec))
        for _ in range(5):
            theta = rng.uniform(0.0, 2 * PI, size=2)
            vals = fiber_eigenvalues(shifted, theta)
            vals0 = fiber_eigenvalues(spec, theta, "laplacian")
            assert (vals >= q_sorted - 1e-9).all()
            assert (vals <= q_sorted + 2.0 * kappa + 1e-9).all()
            assert (vals >= vals0 - 1e-9).all()
            assert (vals <= vals0 + q_sorted[-1] + 1e-9).all()


def test_loop_lower_endpoints_on_grid():
    for spec in (cubic(2), triangular(), star(2, 4)):
        bs = compute_band_structure(spec)
        zero_vals = fiber_eigenvalues(spec, (0.0,) * spec.dimension)
        lows = np.asarray([b.low for b in bs.bands])
        assert np.abs(lows - zero_vals).max() < 1e-9


def test_flat_bands_touch_open_bands_for_subdivided():
    for n in (1, 2, 3):
        bs = compute_band_structure(subdivided(2, n), "laplacian")
        endpoints = [b.low for b in bs.open_bands] + [b.high for b in bs.open_bands]
        for fb in bs.flat_bands:
            assert min(abs(fb.value - e) for e in endpoints) < 1e-9


def test_bipartite_spectrum_symmetry_with_odd_potential():
    # Staggered potential keeps the honeycomb spectrum symmetric about the
    # degree after combining each point with its reflection.
    spec = hexagonal(q=(0.8, -0.8))
    rng = np.random.default_rng(33)
    for _ in range(8):
        theta = rng.uniform(0.0, 2 * PI, size=2)
        pooled = np.concatenate(
            [fiber_eigenvalues(spec, theta), fiber_eigenvalues(spec, -theta)]
        )
        pooled.sort()
        assert np.abs(pooled + pooled[::-1] - 6.0).max() < 1e-9


def test_decorated_random_graphs_respect_estimates():
    rng = np.random.default_rng(34)
    grid = TorusGrid(2, 24)
    for _ in range(10):
        base = [cubic(2), triangular(), star(2, 2)][int(rng.integers(3))]
        extra = int(rng.integers(2, 5))
        edges = [(i, int(rng.integers(0, i))) for i in range(1, extra)]
        attachment = FiniteGraph(extra, tuple((b, a) for a, b in edges))
        spec = decorate(base, attachment, int(rng.integers(base.num_vertices)))
        spec = with_potentials(spec, rng.uniform(-3.0, 3.0, size=spec.num_vertices))
        report = verify_total_band_bound(spec, grid=grid)
        assert report.passed
        gap_report = verify_gap_bound(spec, grid=grid)
        assert gap_report.passed


def test_band_bookkeeping_invariant():
    # Flat multiplicities and open bands together account for every branch.
    for spec in (fcc(), star(2, 3), subdivided(2, 2), hexagonal(), cubic(2)):
        bs = compute_band_structure(spec, "laplacian")
        total = sum(f.multiplicity for f in bs.flat_bands) + len(bs.open_bands)
        assert total == spec.num_vertices
        lows = [b.low for b in bs.bands]
        highs = [b.high for b in bs.bands]
        assert all(lo <= hi for lo, hi in zip(lows, highs))
        assert lows == sorted(lows)
        assert highs == sorted(highs)


def test_normalized_band_structure_range():
    for spec in (hexagonal(), star(2, 3), bcc()):
        bs = compute_band_structure(spec, "normalized")
        assert bs.bands[0].low >= -1e-9
        assert bs.bands[-1].high <= 2.0 + 1e-9
