import numpy as np
import pytest

from silverstep.certify import (
    CertificateReport,
    anchored_convexity_gap,
    bw_sectional_curvature,
    certificate_weights,
    cocoercivity_gap,
    combination_gap,
    descent_gap,
    energy_inequality_sides,
    entropy_curve_check,
    entropy_curve_values,
    interpolation_gap,
    run_suite,
    sample_point,
    write_reports,
)
from silverstep.linalg import SpdMatrix
from silverstep.objectives import ConvexQuadratic, QuadraticPotentialBW, make_sigma_star
from silverstep.optimizer import rgd_run
from silverstep.rng import gaussian_symmetric, make_rng
from silverstep.schedules import RHO, rate_factor, silver_schedule


def unit_quadratic():
    return ConvexQuadratic(np.eye(1))


def bw_quadratic(d=3, kappa=10.0, seed=0):
    rng = make_rng(seed, stream=55)
    m_star = rng.uniform(0, 1, size=d)
    return QuadraticPotentialBW(m_star, make_sigma_star(d, 1.0, 1.0 / kappa, seed + 1))


# -- pointwise gaps -----------------------------------------------------------


def test_interpolation_same_point_zero():
    obj = unit_quadratic()
    x = obj.manifold.point([0.7])
    assert interpolation_gap(obj, obj.manifold, x, x) == pytest.approx(0.0, abs=1e-14)


def test_interpolation_tight_and_slack():
    obj = unit_quadratic()
    eu = obj.manifold
    xi, xj = eu.point([1.0]), eu.point([0.0])
    assert interpolation_gap(obj, eu, xi, xj, L=1.0) == pytest.approx(0.0, abs=1e-14)
    assert interpolation_gap(obj, eu, xi, xj, L=2.0) == pytest.approx(1.0, abs=1e-14)


def test_anchored_reduces_to_plain_convexity_at_anchor():
    obj = bw_quadratic()
    man = obj.manifold
    rng = make_rng(1)
    for _ in range(20):
        x = sample_point(man, rng)
        y = sample_point(man, rng)
        gap_anchor_x = anchored_convexity_gap(obj, man, x, y, x)
        plain = (
            obj.value(y)
            - obj.value(x)
            - man.inner(x, obj.grad(x), man.log(x, y))
        )
        assert gap_anchor_x == pytest.approx(plain, abs=1e-9)
        assert anchored_convexity_gap(obj, man, x, x, y) == pytest.approx(0.0, abs=1e-10)


def test_cocoercivity_tight_case():
    obj = unit_quadratic()
    eu = obj.manifold
    assert cocoercivity_gap(obj, eu, eu.point([1.0]), eu.point([0.0]), L=1.0) == pytest.approx(
        0.0, abs=1e-14
    )
    x = eu.point([0.3])
    assert cocoercivity_gap(obj, eu, x, x) == pytest.approx(0.0, abs=1e-14)


def test_descent_equality_along_exact_gradient_step():
    # quadratic with uniform curvature L: equality at y = x - (1/L) grad
    obj = ConvexQuadratic(2.0 * np.eye(2))
    eu = obj.manifold
    x = eu.point([1.0, -0.5])
    y = eu.exp(x, eu.scale(obj.grad(x), -1.0 / obj.smoothness_L))
    assert descent_gap(obj, eu, x, y) == pytest.approx(0.0, abs=1e-12)
    assert descent_gap(obj, eu, x, x) == pytest.approx(0.0, abs=1e-14)


def test_chain_from_certificates_to_cocoercivity():
    # wherever both orderings of the certificate hold, co-coercivity holds;
    # where co-coercivity holds, the transported-gradient ratio obeys L
    obj = bw_quadratic(d=4, kappa=20.0, seed=3)
    man = obj.manifold
    rng = make_rng(4)
    for _ in range(100):
        x = sample_point(man, rng)
        y = sample_point(man, rng)
        q_xy = interpolation_gap(obj, man, x, y)
        q_yx = interpolation_gap(obj, man, y, x)
        coco = cocoercivity_gap(obj, man, x, y)
        if q_xy >= 0 and q_yx >= 0:
            assert coco >= -1e-8
        if coco >= 0:
            moved = man.transport(y, x, obj.grad(y))
            diff = man.add(moved, man.scale(obj.grad(x), -1.0))
            ratio = np.sqrt(man.norm_sq(x, diff)) / max(man.dist(x, y), 1e-300)
            assert ratio <= obj.smoothness_L + 1e-6


# -- certificate weights -------------------------------------------------------


def test_weights_level1_exact():
    a1 = 1.0 / (2.0 * rate_factor(1))
    expected = np.array([[0.0, RHO, 0.0], [1.0, 0.0, RHO - 1.0], [RHO - 1.0, a1, 0.0]])
    got = certificate_weights(1).array
    assert np.array_equal(got, expected)
    assert a1 == pytest.approx(2.75353, abs=1e-5)


@pytest.mark.parametrize("k", range(1, 9))
def test_weights_nonnegative(k):
    assert certificate_weights(k).min_entry() >= -1e-12


def test_weights_optimum_row_tracks_schedule():
    from silverstep.schedules import silver_step

    w = certificate_weights(5)
    n = 2 ** 5 - 1
    for j in range(n):
        assert w.array[-1, j] == pytest.approx(silver_step(j), abs=1e-12)
    assert w.array[-1, n] == pytest.approx(1.0 / (2.0 * rate_factor(5)), abs=1e-12)


def test_weights_range_check():
    with pytest.raises(ValueError):
        certificate_weights(0)
    with pytest.raises(ValueError):
        certificate_weights(13)


# -- trajectory inequalities ----------------------------------------------------


def euclidean_silver_run(obj, x0, k):
    sched = silver_schedule(k, smoothness_L=obj.smoothness_L)
    return rgd_run(obj.manifold, obj, sched, obj.manifold.point(x0), 2 ** k - 1)


def test_energy_sides_flat_space_equality():
    rng = make_rng(5)
    for trial in range(10):
        d = int(rng.integers(1, 5))
        lam = rng.uniform(0.1, 1.0, size=d)
        lam[0] = 1.0
        obj = ConvexQuadratic(np.diag(lam), center=rng.standard_normal(d))
        for k in (1, 2, 3, 4):
            traj = euclidean_silver_run(obj, rng.standard_normal(d) * 2, k)
            lhs, rhs = energy_inequality_sides(traj, obj, k)
            assert lhs == pytest.approx(rhs, abs=1e-8)


def test_energy_sides_level1_hand_expansion():
    obj = unit_quadratic()
    traj = euclidean_silver_run(obj, [1.0], 1)
    lhs, rhs = energy_inequality_sides(traj, obj, 1)
    r1 = rate_factor(1)
    a1 = 1.0 / (2.0 * r1)
    x1 = 1.0 - np.sqrt(2.0)
    g1 = x1
    expected_lhs = (
        a1 * a1 * g1 * g1
        + (1.0 / r1) * g1 * (0.0 - x1)
        + 2.0 * 1.0
        + 2.0 * np.sqrt(2.0) * 1.0 * (0.0 - 1.0)
    )
    assert lhs == pytest.approx(expected_lhs, abs=1e-12)
    expected_rhs = ((0.0 - x1) + a1 * g1) ** 2 - 1.0
    assert rhs == pytest.approx(expected_rhs, abs=1e-12)


def test_energy_sides_stationary_start():
    obj = ConvexQuadratic(np.diag([1.0, 0.5]))
    traj = euclidean_silver_run(obj, [0.0, 0.0], 2)
    lhs, rhs = energy_inequality_sides(traj, obj, 2)
    assert lhs == pytest.approx(0.0, abs=1e-14)
    assert rhs == pytest.approx(0.0, abs=1e-14)


def test_combination_gap_unit_quadratic_exact_zero():
    obj = unit_quadratic()
    traj = euclidean_silver_run(obj, [1.0], 1)
    assert combination_gap(traj, obj, 1) == pytest.approx(0.0, abs=1e-9)


def test_combination_gap_random_convex_quadratics():
    rng = make_rng(6)
    for trial in range(10):
        d = int(rng.integers(1, 6))
        lam = rng.uniform(0.05, 1.0, size=d)
        lam[int(rng.integers(d))] = 1.0
        obj = ConvexQuadratic(np.diag(lam), center=rng.standard_normal(d))
        for k in (1, 2, 3, 4):
            traj = euclidean_silver_run(obj, rng.standard_normal(d) * 2, k)
            assert combination_gap(traj, obj, k) >= -1e-7


def test_combination_gap_bw_surrogate():
    obj = bw_quadratic(d=3, kappa=10.0, seed=7)
    x0 = obj.manifold.point(np.zeros(3), np.eye(3))
    star = obj.surrogate_optimum(1e-6)
    for k in (1, 2, 3, 4):
        sched = silver_schedule(k, smoothness_L=obj.smoothness_L)
        traj = rgd_run(obj.manifold, obj, sched, x0, 2 ** k - 1)
        assert combination_gap(traj, obj, k, x_star=star) >= -1e-4


def test_combination_gap_level_mismatch():
    obj = unit_quadratic()
    traj = euclidean_silver_run(obj, [1.0], 2)
    with pytest.raises(ValueError):
        combination_gap(traj, obj, 2, weights=certificate_weights(1))


# -- sectional curvature ---------------------------------------------------------


def test_curvature_closed_forms():
    assert bw_sectional_curvature([1.0, 1.0], "eij_fij", 0, 1) == pytest.approx(1.5)
    for eps in (1e-1, 1e-3):
        val = bw_sectional_curvature([eps] * 3, "fij_fik", 0, 1, 2)
        assert val == pytest.approx(3.0 / (8.0 * eps), rel=1e-12)
    assert bw_sectional_curvature([1.0, 2.0, 3.0], "other") == 0.0


def test_curvature_unbounded_as_spectrum_shrinks():
    vals = [bw_sectional_curvature([e] * 3, "fij_fik", 0, 1, 2) for e in (1e-1, 1e-3, 1e-6)]
    assert vals[0] < vals[1] < vals[2]


def test_curvature_index_constraints():
    with pytest.raises(ValueError):
        bw_sectional_curvature([1.0, 2.0], "eik_fij", 0, 1, 1)  # j == k
    with pytest.raises(ValueError):
        bw_sectional_curvature([1.0, 2.0], "eij_fij", 1, 1)
    with pytest.raises(ValueError):
        bw_sectional_curvature([1.0, 2.0, 3.0], "e+_fij", 1, 1)
    with pytest.raises(ValueError):
        bw_sectional_curvature([-1.0, 2.0], "eij_fij", 0, 1)
    with pytest.raises(IndexError):
        bw_sectional_curvature([1.0, 2.0], "eij_fij", 0, 5)


def test_curvature_e_plus_constraint():
    # defined only when one index sits at the spectrum boundary
    lam = [1.0, 2.0, 3.0]
    assert bw_sectional_curvature(lam, "e+_fij", 0, 1) > 0
    assert bw_sectional_curvature(lam, "e+_fij", 1, 2) > 0
    with pytest.raises(ValueError):
        bw_sectional_curvature([1.0, 2.0, 3.0, 4.0], "e+_fij", 1, 2)


# -- entropy curves ---------------------------------------------------------------


def random_spd(d, rng, scale=0.4):
    g = gaussian_symmetric(d, rng, scale=scale)
    vals, vecs = np.linalg.eigh(g)
    return SpdMatrix((vecs * np.exp(vals)) @ vecs.T)


def test_entropy_curve_constant_when_endpoints_match():
    rng = make_rng(8)
    m = random_spd(4, rng)
    base = random_spd(4, rng)
    rep = entropy_curve_check(m, m, base, "bures_wasserstein", grid=65)
    assert rep.passed
    ts, vals, _ = entropy_curve_values(m, m, base, "bures_wasserstein", grid=65)
    assert np.ptp(vals) <= 1e-10


def test_entropy_curve_ai_linear():
    rng = make_rng(9)
    for _ in range(10):
        d = int(rng.integers(2, 7))
        m0, m1, base = (random_spd(d, rng) for _ in range(3))
        ts, vals, second = entropy_curve_values(m0, m1, base, "affine_invariant", grid=257)
        h = ts[1] - ts[0]
        fd = (vals[:-2] - 2 * vals[1:-1] + vals[2:]) / (h * h)
        assert np.abs(fd).max() <= 1e-7
        assert np.allclose(second, 0.0)


def test_entropy_curve_bw_convex_and_matches_analytic():
    rng = make_rng(10)
    for _ in range(10):
        d = int(rng.integers(2, 7))
        m0, m1, base = (random_spd(d, rng) for _ in range(3))
        ts, vals, second = entropy_curve_values(m0, m1, base, "bures_wasserstein", grid=2049)
        h = ts[1] - ts[0]
        fd = (vals[:-2] - 2 * vals[1:-1] + vals[2:]) / (h * h)
        assert fd.min() >= -1e-7
        assert np.abs(fd - second[1:-1]).max() <= 1e-5


def test_entropy_check_flags_mismatch_in_gap():
    rng = make_rng(11)
    m0, m1, base = (random_spd(3, rng) for _ in range(3))
    rep = entropy_curve_check(m0, m1, base, "bures_wasserstein", grid=33, match_tolerance=1e-12)
    # absurdly tight match tolerance must fail through the gap, keeping
    # pass <=> worst_gap >= -tolerance
    assert not rep.passed
    assert rep.worst_gap < -rep.tolerance


# -- suites ------------------------------------------------------------------------


def test_run_suite_empty_and_unknown():
    assert run_suite([], seed=0, samples=10) == []
    with pytest.raises(ValueError):
        run_suite(["nonsense"], seed=0, samples=10)


def test_run_suite_deterministic():
    a = run_suite(["convexity", "geometry"], seed=3, samples=40)
    b = run_suite(["convexity", "geometry"], seed=3, samples=40)
    assert [(r.name, r.worst_gap, r.witness) for r in a] == [
        (r.name, r.worst_gap, r.witness) for r in b
    ]
    c = run_suite(["convexity"], seed=4, samples=40)
    assert [r.worst_gap for r in a[: len(c)]] != [r.worst_gap for r in c]


def test_run_suite_geometry_and_convexity_pass():
    for name in ("geometry", "convexity"):
        for rep in run_suite([name], seed=0, samples=60):
            assert rep.passed, rep.to_line()


def test_report_invariant_and_serialization(tmp_path):
    rep = CertificateReport.from_gaps("demo", [0.5, -1e-9, 2.0], tolerance=1e-8, witness="x: 1")
    assert rep.passed == (rep.worst_gap >= -rep.tolerance)
    path = tmp_path / "rep.txt"
    write_reports([rep], path)
    text = path.read_text()
    assert text.splitlines()[0].startswith("demo, 3, ")
    assert "    x: 1" in text
