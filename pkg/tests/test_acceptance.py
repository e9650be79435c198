"""Acceptance suite: one test per criterion, each printing a pass/fail line
with its measured runtime (budgets are printed rather than asserted so the
suite stays robust on loaded machines; the sub-second-to-minute margins are
visible in the output).

Run with `pytest tests/test_acceptance.py -v -s`.
"""

import math
import time

import numpy as np
import pytest

from silverstep import cli
from silverstep.certify import (
    bw_sectional_curvature,
    certificate_weights,
    combination_gap,
    entropy_curve_values,
    run_suite,
)
from silverstep.linalg import SpdMatrix
from silverstep.objectives import (
    ConvexQuadratic,
    QuadraticPotentialBW,
    RayleighSphere,
    make_meanfield_net,
    make_rayleigh_matrix,
    make_sigma_star,
)
from silverstep.optimizer import COMPLETED, DIVERGED, check_bound, restarted_run, rgd_run
from silverstep.rng import gaussian_symmetric, make_rng
from silverstep.schedules import (
    RHO,
    constant_schedule,
    rate_factor,
    restart_plan,
    silver_schedule,
    silver_step,
)

SQRT2 = math.sqrt(2.0)
SEEDS_100 = range(100)


class Outcome:
    def __init__(self, ident, label, budget):
        self.ident = ident
        self.label = label
        self.budget = budget
        self.t0 = time.time()

    def finish(self, ok: bool):
        elapsed = time.time() - self.t0
        verdict = "PASS" if ok else "FAIL"
        print(f"\nACCEPTANCE {self.ident:>2} {self.label}: {verdict} "
              f"({elapsed:.1f}s, budget {self.budget})")
        return ok


def bw_instance(d, kappa, seed):
    rng = make_rng(seed, stream=1)
    m_star = rng.uniform(0.0, 1.0, size=d)
    obj = QuadraticPotentialBW(m_star, make_sigma_star(d, 1.0, 1.0 / kappa, seed))
    return obj, obj.manifold.point(np.zeros(d), np.eye(d))


def test_criterion_01_schedule_exactness():
    out = Outcome(1, "silver schedule exactness", "< 1 s")
    expected = [SQRT2, 2.0, SQRT2, 2.0 + SQRT2, SQRT2, 2.0, SQRT2]
    level3 = silver_schedule(3).entries
    ok = bool(np.abs(level3 - np.array(expected)).max() <= 1e-12)
    prev = silver_schedule(1).entries
    for k in range(1, 21):
        entries = silver_schedule(k).entries if k > 1 else prev
        ok &= bool(np.array_equal(entries, entries[::-1]))
        if k > 1:
            ok &= bool(np.array_equal(entries[: len(prev)], prev))
            prev = entries
        ok &= bool(entries.min() >= SQRT2)
    assert out.finish(ok)


def test_criterion_02_weight_matrix_base_and_identities():
    out = Outcome(2, "base weight matrix and rate identities", "< 5 s")
    a1 = 1.0 / (2.0 * rate_factor(1))
    seed_matrix = np.array(
        [[0.0, RHO, 0.0], [1.0, 0.0, RHO - 1.0], [RHO - 1.0, a1, 0.0]]
    )
    ok = bool(np.array_equal(certificate_weights(1).array, seed_matrix))
    for k in range(1, 9):
        ok &= certificate_weights(k).min_entry() >= -1e-12
    for k in range(1, 13):
        a = 1.0 / (2.0 * rate_factor(k))
        ok &= abs((a - a * a) - (1.0 - RHO ** (2 * k))) <= 1e-9 * abs(1.0 - RHO ** (2 * k))
    assert out.finish(ok)


def test_criterion_03_geometry_suite():
    out = Outcome(3, "geometry suite at 1e-8 over 1000 samples", "< 30 s")
    reports = run_suite(["geometry"], seed=0, samples=1000)
    ok = True
    for rep in reports:
        ok &= rep.passed and rep.samples >= 1000 and rep.tolerance <= 1e-8
        if not rep.passed:
            print(" ", rep.to_line())
    assert out.finish(ok)


def test_criterion_04_convexity_suite():
    out = Outcome(4, "convexity suite on the quadratic potential", "< 60 s")
    reports = run_suite(["convexity"], seed=0, samples=1000)
    names = {r.name.rsplit("/", 1)[-1] for r in reports}
    ok = names == {"anchored", "cocoercivity", "descent", "interpolation"}
    for rep in reports:
        ok &= rep.passed and rep.samples >= 1000 and rep.tolerance <= 1e-8
        if not rep.passed:
            print(" ", rep.to_line())
    assert out.finish(ok)


def test_criterion_05_rate_bound_every_level():
    out = Outcome(5, "silver rate bound, k <= 10, kappa in {10, 1e3}, 100 seeds", "< 2 min")
    ok = True
    for kappa in (10.0, 1e3):
        for seed in SEEDS_100:
            obj, x0 = bw_instance(10, kappa, seed)
            sched = silver_schedule(10, smoothness_L=obj.smoothness_L)
            traj = rgd_run(obj.manifold, obj, sched, x0, 1023, point_stride=1023)
            for k in range(1, 11):
                rep = check_bound(traj, obj, k)
                if not rep.satisfied:
                    print(f"  violated: kappa={kappa} seed={seed} k={k} "
                          f"achieved={rep.achieved} bound={rep.bound}")
                    ok = False
    assert out.finish(ok)


def test_criterion_06_restart_decay():
    out = Outcome(6, "restarted decay bound, kappa=10, l <= 8, 100 seeds", "< 2 min")
    rate_exp = math.log(2.0) / math.log(RHO)
    ok = True
    for seed in SEEDS_100:
        obj, x0 = bw_instance(10, 10.0, seed)
        plan = restart_plan(obj.kappa, 8)
        traj = restarted_run(obj.manifold, obj, plan, x0)
        d0 = obj.ref_distance_sq(x0)
        for cycles in range(1, 9):
            n = cycles * plan.inner_iters
            dn = obj.ref_distance_sq(traj.point_at(n))
            bound = math.exp(-math.log(RHO / 2.0) * n / obj.kappa ** rate_exp) * d0
            if dn > bound:
                print(f"  violated: seed={seed} cycles={cycles} d^2={dn} bound={bound}")
                ok = False
    assert out.finish(ok)


def test_criterion_07_silver_beats_constant():
    out = Outcome(7, "silver below constant 1/L in >= 95/100 seeds", "< 2 min")
    ok = True
    for kappa in (1e3, 1e7):
        wins = 0
        for seed in SEEDS_100:
            obj, x0 = bw_instance(10, kappa, seed)
            L = obj.smoothness_L
            silver = rgd_run(
                obj.manifold, obj, silver_schedule(10, smoothness_L=L), x0, 1023,
                point_stride=1023,
            )
            const = rgd_run(
                obj.manifold, obj, constant_schedule(1.0, 1023, smoothness_L=L), x0, 1023,
                point_stride=1023,
            )
            if silver.values[-1] < const.values[-1]:
                wins += 1
        print(f"  kappa={kappa:g}: silver wins {wins}/100")
        ok &= wins >= 95
    assert out.finish(ok)


def test_criterion_08_divergence_threshold():
    out = Outcome(8, "2.01/L diverges, 1.99/L and silver complete, 100 seeds", "< 1 min")
    ok = True
    for seed in SEEDS_100:
        obj, x0 = bw_instance(10, 1e3, seed)
        L = obj.smoothness_L
        big = rgd_run(
            obj.manifold, obj, constant_schedule(2.01, 12288, smoothness_L=L), x0, 12288,
            point_stride=4096,
        )
        near = rgd_run(
            obj.manifold, obj, constant_schedule(1.99, 1023, smoothness_L=L), x0, 1023,
            point_stride=1023,
        )
        silver = rgd_run(
            obj.manifold, obj, silver_schedule(10, smoothness_L=L), x0, 1023,
            point_stride=1023,
        )
        if not (big.status == DIVERGED and near.status == COMPLETED and silver.status == COMPLETED):
            print(f"  seed={seed}: 2.01 {big.status}, 1.99 {near.status}, silver {silver.status}")
            ok = False
    assert out.finish(ok)


@pytest.mark.parametrize("kind", ["wigner", "spread"])
def test_criterion_09_rayleigh_ordinal(kind):
    out = Outcome(9, f"sphere medians at d=100, n=1000 ({kind})", "< 2 min")
    # one fixed benchmark matrix per kind; seeds vary the initialization only
    obj = RayleighSphere(make_rayleigh_matrix(100, kind, 0))
    L = obj.smoothness_L
    silver_finals, const_finals = [], []
    for seed in range(10):
        rng = make_rng(seed, stream=2)
        x0 = obj.manifold.point(rng.standard_normal(100))
        silver = rgd_run(
            obj.manifold, obj, silver_schedule(10, smoothness_L=L), x0, 1000,
            point_stride=1000,
        )
        const = rgd_run(
            obj.manifold, obj, constant_schedule(1.0, 1000, smoothness_L=L), x0, 1000,
            point_stride=1000,
        )
        silver_finals.append(silver.values[-1] - obj.reference_value())
        const_finals.append(const.values[-1] - obj.reference_value())
    med_s, med_c = float(np.median(silver_finals)), float(np.median(const_finals))
    print(f"  {kind}: silver median {med_s:.3e}, constant median {med_c:.3e}")
    # Known red: by n = 1000 at this dimension both arms sit on their
    # numerical floors (the comparison the figure makes happens during the
    # descent, where silver is far below); see the decisions ledger.
    assert out.finish(med_s <= med_c)


def test_criterion_10_combination_machinery():
    out = Outcome(10, "weighted-certificate gaps on random quadratics", "< 30 s")
    obj = ConvexQuadratic(np.eye(1))
    traj = rgd_run(obj.manifold, obj, silver_schedule(1), obj.manifold.point([1.0]), 1)
    ok = abs(combination_gap(traj, obj, 1)) <= 1e-9

    rng = make_rng(77)
    instances = 0
    while instances < 50:
        d = int(rng.integers(1, 6))
        lam = rng.uniform(0.05, 1.0, size=d)
        lam[int(rng.integers(d))] = 1.0
        q = ConvexQuadratic(np.diag(lam), center=rng.standard_normal(d))
        x0 = q.manifold.point(rng.standard_normal(d) * 2.0)
        for k in range(1, 5):
            traj = rgd_run(
                q.manifold, q, silver_schedule(k, smoothness_L=q.smoothness_L), x0, 2 ** k - 1
            )
            gap = combination_gap(traj, q, k)
            if gap < -1e-7:
                print(f"  violated: instance {instances} k={k} gap={gap}")
                ok = False
        instances += 1
    assert out.finish(ok)


def test_criterion_11_curvature_table():
    out = Outcome(11, "sectional curvature closed forms", "< 1 s")
    ok = bw_sectional_curvature([1.0, 1.0], "eij_fij", 0, 1) == pytest.approx(1.5, abs=1e-12)
    for eps in (1e-1, 1e-3):
        val = bw_sectional_curvature([eps] * 3, "fij_fik", 0, 1, 2)
        ok &= val == pytest.approx(3.0 / (8.0 * eps), rel=1e-12)
    ok &= bw_sectional_curvature([1.0, 3.0], "other") == 0.0
    assert out.finish(ok)


def test_criterion_12_entropy_convexity():
    out = Outcome(12, "entropy curves: flat vs non-negatively curved", "< 30 s")
    rng = make_rng(101)
    ok = True
    for _ in range(100):
        d = int(rng.integers(2, 7))
        mats = []
        for _ in range(3):
            g = gaussian_symmetric(d, rng, scale=0.4)
            vals, vecs = np.linalg.eigh(g)
            mats.append(SpdMatrix((vecs * np.exp(vals)) @ vecs.T))
        ts, vals_ai, _ = entropy_curve_values(*mats, "affine_invariant", grid=257)
        h = ts[1] - ts[0]
        fd_ai = (vals_ai[:-2] - 2 * vals_ai[1:-1] + vals_ai[2:]) / (h * h)
        ok &= bool(np.abs(fd_ai).max() <= 1e-7)

        ts, vals_bw, analytic = entropy_curve_values(*mats, "bures_wasserstein", grid=2049)
        h = ts[1] - ts[0]
        fd_bw = (vals_bw[:-2] - 2 * vals_bw[1:-1] + vals_bw[2:]) / (h * h)
        ok &= bool(fd_bw.min() >= -1e-7)
        ok &= bool(np.abs(fd_bw - analytic[1:-1]).max() <= 1e-5)
    assert out.finish(ok)


def test_criterion_13_meanfield_training():
    out = Outcome(13, "mean-field network: decreasing MSE, silver <= constant", "< 3 min")
    wins = 0
    decreasing = True
    for seed in range(5):
        net, x0, _ = make_meanfield_net("sine", seed, width=100, smoothness_L=100.0)
        silver = rgd_run(
            net.manifold, net, silver_schedule(11, smoothness_L=100.0), x0, 2000,
            point_stride=2000,
        )
        const = rgd_run(
            net.manifold, net, constant_schedule(1.0, 2000, smoothness_L=100.0), x0, 2000,
            point_stride=2000,
        )
        decreasing &= silver.values[-1] < silver.values[0]
        decreasing &= const.values[-1] < const.values[0]
        if silver.values[-1] <= const.values[-1]:
            wins += 1
    print(f"  silver wins {wins}/5, training decreased: {decreasing}")
    assert out.finish(decreasing and wins >= 4)


def test_criterion_14_deterministic_csv(tmp_path, capsys):
    out = Outcome(14, "byte-identical CSV on rerun", "n/a")
    cfg_text = (
        "experiment = bw_potential\nd = 10\nkappa = 1e3\nL = 1.0\nn = 255\n"
        "seeds = 0..4\narm = silver\narm = constant(1.0)\n"
    )
    digests = []
    for tag in ("one", "two"):
        cfg = tmp_path / f"{tag}.cfg"
        cfg.write_text(cfg_text + f"out = {tmp_path}/{tag}\n")
        assert cli.main(["run", str(cfg)]) == 0
        digests.append((tmp_path / tag / "bw_potential_runs.csv").read_bytes())
    capsys.readouterr()
    assert out.finish(digests[0] == digests[1])
