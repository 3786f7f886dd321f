"""Acceptance suite. Each test records one verdict line shown in the terminal summary.

The Monte Carlo studies use seed 1, 100 replications, n=200, p=1000 and the
default bandwidth rule. The seed was fixed before any study was run.
"""

import numpy as np
import pytest

import _oracles
from condscreen import cli
from condscreen.baselines import ccsis_utility_all, dcsis_utility_all, sirs_utility_all
from condscreen.screening import DataSet, KernelSpec, csirs_all

SEED = 1
REPS = 100


@pytest.fixture(scope="session")
def studies():
    cache = {}

    def get(scenario, methods, bandwidth=None):
        key = (scenario, methods, bandwidth)
        if key not in cache:
            argv = ["--scenario", scenario, "--reps", str(REPS), "--seed", str(SEED),
                    "--methods", methods, "--quiet"]
            if bandwidth is not None:
                argv += ["--bandwidth", repr(bandwidth)]
            cache[key] = cli.simulate(cli.build_config(argv))["methods"]
        return cache[key]

    return get


def random_dataset(rng, n, p, ties=False):
    y = rng.integers(0, 3, n).astype(float) if ties else rng.standard_normal(n)
    return DataSet(rng.standard_normal((n, p)), y, rng.random(n))


def test_oracle_equivalence(criterion):
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(200):
        n, p = int(rng.integers(5, 21)), int(rng.integers(1, 6))
        h = float(rng.uniform(0.1, 2.0))
        d = random_dataset(rng, n, p, ties=bool(rng.integers(0, 2)))
        got = csirs_all(d, KernelSpec.fixed(h)).omega
        ref = _oracles.csirs(d.x, d.y, d.u, h)
        scale = np.maximum(np.abs(ref), 1e-300)
        worst = max(worst, float(np.max(np.abs(got - ref) / scale)))
    ok = criterion(1, "oracle equivalence (200 datasets)", worst <= 1e-10,
                   f"max rel err {worst:.2e} (tol 1e-10)")
    assert ok


MONOTONE = (np.exp, lambda t: t ** 3, np.arctan, lambda t: 3.0 * t - 7.0, np.sinh)


def test_exact_invariances(criterion):
    rng = np.random.default_rng(202)
    bad_mono = bad_affine = bad_perm = 0
    worst_affine = 0.0
    for trial in range(100):
        d = random_dataset(rng, int(rng.integers(10, 60)), int(rng.integers(1, 8)))
        spec = KernelSpec.fixed(float(rng.uniform(0.15, 1.0)))

        g = MONOTONE[trial % len(MONOTONE)]
        ty = DataSet(d.x, g(d.y), d.u)
        assert np.array_equal(np.argsort(ty.y, kind="stable"), np.argsort(d.y, kind="stable"))
        same = (np.array_equal(csirs_all(d, spec).omega, csirs_all(ty, spec).omega)
                and np.array_equal(sirs_utility_all(d).omega, sirs_utility_all(ty).omega))
        bad_mono += not same

        k = int(rng.integers(0, d.p))
        a = float(rng.choice([-1, 1]) * rng.uniform(0.1, 10.0))
        x2 = d.x.copy()
        x2[:, k] = a * x2[:, k] + rng.uniform(-5, 5)
        base = csirs_all(d, spec).omega[k]
        moved = csirs_all(DataSet(x2, d.y, d.u), spec).omega[k]
        err = abs(moved - base) / max(abs(base), 1e-300)
        worst_affine = max(worst_affine, err)
        bad_affine += err > 1e-12

        pu = DataSet(d.x, d.y, rng.permutation(d.u))
        same = (np.array_equal(sirs_utility_all(d).omega, sirs_utility_all(pu).omega)
                and np.array_equal(dcsis_utility_all(d).omega, dcsis_utility_all(pu).omega))
        bad_perm += not same
    ok = criterion(2, "exact invariances (100 trials each)",
                   bad_mono == 0 and bad_affine == 0 and bad_perm == 0,
                   f"monotone failures {bad_mono}, affine failures {bad_affine} "
                   f"(max rel {worst_affine:.1e}), permutation failures {bad_perm}")
    assert ok


def degenerate_dataset(rng, kind):
    n = int(rng.integers(2, 40))
    p = int(rng.integers(1, 6))
    x = rng.standard_normal((n, p))
    y = rng.standard_normal(n)
    u = rng.random(n)
    if kind == 1:
        x[:, rng.integers(0, p)] = rng.normal()
    elif kind == 2:
        y = rng.integers(0, 2, n).astype(float)
    elif kind == 3:
        y = np.full(n, 3.0)
        y[0] = 4.0
    elif kind == 4:
        x = np.round(x)
        y = np.round(y * 0.5)
    elif kind == 5:
        u = np.repeat(rng.random(2), [n // 2, n - n // 2])
    elif kind == 6:
        x = x * 1e8 + 1e12
        y = np.tan(np.pi * (rng.random(n) - 0.5))
    return DataSet(x, y, u)


def test_bounds(criterion):
    rng = np.random.default_rng(303)
    violations = 0
    lo, hi = np.inf, -np.inf
    for i in range(500):
        d = degenerate_dataset(rng, i % 7)
        spec = KernelSpec.fixed(float(rng.uniform(0.05, 1.5)))
        for om in (csirs_all(d, spec).omega, ccsis_utility_all(d, spec).omega):
            lo, hi = min(lo, om.min()), max(hi, om.max())
            violations += int(np.sum(~np.isfinite(om) | (om < 0) | (om > 1)))
    ok = criterion(3, "utility bounds 0 <= w <= 1 (500 datasets)", violations == 0,
                   f"violations {violations}, observed range [{lo:.3g}, {hi:.3g}]")
    assert ok


def test_sure_screening_ex1_case1(criterion, studies):
    m = studies("ex1case1", "csirs,sirs")["csirs"]["metrics"]
    pa = m["P_a"]["16"]
    med = m["S_quantiles"]["0.5"]
    ok = abs(pa - 0.65) <= 0.10 + 1e-12 and 6 <= med <= 20
    criterion(4, "Ex1 Case1 sure screening", ok,
              f"C-SIRS P_a(16)={pa:.2f} (target 0.65 +/- 0.10), median S={med:g} (range [6, 20])")
    assert ok


def test_marginal_failure_on_zero_mean_coefficient(criterion, studies):
    res = studies("ex1case1", "csirs,sirs")
    sirs = res["sirs"]["metrics"]["P_k"]["48"]["600"]
    csirs = res["csirs"]["metrics"]["P_k"]["48"]["600"]
    ok = sirs <= 0.15 and csirs >= 0.95
    criterion(5, "Ex1 Case1 X600 separation", ok,
              f"SIRS P_600(48)={sirs:.2f} (<= 0.15), C-SIRS P_600(48)={csirs:.2f} (>= 0.95)")
    assert ok


def test_heavy_tail_ex2_case1(criterion, studies):
    res = studies("ex2case1", "csirs,dcsis")
    cs = res["csirs"]["metrics"]["P_a"]["48"]
    dc = res["dcsis"]["metrics"]["P_a"]["48"]
    ok = abs(cs - 0.96) <= 0.10 + 1e-12 and dc <= 0.15
    detail = f"C-SIRS P_a(48)={cs:.2f} (target 0.96 +/- 0.10), DC-SIS P_a(48)={dc:.2f} (<= 0.15)"
    miss = max(abs(cs - 0.96) - 0.10, dc - 0.15)
    if not ok and miss <= 0.05:
        # near miss: report a bandwidth sweep next to the default-bandwidth verdict.
        # u is uniform on (0, 1), so sd(u) = 1/sqrt(12) gives the nominal rule value.
        sweep = []
        for f in (0.5, 2.0):
            h = f * 1.06 / np.sqrt(12) * 200 ** -0.2
            r = studies("ex2case1", "csirs,dcsis", bandwidth=round(h, 6))
            sweep.append(f"x{f:g}: {r['csirs']['metrics']['P_a']['48']:.2f}")
        detail += "; sweep " + ", ".join(sweep)
    criterion(6, "Ex2 Case1 heavy-tail robustness", ok, detail)
    assert ok


def test_heteroscedasticity_ex2_case4(criterion, studies):
    res = studies("ex2case4", "csirs,ccsis")
    cs = res["csirs"]["metrics"]["P_k"]["48"]["600"]
    cc = res["ccsis"]["metrics"]["P_k"]["48"]["2"]
    ok = cs >= 0.90 and cc <= 0.25
    criterion(7, "Ex2 Case4 heteroscedasticity", ok,
              f"C-SIRS P_600(48)={cs:.2f} (>= 0.90), CC-SIS P_2(48)={cc:.2f} (<= 0.25)")
    assert ok


def test_scale_note(criterion):
    criterion(8, "desk-scale studies", None,
              "100-replication studies are the bar; 1000-replication tables and the "
              "real-data analysis are not reproduced")


def test_determinism_across_threads(criterion):
    base = ["--scenario", "ex2case4", "--reps", "12", "--seed", str(SEED), "--quiet"]
    one = cli._dump_json(cli.simulate(cli.build_config(base + ["--threads", "1"])))
    eight = cli._dump_json(cli.simulate(cli.build_config(base + ["--threads", "8"])))
    ok = criterion(9, "determinism at 1 vs 8 threads", one == eight,
                   f"{len(one)} report bytes, identical={one == eight}")
    assert ok
