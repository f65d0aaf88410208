"""The twelve acceptance criteria, each printing one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are repeated in the
terminal summary) or directly with ``python3 tests/test_acceptance.py``.
"""

import functools
import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402
from betasignal import special  # noqa: E402
from betasignal.beta import (  # noqa: E402
    BetaParams,
    beta_moments,
    fit_beta_moments,
    make_epsilon_beta,
    params_from_moments,
)
from betasignal.divergence import kl_beta, kl_numerical  # noqa: E402
from betasignal.regularizer import (  # noqa: E402
    DemoTrainConfig,
    demo_train,
    kl_separation,
    kl_separation_grad,
    make_two_gaussians,
)
from betasignal.signals import METRICS, confusion_sweep, sweep  # noqa: E402
from betasignal.stability import (  # noqa: E402
    SmoothModel,
    check_separation_bounds,
    monte_carlo_bounds,
    smooth_metric,
)

RESULTS = []


def criterion(number, title):
    """Turn ``fn() -> (ok, detail)`` into a test that records one result line."""
    def wrap(fn):
        @functools.wraps(fn)
        def test():
            try:
                ok, detail = fn()
            except Exception as exc:
                ok, detail = False, f"raised {type(exc).__name__}: {exc}"
            line = f"AC{number:02d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
            RESULTS.append(line)
            print(line)
            assert ok, line
        return test
    return wrap


@criterion(1, "KL closed form vs quadrature, 100 pairs")
def test_ac01_kl_closed_form_vs_quadrature():
    shapes = np.random.default_rng(20240501).uniform(0.5, 20.0, size=(100, 4))
    start = time.perf_counter()
    worst_own = worst_ref = 0.0
    for a1, b1, a2, b2 in shapes:
        p, q = BetaParams(a1, b1), BetaParams(a2, b2)
        closed = kl_beta(p, q)
        worst_own = max(worst_own, abs(closed - kl_numerical(p, q)))
        worst_ref = max(worst_ref, abs(closed - oracles.kl_quad(a1, b1, a2, b2)))
    elapsed = time.perf_counter() - start
    ok = worst_own <= 1e-6 and worst_ref <= 1e-6 and elapsed < 10.0
    return ok, (f"max err {worst_own:.1e} (own quadrature), {worst_ref:.1e} (scipy), "
                f"{elapsed:.2f} s")


@criterion(2, "kl(B(1,1), B(2,1)) = 1 - ln 2")
def test_ac02_kl_spot_value():
    err = abs(kl_beta(BetaParams(1, 1), BetaParams(2, 1)) - (1 - math.log(2)))
    return err <= 1e-10, f"|err| = {err:.1e}"


@criterion(3, "moment-matching round trip over {0.5,1,2,10}^2")
def test_ac03_moment_round_trip():
    grid = (0.5, 1.0, 2.0, 10.0)
    worst = 0.0
    for a in grid:
        for b in grid:
            p = params_from_moments(beta_moments(BetaParams(a, b)))
            worst = max(worst, abs(p.alpha - a), abs(p.beta - b))
    return worst <= 1e-10, f"max |err| = {worst:.1e}"


@criterion(4, "fit on 10,000 draws from B(3,7)")
def test_ac04_sampling_fit():
    draws = np.random.default_rng(7).beta(3.0, 7.0, size=10_000)
    p = fit_beta_moments(draws)
    ra, rb = abs(p.alpha / 3 - 1), abs(p.beta / 7 - 1)
    return max(ra, rb) <= 0.10, f"alpha {p.alpha:.3f} ({ra:.1%}), beta {p.beta:.3f} ({rb:.1%})"


@criterion(5, "special-function identities")
def test_ac05_special_identities():
    errs = {
        "psi(1)+gamma": abs(special.digamma(1.0) + 0.57721566490153286061),
        "lnG(0.5)-ln sqrt(pi)": abs(special.ln_gamma(0.5) - 0.5 * math.log(math.pi)),
        "recurrence": max(abs(special.digamma(x + 1) - special.digamma(x) - 1 / x)
                          for x in (0.1, 0.5, 1, 2, 10, 100)),
    }
    tri = abs(special.trigamma(1.0) - math.pi ** 2 / 6)
    ok = max(errs.values()) <= 1e-10 and tri <= 1e-8
    detail = ", ".join(f"{k} {v:.1e}" for k, v in errs.items()) + f", trigamma {tri:.1e}"
    return ok, detail


@criterion(6, "analytic gradient vs central differences, 20 instances")
def test_ac06_gradient_check():
    rng = np.random.default_rng(6)
    h = 1e-6
    start = time.perf_counter()
    worst = 0.0
    for _ in range(20):
        y = rng.permutation(np.arange(50) % 2)
        a, b = rng.uniform(1.5, 6.0, 2)
        s = np.where(y == 1, rng.beta(a, b, 50), rng.beta(b, a, 50))
        g = kl_separation_grad(s, y).gradient
        fd = oracles.central_gradient(lambda v: kl_separation(v, y), s, h)
        worst = max(worst, float(np.max(np.abs(g - fd) / np.abs(fd))))
    elapsed = time.perf_counter() - start
    return worst <= 1e-5 and elapsed < 30.0, f"max rel err {worst:.1e}, {elapsed:.2f} s"


@criterion(7, "training trend: KL up, accuracy and MCC not down at epochs 1/10/40")
def test_ac07_training_trend():
    x, y = make_two_gaussians(1000, 5, 2.0, seed=0)
    res = demo_train(x, y, DemoTrainConfig(lam=0.0, learning_rate=0.01, epochs=40, seed=0,
                                           init_scale=0.01))
    cps = [res.history[e] for e in (1, 10, 40)]
    kl = [c.kl_separation for c in cps]
    acc = [c.accuracy for c in cps]
    mcc = [c.mcc for c in cps]
    ok = (kl[0] < kl[1] < kl[2]) and (acc[0] <= acc[1] <= acc[2]) and (mcc[0] <= mcc[1] <= mcc[2])
    tuples = " -> ".join(f"({c.accuracy:.3f}, {c.kl_separation:.3f}, {c.mcc:.3f})" for c in cps)
    return ok, f"(acc, KL, MCC) {tuples}"


@criterion(8, "paired runs: regularised KL >= vanilla, accuracy/MCC within 0.02")
def test_ac08_paired_runs():
    x, y = make_two_gaussians(1000, 5, 2.0, seed=0)
    runs = {}
    for lam in (0.0, 0.01):
        cfg = DemoTrainConfig(lam=lam, learning_rate=0.05, epochs=100, seed=0, init_scale=0.01)
        runs[lam] = demo_train(x, y, cfg).history[-1]
    van, reg = runs[0.0], runs[0.01]
    ok = (reg.kl_separation >= van.kl_separation
          and reg.accuracy >= van.accuracy - 0.02 and reg.mcc >= van.mcc - 0.02)
    return ok, (f"vanilla (acc {van.accuracy:.3f}, KL {van.kl_separation:.4f}, MCC {van.mcc:.3f}) "
                f"vs lambda=0.01 (acc {reg.accuracy:.3f}, KL {reg.kl_separation:.4f}, "
                f"MCC {reg.mcc:.3f})")


def _hand_metrics(tp, fp, fn, tn):
    n = tp + fp + fn + tn
    prec = tp / (tp + fp) if tp + fp else None
    rec = tp / (tp + fn) if tp + fn else None
    f1 = 2 * tp / (2 * tp + fp + fn) if prec is not None and rec is not None else None
    den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    mcc = (tp * tn - fp * fn) / math.sqrt(den) if den else None
    return (tp + tn) / n, prec, rec, f1, mcc


def _same(a, b):
    return (a is None and b is None) or (a is not None and b is not None and abs(a - b) <= 1e-12)


@criterion(9, "sweep vs brute-force recount, 50 datasets")
def test_ac09_sweep_recount():
    rng = np.random.default_rng(9)
    mismatches = 0
    rows_checked = 0
    for _ in range(50):
        n = int(rng.integers(1, 31))
        s = np.round(rng.uniform(size=n), 2)
        y = rng.integers(0, 2, n)
        grid = np.unique(s)
        cms = confusion_sweep(s, y, grid)
        rows = sweep(s, y, grid)
        for t, cm, row in zip(grid, cms, rows):
            counts = oracles.brute_confusion(s, y, t)
            rows_checked += 1
            got = (row.accuracy, row.precision, row.recall, row.f1, row.mcc)
            if (cm.tp, cm.fp, cm.fn, cm.tn) != counts or not all(
                    _same(a, b) for a, b in zip(got, _hand_metrics(*counts))):
                mismatches += 1
    return mismatches == 0, f"{rows_checked} thresholds, {mismatches} mismatches"


@criterion(10, "smooth vs empirical metrics on 100k model draws")
def test_ac10_smooth_vs_empirical():
    tr, fr, n1, n0 = BetaParams(5, 2), BetaParams(2, 5), 40_000, 60_000
    rng = np.random.default_rng(10)
    s = np.concatenate([rng.beta(tr.alpha, tr.beta, n1), rng.beta(fr.alpha, fr.beta, n0)])
    y = np.concatenate([np.ones(n1, int), np.zeros(n0, int)])
    model = SmoothModel(tr, fr, n1 / (n1 + n0))
    grid = np.round(np.arange(0.05, 0.951, 0.05), 2)
    gap = 0.0
    for row in sweep(s, y, grid):
        for m in METRICS:
            gap = max(gap, abs(getattr(row, m) - smooth_metric(model, m, row.threshold)))
    return gap <= 0.01, f"max gap {gap:.4f} over {len(grid)} thresholds x {len(METRICS)} metrics"


@criterion(11, "separation bounds: P=L, Q=R equality; 200-pair Monte Carlo deterministic")
def test_ac11_bounds():
    left = make_epsilon_beta(0.01, "left", 20.0)
    right = make_epsilon_beta(0.01, "right", 20.0)
    slack = 0.0
    holds = True
    for metric in ("js_distance", "l1"):
        r = check_separation_bounds(left, right, 0.01, 20.0, metric)
        slack = max(slack, abs(r.d_RL - r.d_PQ), r.d_LP_plus_QR)
        holds &= r.lower_holds and r.upper_holds
    first = monte_carlo_bounds(200, seed=0)
    second = monte_carlo_bounds(200, seed=0)
    ok = holds and slack <= 1e-8 and first == second
    return ok, (f"equality slack {slack:.1e}; Monte Carlo identical: {first == second}; "
                f"observed violation rates lower {first.lower_violation_rate:.3f}, "
                f"upper {first.upper_violation_rate:.3f} (not asserted)")


@criterion(12, "CLI byte-identical reruns of kl, sweep, bounds-check --seed 7")
def test_ac12_cli_determinism():
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        data = Path(tmp) / "scores.csv"
        rng = np.random.default_rng(12)
        y = np.arange(60) % 2
        s = np.where(y == 1, rng.beta(5, 2, 60), rng.beta(2, 5, 60))
        rows = "".join(f"{float(a)!r},{int(b)}\n" for a, b in zip(s, y))
        data.write_text("score,label\n" + rows)
        commands = [["kl"], ["kl", "--json"], ["sweep"], ["sweep", "--json"],
                    ["bounds-check", "--seed", "7"], ["bounds-check", "--seed", "7", "--json"]]
        differing = []
        for cmd in commands:
            argv = [sys.executable, "-m", "betasignal", *cmd, "--input", str(data)]
            outs = [subprocess.run(argv, capture_output=True, check=True).stdout
                    for _ in range(2)]
            if outs[0] != outs[1] or not outs[0]:
                differing.append(" ".join(cmd))
    return not differing, (f"{len(commands)} commands run twice, "
                           f"differing: {', '.join(differing) or 'none'}")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_ac"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
