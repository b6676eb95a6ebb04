"""Acceptance gate: one test per release criterion.

Every test here asserts a full criterion at its stated tolerance and
emits a single PASS/FAIL line with the measured margins (run pytest
with -s to see them; `pytest -v` already gives one verdict line per
criterion).  Pinned bands and tolerances come from
aszeta.audit.audit_constants(), never from inline literals.
"""

import json
import math
import time

import numpy as np
import pytest

from aszeta.audit import audit_constants
from aszeta.family import FULL, FamilySpec, enumerate_family, mu_reduce
from aszeta.fields import build_field
from aszeta.lfun import (l_polynomials_all, point_count,
                         point_count_from_zeta, zeta_numerator)
from aszeta.moments import (character_sum_tables, covariance_identity,
                            covariance_report, gaussian_experiment,
                            m1_bruteforce, m2_bruteforce, m3_bruteforce,
                            mean_square_check, moments_report,
                            variance_trend)
from aszeta.selberg import build_pair, coefficient_sums
from aszeta.zeros import explicit_formula_check, find_angles, prime_power_check


def _verdict(name, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} {name}: {detail}"
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def sweep45():
    """Exhaustive d=4 and d=5 reduced families over F_3 with zeta data.

    Shared by the first three criteria; the timer covers the whole sweep
    (zeta numerators, all per-character angle sets).
    """
    t0 = time.monotonic()
    data = {}
    for d in (4, 5):
        spec = FamilySpec(3, 1, d)
        rows = []
        for f in enumerate_family(spec):
            z = zeta_numerator(f)
            angles = [find_angles(l) for l in l_polynomials_all(f)]
            rows.append((f, z, angles))
        data[d] = rows
    return data, time.monotonic() - t0


def test_a01_rh_surrogate_exhaustive_families(sweep45):
    """Every inverse root of every L-polynomial sits on |alpha| = sqrt(q),
    relative deviation below 1e-6, for the full d=4 (54) and d=5 (162)
    sweeps, all nontrivial characters; sweep under 30 s."""
    data, elapsed = sweep45
    assert {d: len(rows) for d, rows in data.items()} == {4: 54, 5: 162}
    worst = max(a.rh_residual for rows in data.values()
                for _, _, angles in rows for a in angles)
    ok = worst < 1e-6 and elapsed < 30.0
    _verdict("RH surrogate, exhaustive d=4,5, all characters", ok,
             f"max relative deviation {worst:.2e}, sweep {elapsed:.1f}s")


def test_a02_zeta_integrality_and_functional_equation(sweep45):
    """Same sweep: every zeta-numerator coefficient within 1e-6 of an
    integer, and b_{2g-k} = q^(g-k) b_k exactly on the rounded integers."""
    data, _ = sweep45
    worst = 0.0
    for rows in data.values():
        for f, z, _ in rows:
            worst = max(worst, z.rounding_residual)
            g, q = z.genus, f.p ** f.r
            assert g == (f.degree - 1) * (f.p - 1) // 2
            for k in range(g + 1):
                assert z.coeffs[2 * g - k] == q ** (g - k) * z.coeffs[k], \
                    (f.serialize(), k)
    _verdict("zeta integrality + functional equation on rounded integers",
             worst < 1e-6, f"max rounding residual {worst:.2e}")


def test_a03_point_count_consistency(sweep45):
    """Same sweep, n = 1..4: the direct count of points equals
    q^n + 1 - sum(alpha^n) computed from the integer coefficients,
    as an exact integer identity."""
    data, _ = sweep45
    checked = 0
    for rows in data.values():
        for f, z, _ in rows:
            for n in range(1, 5):
                assert point_count(f, n) == point_count_from_zeta(z, n), \
                    (f.serialize(), n)
                checked += 1
    _verdict("point counts vs zeta power sums, n=1..4, exact",
             True, f"{checked} exact comparisons")


def test_a04_family_averages_exact():
    """Exhaustive d=5 family: <S_k> per character is 0 for k = 1,2,4 and
    3 for k = 3 (to 1e-10), and summed point counts over the family equal
    size * (1 + q^n) resp. size * (1 + q^n + (p-1) q^(n/p)) exactly."""
    t0 = time.monotonic()
    spec = FamilySpec(3, 1, 5)
    tables = character_sum_tables(spec, 4)
    expected = {1: 0.0, 2: 0.0, 3: 3.0, 4: 0.0}
    worst = 0.0
    for k in (1, 2, 3, 4):
        for h in (1, 2):
            mean = tables[:, k - 1, h - 1].mean()
            worst = max(worst, abs(mean - expected[k]))
    for n in range(1, 5):
        total = sum(point_count(f, n) for f in enumerate_family(spec))
        predicted = 1 + 3 ** n + (2 * 3 ** (n // 3) if n % 3 == 0 else 0)
        assert total == predicted * spec.size(), n
    elapsed = time.monotonic() - t0
    ok = worst <= 1e-10 and elapsed < 60.0
    _verdict("family averages over exhaustive d=5", ok,
             f"max |<S_k> - expected| {worst:.2e}, {elapsed:.1f}s")


def test_a05_explicit_formula_random_instances():
    """200 random (f, h, test function / prime power) instances at d <= 8:
    both sides of the explicit formula agree below 1e-8, and so do the
    single-prime-power identities."""
    rng = np.random.default_rng(20260825)
    degrees = [2, 4, 5, 7, 8]
    worst_tf = 0.0
    worst_pp = 0.0
    for _ in range(200):
        d = degrees[rng.integers(len(degrees))]
        spec = FamilySpec(3, 1, d, FULL)
        f = spec.decode(int(rng.integers(spec.size())))
        h = int(rng.integers(1, 3))
        kmax = int(rng.integers(1, min(6, d - 1) + 1))
        hat = {0: float(rng.normal())}
        for k in range(1, kmax + 1):
            a = complex(rng.normal(), rng.normal())
            hat[k] = a
            hat[-k] = a.conjugate()
        chk = explicit_formula_check(f, h, hat)
        worst_tf = max(worst_tf, chk["residual"])
        pp = prime_power_check(f, h, int(rng.integers(1, 7)))
        worst_pp = max(worst_pp, pp["residual"])
    ok = worst_tf < 1e-8 and worst_pp < 1e-8
    _verdict("200 random explicit-formula identities, d <= 8", ok,
             f"max residuals {worst_tf:.2e} (trig poly), "
             f"{worst_pp:.2e} (prime power)")


def test_a06_mu_map_trace_preserving_with_exact_fibers():
    """The reduction map from the full degree-d family onto the
    prime-to-p family preserves tr f(x) at every point of F_{q^n},
    n = 1..3, and is exactly q^floor(d/p)-to-one (exhaustive, d = 4, 5)."""
    fields = [build_field(3, 1, n) for n in (1, 2, 3)]
    for d in (4, 5):
        full = FamilySpec(3, 1, d, FULL)
        reduced = FamilySpec(3, 1, d)
        image = {f.serialize() for f in enumerate_family(reduced)}
        fibers = {}
        for f in enumerate_family(full):
            g = mu_reduce(f)
            key = g.serialize()
            assert key in image, key
            fibers[key] = fibers.get(key, 0) + 1
            for fld in fields:
                for x in fld.enumerate_elements():
                    assert fld.trace_to_prime(f.evaluate(x, fld)) == \
                        fld.trace_to_prime(g.evaluate(x, fld)), \
                        (f.serialize(), x)
        assert set(fibers.values()) == {3 ** (d // 3)}, d
        assert len(fibers) == reduced.size(), d
    _verdict("mu-map trace preservation + exact fiber counts (d=4,5)",
             True, "648 members, traces checked pointwise over n=1..3")


def test_a07_beurling_selberg_contract():
    """Majorant/minorant pair on the (K, beta) grid: degree support,
    sandwich on a 1e4-point grid plus near-endpoints, exact masses
    beta +/- 1/(K+1), evenness, coefficient closeness; quadratic
    coefficient sums within the audited band of log(K beta)/(2 pi^2)."""
    t0 = time.monotonic()
    band = audit_constants()["prop_fr_band"]
    base_grid = np.linspace(-0.5, 0.5, 10001)
    worst_dev = 0.0
    for K in (5, 10, 50, 200):
        for beta in (0.1, 0.25, 0.5, 0.9):
            pair = build_pair(K, beta)
            assert len(pair.plus) == K + 1 and len(pair.minus) == K + 1
            assert abs(pair.mass("+") - (beta + 1 / (K + 1))) < 1e-12
            assert abs(pair.mass("-") - (beta - 1 / (K + 1))) < 1e-12
            ks = np.arange(1, K + 1)
            target = np.sin(np.pi * ks * beta) / (np.pi * ks)
            closeness = 1 / (K + 1) + 1e-12
            assert np.abs(pair.plus[1:] - target).max() <= closeness
            assert np.abs(pair.minus[1:] - target).max() <= closeness
            edge = beta / 2
            xs = np.concatenate([base_grid,
                                 [-edge - 1e-9, -edge + 1e-9,
                                  edge - 1e-9, edge + 1e-9]])
            xs = xs[np.abs(np.abs(xs) - edge) > 1e-10]
            chi = (np.abs(xs) < edge).astype(float)
            up = pair.evaluate("+", xs)
            lo = pair.evaluate("-", xs)
            assert float((up - chi).min()) >= -1e-9, (K, beta)
            assert float((chi - lo).min()) >= -1e-9, (K, beta)
            assert np.abs(up - pair.evaluate("+", -xs)).max() < 1e-12
            if K * beta > 1:
                sums = coefficient_sums(pair)
                for key in ("dev_sum_sq_plus", "dev_sum_sq_minus",
                            "dev_sum_cross"):
                    worst_dev = max(worst_dev, abs(sums[key]))
    elapsed = time.monotonic() - t0
    ok = worst_dev <= band and elapsed < 10.0
    _verdict("majorant/minorant contract on the (K, beta) grid", ok,
             f"max coefficient-sum deviation {worst_dev:.3f} "
             f"(band {band}), {elapsed:.1f}s")


# Fixed identity matrix: 10 first-moment, 18 covariance, 12 triple cases.
# d = 9 is excluded because p = 3 divides it; d = 10 stands in for the
# top of the degree range.
M1_CASES = [
    (7, 1, 1, 1), (7, 2, 1, 2), (7, 3, 1, 1), (7, 4, -1, 1),
    (7, 5, 1, 2), (7, 6, 1, 1), (8, 3, -1, 2), (8, 7, 1, 1),
    (10, 6, 1, 2), (10, 5, -1, 1),
]
M2_CASES = [
    (7, 1, 1, 1, -1, 1, 1), (7, 1, 1, 1, 1, 1, 2),
    (7, 2, 1, 1, 1, 2, 1), (7, 2, 2, 1, -1, 1, 1),
    (7, 2, 2, 1, 1, 1, 1), (7, 2, 2, 1, -1, 1, 2),
    (7, 3, 2, -1, 1, 2, 2), (7, 3, 3, 1, -1, 1, 1),
    (7, 3, 3, 1, 1, 2, 2), (7, 4, 2, 1, -1, 1, 1),
    (7, 5, 1, 1, 1, 1, 1), (8, 4, 3, 1, -1, 1, 1),
    (8, 3, 3, 1, -1, 2, 1), (8, 6, 1, 1, 1, 1, 2),
    (8, 5, 2, -1, -1, 2, 2), (10, 6, 3, 1, -1, 1, 1),
    (10, 4, 4, 1, -1, 2, 2), (10, 5, 4, 1, 1, 1, 1),
]
M3_CASES = [
    (7, (1, 1, 1), (1, 1, 1), (1, 1, 1)),
    (7, (1, 1, 1), (1, -1, 1), (1, 2, 1)),
    (7, (2, 2, 2), (1, 1, -1), (1, 1, 1)),
    (7, (3, 2, 1), (1, -1, 1), (1, 1, 1)),
    (7, (1, 1, 3), (1, 1, 1), (2, 1, 1)),
    (8, (2, 2, 3), (1, 1, 1), (1, 1, 1)),
    (8, (2, 2, 3), (1, -1, 1), (2, 2, 1)),
    (8, (1, 3, 3), (1, 1, -1), (1, 1, 1)),
    (8, (2, 2, 2), (1, 1, 1), (2, 2, 2)),
    (10, (3, 3, 3), (1, 1, 1), (1, 1, 1)),
    (10, (1, 2, 6), (1, 1, -1), (1, 2, 1)),
    (10, (2, 2, 4), (1, -1, 1), (1, 1, 2)),
]


@pytest.fixture(scope="module")
def m_tables():
    out = {}
    for d, kmax in ((7, 6), (8, 7), (10, 6)):
        spec = FamilySpec(3, 1, d)
        out[d] = (spec, character_sum_tables(spec, kmax))
    return out


def test_a08_m_identities_fixed_matrix(m_tables):
    """Brute-force first/second/third moment quantities equal their
    structural closed forms to 1e-9 on a fixed matrix of 40 cases,
    including the covariance main-term anchor value 15/9."""
    t0 = time.monotonic()
    tol = audit_constants()["m_identity_tol"]
    worst = 0.0
    cases = 0
    for d, k, e, h in M1_CASES:
        spec, tables = m_tables[d]
        res = m1_bruteforce(spec, k, e=e, h=h, tables=tables)
        worst = max(worst, res["abs_error"])
        cases += 1
    for d, k1, k2, e1, e2, h1, h2 in M2_CASES:
        spec, tables = m_tables[d]
        res = m2_bruteforce(spec, k1, k2, e1, e2, h1, h2, tables=tables)
        worst = max(worst, res["abs_error"])
        cases += 1
    for d, ks, es, hs in M3_CASES:
        spec, tables = m_tables[d]
        res = m3_bruteforce(spec, ks, es, hs, tables=tables)
        worst = max(worst, res["abs_error"])
        cases += 1
    spec7, tables7 = m_tables[7]
    anchor = m2_bruteforce(spec7, 2, 2, 1, -1, 1, 1, tables=tables7)
    assert abs(anchor["structural"] - 15 / 9) < 1e-12
    elapsed = time.monotonic() - t0
    ok = worst <= tol and cases == 40 and elapsed < 300.0
    _verdict("moment identities, fixed 40-case matrix", ok,
             f"max |brute - structural| {worst:.2e} (tol {tol}), "
             f"{cases} cases, {elapsed:.1f}s")


def test_a09_covariance_identity_two_orders():
    """Exhaustive <S^2> at d=7, K=3 computed directly over the family
    equals the coefficient-expansion over second-moment quantities, with
    both brute-force and structural inner values, to 1e-9."""
    tol = audit_constants()["covariance_identity_tol"]
    rep = covariance_identity(FamilySpec(3, 1, 7), 3, 0.5)
    worst = max(rep["max_m2_mismatch"],
                rep["max_direct_vs_brute_expansion"],
                rep["max_direct_vs_structural_expansion"])
    _verdict("covariance identity, two evaluation orders", worst <= tol,
             f"max mismatch {worst:.2e} (tol {tol})")


def test_a10_gaussian_property_suite():
    """Monte Carlo at d=41, beta=0.5, 2000 samples, pinned seed: the
    centered, sigma-normalized statistic has |m2 - 1| < 0.15, |m3| within
    the decay band, |m4 - 3| < 0.5, KS distance < 0.05; the raw third
    moment carries the predicted negative sign."""
    t0 = time.monotonic()
    g = audit_constants()["gaussian"]
    spec = FamilySpec(3, 1, g["d"])
    rep = gaussian_experiment(spec, g["beta"], g["samples"], g["seed"],
                              workers=4, k_cap=g["k_cap"])
    assert rep["K_clamped"] and rep["K"] == g["k_cap"]
    ok = True
    details = []
    for name in ("plus", "minus"):
        b = rep["signs"][name]
        m2 = b["centered_moments"]["2"]
        m3 = b["centered_moments"]["3"]
        m4 = b["centered_moments"]["4"]
        m3_band = (b["m3_decay_bound"] * g["m3_safety"]
                   + 3 * b["centered_moment_ses"]["3"])
        raw3 = b["moments"]["3"]
        sign_ok = True
        if abs(raw3) > 3 * b["moment_ses"]["3"]:
            sign_ok = math.copysign(1, raw3) == b["m3_predicted_sign"]
        checks = (abs(m2 - 1) < g["m2_band"],
                  abs(m3) <= m3_band,
                  sign_ok,
                  abs(m4 - 3) < g["m4_band"],
                  b["ks_centered"] < g["ks_centered_max"],
                  abs(b["mean"] - b["mean_predicted"]) <= g["mean_band"])
        ok = ok and all(checks)
        details.append(f"{name}: m2 {m2:.3f}, m3 {m3:+.3f} "
                       f"(band {m3_band:.3f}), m4 {m4:.3f}, "
                       f"KS {b['ks_centered']:.4f}")
    elapsed = time.monotonic() - t0
    ok = ok and elapsed < 600.0
    _verdict("Gaussian property suite (pinned seed)", ok,
             "; ".join(details) + f"; {elapsed:.0f}s")


def test_a11_mean_square_and_memberwise_sandwich():
    """Exhaustive d=8, K=3: the curve-level mean square of
    N - (p-1)(d-1)beta + S is at most 4 ((p-1)(d-1)/(K+1))^2, and the
    per-character sandwich between -S^- and -S^+ holds memberwise."""
    ms = audit_constants()["mean_square"]
    rep = mean_square_check(FamilySpec(3, 1, 8), 3, 0.5)
    bound = ms["constant"] * rep["scale"]
    ok = (rep["sandwich_holds"]
          and rep["mean_square_plus"] <= bound
          and rep["mean_square_minus"] <= bound
          and rep["first_moment_ok"])
    _verdict("mean-square bound + memberwise sandwich (d=8, K=3)", ok,
             f"mean squares {rep['mean_square_plus']:.3f}/"
             f"{rep['mean_square_minus']:.3f} <= {bound:.1f}, "
             f"sandwich worst slack {rep['sandwich_worst_lower']:.1e}/"
             f"{rep['sandwich_worst_upper']:.1e}")


def test_a12_monte_carlo_reports_byte_identical_across_workers():
    """Every Monte Carlo report is byte-identical across worker counts
    1, 4 and 8 once serialized with sorted keys."""
    recipes = {
        "gaussian": lambda w: gaussian_experiment(
            FamilySpec(3, 1, 41), 0.5, 240, 5, workers=w),
        "covariance": lambda w: covariance_report(
            FamilySpec(3, 1, 7), 3, 0.5, mode="monte_carlo",
            samples=400, seed=9, workers=w),
        "moments": lambda w: moments_report(
            FamilySpec(3, 1, 10), 2, 0.9, mode="monte_carlo",
            samples=300, seed=13, workers=w),
        "trend": lambda w: variance_trend(ds=(22,), samples=50, seed=11,
                                          workers=w),
    }
    for name, make in recipes.items():
        blobs = {w: json.dumps(make(w), sort_keys=True).encode()
                 for w in (1, 4, 8)}
        assert blobs[1] == blobs[4] == blobs[8], name
    _verdict("Monte Carlo byte determinism across workers {1,4,8}", True,
             f"{len(recipes)} report types compared")
