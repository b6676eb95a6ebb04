"""Zero angles, interval counts, discrepancy and explicit formulas."""

import numpy as np

from aszeta.family import FamilySpec, PolyOverFq
from aszeta.lfun import l_polynomial, l_polynomials_all
from aszeta.zeros import (count_in_interval, curve_angles, discrepancy_check,
                          explicit_formula_check, exponential_sums,
                          find_angles, prime_power_check)

FSQ = PolyOverFq(3, 1, (0, 0, 1))


def test_angle_of_x_squared():
    # L = 1 + i sqrt(3) u has inverse root -i sqrt(3), angle -1/4
    a = find_angles(l_polynomial(FSQ, 1))
    assert len(a.thetas) == 1
    assert abs(a.thetas[0] + 0.25) < 1e-12
    assert a.rh_residual < 1e-12
    b = find_angles(l_polynomial(FSQ, 2))
    assert abs(b.thetas[0] - 0.25) < 1e-12


def test_rh_residual_and_sorting_random():
    spec = FamilySpec(3, 1, 8)
    rng = np.random.default_rng(4)
    for _ in range(10):
        f = spec.decode(int(rng.integers(0, spec.size())))
        for a in curve_angles(f):
            assert len(a.thetas) == f.degree - 1
            assert a.rh_residual < 1e-6
            assert (np.diff(a.thetas) >= 0).all()
            assert (a.thetas >= -0.5).all() and (a.thetas < 0.5).all()


def test_conjugate_characters_mirror_angles():
    spec = FamilySpec(3, 1, 7)
    rng = np.random.default_rng(5)
    for _ in range(5):
        f = spec.decode(int(rng.integers(0, spec.size())))
        a1, a2 = curve_angles(f)
        # multisets of angles are reflections of each other
        m1 = np.sort(a1.thetas)
        m2 = np.sort((-a2.thetas + 0.5) % 1.0 - 0.5)
        assert np.abs(np.sort(m2) - m1).max() < 1e-9


def test_interval_counts_sum_rule():
    # every angle lies in [-1/2, 1/2), so the full-interval count is 2g
    spec = FamilySpec(3, 1, 8)
    rng = np.random.default_rng(6)
    for _ in range(5):
        f = spec.decode(int(rng.integers(0, spec.size())))
        g = (f.degree - 1) * (f.p - 1) // 2
        total = sum(count_in_interval(a, 1.0) for a in curve_angles(f))
        assert total == 2 * g


def test_interval_count_symmetric_between_conjugates():
    spec = FamilySpec(3, 1, 7)
    rng = np.random.default_rng(8)
    for _ in range(5):
        f = spec.decode(int(rng.integers(0, spec.size())))
        a1, a2 = curve_angles(f)
        for beta in (0.2, 0.5, 0.9):
            assert count_in_interval(a1, beta) == count_in_interval(a2, beta)


def test_endpoint_slack():
    a = find_angles(l_polynomial(FSQ, 1))  # theta = -1/4
    assert count_in_interval(a, 0.5) == 1          # endpoint included
    assert count_in_interval(a, 0.5 - 1e-6) == 0   # clearly outside


def test_discrepancy_bound_exhaustive_small():
    # audit constants B1 = B2 = 3 must cover the whole d=4 family
    spec = FamilySpec(3, 1, 4)
    for code in range(spec.size()):
        f = spec.decode(code)
        for h in (1, 2):
            rep = discrepancy_check(f, h, 0.5, b1=3.0, b2=3.0)
            assert rep["ok"], (f, h, rep)


def test_discrepancy_report_fields():
    rep = discrepancy_check(FSQ, 1, 0.5)
    assert rep["K"] >= 1
    assert rep["rhs"] >= rep["term_main"]
    assert 0 <= rep["lhs"] <= 2


def test_explicit_formula_constant():
    # H = 1: both sides count the d-1 zeros
    spec = FamilySpec(3, 1, 5)
    f = spec.decode(77)
    rep = explicit_formula_check(f, 1, {0: 1.0})
    assert abs(rep["lhs"] - (f.degree - 1)) < 1e-9
    assert rep["ok"]


def test_explicit_formula_cosine():
    # H(x) = 2 cos(2 pi x) = e(x) + e(-x)
    spec = FamilySpec(3, 1, 5, "full")
    rng = np.random.default_rng(10)
    for _ in range(5):
        f = spec.decode(int(rng.integers(0, spec.size())))
        for h in (1, 2):
            rep = explicit_formula_check(f, h, {1: 1.0, -1: 1.0})
            assert rep["ok"], rep


def test_explicit_formula_random_trig():
    spec = FamilySpec(3, 1, 7, "full")
    rng = np.random.default_rng(12)
    for _ in range(10):
        f = spec.decode(int(rng.integers(0, spec.size())))
        coeffs = {}
        for k in range(-3, 4):
            coeffs[k] = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        rep = explicit_formula_check(f, 1, coeffs)
        assert rep["ok"], rep


def test_prime_power_identity_x_squared():
    rep1 = prime_power_check(FSQ, 1, 1)
    assert abs(rep1["lhs"] - 1j) < 1e-12 and rep1["ok"]
    rep2 = prime_power_check(FSQ, 1, 2)
    assert abs(rep2["lhs"] - 1.0) < 1e-12 and rep2["ok"]


def test_prime_power_identity_random():
    spec = FamilySpec(3, 1, 5)
    rng = np.random.default_rng(14)
    for _ in range(5):
        f = spec.decode(int(rng.integers(0, spec.size())))
        for h in (1, 2):
            for n in (1, 2, 3, 4):
                rep = prime_power_check(f, h, n)
                assert rep["ok"], (f, h, n, rep)


def test_exponential_sums_match_char_sums():
    # -sum_j e(k theta_j) = S_k / q^(k/2) for k below the degree
    from aszeta.lfun import char_sums_all
    spec = FamilySpec(3, 1, 7)
    rng = np.random.default_rng(15)
    for _ in range(5):
        f = spec.decode(int(rng.integers(0, spec.size())))
        sums = char_sums_all(f, 4)
        for h in (1, 2):
            a = find_angles(l_polynomials_all(f)[h - 1])
            es = exponential_sums(a, 4)
            for k in range(1, 5):
                lhs = -es[k - 1]
                rhs = sums[k - 1, h - 1] / 3 ** (k / 2)
                assert abs(lhs - rhs) < 1e-8
