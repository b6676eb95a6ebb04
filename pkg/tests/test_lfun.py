"""Histograms, character sums, L-polynomials, zeta numerators, primes."""

import math
from fractions import Fraction

import numpy as np
import pytest

from aszeta.family import FamilySpec, PolyOverFq, family_coeff_matrix
from aszeta.fields import build_field
from aszeta.lfun import (IntegralityError, char_sum, char_sum_from_histogram,
                         char_sums_all, count_monic_irreducibles,
                         degree_excess_from_sums, l_polynomial,
                         l_polynomial_euler, l_polynomials_all,
                         monic_irreducibles, point_count,
                         point_count_from_zeta, trace_histogram,
                         trace_histograms, trace_values, von_mangoldt_sum,
                         weil_bound_ok, zeta_numerator)

FSQ = PolyOverFq(3, 1, (0, 0, 1))  # f = X^2 over F_3


def test_histogram_x_squared():
    # f(x) = x^2 on F_3 takes values 0,1,1 with traces 0,1,1
    assert trace_histogram(FSQ, 1).tolist() == [1, 2, 0]


def test_char_sum_x_squared():
    s = char_sum(FSQ, 1, 1)
    assert abs(s - 1j * math.sqrt(3)) < 1e-12


def test_char_sum_conjugation():
    rng = np.random.default_rng(3)
    spec = FamilySpec(3, 1, 5, "full")
    for _ in range(10):
        f = spec.decode(int(rng.integers(0, spec.size())))
        for n in (1, 2, 3):
            hist = trace_histogram(f, n)
            s1 = char_sum_from_histogram(hist, 1)
            s2 = char_sum_from_histogram(hist, 2)
            assert abs(s1 - s2.conjugate()) < 1e-12


def test_histograms_match_scalar_evaluation():
    # the log-domain kernel against plain Horner over every field point
    for (p, r, d, n) in [(3, 1, 4, 1), (3, 1, 4, 2), (3, 1, 5, 3),
                         (5, 1, 4, 2), (3, 2, 4, 1)]:
        spec = FamilySpec(p, r, d, "full")
        rng = np.random.default_rng(d * n)
        rows = np.stack([
            np.array(spec.decode(int(rng.integers(0, spec.size()))).coeffs)
            for _ in range(6)])
        field = build_field(p, r, n)
        got = trace_histograms(field, rows)
        for i, row in enumerate(rows):
            f = PolyOverFq(p, r, tuple(int(c) for c in row))
            expected = np.zeros(p, dtype=np.int64)
            for x in field.enumerate_elements():
                expected[field.trace_to_prime(f.evaluate(x, field))] += 1
            assert got[i].tolist() == expected.tolist()


def test_histogram_row_sums():
    spec = FamilySpec(3, 1, 7)
    rows = family_coeff_matrix(spec)[:100]
    for n in (1, 2, 4):
        field = build_field(3, 1, n)
        hists = trace_histograms(field, rows)
        assert (hists.sum(axis=1) == 3 ** n).all()
        assert (hists >= 0).all()


def test_trace_values_against_evaluate():
    field = build_field(3, 1, 4)
    f = PolyOverFq(3, 1, (1, 2, 0, 0, 1))
    w = field.orbit_reps
    vals = trace_values(field, np.array([f.coeffs]), w)[0]
    for z, t in zip(w, vals):
        x = int(field.exp[z])
        assert field.trace_to_prime(f.evaluate(x, field)) == int(t)


def test_l_polynomial_x_squared():
    l = l_polynomial(FSQ, 1)
    assert l.degree == 1
    assert abs(l.coeffs[0] - 1) < 1e-12
    assert abs(l.coeffs[1] - 1j * math.sqrt(3)) < 1e-12


def test_zeta_numerator_x_squared():
    z = zeta_numerator(FSQ)
    assert z.coeffs.tolist() == [1, 0, 3]
    assert z.genus == 1
    assert z.rounding_residual < 1e-9


def test_zeta_functional_equation_random():
    spec = FamilySpec(3, 1, 5)
    rng = np.random.default_rng(11)
    q = 3
    for _ in range(8):
        f = spec.decode(int(rng.integers(0, spec.size())))
        z = zeta_numerator(f)
        g = z.genus
        assert g == (f.degree - 1) * (f.p - 1) // 2
        assert z.coeffs[0] == 1
        assert z.coeffs[2 * g] == q ** g
        for k in range(g + 1):
            assert z.coeffs[2 * g - k] == q ** (g - k) * z.coeffs[k]


def test_point_counts_exact():
    assert point_count(FSQ, 1) == 4
    z = zeta_numerator(FSQ)
    assert point_count_from_zeta(z, 1) == 4
    # affine points plus one: y^3 - y = x^2 has 3 solutions iff tr(x^2) = 0
    spec = FamilySpec(3, 1, 4)
    rng = np.random.default_rng(7)
    for _ in range(6):
        f = spec.decode(int(rng.integers(0, spec.size())))
        z = zeta_numerator(f)
        for n in (1, 2, 3, 4):
            assert point_count(f, n) == point_count_from_zeta(z, n)


def test_degree_exactness():
    spec = FamilySpec(3, 1, 5)
    rng = np.random.default_rng(13)
    for _ in range(6):
        f = spec.decode(int(rng.integers(0, spec.size())))
        sums = char_sums_all(f, f.degree)
        for h in (1, 2):
            excess = degree_excess_from_sums(f, sums[:, h - 1])
            assert excess < 1e-6 * 3 ** (f.degree / 2)


def test_euler_product_matches_l_polynomial():
    spec = FamilySpec(3, 1, 4, "full")
    rng = np.random.default_rng(17)
    for _ in range(5):
        f = spec.decode(int(rng.integers(0, spec.size())))
        for h in (1, 2):
            l = l_polynomial(f, h)
            e = l_polynomial_euler(f, h, 3)
            assert np.abs(l.coeffs - e[:4]).max() < 1e-9


def test_weil_bound():
    spec = FamilySpec(3, 1, 7)
    rng = np.random.default_rng(19)
    for _ in range(10):
        f = spec.decode(int(rng.integers(0, spec.size())))
        for n in (1, 2, 3):
            assert weil_bound_ok(f, 1, n)


def test_irreducible_counts():
    assert count_monic_irreducibles(3, 1) == 3
    assert count_monic_irreducibles(3, 2) == 3
    assert count_monic_irreducibles(3, 3) == 8
    assert count_monic_irreducibles(3, 4) == 18
    assert count_monic_irreducibles(9, 2) == 36
    for m in (1, 2, 3, 4):
        polys = monic_irreducibles(3, 1, m)
        assert len(polys) == count_monic_irreducibles(3, m)
        assert len(set(polys)) == len(polys)
        for c in polys:
            assert len(c) == m + 1 and c[-1] == 1


def test_irreducibles_have_no_small_roots():
    # degree >= 2 irreducibles over F_3 cannot vanish on F_3
    F3 = build_field(3, 1, 1)
    for m in (2, 3):
        for c in monic_irreducibles(3, 1, m):
            f = PolyOverFq(3, 1, c)
            assert all(f.evaluate(x, F3) != 0 for x in range(3))


def test_von_mangoldt_x_squared():
    # the single zero angle is -1/4, so -e(2 pi i n theta) is i for n=1
    # and 1 for n=2; the prime-power sums must match
    assert abs(von_mangoldt_sum(FSQ, 1, 1) - 1j) < 1e-12
    assert abs(von_mangoldt_sum(FSQ, 1, 2) - 1.0) < 1e-12


def test_von_mangoldt_n1_equals_normalized_char_sum():
    spec = FamilySpec(3, 1, 5)
    rng = np.random.default_rng(23)
    for _ in range(5):
        f = spec.decode(int(rng.integers(0, spec.size())))
        for h in (1, 2):
            lhs = von_mangoldt_sum(f, h, 1)
            rhs = char_sum(f, h, 1) / math.sqrt(3)
            assert abs(lhs - rhs) < 1e-12


def test_all_characters_share_histograms():
    f = PolyOverFq(3, 1, (1, 1, 0, 0, 2))
    ls = l_polynomials_all(f)
    assert len(ls) == 2
    assert np.abs(ls[0].coeffs - ls[1].coeffs.conjugate()).max() < 1e-10


def test_family_average_char_sums_exact():
    # over the d=5 prime-to-p family, <S_k> = q^(k/p) when p | k, else 0
    spec = FamilySpec(3, 1, 5)
    rows = family_coeff_matrix(spec)
    size = spec.size()
    for k, expected in [(1, 0.0), (2, 0.0), (3, 3.0), (4, 0.0)]:
        field = build_field(3, 1, k)
        total = trace_histograms(field, rows).sum(axis=0)
        assert int(total.sum()) == size * 3 ** k
        avg = char_sum_from_histogram(total, 1) / size
        assert abs(avg - expected) < 1e-10


def test_family_average_point_counts_exact():
    # mean affine-plus-infinity count is 1 + q^n, plus (p-1) q^(n/p) if p | n
    spec = FamilySpec(3, 1, 5)
    rows = family_coeff_matrix(spec)
    size = spec.size()
    for n in (1, 2, 3, 4):
        field = build_field(3, 1, n)
        h0 = int(trace_histograms(field, rows)[:, 0].sum())
        mean = Fraction(size + 3 * h0, size)
        expected = 1 + 3 ** n + (2 * 3 ** (n // 3) if n % 3 == 0 else 0)
        assert mean == expected


def test_zero_lead_rejected():
    field = build_field(3, 1, 2)
    with pytest.raises(ValueError):
        trace_histograms(field, np.array([[1, 1, 0]]))


def test_integrality_error_is_exposed():
    assert issubclass(IntegralityError, Exception)
