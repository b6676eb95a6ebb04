"""Zero angles of L-polynomials and checks built on them.

The inverse roots alpha_j = sqrt(q) e(theta_j) come from the companion
matrix of the reciprocal polynomial (numpy.roots) followed by one Newton
step; angles are normalized to [-1/2, 1/2) with -1/2 preferred.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .family import PolyOverFq
from .lfun import LPolynomial, char_sums_all, l_polynomials_all, von_mangoldt_sum

ENDPOINT_SLACK = 1e-9


@dataclass
class AngleSet:
    f: PolyOverFq
    h: int
    thetas: np.ndarray      # sorted, in [-1/2, 1/2)
    rh_residual: float      # max_j | |alpha_j| - sqrt(q) | / sqrt(q)

    def serialize_row(self) -> list:
        return [self.f.serialize(), self.h,
                ";".join(format(t, ".15g") for t in self.thetas),
                self.rh_residual]


def find_angles(l: LPolynomial) -> AngleSet:
    """Angles of one L-polynomial, polished and normalized."""
    q = l.f.p ** l.f.r
    coeffs = np.asarray(l.coeffs, dtype=complex)
    if len(coeffs) == 1:
        return AngleSet(l.f, l.h, np.array([]), 0.0)
    # x^(d-1) L(1/x) has the inverse roots alpha_j as its roots and is monic
    rev = coeffs  # numpy.roots wants the x^(deg) coefficient first
    alphas = np.roots(rev)
    dcoeffs = rev[:-1] * np.arange(len(rev) - 1, 0, -1)
    val = np.polyval(rev, alphas)
    dval = np.polyval(dcoeffs, alphas)
    safe = np.abs(dval) > 1e-12
    alphas = np.where(safe, alphas - val / np.where(safe, dval, 1.0), alphas)
    thetas = np.angle(alphas) / (2 * np.pi)
    thetas = np.where(thetas >= 0.5, thetas - 1.0, thetas)
    order = np.argsort(thetas, kind="stable")
    residual = float(np.abs(np.abs(alphas) - np.sqrt(q)).max() / np.sqrt(q))
    return AngleSet(l.f, l.h, thetas[order], residual)


def curve_angles(f: PolyOverFq) -> list:
    """AngleSets for every nontrivial character h = 1..p-1."""
    return [find_angles(l) for l in l_polynomials_all(f)]


def count_in_interval(angles: AngleSet, beta: float) -> int:
    """Zeros with |theta| <= beta/2, the endpoints padded by 1e-9."""
    if not 0 < beta <= 1:
        raise ValueError("beta must lie in (0, 1]")
    return int(np.count_nonzero(np.abs(angles.thetas)
                                <= beta / 2 + ENDPOINT_SLACK))


def exponential_sums(angles: AngleSet, kmax: int) -> np.ndarray:
    """sum_j e(k theta_j) for k = 1..kmax."""
    ks = np.arange(1, kmax + 1)
    return np.exp(2j * np.pi * ks[:, None] * angles.thetas[None, :]).sum(axis=1)


def discrepancy_check(f: PolyOverFq, h: int, beta: float, K: int = 0,
                      b1: float = 1.0, b2: float = 1.0) -> dict:
    """Erdos-Turan style bound on | N_I - (d-1) beta |.

    Reports the count deviation against b1*(d-1)/(K+1) plus b2 times the
    weighted exponential-sum tail.  K defaults to floor(log d / log q).
    """
    q = f.p ** f.r
    d = f.degree
    if K <= 0:
        K = max(1, int(np.log(d) / np.log(q)))
    angles = find_angles(l_polynomials_all(f)[(h % f.p) - 1])
    lhs = abs(count_in_interval(angles, beta) - (d - 1) * beta)
    sums = np.abs(exponential_sums(angles, K))
    tail = float((sums / np.arange(1, K + 1)).sum())
    rhs = b1 * (d - 1) / (K + 1) + b2 * tail
    return {
        "d": d, "h": h, "beta": beta, "K": K, "b1": b1, "b2": b2,
        "lhs": float(lhs), "term_main": b1 * (d - 1) / (K + 1),
        "term_tail": b2 * tail, "rhs": float(rhs), "ok": bool(lhs <= rhs),
    }


def explicit_formula_check(f: PolyOverFq, h: int,
                           hat_coeffs: dict) -> dict:
    """Both sides of sum_j H(theta_j) for a trigonometric polynomial H.

    hat_coeffs maps k to the coefficient of e(k x); the spectral side is
    (d-1) hat(0) - sum_{k>=1} [hat(k) S_k + hat(-k) conj-S_k] / q^(k/2).
    """
    from .lfun import l_polynomial_from_sums

    q = f.p ** f.r
    d = f.degree
    K = max((abs(k) for k in hat_coeffs), default=0)
    if K >= d:
        raise ValueError("test function degree must stay below d")
    sums = char_sums_all(f, max(K, d - 1))
    s_h = sums[:, (h % f.p) - 1]
    s_conj = sums[:, (-h) % f.p - 1]
    l = l_polynomial_from_sums(f, h, s_h[:d - 1])
    angles = find_angles(l)
    lhs = 0.0 + 0.0j
    for k, a in hat_coeffs.items():
        lhs += a * np.exp(2j * np.pi * k * angles.thetas).sum()
    rhs = (d - 1) * hat_coeffs.get(0, 0.0)
    for k in range(1, K + 1):
        ak = hat_coeffs.get(k, 0.0)
        amk = hat_coeffs.get(-k, 0.0)
        rhs -= (ak * s_h[k - 1] + amk * s_conj[k - 1]) / q ** (k / 2)
    residual = abs(lhs - rhs)
    return {
        "lhs": complex(lhs), "rhs": complex(rhs), "residual": float(residual),
        "ok": bool(residual <= 1e-8 * (1 + abs(lhs))),
    }


def prime_power_check(f: PolyOverFq, h: int, n: int) -> dict:
    """- sum_j e(n theta_j) against the von Mangoldt sum at level n."""
    l = l_polynomials_all(f)[(h % f.p) - 1]
    angles = find_angles(l)
    lhs = -np.exp(2j * np.pi * n * angles.thetas).sum()
    rhs = von_mangoldt_sum(f, h, n)
    residual = abs(lhs - rhs)
    return {
        "lhs": complex(lhs), "rhs": complex(rhs), "residual": float(residual),
        "ok": bool(residual <= 1e-8 * (1 + abs(lhs))),
    }
