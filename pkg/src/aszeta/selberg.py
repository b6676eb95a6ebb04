"""Trigonometric majorant and minorant pairs for symmetric angle intervals.

For an interval I = [-beta/2, beta/2] on the circle and a degree bound K,
build_pair returns trigonometric polynomials I^+ >= chi_I >= I^- of degree
at most K whose masses are exactly beta +- 1/(K+1).

Construction: periodize the classical majorant of sgn(y) (written through
the trigamma function), so I^+ = chi + (E_per(delta(x-a)) + E_per(delta(b-x)))/2
with delta = K+1, and sample on a grid offset by an irrational phase; the
offset DFT then recovers the coefficients with an exact degree cutoff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import polygamma


def beurling_excess(y) -> np.ndarray:
    """E(y) = B(y) - sgn(y) >= 0 for the majorant B of the sign function.

    E vanishes at the nonzero integers and integrates to 1.  Two trigamma
    branches keep the evaluation stable on both sides of the pole at 0.
    """
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    hi = y >= 0.5
    lo = ~hi
    s2 = (np.sin(np.pi * y) / np.pi) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        if hi.any():
            z = y[hi]
            out[hi] = s2[hi] * (2.0 / z + 2.0 / z ** 2
                                - 2.0 * polygamma(1, z))
        if lo.any():
            z = y[lo]
            w = s2[lo] * (2.0 / z + 2.0 / z ** 2
                          + 2.0 * polygamma(1, 1.0 - z)) - 2.0
            out[lo] = w + np.where(z > 0, 0.0, 2.0)
    return np.where(y == 0.0, 0.0, out)


def _tail_bracket(w, delta):
    # Euler-Maclaurin tail of sum_m E(y + delta m) in the m -> +inf direction
    return (polygamma(1, w) / delta ** 2
            + polygamma(2, w) / (6 * delta ** 3)
            - polygamma(4, w) / (360 * delta ** 5)
            + polygamma(6, w) / (15120 * delta ** 7))


def periodized_excess(y, delta, terms: int = 48) -> np.ndarray:
    """sum over all integers m of E(y + delta*m), with analytic tails."""
    y = np.mod(np.asarray(y, dtype=float), delta)
    total = np.zeros_like(y)
    for m in range(-terms, terms + 1):
        total += beurling_excess(y + delta * m)
    u = y / delta
    wp = (terms + 1) + u
    wm = (terms + 1) - u
    omc = 1.0 - np.cos(2 * np.pi * y)
    total += omc / (2 * np.pi ** 2) * _tail_bracket(wp, delta)
    total += omc / np.pi ** 2 * polygamma(1, wm) / delta ** 2
    total -= omc / (2 * np.pi ** 2) * _tail_bracket(wm, delta)
    return total


@dataclass
class SelbergPair:
    """Coefficients of the pair; index k holds the weight of e(k x)."""

    K: int
    beta: float
    plus: np.ndarray   # (K+1,) real, even extension implied
    minus: np.ndarray

    def coefficient(self, sign: str, k: int) -> float:
        arr = self.plus if sign == "+" else self.minus
        k = abs(k)
        return float(arr[k]) if k <= self.K else 0.0

    def evaluate(self, sign: str, x) -> np.ndarray:
        arr = self.plus if sign == "+" else self.minus
        x = np.asarray(x, dtype=float)
        out = np.full_like(x, arr[0])
        for k in range(1, self.K + 1):
            out += 2.0 * arr[k] * np.cos(2 * np.pi * k * x)
        return out

    def mass(self, sign: str) -> float:
        return self.coefficient(sign, 0)


def _chi_periodic(x: np.ndarray, beta: float) -> np.ndarray:
    # indicator of [-beta/2, beta/2] mod 1 on points in [0, 1)
    return ((x <= beta / 2) | (x >= 1.0 - beta / 2)).astype(float)


def build_pair(K: int, beta: float, terms: int = 48) -> SelbergPair:
    """Majorant/minorant pair for [-beta/2, beta/2] with degree <= K."""
    if K < 1:
        raise ValueError("K must be at least 1")
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    delta = float(K + 1)
    a, b = -beta / 2, beta / 2
    n = 2 * K + 5
    phase = 1.0 / (2.0 * np.pi)  # irrational offset: no kink ever sampled
    x = (np.arange(n) + phase) / n
    y1 = delta * (x - a)
    y2 = delta * (b - x)
    chi = _chi_periodic(x, beta)
    sp = chi + 0.5 * (periodized_excess(y1, delta, terms)
                      + periodized_excess(y2, delta, terms))
    sm = chi - 0.5 * (periodized_excess(-y1, delta, terms)
                      + periodized_excess(-y2, delta, terms))
    out = []
    for vals in (sp, sm):
        F = np.fft.fft(vals) / n
        ks = np.arange(-(n // 2), n // 2 + 1)
        c = F[ks % n] * np.exp(-2j * np.pi * ks * phase / n)
        mid = n // 2
        # degree cutoff is exact up to roundoff; the extra bins prove it
        spill = np.abs(np.concatenate([c[:mid - K], c[mid + K + 1:]])).max()
        if spill > 1e-12:
            raise RuntimeError(f"degree cutoff failed, spill {spill:.2e}")
        cc = c[mid:mid + K + 1]
        neg = c[mid::-1][:K + 1]
        sym = np.abs(cc - neg).max()
        imag = np.abs(cc.imag).max()
        if max(sym, imag) > 1e-12:
            raise RuntimeError("coefficients are not real/even")
        coeffs = 0.5 * (cc + neg).real
        out.append(coeffs)
    return SelbergPair(K, beta, out[0], out[1])


def coefficient_sums(pair: SelbergPair) -> dict:
    """Slowly growing coefficient aggregates; needs K * beta > 1.

    Each quadratic sum tracks log(K beta) / (2 pi^2); the reported
    deviations from that main term stay bounded over the (K, beta) grid.
    """
    if pair.K * pair.beta <= 1:
        raise ValueError("coefficient sums need K * beta > 1")
    ks = np.arange(1, pair.K + 1)
    cp, cm = pair.plus[1:], pair.minus[1:]
    main = np.log(pair.K * pair.beta) / (2 * np.pi ** 2)
    even = ks % 2 == 0
    out = {
        "main_term": float(main),
        "sum_even_plus": float(cp[even].sum()),
        "sum_even_minus": float(cm[even].sum()),
        "sum_sq_plus": float((cp ** 2 * ks).sum()),
        "sum_sq_minus": float((cm ** 2 * ks).sum()),
        "sum_cross": float((cp * cm * ks).sum()),
    }
    for key in ("sum_sq_plus", "sum_sq_minus", "sum_cross"):
        out[f"dev_{key}"] = out[key] - float(main)
    return out


def decay_sums(pair: SelbergPair, q: int) -> dict:
    """sum_k |c_k|^a k^b q^(-g k) for the audited (a, b, g) triples."""
    ks = np.arange(1, pair.K + 1).astype(float)
    out = {}
    for sign, arr in (("plus", pair.plus[1:]), ("minus", pair.minus[1:])):
        a = np.abs(arr)
        out[f"s_1_1_half_{sign}"] = float((a * ks * q ** (-ks / 2)).sum())
        out[f"s_2_2_half_{sign}"] = float((a ** 2 * ks ** 2 * q ** (-ks / 2)).sum())
        out[f"s_1_0_sixth_{sign}"] = float((a * q ** (-ks / 6)).sum())
    return out


def constant_c_truncated(pair: SelbergPair, sign: str, p: int, q: int) -> float:
    """C(K) = sum_{k <= K, p | k} c_k q^(-(1/2 - 1/p) k)."""
    gamma = 0.5 - 1.0 / p
    total = 0.0
    for k in range(p, pair.K + 1, p):
        total += pair.coefficient(sign, k) * q ** (-gamma * k)
    return total


def constant_c_limit(beta: float, p: int, q: int) -> float:
    """C = sum_{p | k} sin(pi k beta) / (pi k) * q^(-(1/2 - 1/p) k).

    The series is cut when the geometric tail bound drops below 1e-14.
    """
    gamma = 0.5 - 1.0 / p
    ratio = q ** (-gamma * p)
    total = 0.0
    k = p
    while True:
        total += np.sin(np.pi * k * beta) / (np.pi * k) * q ** (-gamma * k)
        k += p
        if q ** (-gamma * k) / (np.pi * k * (1 - ratio)) < 1e-14:
            break
        if k > 10 ** 6:
            raise RuntimeError("series truncation failed to converge")
    return float(total)
