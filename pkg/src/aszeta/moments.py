"""Family averages of the truncated explicit-formula statistic S^(+/-).

The statistic for one curve is

    S(K, f, psi^h) = sum_{k<=K} c_k [S_k(f, psi^h) + S_k(f, psi^{p-h})] / q^{k/2}

with c_k the test-pair cosine coefficients, and the curve-level value sums
over h = 1..p-1.  This module averages it over coefficient families, either
exhaustively (small d, exact rationals up to float rounding) or by seeded
Monte Carlo (large d), and cross-checks the averages against the closed-form
moment quantities m1/m2/m3 and the pointwise epsilon-criterion.

Scheduling is deterministic: work is cut into fixed blocks of TABLE_CHUNK
samples, each block is self-contained, and results are concatenated in block
order, so reports are byte-identical for any worker count.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from multiprocessing import get_context

import numpy as np
from scipy.special import ndtr

from .family import FamilySpec, family_coeff_matrix, sample_coeff_matrix
from .fields import build_field
from .lfun import (char_sums_all, count_monic_irreducibles,
                   l_polynomial_from_sums, root_of_unity_powers, value_logs,
                   char_sums_batch)
from .selberg import build_pair, constant_c_limit, constant_c_truncated
from .zeros import count_in_interval, find_angles

# rows per work unit; fixed so the block layout never depends on the pool
TABLE_CHUNK = 256

SIGNS = ("+", "-")
SIGN_NAMES = {"+": "plus", "-": "minus"}


# ---------------------------------------------------------------------------
# character-sum tables


def _tables_for_rows(p: int, r: int, rows: np.ndarray, kmax: int) -> np.ndarray:
    """(M, kmax, p-1) complex S_k(f, psi^h) for the given coefficient rows."""
    out = np.empty((rows.shape[0], kmax, p - 1), dtype=complex)
    for k in range(1, kmax + 1):
        out[:, k - 1, :] = char_sums_batch(build_field(p, r, k), rows)
    return out


def _table_job(args):
    p, r, d, variant, kmax, mode, seed, lo, hi = args
    spec = FamilySpec(p, r, d, variant)
    if mode == "monte_carlo":
        rows = sample_coeff_matrix(spec, seed, lo, hi)
    else:
        rows = family_coeff_matrix(spec)[lo:hi]
    return _tables_for_rows(p, r, rows, kmax)


def character_sum_tables(spec: FamilySpec, kmax: int, mode: str = "exhaustive",
                         samples: int = 0, seed: int = 0,
                         workers: int = 1) -> np.ndarray:
    """S_k tables for a whole family, (M, kmax, p-1) complex.

    mode 'exhaustive' walks every member in index order; 'monte_carlo' draws
    `samples` members with one counter-based stream per sample index, so the
    table depends only on (spec, seed, samples), never on `workers`.
    """
    if mode not in ("exhaustive", "monte_carlo"):
        raise ValueError(f"unknown mode {mode!r}")
    if kmax < 1:
        raise ValueError("kmax must be positive")
    total = spec.size() if mode == "exhaustive" else samples
    if total < 1:
        raise ValueError("empty table request")
    for k in range(1, kmax + 1):  # warm caches before any fork
        build_field(spec.p, spec.r, k)
    jobs = [(spec.p, spec.r, spec.d, spec.variant, kmax, mode, seed,
             lo, min(lo + TABLE_CHUNK, total))
            for lo in range(0, total, TABLE_CHUNK)]
    if workers > 1 and len(jobs) > 1:
        with get_context("fork").Pool(workers) as pool:
            parts = pool.map(_table_job, jobs)
    else:
        parts = [_table_job(j) for j in jobs]
    return np.concatenate(parts, axis=0)


# ---------------------------------------------------------------------------
# S statistics


@dataclass(frozen=True, eq=False)
class SStatistic:
    """Per-character and curve-level values of S^sign(K, f, .)."""

    K: int
    sign: str
    per_character: np.ndarray  # (p-1,) complex, entry h-1 for psi^h
    curve: float


def _s_from_tables(tables: np.ndarray, pair, sign: str, q: int,
                   tol: float = 1e-10):
    """Curve statistics from an S_k table block.

    Returns (per_h, curve): per_h is (M, p-1) complex and already pairs h
    with p-h, so its imaginary part must vanish; curve is the real h-sum.
    """
    M, K, pm1 = tables.shape
    w = np.array([pair.coefficient(sign, k) * q ** (-k / 2.0)
                  for k in range(1, K + 1)])
    paired = tables + tables[:, :, ::-1]  # column h-1 meets column (p-h)-1
    per_h = (paired * w[None, :, None]).sum(axis=1)
    worst = float(np.abs(per_h.imag).max())
    if worst > tol:
        raise ArithmeticError(
            f"paired character statistic has imaginary part {worst:.3e}")
    return per_h, per_h.real.sum(axis=1)


def s_statistic(K: int, f, pair, sign: str) -> SStatistic:
    """S^sign(K, f, psi^h) for every h, plus the curve total."""
    if pair.K < K:
        raise ValueError("pair was built with a smaller truncation")
    tables = char_sums_all(f, K)[None, :, :]
    per_h, curve = _s_from_tables(tables, pair, sign, f.q)
    return SStatistic(K, sign, per_h[0], float(curve[0]))


# ---------------------------------------------------------------------------
# brute-force vs structural moment quantities


def _column(e: int, h: int, p: int) -> int:
    """Table column of the character psi^{e h}; e = -1 is the conjugate."""
    if e not in (-1, 1):
        raise ValueError("sign must be +1 or -1")
    if not 1 <= h <= p - 1:
        raise ValueError("character index must lie in 1..p-1")
    return (e * h) % p - 1


def m1_bruteforce(spec: FamilySpec, k: int, e: int = 1, h: int = 1,
                  tables: np.ndarray | None = None) -> dict:
    """Family average of S_k(f, psi^{eh}) q^{-k/2} against the closed form.

    Exact identity for k < d: the average is q^{-(1/2-1/p)k} when p | k and
    zero otherwise, independent of h and e (the value is real).
    """
    if not 1 <= k < spec.d:
        raise ValueError("requires 1 <= k < d")
    if tables is None:
        tables = character_sum_tables(spec, k)
    col = tables[:, k - 1, _column(e, h, spec.p)]
    brute = complex(col.mean()) * spec.q ** (-k / 2.0)
    predicted = 0.0
    if k % spec.p == 0:
        predicted = spec.q ** (-(0.5 - 1.0 / spec.p) * k)
    return {"k": k, "e": e, "h": h,
            "brute": [brute.real, brute.imag],
            "predicted": predicted,
            "abs_error": abs(brute - predicted)}


def m2_structural(p: int, q: int, k1: int, k2: int, e1: int, e2: int,
                  h1: int, h2: int) -> float:
    """Closed form for the pair average q^{-(k1+k2)/2} <S S>.

    Counts Frobenius-conjugate point pairs: divisors m of gcd(k1, k2) with
    mp dividing neither k_i but dividing e1 h1 k1 + e2 h2 k2 contribute
    pi(m) m^2 points, and when p divides both k_i the subfield-pair block
    adds q^{(k1+k2)/p}.
    """
    s = e1 * h1 * k1 + e2 * h2 * k2
    g = math.gcd(k1, k2)
    total = 0
    for m in range(1, g + 1):
        if g % m:
            continue
        if k1 % (m * p) == 0 or k2 % (m * p) == 0:
            continue
        if s % (m * p):
            continue
        total += count_monic_irreducibles(q, m) * m * m
    if k1 % p == 0 and k2 % p == 0:
        total += q ** ((k1 + k2) // p)
    return q ** (-(k1 + k2) / 2.0) * total


def m2_bruteforce(spec: FamilySpec, k1: int, k2: int, e1: int, e2: int,
                  h1: int, h2: int, tables: np.ndarray | None = None) -> dict:
    """Exhaustive pair average against m2_structural; exact for k1+k2 < d."""
    if k1 < 1 or k2 < 1 or k1 + k2 >= spec.d:
        raise ValueError("requires k1, k2 >= 1 and k1 + k2 < d")
    if tables is None:
        tables = character_sum_tables(spec, max(k1, k2))
    p, q = spec.p, spec.q
    a = tables[:, k1 - 1, _column(e1, h1, p)]
    b = tables[:, k2 - 1, _column(e2, h2, p)]
    brute = complex((a * b).mean()) * q ** (-(k1 + k2) / 2.0)
    structural = m2_structural(p, q, k1, k2, e1, e2, h1, h2)
    return {"k": [k1, k2], "e": [e1, e2], "h": [h1, h2],
            "brute": [brute.real, brute.imag],
            "structural": structural,
            "abs_error": abs(brute - structural)}


def _alpha_info(field, a: int):
    """(conjugacy-orbit key, degree over the base field) of an element."""
    if a == 0:
        return -1, 1
    lg = int(field.log[a])
    return int(field.orbit_rep_by_log[lg]), int(field.min_deg_by_log[lg])


def pointwise_criterion(field, alphas, ks, es, hs) -> int:
    """1 iff the family average of psi(sum e h tr_k f(alpha)) is nonzero.

    Groups the alpha_j by minimal polynomial; the class with roots of g
    contributes epsilon = sum over its members of e h k / deg(g), and the
    average is 1 exactly when p divides every class epsilon, else 0.
    """
    p = field.p
    eps: dict = {}
    for a, k, e, h in zip(alphas, ks, es, hs):
        if not field.subfield_member(a, k):
            raise ValueError("alpha does not lie in the subfield of its k")
        key, u = _alpha_info(field, a)
        eps[key] = eps.get(key, 0) + e * h * (k // u)
    return 1 if all(v % p == 0 for v in eps.values()) else 0


def _triple_table_value(infos, ks, es, hs, p: int) -> int:
    # the three-point case table; infos[i] = (orbit key, degree u)
    keys = [i[0] for i in infos]
    us = [i[1] for i in infos]
    div = [(k // u) % p == 0 for k, u in zip(ks, us)]
    if all(div):
        return 1
    if keys[0] == keys[1] == keys[2] and not any(div):
        s = sum(e * h * (k // us[0]) for e, h, k in zip(es, hs, ks))
        return 1 if s % p == 0 else 0
    for i, j, l in ((0, 1, 2), (0, 2, 1), (1, 2, 0)):
        if keys[i] == keys[j] and div[l] and not div[i] and not div[j]:
            s = es[i] * hs[i] * (ks[i] // us[i]) \
                + es[j] * hs[j] * (ks[j] // us[j])
            if s % p == 0:
                return 1
    return 0


def _subfield_elements(field, m: int) -> list:
    """All q_base^m elements of the degree-m subfield, as field indices."""
    step = (field.q - 1) // (field.qbase ** m - 1)
    return [0] + [int(field.exp[lg])
                  for lg in range(0, field.q - 1, step)]


def m3_structural(p: int, r: int, ks, es, hs) -> dict:
    """Triple average by direct summation of the three-point case table.

    Walks every alpha-triple in the product of subfields, evaluates the
    case table, and cross-checks each entry against the epsilon-criterion
    (the two must agree identically).
    """
    q = p ** r
    L = math.lcm(*ks)
    field = build_field(p, r, L)
    lists = [[(a, _alpha_info(field, a)) for a in _subfield_elements(field, k)]
             for k in ks]
    total = 0
    agree = True
    for a1, i1 in lists[0]:
        for a2, i2 in lists[1]:
            for a3, i3 in lists[2]:
                v = _triple_table_value((i1, i2, i3), ks, es, hs, p)
                if v != pointwise_criterion(field, (a1, a2, a3), ks, es, hs):
                    agree = False
                total += v
    return {"value": q ** (-sum(ks) / 2.0) * total,
            "contributing_tuples": total,
            "table_matches_criterion": agree}


def m3_bruteforce(spec: FamilySpec, ks, es, hs,
                  tables: np.ndarray | None = None) -> dict:
    """Exhaustive triple average against the case-table sum; Σk < d."""
    ks, es, hs = list(ks), list(es), list(hs)
    if len(ks) != 3 or len(es) != 3 or len(hs) != 3:
        raise ValueError("expected three (k, e, h) triples")
    if min(ks) < 1 or sum(ks) >= spec.d:
        raise ValueError("requires k_i >= 1 and k1 + k2 + k3 < d")
    if tables is None:
        tables = character_sum_tables(spec, max(ks))
    p, q = spec.p, spec.q
    prod = np.ones(tables.shape[0], dtype=complex)
    for k, e, h in zip(ks, es, hs):
        prod = prod * tables[:, k - 1, _column(e, h, p)]
    brute = complex(prod.mean()) * q ** (-sum(ks) / 2.0)
    structural = m3_structural(spec.p, spec.r, ks, es, hs)
    return {"k": ks, "e": es, "h": hs,
            "brute": [brute.real, brute.imag],
            "structural": structural["value"],
            "table_matches_criterion": structural["table_matches_criterion"],
            "abs_error": abs(brute - structural["value"])}


@lru_cache(maxsize=None)
def _subfield_trace_by_log(p: int, r: int, L: int, k: int) -> np.ndarray:
    """Trace to F_p of the degree-k subfield elements of F_{q^L}, by log.

    Entry lg holds tr_{F_{q^k}/F_p}(g^lg) whenever g^lg lies in that
    subfield (meaningless otherwise), and the final entry q^L - 1 -- the
    zero-element encoding used by value_logs -- holds 0.  A subfield
    element satisfies x^{p^{rk}} = x, so its absolute subfield trace is the
    partial Frobenius sum computed inside the big field.
    """
    field = build_field(p, r, L)
    Qm1 = field.q - 1
    logs = np.arange(Qm1, dtype=np.int64)
    acc = np.zeros(Qm1, dtype=np.int64)
    for i in range(r * k):
        acc += field.exp[(logs * pow(p, i, Qm1)) % Qm1] % p
    out = np.zeros(Qm1 + 1, dtype=np.int64)
    out[:Qm1] = acc % p
    return out


def pointwise_average_check(spec: FamilySpec, alphas, ks, es, hs,
                            L: int | None = None) -> dict:
    """Family histogram of t(f) = sum e h tr_k f(alpha) vs the criterion.

    alphas are element indices in F_{q^L} (L defaults to lcm of the k's).
    The histogram of t(f) mod p over the family is an exact integer object:
    criterion 1 means all mass sits at zero, criterion 0 means a perfectly
    uniform histogram.  Valid for sum k_i < d.
    """
    alphas, ks, es, hs = list(alphas), list(ks), list(es), list(hs)
    if not (len(alphas) == len(ks) == len(es) == len(hs) >= 1):
        raise ValueError("alpha/k/e/h tuples must have equal nonzero length")
    if min(ks) < 1 or sum(ks) >= spec.d:
        raise ValueError("requires k_i >= 1 and sum k_i < d")
    for e in es:
        if e not in (-1, 1):
            raise ValueError("signs must be +1 or -1")
    for h in hs:
        if not 1 <= h <= spec.p - 1:
            raise ValueError("character indices must lie in 1..p-1")
    if L is None:
        L = math.lcm(*ks)
    field = build_field(spec.p, spec.r, L)
    criterion = pointwise_criterion(field, alphas, ks, es, hs)

    rows = family_coeff_matrix(spec)
    p = spec.p
    t = np.zeros(rows.shape[0], dtype=np.int64)
    nonzero = [j for j, a in enumerate(alphas) if a != 0]
    if nonzero:
        w = np.array([int(field.log[alphas[j]]) for j in nonzero],
                     dtype=np.int64)
        vlogs = value_logs(field, rows, w)
        for c, j in enumerate(nonzero):
            tr = _subfield_trace_by_log(spec.p, spec.r, L, ks[j])
            t += es[j] * hs[j] * tr[vlogs[:, c]]
    # f(0) is the constant coefficient, already a base-field index
    const_logs = np.array(
        [field.q - 1] + [int(field.log[c]) for c in range(1, spec.q)],
        dtype=np.int64)
    for j, a in enumerate(alphas):
        if a == 0:
            tr = _subfield_trace_by_log(spec.p, spec.r, L, ks[j])
            t += es[j] * hs[j] * tr[const_logs[rows[:, 0]]]

    hist = np.bincount(t % p, minlength=p)
    M = rows.shape[0]
    if criterion == 1:
        matches = bool(hist[0] == M)
    else:
        matches = bool(M % p == 0 and (hist == M // p).all())
    avg = complex(root_of_unity_powers(p)[t % p].mean())
    return {"criterion": criterion,
            "histogram": hist.tolist(),
            "matches": matches,
            "family_average": [avg.real, avg.imag]}


def delta_count(p: int, hs) -> int:
    """Number of sign/pairing patterns with every matched pair cancelling.

    hs lies in {1..(p-1)/2}^n with n even.  A perfect matching contributes
    the product over its pairs of (2 if the two h's are equal else 0): the
    two members of a pair must carry opposite signs, and with h bounded by
    (p-1)/2 the sum h_i + h_j can never vanish mod p.
    """
    hs = list(hs)
    n = len(hs)
    if n % 2:
        raise ValueError("tuple length must be even")
    half = (p - 1) // 2
    if any(not 1 <= h <= half for h in hs):
        raise ValueError("h values must lie in 1..(p-1)/2")

    def rec(idx):
        if not idx:
            return 1
        i, rest = idx[0], idx[1:]
        total = 0
        for t, j in enumerate(rest):
            if (hs[i] - hs[j]) % p == 0:
                total += 2 * rec(rest[:t] + rest[t + 1:])
        return total

    return rec(tuple(range(n)))


def delta_sum_identity(p: int, ell: int) -> dict:
    """Sum of delta_count over all h-tuples of length 2*ell vs closed form."""
    half = (p - 1) // 2
    total = sum(delta_count(p, hs)
                for hs in itertools.product(range(1, half + 1), repeat=2 * ell))
    closed = (p - 1) ** ell * math.factorial(2 * ell) \
        // (2 ** ell * math.factorial(ell))
    return {"sum": total, "closed_form": closed, "matches": total == closed}


# ---------------------------------------------------------------------------
# exact curve moments from the structural quantities


def exact_curve_mean(pair, sign: str, p: int, q: int) -> float:
    """<S^sign(K, C_f)> = 2 (p-1) C^sign(K), exact for K < d."""
    return 2.0 * (p - 1) * constant_c_truncated(pair, sign, p, q)


def exact_curve_second_moment(pair, s1: str, s2: str, p: int, q: int,
                              d: int) -> float:
    """<S^{s1} S^{s2}> over the curve family, exact whenever 2K < d."""
    K = pair.K
    if 2 * K >= d:
        raise ValueError("structural second moment requires 2K < d")
    total = 0.0
    for k1 in range(1, K + 1):
        c1 = pair.coefficient(s1, k1)
        for k2 in range(1, K + 1):
            c2 = pair.coefficient(s2, k2)
            for e1, e2 in itertools.product((1, -1), repeat=2):
                for h1 in range(1, p):
                    for h2 in range(1, p):
                        total += c1 * c2 * m2_structural(
                            p, q, k1, k2, e1, e2, h1, h2)
    return total


# ---------------------------------------------------------------------------
# statistics helpers


def _jackknife(columns, stat):
    """(value, se) for stat(count, *column_sums) by leave-one-out.

    columns are aligned (n,) arrays of per-sample contributions; stat must
    accept vector arguments.  Returns se = nan for n < 2.
    """
    n = len(columns[0])
    sums = [float(c.sum()) for c in columns]
    value = float(stat(n, *sums))
    if n < 2:
        return value, float("nan")
    loo = [s - c for s, c in zip(sums, columns)]
    vals = np.asarray(stat(n - 1, *loo), dtype=float)
    se = math.sqrt((n - 1) / n * float(((vals - vals.mean()) ** 2).sum()))
    return value, se


def _mean_with_se(x):
    return _jackknife([x], lambda n, s1: s1 / n)


_CENTRAL_STATS = {
    2: lambda n, p1, p2: p2 / n - (p1 / n) ** 2,
    3: lambda n, p1, p2, p3: (p3 / n - 3 * (p2 / n) * (p1 / n)
                              + 2 * (p1 / n) ** 3),
    4: lambda n, p1, p2, p3, p4: (p4 / n - 4 * (p3 / n) * (p1 / n)
                                  + 6 * (p2 / n) * (p1 / n) ** 2
                                  - 3 * (p1 / n) ** 4),
}


def _central_moment_with_se(x, j):
    cols = [x ** i for i in range(1, j + 1)]
    return _jackknife(cols, _CENTRAL_STATS[j])


def ks_statistic(x) -> float:
    """Kolmogorov-Smirnov distance to the standard normal."""
    x = np.sort(np.asarray(x, dtype=float))
    n = len(x)
    cdf = ndtr(x)
    hi = np.arange(1, n + 1) / n - cdf
    lo = cdf - np.arange(0, n) / n
    return float(max(hi.max(), lo.max()))


def _spec_dict(spec: FamilySpec) -> dict:
    return {"p": spec.p, "r": spec.r, "q": spec.q, "d": spec.d,
            "variant": spec.variant}


def _mode_dict(mode, samples, seed):
    if mode == "exhaustive":
        return {"mode": mode}
    return {"mode": mode, "samples": samples, "seed": seed}


# ---------------------------------------------------------------------------
# family reports


def covariance_report(spec: FamilySpec, K: int, beta: float,
                      mode: str = "exhaustive", samples: int = 2000,
                      seed: int = 0, workers: int = 1) -> dict:
    """First and second moments of S^(+/-)(K, C_f) with predictions.

    Requires max(1, 1/beta) < K < d/2.  Exact structural values for the
    means and the three second moments come for free since 2K < d.
    """
    if not (K > max(1.0, 1.0 / beta) and 2 * K < spec.d):
        raise ValueError("requires max(1, 1/beta) < K < d/2")
    pair = build_pair(K, beta)
    tables = character_sum_tables(spec, K, mode, samples, seed, workers)
    p, q = spec.p, spec.q
    curves = {s: _s_from_tables(tables, pair, s, q)[1] for s in SIGNS}
    exhaustive = mode == "exhaustive"
    report = {"family": _spec_dict(spec), "K": K, "beta": beta,
              **_mode_dict(mode, samples, seed),
              "n_values": int(tables.shape[0]),
              "main_term": 2 * (p - 1) / math.pi ** 2 * math.log(K * beta)}
    for s in SIGNS:
        name = SIGN_NAMES[s]
        mean, se = _mean_with_se(curves[s])
        report[f"mean_{name}"] = mean
        report[f"mean_{name}_se"] = 0.0 if exhaustive else se
        report[f"mean_{name}_exact"] = exact_curve_mean(pair, s, p, q)
    for s1, s2 in (("+", "+"), ("-", "-"), ("+", "-")):
        tag = SIGN_NAMES[s1] + "_" + SIGN_NAMES[s2]
        mom, se = _mean_with_se(curves[s1] * curves[s2])
        report[f"second_{tag}"] = mom
        report[f"second_{tag}_se"] = 0.0 if exhaustive else se
        report[f"second_{tag}_exact"] = exact_curve_second_moment(
            pair, s1, s2, p, q, spec.d)
    return report


def covariance_identity(spec: FamilySpec, K: int, beta: float) -> dict:
    """Three evaluation orders of <S^{s1} S^{s2}> that must coincide.

    (a) brute force over the exhaustive family, (b) the coefficient-square
    expansion sum c_{k1} c_{k2} M2 with brute-force M2, (c) the same with
    structural M2.  Agreement is an algebraic identity, not an asymptotic.
    """
    if 2 * K >= spec.d:
        raise ValueError("requires 2K < d")
    pair = build_pair(K, beta)
    tables = character_sum_tables(spec, K)
    p, q = spec.p, spec.q
    curves = {s: _s_from_tables(tables, pair, s, q)[1] for s in SIGNS}

    brute_m2 = {}
    struct_m2 = {}
    for k1, k2 in itertools.product(range(1, K + 1), repeat=2):
        scale = q ** (-(k1 + k2) / 2.0)
        for e1, e2 in itertools.product((1, -1), repeat=2):
            for h1, h2 in itertools.product(range(1, p), repeat=2):
                a = tables[:, k1 - 1, _column(e1, h1, p)]
                b = tables[:, k2 - 1, _column(e2, h2, p)]
                key = (k1, k2, e1, e2, h1, h2)
                brute_m2[key] = complex((a * b).mean()) * scale
                struct_m2[key] = m2_structural(p, q, k1, k2, e1, e2, h1, h2)

    out = {"family": _spec_dict(spec), "K": K, "beta": beta,
           "max_m2_mismatch": max(abs(brute_m2[k] - struct_m2[k])
                                  for k in brute_m2)}
    worst_direct = 0.0
    worst_struct = 0.0
    for s1, s2 in (("+", "+"), ("-", "-"), ("+", "-")):
        direct = float((curves[s1] * curves[s2]).mean())
        exp_brute = 0.0
        exp_struct = 0.0
        for (k1, k2, e1, e2, h1, h2), v in brute_m2.items():
            c = pair.coefficient(s1, k1) * pair.coefficient(s2, k2)
            exp_brute += c * v.real
            exp_struct += c * struct_m2[(k1, k2, e1, e2, h1, h2)]
        tag = SIGN_NAMES[s1] + "_" + SIGN_NAMES[s2]
        out[f"direct_{tag}"] = direct
        out[f"expansion_brute_{tag}"] = exp_brute
        out[f"expansion_structural_{tag}"] = exp_struct
        worst_direct = max(worst_direct, abs(direct - exp_brute))
        worst_struct = max(worst_struct, abs(direct - exp_struct))
    out["max_direct_vs_brute_expansion"] = worst_direct
    out["max_direct_vs_structural_expansion"] = worst_struct
    return out


def moments_report(spec: FamilySpec, K: int, beta: float, n_max: int = 4,
                   mode: str = "exhaustive", samples: int = 2000,
                   seed: int = 0, workers: int = 1) -> dict:
    """Raw and normalized moments <S^n> for n = 1..n_max, with targets.

    Normalization divides by sigma^n with the deterministic
    sigma^2 = (2(p-1)/pi^2) log(d beta); Gaussian targets are 0 for odd n
    and (n-1)!! for even n.  Requires max(1, 1/beta) < K < d/n_max.
    """
    if n_max < 1:
        raise ValueError("n_max must be positive")
    if not (K > max(1.0, 1.0 / beta) and K * n_max < spec.d):
        raise ValueError("requires max(1, 1/beta) < K < d/n_max")
    if spec.d * beta <= 1:
        raise ValueError("normalization needs d * beta > 1")
    pair = build_pair(K, beta)
    tables = character_sum_tables(spec, K, mode, samples, seed, workers)
    p, q = spec.p, spec.q
    exhaustive = mode == "exhaustive"
    sigma2 = 2 * (p - 1) / math.pi ** 2 * math.log(spec.d * beta)
    sigma = math.sqrt(sigma2)
    main2 = 2 * (p - 1) / math.pi ** 2 * math.log(K * beta)
    report = {"family": _spec_dict(spec), "K": K, "beta": beta,
              **_mode_dict(mode, samples, seed),
              "n_values": int(tables.shape[0]),
              "sigma2": sigma2, "main_term_variance": main2,
              "signs": {}}
    for s in SIGNS:
        curve = _s_from_tables(tables, pair, s, q)[1]
        block = {"mean_exact": exact_curve_mean(pair, s, p, q),
                 "raw": {}, "raw_se": {}, "normalized": {},
                 "normalized_target": {}, "raw_main_term": {},
                 "centered": {}, "centered_se": {}}
        for n in range(1, n_max + 1):
            val, se = _mean_with_se(curve ** n)
            block["raw"][str(n)] = val
            block["raw_se"][str(n)] = 0.0 if exhaustive else se
            block["normalized"][str(n)] = val / sigma ** n
            if n % 2 == 0:
                ell = n // 2
                gauss = math.factorial(n) / (math.factorial(ell) * 2 ** ell)
                block["normalized_target"][str(n)] = gauss
                block["raw_main_term"][str(n)] = gauss * main2 ** ell
            else:
                block["normalized_target"][str(n)] = 0.0
                block["raw_main_term"][str(n)] = None
            if 2 <= n <= 4:
                cval, cse = _central_moment_with_se(curve, n)
                block["centered"][str(n)] = cval / sigma ** n
                block["centered_se"][str(n)] = \
                    0.0 if exhaustive else cse / sigma ** n
        if 2 * K < spec.d:
            block["second_exact"] = exact_curve_second_moment(
                pair, s, s, p, q, spec.d)
        report["signs"][SIGN_NAMES[s]] = block
    return report


def gaussian_experiment(spec: FamilySpec, beta: float, samples: int,
                        seed: int, workers: int = 1, k_cap: int = 10) -> dict:
    """Monte Carlo distribution of S^(+/-)(K, C_f) / sigma vs the normal.

    The nominal truncation d / log log(d beta) is clamped to k_cap (field
    tables grow like q^K) and to keep 2K < d; the report states the K used
    and whether clamping happened.  sigma is the deterministic
    sqrt((2(p-1)/pi^2) log(d beta)); empirically centered variants and a
    Kolmogorov-Smirnov distance are reported for both.
    """
    if samples < 1:
        raise ValueError("needs at least one sample")
    if spec.d * beta <= 1:
        raise ValueError("normalization needs d * beta > 1")
    inner = math.log(spec.d * beta)
    nominal = None
    if inner > 1:
        nominal = spec.d / math.log(inner)
    ceiling = min(k_cap, (spec.d - 1) // 2)
    K = ceiling if nominal is None else max(1, min(int(nominal), ceiling))
    clamped = nominal is None or int(nominal) > K

    pair = build_pair(K, beta)
    tables = character_sum_tables(spec, K, "monte_carlo", samples, seed,
                                  workers)
    p, q = spec.p, spec.q
    sigma2 = 2 * (p - 1) / math.pi ** 2 * math.log(spec.d * beta)
    sigma = math.sqrt(sigma2)
    c_limit = constant_c_limit(beta, p, q)
    degenerate = samples < 2

    report = {"family": _spec_dict(spec), "beta": beta, "K": K,
              "K_nominal": nominal, "K_clamped": clamped,
              "samples": samples, "seed": seed,
              "sigma2": sigma2, "degenerate": degenerate,
              "c_limit": c_limit, "signs": {}}
    per_sample = {}
    for s in SIGNS:
        curve = _s_from_tables(tables, pair, s, q)[1]
        per_sample[SIGN_NAMES[s]] = curve
        x = curve / sigma
        mean, mean_se = _mean_with_se(x)
        block = {"mean": mean,
                 "mean_se": None if degenerate else mean_se,
                 "mean_predicted": exact_curve_mean(pair, s, p, q) / sigma,
                 "ks_raw": ks_statistic(x),
                 "moments": {}, "moment_ses": {},
                 "centered_moments": {}, "centered_moment_ses": {}}
        for n in (2, 3, 4):
            val, se = _mean_with_se(x ** n)
            block["moments"][str(n)] = val
            block["moment_ses"][str(n)] = None if degenerate else se
            cval, cse = _central_moment_with_se(x, n)
            block["centered_moments"][str(n)] = cval
            block["centered_moment_ses"][str(n)] = \
                None if degenerate else cse
        xc = x - x.mean()
        block["ks_centered"] = ks_statistic(xc)
        # third-moment decay target from the constant-C main term
        m3_scale = abs(6 * c_limit * (p - 1) ** 2 / math.pi ** 2)
        block["m3_decay_bound"] = m3_scale / math.sqrt(math.log(K * beta)) \
            if K * beta > 1 else None
        block["m3_predicted_sign"] = -1 if c_limit < 0 else 1
        bins = max(1, math.ceil(math.sqrt(samples)))
        counts, edges = np.histogram(x, bins=bins)
        widths = np.diff(edges)
        block["histogram"] = {
            "bin_edges": edges.tolist(),
            "counts": counts.tolist(),
            "densities": (counts / (samples * widths)).tolist()}
        report["signs"][SIGN_NAMES[s]] = block
    report["per_sample"] = {
        "s_plus": per_sample["plus"].tolist(),
        "s_minus": per_sample["minus"].tolist()}
    return report


def mean_square_check(spec: FamilySpec, K: int, beta: float) -> dict:
    """Exhaustive test that -S^(+/-) tracks the zero count in mean square.

    For every family member and every character the sandwich

        -S^- - (d-1)/(K+1) <= N(f, psi^h) - (d-1) beta <= -S^+ + (d-1)/(K+1)

    must hold; at curve level the report gives
    <(N(C_f) - (p-1)(d-1) beta + S^(+/-))^2> together with the scale
    ((p-1)(d-1)/(K+1))^2, and the first moment of N(f, psi) - (d-1) beta
    against the constant-C prediction.
    """
    if K < 1:
        raise ValueError("K must be positive")
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    pair = build_pair(K, beta)
    p, q, d = spec.p, spec.q, spec.d
    kmax = max(K, d - 1)
    tables = character_sum_tables(spec, kmax)
    per_h = {}
    for s in SIGNS:
        per_h[s], _ = _s_from_tables(tables[:, :K], pair, s, q)

    M = tables.shape[0]
    counts = np.empty((M, p - 1), dtype=np.int64)
    for m in range(M):
        f = spec.decode(m)
        for h in range(1, p):
            lpoly = l_polynomial_from_sums(f, h, tables[m, :d - 1, h - 1])
            counts[m, h - 1] = count_in_interval(find_angles(lpoly), beta)

    slack = 1e-9
    tail = (d - 1) / (K + 1)
    centered = counts - (d - 1) * beta
    lower = -per_h["-"].real - tail
    upper = -per_h["+"].real + tail
    lower_worst = float((lower - centered).max())
    upper_worst = float((centered - upper).max())

    curve_counts = counts.sum(axis=1)
    scale = ((p - 1) * (d - 1) / (K + 1)) ** 2
    report = {"family": _spec_dict(spec), "K": K, "beta": beta,
              "n_values": int(M),
              "sandwich_holds": bool(lower_worst <= slack
                                     and upper_worst <= slack),
              "sandwich_worst_lower": lower_worst,
              "sandwich_worst_upper": upper_worst,
              "scale": scale}
    for s in SIGNS:
        curve_s = per_h[s].real.sum(axis=1)
        dev = curve_counts - (p - 1) * (d - 1) * beta + curve_s
        report[f"mean_square_{SIGN_NAMES[s]}"] = float((dev ** 2).mean())
    first = float(centered[:, 0].mean())
    c_bound = 2 * max(abs(constant_c_truncated(pair, s, p, q))
                      for s in SIGNS) + 1
    report["first_moment"] = first
    report["first_moment_bound"] = c_bound
    report["first_moment_ok"] = bool(abs(first) <= c_bound)
    return report


def variance_trend(p: int = 3, r: int = 1, beta: float = 0.5,
                   ds=(22, 41, 82), samples: int = 300, seed: int = 11,
                   workers: int = 1, k_cap: int = 12,
                   k_div: int = 4) -> dict:
    """Growth of Var S^+ across degrees with K = min(d // k_div, k_cap).

    Each row carries the exact structural second moment (2K < d, so it is
    an identity, not an estimate), a Monte Carlo check value with jackknife
    error, and the ratio of the exact value to the main term
    (2(p-1)/pi^2) log(K beta).
    """
    q = p ** r
    rows = []
    for d in ds:
        K = min(d // k_div, k_cap)
        if not (K > max(1.0, 1.0 / beta) and 2 * K < d):
            raise ValueError(f"degree {d} gives unusable truncation {K}")
        spec = FamilySpec(p, r, d)
        pair = build_pair(K, beta)
        exact = exact_curve_second_moment(pair, "+", "+", p, q, d)
        tables = character_sum_tables(spec, K, "monte_carlo", samples, seed,
                                      workers)
        curve = _s_from_tables(tables, pair, "+", q)[1]
        mc, se = _mean_with_se(curve ** 2)
        main = 2 * (p - 1) / math.pi ** 2 * math.log(K * beta)
        rows.append({"d": d, "K": K, "main_term": main,
                     "exact_second": exact, "mc_second": mc, "mc_se": se,
                     "ratio_exact_to_main": exact / main})
    exacts = [row["exact_second"] for row in rows]
    report = {"p": p, "r": r, "beta": beta, "samples": samples, "seed": seed,
              "rows": rows,
              "increasing": all(b > a for a, b in zip(exacts, exacts[1:])),
              "mc_within_3se": all(
                  abs(row["mc_second"] - row["exact_second"])
                  <= 3 * row["mc_se"] for row in rows)}
    return report
