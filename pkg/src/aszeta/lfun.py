"""Character sums, L-polynomials and zeta numerators for y^p - y = f(x).

Everything is driven by exact integer trace histograms

    c_j(f, n) = #{x in F_{q^n} : tr(f(x)) = j},

computed by a batched Horner kernel in the discrete-log domain.  Complex
numbers enter only when a histogram is paired with a root of unity, so the
combinatorial layer stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .family import PolyOverFq
from .fields import LOG_ZERO, ZERO_SENTINEL, build_field

# soft bound on rows*points cells processed per kernel chunk
KERNEL_CELLS = 1 << 22


class IntegralityError(Exception):
    """A quantity that must be an integer failed its rounding tolerance."""


@lru_cache(maxsize=None)
def root_of_unity_powers(p: int) -> np.ndarray:
    """e(j/p) for j = 0..p-1."""
    return np.exp(2j * np.pi * np.arange(p) / p)


def _horner_logs(field, coeff_rows: np.ndarray, w: np.ndarray) -> np.ndarray:
    """log f_m(x) for every row m and every x = g^w[i]; returns (M, W) int32.

    coeff_rows holds F_q indices (constant first, nonzero lead).  The
    accumulator lives in the log domain: values in [0, q^n - 1) are logs,
    values >= ZERO_SENTINEL mean the field element zero.  Coefficient logs
    use LOG_ZERO = -1 for zero instead, which the add step handles.  Output
    encodes the zero element as q^n - 1 (one past the largest true log).
    """
    Qm1 = field.q - 1
    clog = field.log[coeff_rows].astype(np.int32)
    if (clog[:, -1] == LOG_ZERO).any():
        raise ValueError("leading coefficients must be nonzero")
    M = coeff_rows.shape[0]
    D = coeff_rows.shape[1] - 1
    w = w.astype(np.int32)[None, :]
    acc = np.repeat(clog[:, -1:], w.shape[1], axis=1)
    for i in range(D - 1, -1, -1):
        # multiply by x
        acc = acc + w
        np.subtract(acc, Qm1, out=acc,
                    where=(acc >= Qm1) & (acc < ZERO_SENTINEL))
        # add the coefficient a_i
        la = clog[:, i:i + 1]
        if not (la != LOG_ZERO).any():
            continue
        dd = acc - la
        np.add(dd, Qm1, out=dd, where=dd < 0)
        np.clip(dd, 0, Qm1 - 1, out=dd)
        res = la + field.zech[dd]
        np.subtract(res, Qm1, out=res,
                    where=(res >= Qm1) & (res < ZERO_SENTINEL))
        res = np.where(acc >= ZERO_SENTINEL, la, res)
        acc = np.where(la == LOG_ZERO, acc, res)
    return np.minimum(acc, Qm1)


def _horner_traces(field, coeff_rows: np.ndarray, w: np.ndarray) -> np.ndarray:
    return field.trace_by_log[_horner_logs(field, coeff_rows, w)]


def _chunked_kernel(kernel, field, coeff_rows, w):
    coeff_rows = np.asarray(coeff_rows, dtype=np.int32)
    M, W = coeff_rows.shape[0], len(w)
    if M * max(W, 1) <= KERNEL_CELLS:
        return kernel(field, coeff_rows, w)
    out = np.empty((M, W), dtype=np.int32)
    step = max(1, KERNEL_CELLS // max(W, 1))
    for lo in range(0, M, step):
        hi = min(lo + step, M)
        out[lo:hi] = kernel(field, coeff_rows[lo:hi], w)
    return out


def trace_values(field, coeff_rows: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Chunked wrapper around the Horner kernel; (M, len(w)) int32 traces."""
    return _chunked_kernel(_horner_traces, field, coeff_rows, w)


def value_logs(field, coeff_rows: np.ndarray, w: np.ndarray) -> np.ndarray:
    """(M, len(w)) int32 logs of f_m(g^w[i]); q^n - 1 encodes zero."""
    return _chunked_kernel(_horner_logs, field, coeff_rows, w)


def trace_histograms(field, coeff_rows: np.ndarray) -> np.ndarray:
    """Exact counts of tr(f(x)) = j over all x in the field, per row.

    Returns (M, p) int64 with row sums q^n.  Work runs over one orbit
    representative per Frobenius orbit (conjugate points share traces).
    """
    coeff_rows = np.asarray(coeff_rows, dtype=np.int32)
    M = coeff_rows.shape[0]
    p = field.p
    reps = field.orbit_reps
    weights = field.orbit_sizes.astype(np.float64)
    out = np.zeros((M, p), dtype=np.int64)
    step = max(1, KERNEL_CELLS // max(len(reps), 1))
    for lo in range(0, M, step):
        hi = min(lo + step, M)
        tr = _horner_traces(field, coeff_rows[lo:hi], reps)
        rows = np.arange(hi - lo, dtype=np.int32)[:, None]
        flat = (tr + p * rows).ravel()
        wts = np.broadcast_to(weights, tr.shape).ravel()
        counts = np.bincount(flat, weights=wts, minlength=p * (hi - lo))
        out[lo:hi] = np.rint(counts).astype(np.int64).reshape(hi - lo, p)
    # the point x = 0 contributes tr(a_0)
    tr0 = field.trace_of_index[coeff_rows[:, 0]]
    out[np.arange(M), tr0] += 1
    return out


def trace_histogram(f: PolyOverFq, n: int) -> np.ndarray:
    """(p,) exact histogram of tr(f(x)) over x in F_{q^n}."""
    field = build_field(f.p, f.r, n)
    return trace_histograms(field, np.array([f.coeffs]))[0]


def char_sum_from_histogram(hist: np.ndarray, h: int) -> complex:
    """S = sum_j c_j e(h j / p) for the additive character psi^h."""
    p = len(hist)
    if h % p == 0:
        raise ValueError("h must be prime to p")
    zp = root_of_unity_powers(p)
    return complex((hist * zp[(h * np.arange(p)) % p]).sum())


def char_sum(f: PolyOverFq, h: int, n: int) -> complex:
    """S_n(f, psi^h) over F_{q^n}."""
    return char_sum_from_histogram(trace_histogram(f, n), h)


def char_sums_all(f: PolyOverFq, kmax: int) -> np.ndarray:
    """(kmax, p-1) complex matrix of S_k(f, psi^h), k = 1..kmax, h = 1..p-1."""
    p = f.p
    out = np.empty((kmax, p - 1), dtype=complex)
    for k in range(1, kmax + 1):
        hist = trace_histogram(f, k)
        for h in range(1, p):
            out[k - 1, h - 1] = char_sum_from_histogram(hist, h)
    return out


def char_sums_batch(field, coeff_rows: np.ndarray) -> np.ndarray:
    """(M, p-1) complex char sums over one fixed extension field."""
    p = field.p
    hists = trace_histograms(field, coeff_rows)
    zp = root_of_unity_powers(p)
    cols = np.stack([zp[(h * np.arange(p)) % p] for h in range(1, p)], axis=1)
    return hists.astype(complex) @ cols


@dataclass
class LPolynomial:
    """L(u, f, psi^h) = exp(sum_n S_n u^n / n), a degree d-1 polynomial."""

    f: PolyOverFq
    h: int
    coeffs: np.ndarray  # complex, ascending, coeffs[0] = 1

    @property
    def degree(self):
        return len(self.coeffs) - 1


def _newton_coefficients(s_values: np.ndarray, degree: int) -> np.ndarray:
    """Power-sum data S_1..S_degree to polynomial coefficients c_0..c_degree
    via m c_m = sum_{j=1..m} S_j c_{m-j}."""
    c = np.zeros(degree + 1, dtype=complex)
    c[0] = 1.0
    for m in range(1, degree + 1):
        c[m] = np.dot(s_values[:m], c[m - 1::-1]) / m
    return c


def l_polynomial_from_sums(f: PolyOverFq, h: int,
                           s_values: np.ndarray) -> LPolynomial:
    return LPolynomial(f, h, _newton_coefficients(s_values, f.degree - 1))


def l_polynomial(f: PolyOverFq, h: int) -> LPolynomial:
    """L-polynomial of psi^h on the cover, from S_1..S_{d-1}."""
    p = f.p
    if h % p == 0:
        raise ValueError("h must be prime to p")
    sums = char_sums_all(f, f.degree - 1)
    return l_polynomial_from_sums(f, h, sums[:, (h % p) - 1])


def l_polynomials_all(f: PolyOverFq) -> list:
    """L(u, f, psi^h) for h = 1..p-1, sharing one histogram pass."""
    sums = char_sums_all(f, f.degree - 1)
    return [l_polynomial_from_sums(f, h, sums[:, h - 1])
            for h in range(1, f.p)]


def degree_excess_from_sums(f: PolyOverFq, s_values: np.ndarray) -> float:
    """|c_d| from the recursion carried one step beyond the true degree.

    s_values must hold S_1..S_d.  The L-polynomial has exact degree d-1,
    so the would-be coefficient c_d is zero up to rounding noise.
    """
    c = _newton_coefficients(s_values, f.degree)
    return abs(c[f.degree])


def l_polynomial_euler(f: PolyOverFq, h: int, bound: int) -> np.ndarray:
    """Coefficients through u^bound of the truncated Euler product
    prod_{deg P <= bound} (1 - psi_f(P) u^{deg P})^(-1).

    psi_f(P) = psi^h(tr_m(f(alpha))) for any root alpha of P in F_{q^m};
    primes are walked through Frobenius orbit representatives.
    """
    p = f.p
    zp = root_of_unity_powers(p)
    coeffs = np.zeros(bound + 1, dtype=complex)
    coeffs[0] = 1.0
    for m in range(1, bound + 1):
        field = build_field(f.p, f.r, m)
        mask = field.orbit_sizes == m
        reps = field.orbit_reps[mask]
        if m == 1:
            # include the prime X - 0, whose root is the zero element
            tr_zero = int(field.trace_of_index[f.coeffs[0]])
            vals = [complex(zp[(h * tr_zero) % p])]
        else:
            vals = []
        if len(reps):
            trs = trace_values(field, np.array([f.coeffs]), reps)[0]
            vals.extend(complex(zp[(h * int(t)) % p]) for t in trs)
        for v in vals:
            for k in range(m, bound + 1):
                coeffs[k] += v * coeffs[k - m]
    return coeffs


def count_monic_irreducibles(q: int, m: int) -> int:
    """(1/m) sum_{e | m} mu(e) q^(m/e)."""
    total = 0
    for e in range(1, m + 1):
        if m % e:
            continue
        mu, rest = 1, e
        d = 2
        while d * d <= rest:
            if rest % d == 0:
                rest //= d
                if rest % d == 0:
                    mu = 0
                    break
                mu = -mu
            d += 1
        else:
            if rest > 1:
                mu = -mu
        total += mu * q ** (m // e)
    return total // m


def monic_irreducibles(p: int, r: int, m: int):
    """All monic irreducibles of degree m over F_q, as coefficient tuples.

    Built from Frobenius orbits of F_{q^m}: the minimal polynomial of an
    orbit representative alpha is prod_j (X - alpha^(q^j)).
    """
    field = build_field(p, r, m)
    qb = field.qbase
    out = []
    if m == 1:
        return [(x, 1) for x in range(qb)]
    mask = field.orbit_sizes == m
    for z in field.orbit_reps[mask]:
        root = int(field.exp[z])
        coeffs = [1]
        x = root
        for j in range(m):
            conj = field.pow(root, qb ** j)
            nc = [0] * (len(coeffs) + 1)
            for i, c in enumerate(coeffs):
                nc[i + 1] = field.add(nc[i + 1], c)
                nc[i] = field.add(nc[i], field.mul(field.neg(conj), c))
            coeffs = nc
        if any(c >= qb for c in coeffs):
            raise RuntimeError("minimal polynomial left the base field")
        out.append(tuple(coeffs))
    out.sort()
    return out


def von_mangoldt_sum(f: PolyOverFq, h: int, n: int) -> complex:
    """q^(-n/2) sum over monic M of degree n of Lambda(M) psi_f(M).

    Lambda(M) = deg P when M = P^k and 0 otherwise; psi_f is completely
    multiplicative on prime powers, psi_f(P^k) = psi_f(P)^k.
    """
    p, q = f.p, f.p ** f.r
    zp = root_of_unity_powers(p)
    total = 0.0 + 0.0j
    for m in range(1, n + 1):
        if n % m:
            continue
        k = n // m
        field = build_field(f.p, f.r, m)
        mask = field.orbit_sizes == m
        reps = field.orbit_reps[mask]
        trs = []
        if m == 1:
            trs.append(int(field.trace_of_index[f.coeffs[0]]))
        if len(reps):
            trs.extend(int(t) for t in
                       trace_values(field, np.array([f.coeffs]), reps)[0])
        for t in trs:
            total += m * zp[(h * t * k) % p]
    return complex(total / q ** (n / 2))


@dataclass
class ZetaNumerator:
    """P(u) = prod_h L(u, f, psi^h): the integer zeta numerator."""

    f: PolyOverFq
    coeffs: np.ndarray       # int64, ascending, length 2g+1
    rounding_residual: float

    @property
    def genus(self):
        return (len(self.coeffs) - 1) // 2

    def power_sums(self, nmax: int) -> list:
        """t_n = sum of n-th powers of reciprocal roots, exact integers,
        via t_n = -n b_n - sum_{j=1..n-1} b_j t_{n-j}."""
        b = [int(c) for c in self.coeffs]
        while len(b) <= nmax:
            b.append(0)
        t = [0] * (nmax + 1)
        for n in range(1, nmax + 1):
            acc = -n * b[n]
            for j in range(1, n):
                acc -= b[j] * t[n - j]
            t[n] = acc
        return t[1:]


def zeta_numerator(f: PolyOverFq) -> ZetaNumerator:
    """Multiply the L-polynomials over all nontrivial characters, round to
    integers, and verify integrality plus the functional equation."""
    q = f.p ** f.r
    d = f.degree
    g = (d - 1) * (f.p - 1) // 2
    prod = np.ones(1, dtype=complex)
    for l in l_polynomials_all(f):
        prod = np.convolve(prod, l.coeffs)
    ints = np.rint(prod.real).astype(np.int64)
    residual = float(np.abs(prod - ints).max())
    per_coeff = np.abs(prod - ints) <= 1e-6 * (1.0 + np.abs(ints))
    if not per_coeff.all():
        raise IntegralityError(
            f"zeta numerator coefficients are not integral: "
            f"max residual {residual:.3e}")
    if len(ints) != 2 * g + 1:
        raise IntegralityError("zeta numerator has the wrong degree")
    for k in range(g + 1):
        if ints[2 * g - k] != q ** (g - k) * ints[k]:
            raise IntegralityError("functional equation fails on integers")
    return ZetaNumerator(f, ints, residual)


def point_count(f: PolyOverFq, n: int) -> int:
    """#C_f(F_{q^n}) = 1 + p * #{x : tr(f(x)) = 0}, exactly."""
    hist = trace_histogram(f, n)
    return 1 + f.p * int(hist[0])


def point_count_from_zeta(z: ZetaNumerator, n: int) -> int:
    """q^n + 1 - sum alpha_j^n from the integer coefficients, exactly."""
    q = z.f.p ** z.f.r
    return q ** n + 1 - z.power_sums(n)[n - 1]


def weil_bound_ok(f: PolyOverFq, h: int, n: int, slack: float = 1e-9) -> bool:
    """|S_n| <= (d-1) q^(n/2) for n < d."""
    q = f.p ** f.r
    s = char_sum(f, h, n)
    return abs(s) <= (f.degree - 1) * q ** (n / 2) + slack
