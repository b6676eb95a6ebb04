"""Finite field towers F_p < F_q < F_{q^n} backed by discrete-log tables.

An element sum_i c_i X^i of F_{q^n} (coefficients c_i in F_q, X the class of
the defining modulus) is stored as the integer index sum_i idx(c_i) * q^i.
Constants embed as indices below q, so the inclusion F_q -> F_{q^n} is the
identity on indices and the prime subfield is always 0..p-1.  Unpacking an
index all the way down gives base-p digits, on which addition is digitwise.

Multiplication and the additive hot loops run in the discrete-log domain:
exp/log tables plus a Zech table for log(1 + g^z).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

TABLE_LIMIT = 1 << 20

# log(0) marker in coefficient arrays; kernel accumulators use ZERO_SENTINEL
# instead so the masked arithmetic stays inside int32 range (see lfun).
LOG_ZERO = -1
ZERO_SENTINEL = 1 << 26


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def distinct_prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class PrimeField:
    """F_p for an odd prime p.  Indices are the residues 0..p-1."""

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if p == 2:
            raise ValueError("characteristic 2 is not supported")
        self.p = p
        self.q = p
        self.rdeg = 1  # degree over the prime field
        a = np.arange(p, dtype=np.int32)
        self.ADD = ((a[:, None] + a[None, :]) % p).astype(np.int32)
        self.MUL = ((a[:, None] * a[None, :]) % p).astype(np.int32)
        self.NEG = ((-a) % p).astype(np.int32)

    def ensure_base_tables(self):
        return self

    def add(self, x: int, y: int) -> int:
        return (x + y) % self.p

    def mul(self, x: int, y: int) -> int:
        return (x * y) % self.p

    def neg(self, x: int) -> int:
        return (-x) % self.p

    def inv(self, x: int) -> int:
        if x % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, self.p - 2, self.p)

    def frobenius_inv(self, x: int) -> int:
        return x  # x -> x^p is the identity map on F_p

    def trace_to_prime(self, x: int) -> int:
        return x % self.p

    def enumerate_elements(self):
        return range(self.p)


def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


class TableField:
    """F_{b^n} as a degree-n extension of a base field b, with Zech tables.

    The modulus is the lexicographically least monic irreducible of degree n
    over the base, coefficients compared from the constant term up.
    """

    def __init__(self, base, n: int):
        if n < 1:
            raise ValueError("extension degree must be >= 1")
        base.ensure_base_tables()
        q = base.q ** n
        if q > TABLE_LIMIT:
            raise ValueError(
                f"field of size {base.q}^{n} exceeds the table limit 2^20")
        self.base = base
        self.n = n
        self.p = base.p
        self.qbase = base.q
        self.q = q
        self.rdeg = base.rdeg * n
        self.modulus = self._least_irreducible()
        tail = self.modulus[:-1]
        self._neg_mod_tail = [base.neg(c) for c in tail]
        self._build_log_tables()
        self._build_trace_tables()
        self._build_orbit_tables()
        self.ADD = None  # dense tables for serving as a base, built on demand
        self.MUL = None
        self.NEG = None

    # ---- dense polynomial arithmetic over the base (construction only)

    def _poly_mul(self, a, b):
        base = self.base
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                if y:
                    out[i + j] = base.add(out[i + j], base.mul(x, y))
        return out

    def _poly_mod(self, a, mod):
        # mod is monic, full coefficient list including the leading 1
        base = self.base
        a = list(a)
        dm = len(mod) - 1
        for i in range(len(a) - 1, dm - 1, -1):
            c = a[i]
            if c == 0:
                continue
            a[i] = 0
            for j in range(dm):
                if mod[j]:
                    a[i - dm + j] = base.add(a[i - dm + j],
                                             base.neg(base.mul(c, mod[j])))
        del a[dm:]
        while len(a) < dm:
            a.append(0)
        return a

    def _poly_gcd(self, a, b):
        base = self.base
        a, b = _trim(a), _trim(b)
        while b:
            lead = b[-1]
            if lead != 1:
                il = base.inv(lead)
                b = [base.mul(c, il) for c in b]
            a, b = b, _trim(self._poly_mod(a, b))
        return a

    def _poly_powmod(self, a, e, mod):
        out = [1] + [0] * (len(mod) - 2)
        acc = list(a)
        while e:
            if e & 1:
                out = self._poly_mod(self._poly_mul(out, acc), mod)
            e >>= 1
            if e:
                acc = self._poly_mod(self._poly_mul(acc, acc), mod)
        return out

    def _is_irreducible(self, mod):
        # no factor of degree <= n/2  <=>  gcd(X^(q^m) - X, mod) = 1 for all m
        xq = [0, 1] + [0] * (self.n - 2) if self.n >= 2 else [0]
        cur = list(xq)
        for _ in range(self.n // 2):
            cur = self._poly_powmod(cur, self.qbase, mod)
            diff = list(cur)
            while len(diff) < 2:
                diff.append(0)
            diff[1] = self.base.add(diff[1], self.base.neg(1))
            if len(_trim(self._poly_gcd(diff, mod))) > 1:
                return False
        return True

    def _least_irreducible(self):
        n, qb = self.n, self.qbase
        for code in range(qb ** n):
            coeffs = [(code // qb ** (n - 1 - i)) % qb for i in range(n)]
            mod = coeffs + [1]
            if self._is_irreducible(mod):
                return tuple(mod)
        raise RuntimeError("no irreducible modulus found")  # cannot happen

    # ---- vectorized index-domain helpers (construction only)

    def _vec_add(self, A, B):
        # addition of packed indices is digitwise base-field addition
        qb, BADD = self.qbase, self.base.ADD
        out = np.zeros_like(A)
        for i in range(self.n):
            da = (A // qb ** i) % qb
            db = (B // qb ** i) % qb
            out += BADD[da, db].astype(np.int64) * qb ** i
        return out

    def _vec_scalar_mul(self, s, g_digits):
        # s: array of base-field indices; fixed multiplier g given by digits
        qb, BMUL = self.qbase, self.base.MUL
        out = np.zeros(s.shape, dtype=np.int64)
        for j, gj in enumerate(g_digits):
            if gj:
                out += BMUL[s, gj].astype(np.int64) * qb ** j
        return out

    def _vec_mul_x(self, A):
        qb, n = self.qbase, self.n
        hi = A // qb ** (n - 1)
        rest = (A % qb ** (n - 1)) * qb
        if not hi.any():
            return rest
        return self._vec_add(rest, self._vec_scalar_mul(hi, self._neg_mod_tail))

    def _mul_by_const_table(self, g_idx: int):
        """M with M[i] = index of element_i * g, for all i at once."""
        qb, n = self.qbase, self.n
        idx = np.arange(self.q, dtype=np.int64)
        g_digits = [(g_idx // qb ** j) % qb for j in range(n)]
        acc = np.zeros(self.q, dtype=np.int64)
        for i in range(n - 1, -1, -1):
            acc = self._vec_mul_x(acc)
            ci = (idx // qb ** i) % qb
            acc = self._vec_add(acc, self._vec_scalar_mul(ci, g_digits))
        return acc

    # ---- scalar index arithmetic without tables (generator search)

    def _mul_idx(self, a: int, b: int) -> int:
        qb, n, base = self.qbase, self.n, self.base
        da = [(a // qb ** i) % qb for i in range(n)]
        db = [(b // qb ** i) % qb for i in range(n)]
        conv = [0] * (2 * n - 1)
        for i, x in enumerate(da):
            if x == 0:
                continue
            for j, y in enumerate(db):
                if y:
                    conv[i + j] = base.add(conv[i + j], base.mul(x, y))
        red = self._poly_mod(conv, list(self.modulus))
        return sum(c * qb ** i for i, c in enumerate(red))

    def _pow_idx(self, a: int, e: int) -> int:
        out, acc = 1, a
        while e:
            if e & 1:
                out = self._mul_idx(out, acc)
            e >>= 1
            if e:
                acc = self._mul_idx(acc, acc)
        return out

    def _find_generator(self) -> int:
        m = self.q - 1
        primes = distinct_prime_factors(m)
        for cand in range(2, self.q):
            if all(self._pow_idx(cand, m // ell) != 1 for ell in primes):
                return cand
        raise RuntimeError("no multiplicative generator found")  # impossible

    # ---- table construction

    def _build_log_tables(self):
        Q = self.q
        self.generator = self._find_generator()
        mulg = self._mul_by_const_table(self.generator)
        exp = np.empty(Q - 1, dtype=np.int64)
        exp[0] = 1
        filled = 1
        P = mulg  # currently multiplication by g^filled
        while filled < Q - 1:
            take = min(filled, Q - 1 - filled)
            exp[filled:filled + take] = P[exp[:take]]
            filled += take
            if filled < Q - 1:
                P = P[P]
        if not np.array_equal(np.sort(exp), np.arange(1, Q)):
            raise RuntimeError("generator does not have full order")
        log = np.full(Q, LOG_ZERO, dtype=np.int64)
        log[exp] = np.arange(Q - 1)
        # Zech table: zech[z] = log(1 + g^z), ZERO_SENTINEL when 1 + g^z = 0
        qb = self.qbase
        c0 = exp % qb
        plus1 = exp - c0 + self.base.ADD[c0, 1].astype(np.int64)
        zl = log[plus1]
        zech = np.where(zl == LOG_ZERO, ZERO_SENTINEL, zl)
        self.exp = exp.astype(np.int32)
        self.log = log.astype(np.int32)
        self.zech = zech.astype(np.int32)

    def _build_trace_tables(self):
        Q, p, rd = self.q, self.p, self.rdeg
        Qm1 = Q - 1
        # absolute trace of the F_p-basis element with index p^k
        tr_basis = []
        for k in range(rd):
            z = int(self.log[p ** k])
            digits = np.zeros(rd, dtype=np.int64)
            zz = z
            for _ in range(rd):
                e = int(self.exp[zz])
                for t in range(rd):
                    digits[t] += (e // p ** t) % p
                zz = (zz * p) % Qm1
            digits %= p
            if digits[1:].any():
                raise RuntimeError("absolute trace left the prime field")
            tr_basis.append(int(digits[0]))
        tmp = np.arange(Q, dtype=np.int64)
        tr = np.zeros(Q, dtype=np.int64)
        for k in range(rd):
            tr += (tmp % p) * tr_basis[k]
            tmp //= p
        tr %= p
        self.trace_of_index = tr.astype(np.int32)
        # traces addressed by accumulator log; the extra last slot is zero,
        # so kernels can clip sentinel accumulators to Q-1 and read 0
        tbl = np.empty(Q, dtype=np.int32)
        tbl[:Q - 1] = self.trace_of_index[self.exp]
        tbl[Q - 1] = 0
        self.trace_by_log = tbl

    def _build_orbit_tables(self):
        # orbits of x -> x^qbase; one representative plus the orbit size
        # (= degree of the minimal polynomial over the base field)
        Qm1 = self.q - 1
        z = np.arange(Qm1, dtype=np.int64)
        rep = z.copy()
        size = np.full(Qm1, self.n, dtype=np.int64)
        cur = z.copy()
        for j in range(1, self.n):
            cur = (cur * self.qbase) % Qm1
            np.minimum(rep, cur, out=rep)
            first = (cur == z) & (size == self.n)
            size[first] = j
        mask = rep == z
        self.orbit_reps = np.nonzero(mask)[0].astype(np.int32)  # log values
        self.orbit_sizes = size[mask].astype(np.int32)
        self.min_deg_by_log = size.astype(np.int32)
        self.orbit_rep_by_log = rep.astype(np.int32)

    def ensure_base_tables(self):
        """Dense q x q add/mul tables, needed when this field is a base."""
        if self.ADD is not None:
            return self
        Q, p = self.q, self.p
        if Q > 4096:
            raise ValueError(f"field of size {Q} is too large to use as a base")
        i = np.arange(Q, dtype=np.int64)
        add = np.zeros((Q, Q), dtype=np.int64)
        x, y = i[:, None].copy(), i[None, :].copy()
        for k in range(self.rdeg):
            add += ((x % p + y % p) % p) * p ** k
            x //= p
            y //= p
        self.ADD = add.astype(np.int32)
        lg = self.log.astype(np.int64)
        mul = self.exp[(lg[:, None] + lg[None, :]) % (Q - 1)].astype(np.int32)
        mul[0, :] = 0
        mul[:, 0] = 0
        self.MUL = mul
        neg = np.zeros(Q, dtype=np.int64)
        x = i.copy()
        for k in range(self.rdeg):
            neg += ((p - x % p) % p) * p ** k
            x //= p
        self.NEG = neg.astype(np.int32)
        return self

    # ---- element API (indices are python ints)

    def enumerate_elements(self):
        return range(self.q)

    def add(self, x: int, y: int) -> int:
        p = self.p
        out, mult = 0, 1
        for _ in range(self.rdeg):
            out += ((x + y) % p) * mult
            x //= p
            y //= p
            mult *= p
        return out

    def neg(self, x: int) -> int:
        p = self.p
        out, mult = 0, 1
        for _ in range(self.rdeg):
            out += ((p - x % p) % p) * mult
            x //= p
            mult *= p
        return out

    def mul(self, x: int, y: int) -> int:
        if x == 0 or y == 0:
            return 0
        z = (int(self.log[x]) + int(self.log[y])) % (self.q - 1)
        return int(self.exp[z])

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return int(self.exp[-int(self.log[x]) % (self.q - 1)])

    def pow(self, x: int, e: int) -> int:
        if x == 0:
            return 1 if e == 0 else 0
        z = (int(self.log[x]) * e) % (self.q - 1)
        return int(self.exp[z])

    def frobenius(self, x: int, i: int = 1) -> int:
        """x^(p^i)."""
        if x == 0:
            return 0
        return self.pow(x, pow(self.p, i, self.q - 1))

    def frobenius_inv(self, x: int) -> int:
        """The inverse of x -> x^p, namely x -> x^(p^(rdeg-1))."""
        return self.frobenius(x, self.rdeg - 1)

    def trace_to_prime(self, x: int) -> int:
        return int(self.trace_of_index[x])

    def trace_partial(self, x: int, s: int) -> int:
        """sum_{i<s} x^(p^i); with s = rdeg this is the absolute trace."""
        out = 0
        for i in range(s):
            out = self.add(out, self.frobenius(x, i))
        return out

    def subfield_member(self, x: int, m: int) -> bool:
        """True iff x lies in the subfield of size qbase^m; requires m | n."""
        if m < 1 or self.n % m != 0:
            raise ValueError(f"m = {m} does not divide n = {self.n}")
        if x == 0:
            return True
        step = (self.q - 1) // (self.qbase ** m - 1)
        return int(self.log[x]) % step == 0

    def minimal_degree(self, x: int) -> int:
        """Degree over the base field of the minimal polynomial of x."""
        if x == 0:
            return 1
        return int(self.min_deg_by_log[self.log[x]])


@lru_cache(maxsize=None)
def base_field(p: int, r: int = 1):
    """The coefficient field F_q, q = p^r."""
    if r < 1:
        raise ValueError("r must be positive")
    pf = PrimeField(p)
    return pf if r == 1 else TableField(pf, r)


@lru_cache(maxsize=None)
def build_field(p: int, r: int, n: int) -> TableField:
    """The extension F_{q^n} of F_q = F_{p^r}, with all kernel tables."""
    if n < 1:
        raise ValueError("n must be positive")
    if p ** (r * n) > TABLE_LIMIT:
        raise ValueError(
            f"field of size {p}^{r * n} exceeds the table limit 2^20")
    return TableField(base_field(p, r), n)
