"""Polynomials over F_q and the degree-d coefficient families.

A polynomial is a tuple of F_q indices, constant term first, nonzero lead.
Family variants over a fixed degree d with p not dividing d:

  full        every a_i free, a_d nonzero
  prime_to_p  a_{pk} = 0 for 1 <= k <= floor(d/p)
  twisted     prime_to_p and additionally a_0 = 0
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import base_field

FULL = "full"
PRIME_TO_P = "prime_to_p"
TWISTED = "twisted"
VARIANTS = (FULL, PRIME_TO_P, TWISTED)

ENUM_LIMIT = 10 ** 7


@dataclass(frozen=True)
class PolyOverFq:
    """Dense polynomial over F_q = F_{p^r}; coeffs are field indices."""

    p: int
    r: int
    coeffs: tuple

    def __post_init__(self):
        q = self.p ** self.r
        if len(self.coeffs) == 0:
            raise ValueError("empty coefficient list")
        if any(not (0 <= c < q) for c in self.coeffs):
            raise ValueError(f"coefficients must be indices below q = {q}")
        if len(self.coeffs) > 1 and self.coeffs[-1] == 0:
            raise ValueError("leading coefficient must be nonzero")

    @property
    def q(self):
        return self.p ** self.r

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def evaluate(self, x: int, field) -> int:
        """Horner evaluation at an element of an extension field."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = field.add(field.mul(acc, x), c)
        return acc

    def serialize(self) -> str:
        return ",".join(str(c) for c in self.coeffs)

    @staticmethod
    def parse(text: str, p: int, r: int = 1) -> "PolyOverFq":
        coeffs = tuple(int(t) for t in text.split(","))
        return PolyOverFq(p, r, coeffs)


@dataclass(frozen=True)
class FamilySpec:
    p: int
    r: int
    d: int
    variant: str = PRIME_TO_P

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown family variant {self.variant!r}")
        if self.d < 1:
            raise ValueError("degree must be positive")
        if self.d % self.p == 0:
            raise ValueError(f"p = {self.p} divides d = {self.d}")
        base_field(self.p, self.r)  # validates p

    @property
    def q(self):
        return self.p ** self.r

    def forced_zero_slots(self) -> set:
        if self.variant == FULL:
            return set()
        slots = {self.p * k for k in range(1, self.d // self.p + 1)}
        if self.variant == TWISTED:
            slots.add(0)
        return slots

    def free_slots(self) -> list:
        """Unconstrained coefficient indices below d, ascending."""
        forced = self.forced_zero_slots()
        return [i for i in range(self.d) if i not in forced]

    def size(self) -> int:
        return (self.q - 1) * self.q ** len(self.free_slots())

    def decode(self, code: int) -> PolyOverFq:
        """Member with the given index in 0..size-1."""
        q = self.q
        coeffs = [0] * (self.d + 1)
        coeffs[self.d] = 1 + code % (q - 1)
        rest = code // (q - 1)
        for slot in self.free_slots():
            coeffs[slot] = rest % q
            rest //= q
        return PolyOverFq(self.p, self.r, tuple(coeffs))


def enumerate_family(spec: FamilySpec):
    """All members in index order; refuses absurdly large families."""
    n = spec.size()
    if n > ENUM_LIMIT:
        raise ValueError(f"family of size {n} exceeds the enumeration limit")
    return (spec.decode(code) for code in range(n))


def family_coeff_matrix(spec: FamilySpec) -> np.ndarray:
    """(size, d+1) int32 matrix of every member's coefficients."""
    n = spec.size()
    if n > ENUM_LIMIT:
        raise ValueError(f"family of size {n} exceeds the enumeration limit")
    q = spec.q
    codes = np.arange(n, dtype=np.int64)
    out = np.zeros((n, spec.d + 1), dtype=np.int32)
    out[:, spec.d] = 1 + codes % (q - 1)
    rest = codes // (q - 1)
    for slot in spec.free_slots():
        out[:, slot] = rest % q
        rest //= q
    return out


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for one sample, keyed by (seed, index)."""
    bits = np.array([seed & (2 ** 64 - 1), index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=bits))


def sample_coeff_matrix(spec: FamilySpec, seed: int, start: int,
                        stop: int) -> np.ndarray:
    """Coefficient rows for samples start..stop-1 of the given stream.

    Each sample uses its own counter-based stream, so the result depends
    only on (spec, seed, index), never on how work is batched.
    """
    q = spec.q
    free = spec.free_slots()
    out = np.zeros((stop - start, spec.d + 1), dtype=np.int32)
    for i in range(start, stop):
        rng = sample_rng(seed, i)
        row = out[i - start]
        row[spec.d] = int(rng.integers(1, q))
        draws = rng.integers(0, q, size=len(free))
        for slot, v in zip(free, draws):
            row[slot] = v
    return out


def sample_family(spec: FamilySpec, seed: int, count: int):
    """List of sampled members (convenience wrapper for small counts)."""
    rows = sample_coeff_matrix(spec, seed, 0, count)
    return [PolyOverFq(spec.p, spec.r, tuple(int(c) for c in row))
            for row in rows]


def mu_reduce(f: PolyOverFq) -> PolyOverFq:
    """Fold every coefficient a_{i p^j} (p not dividing i, j maximal) into
    slot i through j inverse Frobenius twists; the constant term is kept.

    The output satisfies the prime_to_p constraint, has the same degree,
    and the same trace data tr(f(x)) at every point of every extension.
    """
    base = base_field(f.p, f.r)
    d = f.degree
    out = [0] * (d + 1)
    out[0] = f.coeffs[0]
    for m in range(1, d + 1):
        a = f.coeffs[m]
        if a == 0:
            continue
        i, j = m, 0
        while i % f.p == 0:
            i //= f.p
            j += 1
        for _ in range(j):
            a = base.frobenius_inv(a)
        out[i] = base.add(out[i], a)
    return PolyOverFq(f.p, f.r, tuple(out))
