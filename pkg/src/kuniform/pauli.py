"""Bit-packed Pauli strings and GF(2) symplectic linear algebra.

Pauli X/Z parts are stored as Python integers used as bit vectors
(bit q = qubit q), which gives word-parallel XOR/AND for free.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

_PAULI_FROM_BITS = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_BITS_FROM_PAULI = {v: k for k, v in _PAULI_FROM_BITS.items()}


@dataclass(frozen=True)
class PauliString:
    """An n-qubit Pauli operator with a real sign (no i phases stored)."""

    n: int
    x: int = 0
    z: int = 0
    sign: int = 1

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("qubit count must be non-negative")
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask:
            raise ValueError("x/z bits outside qubit range")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, kind: str, sign: int = 1) -> "PauliString":
        if not 0 <= qubit < n:
            raise ValueError(f"qubit {qubit} out of range for n={n}")
        xb, zb = _BITS_FROM_PAULI[kind]
        return cls(n, xb << qubit, zb << qubit, sign)

    @classmethod
    def from_label(cls, label: str, sign: int = 1) -> "PauliString":
        """Build from a string like "XZIZY" (qubit 0 first)."""
        x = z = 0
        for q, ch in enumerate(label):
            xb, zb = _BITS_FROM_PAULI[ch]
            x |= xb << q
            z |= zb << q
        return cls(len(label), x, z, sign)

    def to_label(self) -> str:
        return "".join(
            _PAULI_FROM_BITS[((self.x >> q) & 1, (self.z >> q) & 1)]
            for q in range(self.n)
        )

    @property
    def x_bits(self) -> Tuple[int, ...]:
        return tuple((self.x >> q) & 1 for q in range(self.n))

    @property
    def z_bits(self) -> Tuple[int, ...]:
        return tuple((self.z >> q) & 1 for q in range(self.n))

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def support(self) -> Tuple[int, ...]:
        bits = self.x | self.z
        return tuple(q for q in range(self.n) if (bits >> q) & 1)

    def commutes(self, other: "PauliString") -> bool:
        if self.n != other.n:
            raise ValueError("mismatched qubit counts")
        return ((self.x & other.z).bit_count() + (self.z & other.x).bit_count()) % 2 == 0

    def __mul__(self, other: "PauliString") -> "PauliString":
        """Product self * other; requires the result phase to be real."""
        if self.n != other.n:
            raise ValueError("mismatched qubit counts")
        phase = phase_exponent(self.x, self.z, other.x, other.z)
        if phase % 2:
            raise ValueError("product has imaginary phase; not a signed Pauli string")
        sign = self.sign * other.sign * (1 if phase % 4 == 0 else -1)
        return PauliString(self.n, self.x ^ other.x, self.z ^ other.z, sign)


def phase_exponent(x1: int, z1: int, x2: int, z2: int) -> int:
    """Exponent k (mod 4) of i in (x1|z1)·(x2|z2) = i^k (x1^x2 | z1^z2).

    Per-qubit contributions follow the usual single-qubit products,
    e.g. X·Z = -i Y contributes -1.
    """
    k = 0
    both = (x1 | z1) & (x2 | z2)
    while both:
        q = (both & -both).bit_length() - 1
        both &= both - 1
        a = ((x1 >> q) & 1, (z1 >> q) & 1)
        b = ((x2 >> q) & 1, (z2 >> q) & 1)
        k += _LEVI[a, b]
    return k % 4


# i exponents for single-qubit products P*Q = i^k R, keyed by (x,z) pairs.
_LEVI = {}
for _a, _pa in _PAULI_FROM_BITS.items():
    for _b, _pb in _PAULI_FROM_BITS.items():
        table = {
            ("X", "Z"): 3, ("Z", "X"): 1,
            ("X", "Y"): 1, ("Y", "X"): 3,
            ("Y", "Z"): 1, ("Z", "Y"): 3,
        }
        _LEVI[_a, _b] = table.get((_pa, _pb), 0)
del _a, _b, _pa, _pb, table


@dataclass(frozen=True)
class BinarySymplecticMatrix:
    """m x 2n bit matrix; columns 0..n-1 are X parts, n..2n-1 are Z parts."""

    n: int
    rows: Tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def cols(self) -> int:
        return 2 * self.n

    @classmethod
    def from_paulis(cls, paulis: Sequence[PauliString]) -> "BinarySymplecticMatrix":
        if not paulis:
            raise ValueError("need at least one Pauli")
        n = paulis[0].n
        rows = []
        for p in paulis:
            if p.n != n:
                raise ValueError("mismatched qubit counts")
            rows.append(p.x | (p.z << n))
        return cls(n, tuple(rows))

    @classmethod
    def from_bit_rows(cls, n: int, bit_rows: Iterable[Sequence[int]]) -> "BinarySymplecticMatrix":
        rows = []
        for bits in bit_rows:
            if len(bits) != 2 * n:
                raise ValueError("row length must be 2n")
            rows.append(sum(b << i for i, b in enumerate(bits)))
        return cls(n, tuple(rows))

    def bit(self, row: int, col: int) -> int:
        return (self.rows[row] >> col) & 1


def gf2_rank_rows(rows: Iterable[int]) -> int:
    """Rank over GF(2) of integer bit-rows, by in-place elimination."""
    pivots: List[int] = []
    for row in rows:
        for p in pivots:
            row = min(row, row ^ p)
        if row:
            pivots.append(row)
    return len(pivots)


def gf2_rank(m: BinarySymplecticMatrix) -> int:
    return gf2_rank_rows(m.rows)


def gf2_in_rowspan(vec: int, rows: Iterable[int]) -> bool:
    pivots: List[int] = []
    for row in rows:
        for p in pivots:
            row = min(row, row ^ p)
        if row:
            pivots.append(row)
    for p in pivots:
        vec = min(vec, vec ^ p)
    return vec == 0


def restrict_columns(m: BinarySymplecticMatrix, subset: Sequence[int]) -> BinarySymplecticMatrix:
    """Keep only the X then Z columns of the given qubits (0-based, sorted)."""
    seen = set()
    for q in subset:
        if not 0 <= q < m.n:
            raise ValueError(f"qubit {q} out of range")
        if q in seen:
            raise ValueError(f"duplicate qubit {q}")
        seen.add(q)
    k = len(subset)
    rows = []
    for row in m.rows:
        out = 0
        for i, q in enumerate(subset):
            out |= ((row >> q) & 1) << i
            out |= ((row >> (m.n + q)) & 1) << (k + i)
        rows.append(out)
    return BinarySymplecticMatrix(k, tuple(rows))


def pauli_in_group(p: PauliString, gens: Sequence[PauliString]) -> bool:
    """Whether p (sign ignored) lies in the GF(2) row space of gens."""
    for g in gens:
        if g.n != p.n:
            raise ValueError("mismatched qubit counts")
    n = p.n
    return gf2_in_rowspan(p.x | (p.z << n), (g.x | (g.z << n) for g in gens))
