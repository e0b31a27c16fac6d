"""k-uniformity of stabilizer states, exact and approximate.

For a subset A of qubits, I_A is the GF(2) rank of the stabilizer
binary matrix restricted to A's X and Z columns; the deviation exponent
is r = 2k - min_A I_A and the trace-distance bound is delta = 2 - 2^(1-r).
The state is exactly k-uniform over the scanned family iff r = 0.

The scan works on the transpose: each qubit contributes two n-bit column
vectors (X column, Z column), so the rank of the restricted 2k-column
matrix equals the rank of 2k integer rows. Subsets are enumerated in
lexicographic order with shared elimination state for common prefixes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

from .tableau import StabilizerTableau


@dataclass(frozen=True)
class UniformityReport:
    """Result of scanning a subset family for the minimum I_A."""

    k: int
    alpha: int
    min_IA: int
    r: int
    delta: float
    witness: Tuple[int, ...]          # 1-based qubit indices
    subsets_scanned: int

    @property
    def is_uniform(self) -> bool:
        return self.r == 0

    @property
    def entropy(self) -> int:
        """Entanglement entropy S(rho_A) of the witness subset, in bits."""
        return self.min_IA - self.k


@dataclass(frozen=True)
class KappaResult:
    """Ratio of approximate (r > 0) to exact (r = 0) k-uniform subsets."""

    k: int
    uniform_count: int
    approximate_count: int
    no_uniform_subsets: bool

    @property
    def ratio(self) -> Optional[float]:
        if self.no_uniform_subsets:
            return None
        return self.approximate_count / self.uniform_count


def subsets_alpha(n: int, k: int, alpha: int = 1) -> Iterator[Tuple[int, ...]]:
    """All k-subsets of {1..n} with consecutive index gaps >= alpha,
    in lexicographic order."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    chosen: List[int] = []

    def rec(start: int) -> Iterator[Tuple[int, ...]]:
        if len(chosen) == k:
            yield tuple(chosen)
            return
        # need (k - len(chosen) - 1) more gaps of alpha after the next pick
        last = n - (k - len(chosen) - 1) * alpha
        for q in range(start, last + 1):
            chosen.append(q)
            yield from rec(q + alpha)
            chosen.pop()

    return rec(1)


def family_size(n: int, k: int, alpha: int = 1) -> int:
    """Number of alpha-separated k-subsets of {1..n} (stars and bars)."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    m = n - (k - 1) * (alpha - 1)
    return math.comb(m, k) if m >= k else 0


def _columns(t: StabilizerTableau) -> Tuple[List[int], List[int]]:
    """Per-qubit X and Z stabilizer columns packed as n-bit integers."""
    n = t.n
    colx = [0] * n
    colz = [0] * n
    for i in range(n):
        x, z = t.xs[n + i], t.zs[n + i]
        for q in range(n):
            colx[q] |= ((x >> q) & 1) << i
            colz[q] |= ((z >> q) & 1) << i
    return colx, colz


def independent_count(t: StabilizerTableau, subset: Tuple[int, ...]) -> int:
    """I_A: rank of the stabilizer matrix restricted to subset's columns.

    ``subset`` uses 1-based qubit indices to match subsets_alpha.
    """
    n = t.n
    if len(set(subset)) != len(subset):
        raise ValueError("duplicate qubit in subset")
    pivots: List[int] = []
    for q1 in subset:
        q = q1 - 1
        if not 0 <= q < n:
            raise ValueError(f"qubit {q1} out of range 1..{n}")
        for row in (_col_of(t, q, "x"), _col_of(t, q, "z")):
            for p in pivots:
                row = min(row, row ^ p)
            if row:
                pivots.append(row)
    return len(pivots)


def _col_of(t: StabilizerTableau, q: int, part: str) -> int:
    n = t.n
    rows = t.xs if part == "x" else t.zs
    out = 0
    for i in range(n):
        out |= ((rows[n + i] >> q) & 1) << i
    return out


def verify(t: StabilizerTableau, k: int, alpha: int = 1) -> UniformityReport:
    """Minimize I_A over the alpha-separated k-subset family.

    The witness is the first subset attaining the minimum in
    lexicographic order; branches whose partial rank already matches the
    running minimum are skipped, which cannot change either result.
    """
    n = t.n
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    colx, colz = _columns(t)
    total = family_size(n, k, alpha)

    best = 2 * k + 1
    witness: Tuple[int, ...] = ()
    chosen: List[int] = []  # 0-based
    pivots: List[int] = []

    def rec(start: int):
        nonlocal best, witness
        depth = len(chosen)
        if depth == k:
            rank = len(pivots)
            if rank < best:
                best = rank
                witness = tuple(q + 1 for q in chosen)
            return
        if len(pivots) >= best:
            return  # rank only grows along a branch
        last = n - (k - depth - 1) * alpha
        for q in range(start, last):
            added = 0
            for row in (colx[q], colz[q]):
                for p in pivots:
                    row = min(row, row ^ p)
                if row:
                    pivots.append(row)
                    added += 1
            chosen.append(q)
            rec(q + alpha)
            chosen.pop()
            for _ in range(added):
                pivots.pop()
            if best == k:
                return  # I_A >= k always; global minimum reached

    rec(0)
    min_ia = best
    r = 2 * k - min_ia
    delta = 2.0 - 2.0 ** (1 - r)
    return UniformityReport(k, alpha, min_ia, r, delta, witness, total)


def kappa_ratio(t: StabilizerTableau, k: int) -> KappaResult:
    """Count exact (rank 2k) vs deficient subsets over all C(n,k) subsets."""
    n = t.n
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    colx, colz = _columns(t)
    uniform = 0
    approx = 0
    pivots: List[int] = []

    def rec(start: int, depth: int):
        nonlocal uniform, approx
        if depth == k:
            if len(pivots) == 2 * k:
                uniform += 1
            else:
                approx += 1
            return
        for q in range(start, n - (k - depth - 1)):
            added = 0
            for row in (colx[q], colz[q]):
                for p in pivots:
                    row = min(row, row ^ p)
                if row:
                    pivots.append(row)
                    added += 1
            if added < 2:
                # rank deficit never recovers: whole subtree is approximate
                approx += math.comb(n - q - 1, k - depth - 1)
            else:
                rec(q + 1, depth + 1)
            for _ in range(added):
                pivots.pop()

    rec(0, 0)
    return KappaResult(k, uniform, approx, uniform == 0)
