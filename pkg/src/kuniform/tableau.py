"""CHP-style stabilizer tableau with destabilizers.

Rows are stored as integer bit vectors. Rows 0..n-1 are destabilizers,
rows n..2n-1 are stabilizers; ``signs[i]`` is 0 for +1 and 1 for -1.
"""
from __future__ import annotations

import random
from typing import Dict, List, Optional, Sequence, Tuple

from .circuit import Circuit, Gate
from .pauli import BinarySymplecticMatrix, PauliString, phase_exponent


class StabilizerTableau:
    """Pure stabilizer state on n qubits."""

    __slots__ = ("n", "xs", "zs", "signs")

    def __init__(self, n: int):
        self.n = n
        self.xs: List[int] = [0] * (2 * n)
        self.zs: List[int] = [0] * (2 * n)
        self.signs: List[int] = [0] * (2 * n)
        for q in range(n):
            self.xs[q] = 1 << q           # destabilizer X_q
            self.zs[n + q] = 1 << q       # stabilizer Z_q

    # -- construction ------------------------------------------------

    @classmethod
    def zero_state(cls, n: int) -> "StabilizerTableau":
        return cls(n)

    @classmethod
    def plus_state(cls, n: int) -> "StabilizerTableau":
        t = cls(n)
        for q in range(n):
            t.h(q)
        return t

    @classmethod
    def from_stabilizers(cls, gens: Sequence[PauliString]) -> "StabilizerTableau":
        """Build a tableau for the state stabilized by n independent
        commuting generators, finding destabilizers by symplectic
        Gram-Schmidt (destabilizer signs are set to +1)."""
        n = gens[0].n
        if len(gens) != n:
            raise ValueError("need exactly n generators for a pure state")
        for i, g in enumerate(gens):
            for h in gens[i + 1:]:
                if not g.commutes(h):
                    raise ValueError("generators must commute")
        # Vectors are (x | z << n) ints; symplectic product is a parity.
        def sp(a: int, b: int) -> int:
            mask = (1 << n) - 1
            ax, az = a & mask, a >> n
            bx, bz = b & mask, b >> n
            return ((ax & bz).bit_count() + (az & bx).bit_count()) & 1

        basis = [1 << q for q in range(n)] + [1 << (n + q) for q in range(n)]
        destabs: List[int] = []
        for g in gens:
            gv = g.x | (g.z << n)
            partner = None
            for i, e in enumerate(basis):
                if sp(gv, e) == 1:
                    partner = basis.pop(i)
                    break
            if partner is None:
                raise ValueError("generators are not independent")
            basis = [e ^ (sp(e, gv) * partner) ^ (sp(e, partner) * gv)
                     for e in basis]
            destabs.append(partner)
        t = cls.__new__(cls)
        t.n = n
        mask = (1 << n) - 1
        t.xs = [d & mask for d in destabs] + [g.x for g in gens]
        t.zs = [d >> n for d in destabs] + [g.z for g in gens]
        t.signs = [0] * n + [0 if g.sign == 1 else 1 for g in gens]
        return t

    def copy(self) -> "StabilizerTableau":
        t = StabilizerTableau.__new__(StabilizerTableau)
        t.n = self.n
        t.xs = list(self.xs)
        t.zs = list(self.zs)
        t.signs = list(self.signs)
        return t

    # -- views -------------------------------------------------------

    def _row(self, i: int) -> PauliString:
        return PauliString(self.n, self.xs[i], self.zs[i],
                           -1 if self.signs[i] else 1)

    @property
    def stab_rows(self) -> List[PauliString]:
        return [self._row(self.n + i) for i in range(self.n)]

    @property
    def destab_rows(self) -> List[PauliString]:
        return [self._row(i) for i in range(self.n)]

    def binary_matrix(self) -> BinarySymplecticMatrix:
        """Sign-free binary symplectic matrix of the stabilizer rows."""
        n = self.n
        rows = tuple(self.xs[n + i] | (self.zs[n + i] << n) for i in range(n))
        return BinarySymplecticMatrix(n, rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, StabilizerTableau) or self.n != other.n:
            return NotImplemented if not isinstance(other, StabilizerTableau) else False
        return self.stabilizer_group_equals(other)

    def stabilizer_group_equals(self, other: "StabilizerTableau") -> bool:
        """Same state: every stabilizer of other is one of ours (with sign)."""
        return all(self.expectation(p) == 1 for p in other.stab_rows)

    def expectation(self, p: PauliString) -> int:
        """<p> for a signed Pauli: +1, -1, or 0 if p is not in the group."""
        n = self.n
        # Solve for p in the stabilizer row space, tracking which rows combine.
        rows = [(self.xs[n + i] | (self.zs[n + i] << n)) for i in range(n)]
        target = p.x | (p.z << n)
        pivots: List[Tuple[int, int]] = []  # (reduced row bits, member mask)
        for i, r in enumerate(rows):
            m = 1 << i
            for rb, mb in pivots:
                if min(r, r ^ rb) != r:
                    r ^= rb
                    m ^= mb
            if r:
                pivots.append((r, m))
        member = 0
        for rb, mb in pivots:
            if min(target, target ^ rb) != target:
                target ^= rb
                member ^= mb
        if target != 0:
            return 0
        # Multiply out the chosen generators tracking the sign.
        prod_x = prod_z = 0
        k = s = 0
        for i in range(n):
            if (member >> i) & 1:
                k = (k + phase_exponent(prod_x, prod_z, self.xs[n + i], self.zs[n + i])) % 4
                prod_x ^= self.xs[n + i]
                prod_z ^= self.zs[n + i]
                s ^= self.signs[n + i]
        assert k % 2 == 0
        val = (1 if k == 0 else -1) * (-1 if s else 1)
        return val * p.sign

    # -- gates -------------------------------------------------------

    def h(self, q: int):
        b = 1 << q
        for i in range(2 * self.n):
            x, z = self.xs[i] & b, self.zs[i] & b
            if x and z:
                self.signs[i] ^= 1
            self.xs[i] ^= x ^ z
            self.zs[i] ^= x ^ z

    def s(self, q: int):
        b = 1 << q
        for i in range(2 * self.n):
            x, z = self.xs[i] & b, self.zs[i] & b
            if x and z:
                self.signs[i] ^= 1
            self.zs[i] ^= x

    def x(self, q: int):
        b = 1 << q
        for i in range(2 * self.n):
            if self.zs[i] & b:
                self.signs[i] ^= 1

    def z(self, q: int):
        b = 1 << q
        for i in range(2 * self.n):
            if self.xs[i] & b:
                self.signs[i] ^= 1

    def cnot(self, c: int, t: int):
        if c == t:
            raise ValueError("CNOT control and target must differ")
        bc, bt = 1 << c, 1 << t
        for i in range(2 * self.n):
            xc = (self.xs[i] >> c) & 1
            zt = (self.zs[i] >> t) & 1
            if xc and zt and ((self.xs[i] >> t) & 1) == ((self.zs[i] >> c) & 1):
                self.signs[i] ^= 1
            if xc:
                self.xs[i] ^= bt
            if zt:
                self.zs[i] ^= bc
        return None

    def cz(self, a: int, b: int):
        if a == b:
            raise ValueError("CZ qubits must differ")
        self.h(b)
        self.cnot(a, b)
        self.h(b)

    # -- measurement -------------------------------------------------

    def _rowsum(self, h: int, i: int):
        """Row h <- row h * row i, with sign bookkeeping."""
        k = phase_exponent(self.xs[i], self.zs[i], self.xs[h], self.zs[h])
        k = (k + 2 * self.signs[h] + 2 * self.signs[i]) % 4
        assert k % 2 == 0
        self.signs[h] = 0 if k == 0 else 1
        self.xs[h] ^= self.xs[i]
        self.zs[h] ^= self.zs[i]

    def measure_z(self, q: int, rng=None, force: Optional[int] = None) -> int:
        """Measure Z on qubit q; returns the outcome bit (0 -> +1)."""
        if not 0 <= q < self.n:
            raise ValueError(f"qubit {q} out of range")
        n = self.n
        b = 1 << q
        p = None
        for i in range(n):
            if self.xs[n + i] & b:
                p = n + i
                break
        if p is not None:
            if force is not None:
                outcome = force
            else:
                if rng is None:
                    rng = random
                outcome = 1 if rng.random() < 0.5 else 0
            # (skip row p - n: it is overwritten below, and its product
            # with row p would carry an imaginary phase)
            for i in range(2 * n):
                if i != p and i != p - n and (self.xs[i] & b):
                    self._rowsum(i, p)
            # old stabilizer becomes the destabilizer partner
            d = p - n
            self.xs[d], self.zs[d], self.signs[d] = self.xs[p], self.zs[p], self.signs[p]
            self.xs[p], self.zs[p] = 0, b
            self.signs[p] = outcome
            return outcome
        # Deterministic: accumulate stabilizer rows whose destabilizer
        # partner anticommutes with Z_q into a scratch row.
        sx = sz = 0
        sphase = 0
        ssign = 0
        for i in range(n):
            if self.xs[i] & b:
                k = phase_exponent(sx, sz, self.xs[n + i], self.zs[n + i])
                sphase = (sphase + k) % 4
                sx ^= self.xs[n + i]
                sz ^= self.zs[n + i]
                ssign ^= self.signs[n + i]
        assert sphase % 2 == 0
        outcome = ssign ^ (0 if sphase == 0 else 1)
        if force is not None and force != outcome:
            raise ValueError("cannot force a deterministic measurement")
        return outcome

    def is_deterministic_z(self, q: int) -> bool:
        b = 1 << q
        return not any(self.xs[self.n + i] & b for i in range(self.n))

    def measure_x(self, q: int, rng=None, force: Optional[int] = None) -> int:
        self.h(q)
        out = self.measure_z(q, rng=rng, force=force)
        self.h(q)
        return out


def apply_gate(tableau: StabilizerTableau, gate: Gate) -> StabilizerTableau:
    """Conjugate every tableau row by a unitary gate (in place)."""
    kind = gate.kind
    q = gate.qubits
    for qq in q:
        if not 0 <= qq < tableau.n:
            raise ValueError(f"qubit {qq} out of range")
    if kind == "H":
        tableau.h(q[0])
    elif kind == "X":
        tableau.x(q[0])
    elif kind == "Z":
        tableau.z(q[0])
    elif kind == "S":
        tableau.s(q[0])
    elif kind == "CNOT":
        tableau.cnot(q[0], q[1])
    elif kind == "CZ":
        tableau.cz(q[0], q[1])
    elif kind == "IDLE":
        pass
    else:
        raise ValueError(f"apply_gate cannot apply {kind!r}")
    return tableau


def simulate(
    c: Circuit,
    tableau: Optional[StabilizerTableau] = None,
    rng=None,
    forced_outcomes: Optional[Dict[str, int]] = None,
) -> Tuple[StabilizerTableau, Dict[str, int]]:
    """Run a circuit, returning the final tableau and measurement record.

    ``forced_outcomes`` pins labelled random outcomes (used to enumerate
    measurement branches); deterministic outcomes cannot be forced.
    """
    t = tableau if tableau is not None else StabilizerTableau(c.n_qubits)
    if t.n != c.n_qubits:
        raise ValueError("tableau size does not match circuit")
    outcomes: Dict[str, int] = {}
    for layer in c.layers:
        for g in layer:
            if g.kind in ("MZ", "MX"):
                force = None
                if forced_outcomes is not None and g.label in forced_outcomes:
                    force = forced_outcomes[g.label]
                meas = t.measure_x if g.kind == "MX" else t.measure_z
                outcomes[g.label] = meas(g.qubits[0], rng=rng, force=force)
            elif g.condition:
                parity = 0
                for lab in g.condition:
                    parity ^= outcomes[lab]
                if parity:
                    apply_gate(t, Gate(g.kind, g.qubits))
            else:
                apply_gate(t, g)
    return t, outcomes


def random_outcome_labels(c: Circuit) -> List[str]:
    """Labels of measurements whose outcome is random at zero noise."""
    t = StabilizerTableau(c.n_qubits)
    labels: List[str] = []
    outcomes: Dict[str, int] = {}
    for layer in c.layers:
        for g in layer:
            if g.kind in ("MZ", "MX"):
                q = g.qubits[0]
                if g.kind == "MX":
                    t.h(q)
                if not t.is_deterministic_z(q):
                    labels.append(g.label)
                    outcomes[g.label] = t.measure_z(q, force=0)
                else:
                    outcomes[g.label] = t.measure_z(q)
                if g.kind == "MX":
                    t.h(q)
            elif g.condition:
                parity = 0
                for lab in g.condition:
                    parity ^= outcomes[lab]
                if parity:
                    apply_gate(t, Gate(g.kind, g.qubits))
            else:
                apply_gate(t, g)
    return labels


def reduced_stabilizers(t: StabilizerTableau, qubits: Sequence[int]) -> List[PauliString]:
    """Independent generators of the stabilizer subgroup supported on qubits.

    When every qubit outside ``qubits`` has been measured out (its Z or X is
    a stabilizer up to sign), this is the stabilizer group of the reduced
    state on ``qubits``.
    """
    n = t.n
    keep = set(qubits)
    drop_mask = 0
    for q in range(n):
        if q not in keep:
            drop_mask |= (1 << q) | (1 << (n + q))
    # Eliminate the dropped-qubit columns; rows reduced to zero there form
    # the subgroup. Track signs via explicit products.
    entries = [(t.xs[n + i] | (t.zs[n + i] << n), 1 << i) for i in range(n)]
    pivots: List[Tuple[int, int, int]] = []  # (row, member, pivot bit)
    members_trivial: List[Tuple[int, int]] = []
    for row, mem in entries:
        for prow, pmem, pbit in pivots:
            if row & pbit:
                row ^= prow
                mem ^= pmem
        masked = row & drop_mask
        if masked:
            pbit = masked & -masked
            pivots.append((row, mem, pbit))
        else:
            members_trivial.append((row, mem))
    out: List[PauliString] = []
    order = sorted(keep)
    pos = {q: i for i, q in enumerate(order)}
    for row, mem in members_trivial:
        px = pz = 0
        k = 0
        s = 0
        for i in range(n):
            if (mem >> i) & 1:
                k = (k + phase_exponent(px, pz, t.xs[n + i], t.zs[n + i])) % 4
                px ^= t.xs[n + i]
                pz ^= t.zs[n + i]
                s ^= t.signs[n + i]
        assert k % 2 == 0
        sign = (1 if k == 0 else -1) * (-1 if s else 1)
        rx = rz = 0
        for q in order:
            rx |= ((px >> q) & 1) << pos[q]
            rz |= ((pz >> q) & 1) << pos[q]
        out.append(PauliString(len(order), rx, rz, sign))
    return out
