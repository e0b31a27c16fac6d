"""Pauli-frame propagation through Clifford circuits.

A frame is a Pauli error tracked in the Heisenberg picture: pushing it
through a gate U replaces P by U P U^dag. Used for conjugation checks
and as the core of the Monte-Carlo noise simulator.
"""
from __future__ import annotations

from typing import Tuple

from .circuit import Circuit, Gate
from .pauli import PauliString


class PauliFrame:
    """Mutable signed Pauli on n qubits, bit-packed like PauliString."""

    __slots__ = ("n", "x", "z", "sign")

    def __init__(self, n: int, x: int = 0, z: int = 0, sign: int = 1):
        self.n = n
        self.x = x
        self.z = z
        self.sign = sign

    @classmethod
    def from_pauli(cls, p: PauliString) -> "PauliFrame":
        return cls(p.n, p.x, p.z, p.sign)

    def to_pauli(self) -> PauliString:
        return PauliString(self.n, self.x, self.z, self.sign)

    def mul(self, p: PauliString):
        """Multiply the frame by p on the left (phase must stay real)."""
        q = p * self.to_pauli()
        self.x, self.z, self.sign = q.x, q.z, q.sign

    def apply_gate(self, g: Gate):
        """Conjugate the frame by a unitary gate: P -> U P U^dag."""
        kind = g.kind
        if kind == "H":
            b = 1 << g.qubits[0]
            x, z = self.x & b, self.z & b
            if x and z:
                self.sign = -self.sign
            self.x ^= x ^ z
            self.z ^= x ^ z
        elif kind == "S":
            b = 1 << g.qubits[0]
            x, z = self.x & b, self.z & b
            if x and z:
                self.sign = -self.sign
            self.z ^= x
        elif kind == "X":
            if self.z & (1 << g.qubits[0]):
                self.sign = -self.sign
        elif kind == "Z":
            if self.x & (1 << g.qubits[0]):
                self.sign = -self.sign
        elif kind == "CNOT":
            c, t = g.qubits
            xc = (self.x >> c) & 1
            zt = (self.z >> t) & 1
            if xc and zt and ((self.x >> t) & 1) == ((self.z >> c) & 1):
                self.sign = -self.sign
            if xc:
                self.x ^= 1 << t
            if zt:
                self.z ^= 1 << c
        elif kind == "CZ":
            a, b = g.qubits
            # CZ = H_b CNOT(a,b) H_b, reusing those sign rules
            self.apply_gate(Gate("H", (b,)))
            self.apply_gate(Gate("CNOT", (a, b)))
            self.apply_gate(Gate("H", (b,)))
        elif kind == "IDLE":
            pass
        else:
            raise ValueError(f"cannot propagate a frame through {kind!r}")

    def commutes_with_z(self, q: int) -> bool:
        return not (self.x >> q) & 1

    def commutes_with_x(self, q: int) -> bool:
        return not (self.z >> q) & 1


def conjugate_pauli(c: Circuit, p: PauliString) -> PauliString:
    """Push p (at the circuit input) through every unitary layer."""
    f = PauliFrame.from_pauli(p)
    for g in c.gates():
        if g.kind in ("MZ", "MX"):
            raise ValueError("conjugate_pauli requires a unitary circuit")
        if g.condition:
            raise ValueError("conjugate_pauli requires an unconditional circuit")
        f.apply_gate(g)
    return f.to_pauli()
