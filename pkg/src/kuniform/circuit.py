"""Circuit intermediate representation and its text file format.

Format: header ``qubits <n>``; one gate per line; ``---`` separates layers;
``#`` starts a comment. Measurements are ``MZ <q> -> <label>`` /
``MX <q> -> <label>``; classically controlled Paulis are
``X <q> if <label>[^<label>...]`` (parity of the listed outcomes).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

ONE_QUBIT_GATES = ("H", "X", "Z", "S")
TWO_QUBIT_GATES = ("CNOT", "CZ")
MEASUREMENTS = ("MZ", "MX")
GATE_KINDS = ONE_QUBIT_GATES + TWO_QUBIT_GATES + MEASUREMENTS + ("IDLE",)


class CircuitError(ValueError):
    """Malformed circuit text or inconsistent circuit structure."""


@dataclass(frozen=True)
class Gate:
    """A gate, measurement, or classically controlled Pauli correction."""

    kind: str
    qubits: Tuple[int, ...]
    label: Optional[str] = None           # measurement outcome name
    condition: Tuple[str, ...] = ()       # parity of these outcome labels

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        want = 2 if self.kind in TWO_QUBIT_GATES else 1
        if len(self.qubits) != want:
            raise CircuitError(f"{self.kind} takes {want} qubit(s)")
        if self.kind in TWO_QUBIT_GATES and self.qubits[0] == self.qubits[1]:
            raise CircuitError(f"{self.kind} requires two distinct qubits")
        if self.kind in MEASUREMENTS and self.label is None:
            raise CircuitError(f"{self.kind} requires an outcome label")
        if self.condition and self.kind not in ("X", "Z"):
            raise CircuitError("only X/Z gates may be classically controlled")


@dataclass(frozen=True)
class Circuit:
    """Layered circuit; gates within a layer act on disjoint qubits."""

    n_qubits: int
    layers: Tuple[Tuple[Gate, ...], ...]

    def __post_init__(self):
        defined: set = set()
        for li, layer in enumerate(self.layers):
            used: set = set()
            for g in layer:
                for q in g.qubits:
                    if not 0 <= q < self.n_qubits:
                        raise CircuitError(
                            f"layer {li}: qubit {q} out of range (n={self.n_qubits})")
                    if q in used:
                        raise CircuitError(f"layer {li}: qubit {q} used twice")
                    used.add(q)
                for lab in g.condition:
                    if lab not in defined:
                        raise CircuitError(f"layer {li}: undefined label {lab!r}")
            for g in layer:
                if g.label is not None:
                    if g.label in defined:
                        raise CircuitError(f"layer {li}: duplicate label {g.label!r}")
                    defined.add(g.label)

    @property
    def depth(self) -> int:
        return len(self.layers)

    def gates(self):
        for layer in self.layers:
            yield from layer

    def measurement_labels(self) -> List[str]:
        return [g.label for g in self.gates() if g.label is not None]

    def idle_qubits(self, layer_index: int) -> Tuple[int, ...]:
        used = {q for g in self.layers[layer_index] for q in g.qubits}
        return tuple(q for q in range(self.n_qubits) if q not in used)


def circuit(n_qubits: int, layers: Sequence[Sequence[Gate]]) -> Circuit:
    return Circuit(n_qubits, tuple(tuple(layer) for layer in layers))


def _format_gate(g: Gate) -> str:
    if g.kind in MEASUREMENTS:
        return f"{g.kind} {g.qubits[0]} -> {g.label}"
    body = f"{g.kind} " + " ".join(str(q) for q in g.qubits)
    if g.condition:
        body += " if " + "^".join(g.condition)
    return body


def serialize(c: Circuit) -> str:
    lines = [f"qubits {c.n_qubits}"]
    for li, layer in enumerate(c.layers):
        if li:
            lines.append("---")
        lines.extend(_format_gate(g) for g in layer)
    return "\n".join(lines) + "\n"


def _parse_gate(line: str, lineno: int) -> Gate:
    cond: Tuple[str, ...] = ()
    label = None
    if " if " in line:
        line, _, cond_text = line.partition(" if ")
        cond = tuple(part.strip() for part in cond_text.split("^"))
        if not all(cond):
            raise CircuitError(f"line {lineno}: empty label in condition")
    if "->" in line:
        line, _, label_text = line.partition("->")
        label = label_text.strip()
        if not label:
            raise CircuitError(f"line {lineno}: empty measurement label")
    parts = line.split()
    if not parts:
        raise CircuitError(f"line {lineno}: empty gate")
    kind, *args = parts
    if kind not in GATE_KINDS or kind == "IDLE":
        raise CircuitError(f"line {lineno}: unknown gate {kind!r}")
    try:
        qubits = tuple(int(a) for a in args)
    except ValueError:
        raise CircuitError(f"line {lineno}: bad qubit index in {args!r}") from None
    try:
        return Gate(kind, qubits, label=label, condition=cond)
    except CircuitError as e:
        raise CircuitError(f"line {lineno}: {e}") from None


def parse(text: str) -> Circuit:
    n_qubits = None
    layers: List[List[Gate]] = [[]]
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n_qubits is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "qubits":
                raise CircuitError(f"line {lineno}: expected 'qubits <n>' header")
            try:
                n_qubits = int(parts[1])
            except ValueError:
                raise CircuitError(f"line {lineno}: bad qubit count") from None
            continue
        if line == "---":
            layers.append([])
            continue
        layers[-1].append(_parse_gate(line, lineno))
    if n_qubits is None:
        raise CircuitError("missing 'qubits <n>' header")
    if layers and not layers[-1]:
        layers.pop()
    try:
        return circuit(n_qubits, layers)
    except CircuitError as e:
        raise CircuitError(str(e)) from None
