"""Monte-Carlo Pauli-frame simulation under four-parameter depolarizing
noise, with post-selection ("detection") or lookup decoding ("correction").

The engine compiles a circuit once into boundary *effect* tables: for every
layer boundary and qubit, the effect of an X or Z error inserted there is a
triple (output X flips, output Z flips, recorded-outcome flips), obtained by
conjugating the error forward through the remaining circuit.  Classically
controlled Paulis are folded in as a closure over outcome labels (flipping a
recorded outcome toggles every gate conditioned on it, which may flip later
outcomes in turn).  A single fault-free reference simulation then yields both
the reference measurement record and, via the branch structure of the random
outcomes, the complete set of parity checks that are deterministic at zero
noise; detection mode accepts a shot iff its record satisfies all of them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .circuit import MEASUREMENTS, TWO_QUBIT_GATES, Circuit, Gate
from .codes import build_code, decode
from .generators import BlockMeasurement, HybridAssembly
from .pauli import PauliString
from .tableau import StabilizerTableau, apply_gate, reduced_stabilizers

# an effect: (X flips on output qubits, Z flips on output qubits,
#             flips of recorded outcomes), all as bit masks
Effect = Tuple[int, int, int]
_ZERO: Effect = (0, 0, 0)


class NoiseError(ValueError):
    """Invalid noise model or circuit unsupported by the noise engine."""


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing noise rates: idle qubits per layer (p0), single-qubit
    gates (p1), two-qubit gates (p2), and measurement record flips (p3).
    Gate errors are applied after the gate, uniformly over the non-identity
    Paulis on the gate's qubits."""

    p0: float = 0.0
    p1: float = 0.0
    p2: float = 0.0
    p3: float = 0.0

    def __post_init__(self):
        for name in ("p0", "p1", "p2", "p3"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise NoiseError(f"{name}={v} outside [0, 1]")

    def is_zero(self) -> bool:
        return self.p0 == self.p1 == self.p2 == self.p3 == 0.0


@dataclass(frozen=True)
class ShotResult:
    """One noisy run: post-selection flag, correctness of the residual
    error (None when the shot was rejected), and the noisy record."""

    accepted: bool
    correct: Optional[bool]
    outcome_bits: Dict[str, int]


@dataclass(frozen=True)
class FidelityEstimate:
    """Aggregated shots; fidelity = shots_correct / shots_accepted with a
    95% Wilson interval, undefined (None) when nothing was accepted."""

    shots_total: int
    shots_accepted: int
    shots_correct: int
    fidelity: Optional[float]
    acceptance_rate: float
    ci_low: Optional[float]
    ci_high: Optional[float]
    seed: int


@dataclass(frozen=True)
class FaultLocation:
    """A fault site: kind "idle"/"gate1"/"gate2" carry a Pauli on `qubits`
    inserted after layer `layer`; kind "measure" flips outcome `label`."""

    kind: str
    layer: int
    qubits: Tuple[int, ...]
    label: Optional[str] = None


_WILSON_Z = 1.959963984540054  # 97.5% normal quantile


def _wilson(successes: int, trials: int) -> Tuple[float, float]:
    z = _WILSON_Z
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials
                         + z * z / (4 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def sample_faults(gate: Gate, nm: NoiseModel, rng,
                  n_qubits: Optional[int] = None) -> List[PauliString]:
    """Sample the depolarizing fault for one gate (or one idle qubit,
    passed as an IDLE gate).  Measurement record flips are not Paulis and
    are handled by the simulator, so measurements return no faults here."""
    if gate.kind in MEASUREMENTS or gate.condition:
        # record flips are handled by the simulator; classically controlled
        # Paulis are frame updates rather than physical gates
        return []
    n = n_qubits if n_qubits is not None else max(gate.qubits) + 1
    if gate.kind in TWO_QUBIT_GATES:
        if rng.random() >= nm.p2:
            return []
        c = min(int(rng.random() * 15), 14) + 1
        qa, qb = gate.qubits
        x = ((c & 1) << qa) | (((c >> 2) & 1) << qb)
        z = (((c >> 1) & 1) << qa) | (((c >> 3) & 1) << qb)
        return [PauliString(n, x, z)]
    p = nm.p0 if gate.kind == "IDLE" else nm.p1
    if rng.random() >= p:
        return []
    c = min(int(rng.random() * 3), 2) + 1
    q = gate.qubits[0]
    return [PauliString(n, (c & 1) << q, ((c >> 1) & 1) << q)]


def _xor(a: Effect, b: Effect) -> Effect:
    return (a[0] ^ b[0], a[1] ^ b[1], a[2] ^ b[2])


class NoiseSimulator:
    """A circuit compiled for fast noisy shots against a target state.

    `target` is a tableau on the output qubits (every qubit that is never
    measured, in ascending order, unless `output_qubits` narrows it); by
    default it is taken from the reference branch of the circuit itself.
    `measured_blocks` enables correction mode via per-block lookup decoding.
    """

    def __init__(self, circ: Circuit, target: Optional[StabilizerTableau] = None,
                 output_qubits: Optional[Sequence[int]] = None,
                 measured_blocks: Sequence[BlockMeasurement] = ()):
        self.circuit = circ
        measured = {g.qubits[0] for g in circ.gates() if g.kind in MEASUREMENTS}
        if output_qubits is None:
            output_qubits = [q for q in range(circ.n_qubits) if q not in measured]
        self.output_qubits: Tuple[int, ...] = tuple(sorted(output_qubits))
        self._out_index = {q: i for i, q in enumerate(self.output_qubits)}
        self._check_no_reuse(measured)
        self._label_index: Dict[str, int] = {}
        for g in circ.gates():
            if g.label is not None:
                self._label_index[g.label] = len(self._label_index)
        self._labels = list(self._label_index)
        self._compile_effects()
        self._compile_fold()
        self._collect_locations()
        self._reference_run()
        if target is None:
            target = StabilizerTableau.from_stabilizers(
                self._ref_output_stabs) if self.output_qubits else \
                StabilizerTableau(0)
        if target.n != len(self.output_qubits):
            raise NoiseError("target size does not match the output qubits")
        elif self.output_qubits:
            ref = StabilizerTableau.from_stabilizers(self._ref_output_stabs)
            if any(ref.expectation(p) != 1 for p in target.stab_rows):
                raise NoiseError("target does not match the prepared state")
        self.target = target
        n_out = len(self.output_qubits)
        self._target_rows = [(target.xs[n_out + i], target.zs[n_out + i])
                             for i in range(n_out)]
        self._discover_checks()
        self._compile_decoders(measured_blocks)

    # -- compilation ---------------------------------------------------

    def _check_no_reuse(self, measured: set):
        # after measurement a qubit holds a definite state the frame does
        # not track, so it must stay untouched (true for all generators)
        dead: set = set()
        for layer in self.circuit.layers:
            for g in layer:
                for q in g.qubits:
                    if q in dead:
                        raise NoiseError(f"qubit {q} is used after measurement")
            for g in layer:
                if g.kind in MEASUREMENTS:
                    dead.add(g.qubits[0])
        for q in self.output_qubits:
            if q in measured:
                raise NoiseError(f"output qubit {q} is measured")

    def _compile_effects(self):
        """Backward pass: raw effect of an X/Z error on each qubit at each
        layer boundary (boundary b = just before layer b)."""
        c = self.circuit
        n = c.n_qubits
        ex = [_ZERO] * n
        ez = [_ZERO] * n
        for q, i in self._out_index.items():
            ex[q] = (1 << i, 0, 0)
            ez[q] = (0, 1 << i, 0)
        self._eff_x: List[List[Effect]] = [None] * (c.depth + 1)  # type: ignore
        self._eff_z: List[List[Effect]] = [None] * (c.depth + 1)  # type: ignore
        self._eff_x[c.depth] = ex
        self._eff_z[c.depth] = ez
        self._cond_raw: Dict[int, Effect] = {}
        for li in range(c.depth - 1, -1, -1):
            ox, oz = self._eff_x[li + 1], self._eff_z[li + 1]
            ex, ez = list(ox), list(oz)
            for g in c.layers[li]:
                k, qs = g.kind, g.qubits
                if g.condition:
                    # toggling the condition parity toggles this Pauli
                    eff = ox[qs[0]] if k == "X" else oz[qs[0]]
                    for lab in g.condition:
                        li_bit = self._label_index[lab]
                        self._cond_raw[li_bit] = _xor(
                            self._cond_raw.get(li_bit, _ZERO), eff)
                    continue
                if k == "H":
                    ex[qs[0]], ez[qs[0]] = oz[qs[0]], ox[qs[0]]
                elif k == "S":
                    ex[qs[0]] = _xor(ox[qs[0]], oz[qs[0]])
                elif k == "CNOT":
                    cq, tq = qs
                    ex[cq] = _xor(ox[cq], ox[tq])
                    ez[tq] = _xor(oz[tq], oz[cq])
                elif k == "CZ":
                    a, b = qs
                    ex[a] = _xor(ox[a], oz[b])
                    ex[b] = _xor(ox[b], oz[a])
                elif k == "MZ":
                    ex[qs[0]] = (0, 0, 1 << self._label_index[g.label])
                    ez[qs[0]] = _ZERO
                elif k == "MX":
                    ez[qs[0]] = (0, 0, 1 << self._label_index[g.label])
                    ex[qs[0]] = _ZERO
                # X, Z, IDLE: a Pauli/identity commutes through the frame
            self._eff_x[li] = ex
            self._eff_z[li] = ez

    def _compile_fold(self):
        """Close conditional-gate toggles over the outcome-label DAG, then
        pre-fold every boundary effect and every single-label flip."""
        nlab = len(self._labels)
        closed: List[Effect] = [_ZERO] * nlab
        for li_bit in range(nlab - 1, -1, -1):
            raw = self._cond_raw.get(li_bit, _ZERO)
            ox, oz, lm = raw
            rem = raw[2]
            while rem:
                b = (rem & -rem).bit_length() - 1
                rem &= rem - 1
                cx, cz, cl = closed[b]
                ox ^= cx
                oz ^= cz
                lm ^= cl
            closed[li_bit] = (ox, oz, lm)
        self._closed = closed
        # flipping the record of label b: the bit itself plus its closure
        self._flip_eff: List[Effect] = [
            (closed[b][0], closed[b][1], (1 << b) ^ closed[b][2])
            for b in range(nlab)]
        depth = self.circuit.depth
        self._fold_x = [[self._fold(e) for e in self._eff_x[bnd]]
                        for bnd in range(depth + 1)]
        self._fold_z = [[self._fold(e) for e in self._eff_z[bnd]]
                        for bnd in range(depth + 1)]

    def _fold(self, eff: Effect) -> Effect:
        ox, oz, lm = eff
        acc = lm
        while lm:
            b = (lm & -lm).bit_length() - 1
            lm &= lm - 1
            cx, cz, cl = self._closed[b]
            ox ^= cx
            oz ^= cz
            acc ^= cl
        return (ox, oz, acc)

    def _collect_locations(self):
        """Enumerate fault sites and pre-fold their effects."""
        c = self.circuit
        self.idle_locations: List[FaultLocation] = []
        self.gate1_locations: List[FaultLocation] = []
        self.gate2_locations: List[FaultLocation] = []
        self.measure_locations: List[FaultLocation] = []
        idle_eff: List[Tuple[Effect, Effect]] = []
        gate1_eff: List[Tuple[Effect, Effect]] = []
        gate2_eff: List[Tuple[Effect, Effect, Effect, Effect]] = []
        meas_eff: List[Effect] = []
        for li in range(c.depth):
            bnd = li + 1
            fx, fz = self._fold_x[bnd], self._fold_z[bnd]
            for q in c.idle_qubits(li):
                self.idle_locations.append(FaultLocation("idle", li, (q,)))
                idle_eff.append((fx[q], fz[q]))
            for g in c.layers[li]:
                if g.kind == "IDLE":
                    q = g.qubits[0]
                    self.idle_locations.append(FaultLocation("idle", li, (q,)))
                    idle_eff.append((fx[q], fz[q]))
                elif g.kind in MEASUREMENTS:
                    self.measure_locations.append(
                        FaultLocation("measure", li, g.qubits, g.label))
                    meas_eff.append(self._flip_eff[self._label_index[g.label]])
                elif g.kind in TWO_QUBIT_GATES:
                    qa, qb = g.qubits
                    self.gate2_locations.append(
                        FaultLocation("gate2", li, g.qubits))
                    gate2_eff.append((fx[qa], fz[qa], fx[qb], fz[qb]))
                elif g.condition:
                    # feed-forward Pauli corrections are classical frame
                    # updates, not physical gates: no noise location
                    pass
                else:
                    q = g.qubits[0]
                    self.gate1_locations.append(
                        FaultLocation("gate1", li, g.qubits))
                    gate1_eff.append((fx[q], fz[q]))
        self._idle_eff = idle_eff
        self._gate1_eff = gate1_eff
        self._gate2_eff = gate2_eff
        self._meas_eff = meas_eff

    def _reference_run(self):
        """One fault-free simulation, forcing every random outcome to 0.

        Besides the reference record this captures, per random outcome, the
        branch-difference Pauli (the stabilizer row the measurement
        replaces), whose folded effect tells how flipping that branch moves
        the record; the deterministic parities of valid records follow.
        """
        c = self.circuit
        t = StabilizerTableau(c.n_qubits)
        outcomes: Dict[str, int] = {}
        branch_effects: List[Effect] = []
        for li, layer in enumerate(c.layers):
            for j, g in enumerate(layer):
                if g.kind in MEASUREMENTS:
                    q = g.qubits[0]
                    if g.kind == "MX":
                        t.h(q)
                    if t.is_deterministic_z(q):
                        outcomes[g.label] = t.measure_z(q)
                    else:
                        # capture the replaced stabilizer row: the branch
                        # with this outcome flipped differs by this Pauli
                        p = next(i for i in range(t.n)
                                 if t.xs[t.n + i] & (1 << q))
                        px, pz = t.xs[t.n + p], t.zs[t.n + p]
                        outcomes[g.label] = t.measure_z(q, force=0)
                        if g.kind == "MX":
                            t.h(q)
                        eff = self._push_pauli(li, j, px, pz, q if g.kind == "MX" else None)
                        eff = _xor(eff, self._flip_eff[self._label_index[g.label]])
                        branch_effects.append(eff)
                        continue
                    if g.kind == "MX":
                        t.h(q)
                elif g.condition:
                    if sum(outcomes[lab] for lab in g.condition) % 2:
                        apply_gate(t, Gate(g.kind, g.qubits))
                else:
                    apply_gate(t, g)
        self.reference_outcomes = outcomes
        self._ref_output_stabs = (
            reduced_stabilizers(t, self.output_qubits)
            if self.output_qubits else [])
        self._branch_effects = branch_effects

    def _push_pauli(self, li: int, j: int, px: int, pz: int,
                    h_qubit: Optional[int]) -> Effect:
        """Folded effect of the Pauli (px, pz) inserted right after gate j
        of layer li (with an extra H conjugation on h_qubit for MX)."""
        if h_qubit is not None:
            b = 1 << h_qubit
            xb, zb = px & b, pz & b
            px ^= xb ^ zb
            pz ^= xb ^ zb
        lm = 0
        for g in self.circuit.layers[li][j + 1:]:
            k, qs = g.kind, g.qubits
            if k == "H":
                b = 1 << qs[0]
                xb, zb = px & b, pz & b
                px ^= xb ^ zb
                pz ^= xb ^ zb
            elif k == "S":
                pz ^= px & (1 << qs[0])
            elif k == "CNOT":
                cq, tq = qs
                if px & (1 << cq):
                    px ^= 1 << tq
                if pz & (1 << tq):
                    pz ^= 1 << cq
            elif k == "CZ":
                a, b = qs
                if px & (1 << a):
                    pz ^= 1 << b
                if px & (1 << b):
                    pz ^= 1 << a
            elif k in MEASUREMENTS:
                q = qs[0]
                flip = px if k == "MZ" else pz
                if flip & (1 << q):
                    lm |= 1 << self._label_index[g.label]
                px &= ~(1 << q)
                pz &= ~(1 << q)
            # X, Z, IDLE: no action on a Pauli frame
        bnd = li + 1
        eff = _ZERO
        rem = px
        while rem:
            q = (rem & -rem).bit_length() - 1
            rem &= rem - 1
            eff = _xor(eff, self._fold_x[bnd][q])
        rem = pz
        while rem:
            q = (rem & -rem).bit_length() - 1
            rem &= rem - 1
            eff = _xor(eff, self._fold_z[bnd][q])
        rem = lm
        while rem:
            b = (rem & -rem).bit_length() - 1
            rem &= rem - 1
            eff = _xor(eff, self._flip_eff[b])
        return eff

    def _discover_checks(self):
        """Deterministic record parities = null space of the branch-flip
        record differences; also validates that every branch reaches the
        target state (their output differences stabilize the target)."""
        rows: List[int] = []
        for ox, oz, lm in self._branch_effects:
            if not self._commutes_with_target(ox, oz):
                raise NoiseError(
                    "target does not match the circuit's measurement branches")
            rows.append(lm)
        # row-reduce with unique lowest-bit pivots, then back-substitute
        pivots: Dict[int, int] = {}
        for row in rows:
            while row:
                b = (row & -row).bit_length() - 1
                if b in pivots:
                    row ^= pivots[b]
                else:
                    pivots[b] = row
                    break
        for b in sorted(pivots, reverse=True):
            for b2 in pivots:
                if b2 != b and (pivots[b2] >> b) & 1:
                    pivots[b2] ^= pivots[b]
        checks: List[int] = []
        for f in range(len(self._labels)):
            if f in pivots:
                continue
            vec = 1 << f
            for b, row in pivots.items():
                if (row >> f) & 1:
                    vec |= 1 << b
            checks.append(vec)
        self.checks = checks

    def _compile_decoders(self, measured_blocks: Sequence[BlockMeasurement]):
        self._decoders = []
        for bm in measured_blocks:
            code = build_code(bm.code_id)
            lbits = [self._label_index[lab] for lab in bm.labels]
            syn: List[Tuple[int, int]] = []  # (stabilizer index, label mask)
            for i, s in enumerate(code.stabilizers):
                if bm.basis == "X" and s.z == 0:
                    supp = s.x
                elif bm.basis == "Z" and s.x == 0:
                    supp = s.z
                else:
                    continue
                mask = 0
                for q in range(code.n):
                    if (supp >> q) & 1:
                        mask |= 1 << lbits[q]
                syn.append((i, mask))
            self._decoders.append((code, bm.basis, syn, lbits))

    # -- shot evaluation -----------------------------------------------

    def _commutes_with_target(self, ox: int, oz: int) -> bool:
        for rx, rz in self._target_rows:
            if (((ox & rz).bit_count() + (oz & rx).bit_count()) & 1):
                return False
        return True

    def _evaluate(self, eff: Effect, mode: str) -> Tuple[bool, bool]:
        """(accepted, residual-correct) for a shot's total folded effect."""
        ox, oz, lm = eff
        accepted = True
        if mode == "correction":
            for code, basis, syn, lbits in self._decoders:
                syndrome = 0
                for i, mask in syn:
                    if (lm & mask).bit_count() & 1:
                        syndrome |= 1 << i
                err = decode(code, syndrome)
                if err is None:
                    accepted = False
                    continue
                flips = err.z if basis == "X" else err.x
                for q in range(code.n):
                    if (flips >> q) & 1:
                        fx, fz, fl = self._flip_eff[lbits[q]]
                        ox ^= fx
                        oz ^= fz
                        lm ^= fl
        for c in self.checks:
            if (lm & c).bit_count() & 1:
                accepted = False
                break
        return accepted, self._commutes_with_target(ox, oz)

    def shot_with_faults(self, faults: Sequence[Tuple[FaultLocation, int]],
                         mode: str = "detection") -> ShotResult:
        """Run one shot with explicitly injected faults.  Each fault is a
        (location, pauli) pair; pauli bits are (x_a, z_a, x_b, z_b) for the
        location's qubits and are ignored for "measure" locations."""
        eff = _ZERO
        for loc, code in faults:
            eff = _xor(eff, self._fault_effect(loc, code))
        return self._finish(eff, mode)

    def _fault_effect(self, loc: FaultLocation, code: int) -> Effect:
        bnd = loc.layer + 1
        if loc.kind == "measure":
            return self._flip_eff[self._label_index[loc.label]]
        eff = _ZERO
        for i, q in enumerate(loc.qubits):
            if (code >> (2 * i)) & 1:
                eff = _xor(eff, self._fold_x[bnd][q])
            if (code >> (2 * i + 1)) & 1:
                eff = _xor(eff, self._fold_z[bnd][q])
        return eff

    def _finish(self, eff: Effect, mode: str) -> ShotResult:
        accepted, correct = self._evaluate(eff, mode)
        lm = eff[2]
        bits = {lab: self.reference_outcomes[lab] ^ ((lm >> b) & 1)
                for lab, b in self._label_index.items()}
        return ShotResult(accepted, correct if accepted else None, bits)

    def run_shot(self, nm: NoiseModel, rng, mode: str = "detection") -> ShotResult:
        """Sample faults location by location and evaluate one shot."""
        eff = _ZERO

        def hit(p: float) -> bool:
            return p > 0.0 and rng.random() < p

        for (fx, fz) in self._idle_eff:
            if hit(nm.p0):
                c = min(int(rng.random() * 3), 2) + 1
                if c & 1:
                    eff = _xor(eff, fx)
                if c & 2:
                    eff = _xor(eff, fz)
        for (fx, fz) in self._gate1_eff:
            if hit(nm.p1):
                c = min(int(rng.random() * 3), 2) + 1
                if c & 1:
                    eff = _xor(eff, fx)
                if c & 2:
                    eff = _xor(eff, fz)
        for (fxa, fza, fxb, fzb) in self._gate2_eff:
            if hit(nm.p2):
                c = min(int(rng.random() * 15), 14) + 1
                for bit, f in ((1, fxa), (2, fza), (4, fxb), (8, fzb)):
                    if c & bit:
                        eff = _xor(eff, f)
        for f in self._meas_eff:
            if hit(nm.p3):
                eff = _xor(eff, f)
        return self._finish(eff, mode)

    def estimate(self, nm: NoiseModel, shots: int, seed: int = 0,
                 mode: str = "detection") -> FidelityEstimate:
        """Monte-Carlo estimate over `shots` runs.  Per-location fault
        counts are drawn per shot from a counter-based stream keyed by the
        seed, and each faulty shot uses its own (seed, index)-keyed stream,
        so results are deterministic and order-independent."""
        if shots < 1:
            raise NoiseError("shots must be >= 1")
        key = seed & ((1 << 64) - 1)
        master = np.random.Generator(np.random.Philox(key=[key, 0]))
        classes = [
            (self._idle_eff, nm.p0, 3),
            (self._gate1_eff, nm.p1, 3),
            (self._gate2_eff, nm.p2, 15),
            (self._meas_eff, nm.p3, 0),
        ]
        counts = []
        total = np.zeros(shots, dtype=np.int64)
        for locs, p, _ in classes:
            if locs and p > 0.0:
                c = master.binomial(len(locs), p, size=shots)
            else:
                c = np.zeros(shots, dtype=np.int64)
            counts.append(c)
            total += c
        faulty = np.nonzero(total)[0]
        accepted = shots - len(faulty)
        correct = accepted
        for idx in faulty:
            g = np.random.Generator(np.random.Philox(key=[key, int(idx) + 1]))
            eff = _ZERO
            for (locs, _, npauli), cvec in zip(classes, counts):
                k = int(cvec[idx])
                if not k:
                    continue
                picks = g.choice(len(locs), size=k, replace=False)
                for li in picks:
                    entry = locs[int(li)]
                    if npauli == 0:
                        eff = _xor(eff, entry)
                    elif npauli == 3:
                        c = int(g.integers(1, 4))
                        if c & 1:
                            eff = _xor(eff, entry[0])
                        if c & 2:
                            eff = _xor(eff, entry[1])
                    else:
                        c = int(g.integers(1, 16))
                        for bit, f in ((1, entry[0]), (2, entry[1]),
                                       (4, entry[2]), (8, entry[3])):
                            if c & bit:
                                eff = _xor(eff, f)
            acc, corr = self._evaluate(eff, mode)
            if acc:
                accepted += 1
                if corr:
                    correct += 1
        if accepted:
            fid = correct / accepted
            lo, hi = _wilson(correct, accepted)
        else:
            fid = lo = hi = None
        return FidelityEstimate(shots, accepted, correct, fid,
                                accepted / shots, lo, hi, seed)


# -- module-level API -------------------------------------------------

def reference_target(circ: Circuit,
                     output_qubits: Optional[Sequence[int]] = None) -> StabilizerTableau:
    """The state the circuit prepares on its output qubits at zero noise,
    taken from the all-zeros branch of the random outcomes."""
    sim = NoiseSimulator(circ, output_qubits=output_qubits)
    return sim.target


def simulator_for(asm: HybridAssembly,
                  target: Optional[StabilizerTableau] = None) -> NoiseSimulator:
    """Compile a hybrid assembly, wiring in its block decoding metadata."""
    return NoiseSimulator(asm.circuit, target=target,
                          output_qubits=asm.output_qubits,
                          measured_blocks=asm.measured_blocks)


def run_shot(circ: Circuit, nm: NoiseModel, target: StabilizerTableau,
             mode: str = "detection", rng=None,
             output_qubits: Optional[Sequence[int]] = None,
             measured_blocks: Sequence[BlockMeasurement] = ()) -> ShotResult:
    if rng is None:
        rng = np.random.default_rng()
    sim = NoiseSimulator(circ, target, output_qubits, measured_blocks)
    return sim.run_shot(nm, rng, mode)


def estimate(circ: Circuit, nm: NoiseModel, target: StabilizerTableau,
             mode: str = "detection", shots: int = 1000, seed: int = 0,
             output_qubits: Optional[Sequence[int]] = None,
             measured_blocks: Sequence[BlockMeasurement] = ()) -> FidelityEstimate:
    sim = NoiseSimulator(circ, target, output_qubits, measured_blocks)
    return sim.estimate(nm, shots, seed, mode)


# -- scheme comparison -------------------------------------------------

_DEFAULT_HYBRID_CODE = {"color": "color422", "surface": "surface:3",
                        "ghz": "color422"}


def build_scheme(scheme: str, family: str, k: Optional[int], N: int,
                 code_id: Optional[str] = None,
                 ghz_variant: Optional[str] = None) -> NoiseSimulator:
    """Compile one preparation scheme: `physical` runs the bare logical
    circuit on bare qubits; `hybrid` encodes it, then teleport-unencodes."""
    from .generators import (
        assemble_hybrid, gen_color_kuniform, gen_ghz, gen_surface_kuniform,
    )
    if family == "color":
        prep = gen_color_kuniform(k, N)
    elif family == "surface":
        prep = gen_surface_kuniform(k, N)
    elif family == "ghz":
        if ghz_variant is None:
            ghz_variant = "log_depth" if scheme == "physical" else "const_depth"
        prep = gen_ghz(N, ghz_variant)
    else:
        raise NoiseError(f"unknown circuit family {family!r}")
    if scheme == "physical":
        return NoiseSimulator(prep)
    if scheme == "hybrid":
        code = build_code(code_id or _DEFAULT_HYBRID_CODE[family])
        return simulator_for(assemble_hybrid(code, prep))
    raise NoiseError(f"unknown scheme {scheme!r}")


RESULT_COLUMNS = ("scheme", "family", "k", "N", "p0", "p1", "p2", "p3",
                  "shots", "accepted", "correct", "fidelity",
                  "ci_lo", "ci_hi")


def _noise_points(sweep: Mapping) -> List[NoiseModel]:
    if "p" in sweep:
        ps = sweep["p"]
        if isinstance(ps, (int, float)):
            ps = [ps]
        f0 = float(sweep.get("p0_factor", 0.01))
        f1 = float(sweep.get("p1_factor", 0.1))
        f2 = float(sweep.get("p2_factor", 1.0))
        f3 = float(sweep.get("p3_factor", 1.0))
        return [NoiseModel(p * f0, p * f1, p * f2, p * f3) for p in ps]
    return [NoiseModel(float(sweep.get("p0", 0.0)), float(sweep.get("p1", 0.0)),
                       float(sweep.get("p2", 0.0)), float(sweep.get("p3", 0.0)))]


def compare_schemes(sweep: Mapping) -> List[Dict[str, object]]:
    """Run a scheme x parameter grid and return CSV-ready rows.

    Sweep keys: schemes (list), family, k (int or list, omitted for ghz),
    N (int or list), code (hybrid code id), shots, seed, mode, and either
    explicit rates p0..p3 or a p grid with p0_factor..p3_factor scalings.
    """
    schemes = sweep.get("schemes", ["physical", "hybrid"])
    if isinstance(schemes, str):
        schemes = [schemes]
    family = sweep["family"]
    ks = sweep.get("k")
    if ks is None:
        ks = [None]
    elif isinstance(ks, int):
        ks = [ks]
    ns = sweep["N"]
    if isinstance(ns, int):
        ns = [ns]
    shots = int(sweep.get("shots", 1000))
    seed = int(sweep.get("seed", 0))
    mode = sweep.get("mode", "detection")
    noises = _noise_points(sweep)
    rows: List[Dict[str, object]] = []
    for scheme in schemes:
        for k in ks:
            for N in ns:
                sim = build_scheme(scheme, family, k, N,
                                   code_id=sweep.get("code"),
                                   ghz_variant=sweep.get("ghz_variant"))
                for nm in noises:
                    est = sim.estimate(nm, shots, seed, mode)
                    rows.append({
                        "scheme": scheme, "family": family,
                        "k": "" if k is None else k, "N": N,
                        "p0": nm.p0, "p1": nm.p1, "p2": nm.p2, "p3": nm.p3,
                        "shots": est.shots_total,
                        "accepted": est.shots_accepted,
                        "correct": est.shots_correct,
                        "fidelity": "" if est.fidelity is None else est.fidelity,
                        "ci_lo": "" if est.ci_low is None else est.ci_low,
                        "ci_hi": "" if est.ci_high is None else est.ci_high,
                    })
    return rows
