"""Circuit generators: brickwork k-uniform preparation families for the
surface and color codes, Delta=1 approximate families, GHZ circuits,
logical-physical Bell bridges, and the hybrid teleport-unencode assembly.

Wire conventions follow the printed circuits: "upward" CNOTs point their
arrow at the lower wire index (control below for the color family,
control above for the surface family's two-wire bricks).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .circuit import Circuit, Gate, circuit
from .codes import CodeSpec, CodeError, build_code, css_prep_circuit, prep_circuit
from .tableau import StabilizerTableau


class GeneratorError(ValueError):
    """Unsupported parameters for a circuit generator."""


# -- surface-code family (initial state |0>^N) -----------------------

def _up(a: int) -> Gate:
    return Gate("CNOT", (a, a + 1))


def _down(a: int) -> Gate:
    return Gate("CNOT", (a + 1, a))


def _surface_layer(N: int, parity: int, down: bool,
                   flip_ends: bool = False, drop_ends: bool = False) -> List[Gate]:
    """Brick layer on pairs (a, a+1) for a = parity, parity+2, ...

    flip_ends reverses the first and last pair; drop_ends removes them.
    """
    starts = list(range(parity, N - 1, 2))
    if drop_ends and starts:
        ends = {starts[0], starts[-1]}
        starts = [a for a in starts if a not in ends]
        ends_flipped: Set[int] = set()
    elif flip_ends and starts:
        ends_flipped = {starts[0], starts[-1]}
    else:
        ends_flipped = set()
    gates = []
    for a in starts:
        flipped = down ^ (a in ends_flipped)
        gates.append(_down(a) if flipped else _up(a))
    return gates


SURFACE_THRESHOLDS = {1: 2, 2: 6, 3: 12, 4: 18}

# (parity, down, flip_ends, drop_ends) per CNOT layer, per k
_SURFACE_LAYERS = {
    1: [(0, False, False, False), (1, False, False, False)],
    2: [(0, False, False, True), (1, True, False, False),
        (0, True, True, False), (1, False, False, False)],
    3: [(0, False, False, True), (1, True, False, False),
        (0, True, False, False), (1, True, False, False),
        (0, False, False, False), (1, False, False, False),
        (0, False, False, False), (1, False, False, False)],
    4: [(0, False, False, False), (1, True, False, False),
        (0, True, False, False), (1, True, False, False),
        (0, False, False, False), (1, False, False, False),
        (0, True, False, False), (1, True, False, False),
        (0, False, False, False), (1, False, True, False),
        (0, False, False, False), (1, False, True, False)],
}


def gen_surface_kuniform(k: int, N: int) -> Circuit:
    """Logical-level k-uniform preparation circuit for the surface-code
    architecture: one H layer on even wires followed by brickwork CNOT
    layers with a translationally invariant bulk."""
    if k not in SURFACE_THRESHOLDS:
        raise GeneratorError(f"surface family supports k=1..4, got {k}")
    if N < SURFACE_THRESHOLDS[k]:
        raise GeneratorError(
            f"surface k={k} needs N >= {SURFACE_THRESHOLDS[k]}, got {N}")
    # for k >= 2 the end-pair modifications require an even chain: an
    # exhaustive orientation search at N=7, k=2 finds no circuit of this
    # depth and bulk that is 2-uniform, so odd N is out of the family
    if k > 1 and N % 2:
        raise GeneratorError(f"surface k={k} needs even N, got {N}")
    # the last wire of an odd-width chain only ever receives CNOT
    # targets, so it must start in |0> rather than |+>
    layers: List[List[Gate]] = [
        [Gate("H", (q,)) for q in range(0, N, 2) if N % 2 == 0 or q < N - 1]]
    for parity, down, flip_ends, drop_ends in _SURFACE_LAYERS[k]:
        layer = _surface_layer(N, parity, down, flip_ends, drop_ends)
        if layer:
            layers.append(layer)
    return circuit(N, layers)


# -- color-code family (initial state |+>^N, blocks of two wires) ----

COLOR_THRESHOLDS = {1: 2, 2: 6, 3: 10, 4: 20}


def _color_unit(N: int, down_below: int, brick_b_down: bool = False,
                cz_skip: Sequence[int] = ()) -> List[List[Gate]]:
    """One color-family time step: an in-block CZ layer plus four CNOT
    sub-layers coupling wires two apart. A CNOT on pair (a, a+2) points
    downward (control a) when a < down_below, or everywhere in the second
    brick when brick_b_down is set; otherwise upward (control a+2)."""
    skip = set(cz_skip)
    layers: List[List[Gate]] = [
        [Gate("CZ", (2 * b, 2 * b + 1)) for b in range(N // 2) if b not in skip]
    ]
    for residue in range(4):
        layer = []
        for a in range(residue, N - 2, 4):
            down = a < down_below or (brick_b_down and residue >= 2)
            layer.append(Gate("CNOT", (a, a + 2)) if down
                         else Gate("CNOT", (a + 2, a)))
        if layer:
            layers.append(layer)
    return layers


def _color_circuit(N: int, units: int, down_below: int,
                   brick_b_down: bool = False,
                   cz_skip: Sequence[int] = ()) -> Circuit:
    layers: List[List[Gate]] = [[Gate("H", (q,)) for q in range(N)]]
    for _ in range(units):
        layers.extend(_color_unit(N, down_below, brick_b_down, cz_skip))
    return circuit(N, layers)


def gen_color_kuniform(k: int, N: int) -> Circuit:
    """Logical-level k-uniform preparation circuit for the [4,2,2]
    architecture, acting on |+>^N (the leading H layer creates it)."""
    if k not in COLOR_THRESHOLDS:
        raise GeneratorError(f"color family supports k=1..4, got {k}")
    if N % 2:
        raise GeneratorError(f"color family needs even N, got {N}")
    if N < COLOR_THRESHOLDS[k]:
        raise GeneratorError(
            f"color k={k} needs N >= {COLOR_THRESHOLDS[k]}, got {N}")
    if k == 1:
        return _color_circuit(N, 1, 0)
    if k == 2:
        return _color_circuit(N, 1, 0, brick_b_down=True)
    if k == 3:
        return _color_circuit(N, 2, 4)
    blocks = N // 2
    last_skip = blocks - 1 if blocks % 2 == 0 else blocks - 2
    return _color_circuit(N, 3, 10, cz_skip=(2, last_skip))


APPROX_THRESHOLDS = {5: 20, 6: 24, 7: 32}


def gen_approx_kuniform(k: int, N: int) -> Circuit:
    """Delta=1 approximate k-uniform circuits: repeated single time
    steps of the color-family units (k=5,7 use the k=3 step, k=6 the
    k=1 step)."""
    if k not in APPROX_THRESHOLDS:
        raise GeneratorError(f"approximate family supports k=5..7, got {k}")
    if N % 2:
        raise GeneratorError(f"approximate family needs even N, got {N}")
    if N < APPROX_THRESHOLDS[k]:
        raise GeneratorError(
            f"approximate k={k} needs N >= {APPROX_THRESHOLDS[k]}, got {N}")
    if k == 5:
        return _color_circuit(N, 3, 4)
    if k == 6:
        return _color_circuit(N, 5, 0)
    return _color_circuit(N, 5, 4)


# -- GHZ circuits -----------------------------------------------------

def gen_ghz(N: int, variant: str) -> Circuit:
    """GHZ_N preparation: "const_depth" uses measured fusion ancillas
    and feed-forward X corrections; "log_depth" is the measurement-free
    doubling circuit."""
    if N < 2:
        raise GeneratorError("GHZ needs N >= 2")
    if variant == "log_depth":
        layers: List[List[Gate]] = [[Gate("H", (0,))]]
        m = 1
        while m < N:
            layers.append([Gate("CNOT", (i, i + m))
                           for i in range(min(m, N - m))])
            m *= 2
        return circuit(N, layers)
    if variant != "const_depth":
        raise GeneratorError(f"unknown GHZ variant {variant!r}")
    # segments of two data wires fused through pairs of measured
    # ancillas: segment j at wires 4j, 4j+1; junction j at 4j+2, 4j+3
    segments = (N + 1) // 2
    last_size = 2 - (N % 2)
    total = 4 * (segments - 1) + last_size
    seg_wires = [
        (4 * j, 4 * j + 1) if (j < segments - 1 or last_size == 2) else (4 * j,)
        for j in range(segments)
    ]
    layers = [[Gate("H", (w[0],)) for w in seg_wires]]
    layers.append([Gate("CNOT", w) for w in seg_wires if len(w) == 2])
    if segments > 1:
        layers.append([Gate("CNOT", (4 * j, 4 * j + 2))
                       for j in range(segments - 1)])
        layers.append([Gate("CNOT", (4 * j + 1, 4 * j + 3))
                       for j in range(segments - 1)])
        layers.append([Gate("CNOT", (seg_wires[j + 1][0], 4 * j + 2))
                       for j in range(segments - 1)])
        layers.append([Gate("CNOT", (seg_wires[j + 1][-1], 4 * j + 3))
                       for j in range(segments - 1)])
        layers.append([Gate("MZ", (a,), label=f"m{a}")
                       for j in range(segments - 1)
                       for a in (4 * j + 2, 4 * j + 3)])
        # align every segment with the last one: flip segment j iff the
        # parity of the junction outcomes from j onward is odd
        fixes = []
        for j in range(segments - 1):
            cond = tuple(f"m{4 * i + 2}" for i in range(j, segments - 1))
            fixes.extend(Gate("X", (w,), condition=cond) for w in seg_wires[j])
        layers.append(fixes)
    return circuit(total, layers)


def ghz_data_wires(N: int, variant: str) -> Tuple[int, ...]:
    """The wires carrying the GHZ state at the end of gen_ghz."""
    if variant == "log_depth":
        return tuple(range(N))
    segments = (N + 1) // 2
    last_size = 2 - (N % 2)
    out: List[int] = []
    for j in range(segments):
        out.append(4 * j)
        if j < segments - 1 or last_size == 2:
            out.append(4 * j + 1)
    return tuple(out)


# -- logical-physical Bell bridges ------------------------------------

def _c(a: int, b: int) -> Gate:
    return Gate("CNOT", (a, b))


def gen_bell_bridge(c: CodeSpec) -> Circuit:
    """Circuit preparing the mixed logical-physical Bell state for the
    code, with the code block on the low wires and the physical
    qubit(s) after it. The [4,2,2] version carries two flag ancillas
    measuring the extra tracked stabilizers."""
    if c.name == "steane713":
        return circuit(8, [
            [Gate("H", (q,)) for q in (0, 1, 2, 3)],
            [_c(0, 7)], [_c(1, 5)], [_c(2, 6)], [_c(0, 6)], [_c(1, 4)],
            [_c(1, 0), _c(3, 6)],
            [_c(2, 1), _c(3, 4), _c(6, 5)],
        ])
    if c.name == "surface:3":
        return circuit(10, [
            [Gate("H", (q,)) for q in (0, 2, 4, 6, 8)],
            [_c(0, 1), _c(2, 3), _c(4, 5), _c(6, 7), _c(8, 9)],
            [_c(8, 7)], [_c(2, 8)], [_c(4, 7)], [_c(8, 1)], [_c(4, 8)],
        ])
    if c.name == "color422":
        return circuit(8, [
            [Gate("H", (q,)) for q in (0, 1, 3)],
            [_c(0, 4)], [_c(1, 5)], [_c(3, 2)], [_c(3, 1)],
            [_c(0, 2)], [_c(1, 0)],
            # flag ancillas: 6 measures Z1 Z2 Z4 Z5, 7 measures X1 X2 X4 X5
            [Gate("H", (6,)), Gate("H", (7,))],
            [Gate("CZ", (6, 1)), _c(7, 2)],
            [Gate("CZ", (6, 2)), _c(7, 1)],
            [Gate("CZ", (6, 4)), _c(7, 5)],
            [Gate("CZ", (6, 5)), _c(7, 4)],
            [Gate("H", (6,)), Gate("H", (7,))],
            [Gate("MZ", (6,), label="f0"), Gate("MZ", (7,), label="f1")],
        ])
    return _generic_bell_bridge(c)


def _generic_bell_bridge(c: CodeSpec) -> Circuit:
    """Fallback bridge: prepare the zero-basis encoded block and |+> on
    each physical partner, then apply the controlled logical X (a CNOT
    fan-out from the physical qubit into the logical X support)."""
    if not c.css:
        raise CodeError(f"{c.name}: no Bell-bridge construction")
    prep = prep_circuit(c, "zero")
    total = c.n + c.kappa
    layers = [list(layer) for layer in prep.layers]
    layers[0].extend(Gate("H", (c.n + i,)) for i in range(c.kappa))
    for i, lx in enumerate(c.logical_x):
        phys = c.n + i
        for q in sorted(lx.support()):
            layers.append([_c(phys, q)])
    return circuit(total, layers)


def min_depth_lightcone(k: int, architecture: str = "brickwork",
                        spread: int = 2) -> int:
    """Smallest number of brickwork time steps for which the backward
    light cone of a k-wire window reaches 2k wires. One time step grows
    the cone by `spread` wires (one neighbor on each side)."""
    if k < 1:
        raise GeneratorError("k must be >= 1")
    del architecture  # all supported architectures spread 2 wires/step
    return -(-k // spread)


# -- hybrid teleport-unencode assembly --------------------------------

@dataclass(frozen=True)
class BlockMeasurement:
    """A transversally measured code block, for syndrome decoding: the
    per-qubit outcome labels in block order and, per logical qubit read
    out, the support mask whose outcome parity carries its value."""

    code_id: str
    basis: str                       # "X" or "Z"
    labels: Tuple[str, ...]
    logical_supports: Tuple[int, ...]


@dataclass(frozen=True)
class HybridAssembly:
    """A fully physical hybrid circuit plus the bookkeeping the noise
    simulator needs: which physical qubits carry the output and how the
    measured blocks decode."""

    code_id: str
    n_logical: int
    circuit: Circuit
    output_qubits: Tuple[int, ...]
    measured_blocks: Tuple[BlockMeasurement, ...]
    prep_end_layer: int              # first layer after block preparation


_BASIS_TABLEAUS: Dict[Tuple[str, int], str] = {}


def _classify_block_init(c: CodeSpec, gates: Sequence[Gate]) -> List[int]:
    """Run the absorbed per-block prefix gates on kappa bare qubits and
    return the X-type rows (beyond the code's own) of a CSS preparation
    reaching that logical state. Raises if the state is not CSS-type."""
    from .tableau import apply_gate as _apply
    t = StabilizerTableau.zero_state(c.kappa)
    for g in gates:
        _apply(t, g)
    # enumerate the 2^kappa logical stabilizer group; keep pure-X and
    # pure-Z elements and check they generate everything
    elems = []
    for mask in range(1, 1 << c.kappa):
        x = z = 0
        for i in range(c.kappa):
            if (mask >> i) & 1:
                x ^= t.xs[c.kappa + i]
                z ^= t.zs[c.kappa + i]
        elems.append((x, z))
    x_rows = [x for x, z in elems if z == 0]
    z_rows = [z for x, z in elems if x == 0]
    got = 0
    pivots: List[int] = []
    for row in [x for x in x_rows] + [z << c.kappa for z in z_rows]:
        for p in pivots:
            row = min(row, row ^ p)
        if row:
            pivots.append(row)
            got += 1
    if got != c.kappa:
        raise GeneratorError(
            "block initialization is not a CSS-type logical state")
    rows = []
    for x in x_rows:
        phys = 0
        for i in range(c.kappa):
            if (x >> i) & 1:
                phys ^= c.logical_x[i].x
        rows.append(phys)
    return rows


def _zip_layers(parts: Sequence[Sequence[Sequence[Gate]]]) -> List[List[Gate]]:
    """Run independent sub-circuits (already on global qubits) in
    parallel, padding the shorter ones."""
    depth = max((len(p) for p in parts), default=0)
    out: List[List[Gate]] = []
    for i in range(depth):
        layer: List[Gate] = []
        for p in parts:
            if i < len(p):
                layer.extend(p[i])
        out.append(layer)
    return out


def _shift_gate(g: Gate, offset: int, label_prefix: str) -> Gate:
    return Gate(g.kind, tuple(q + offset for q in g.qubits),
                label=None if g.label is None else label_prefix + g.label,
                condition=tuple(label_prefix + lab for lab in g.condition))


def assemble_hybrid(c: CodeSpec, logical_prep: Circuit) -> HybridAssembly:
    """Compile a logical-level circuit into the full physical hybrid
    scheme: encoded block preparation (absorbing the leading
    initialization layers), transversal logical gates and measurements,
    then a teleportation unencoding of every surviving logical wire
    onto a fresh physical qubit with feed-forward corrections."""
    N = logical_prep.n_qubits
    kappa = c.kappa
    if N % kappa:
        raise GeneratorError(f"N={N} is not a multiple of kappa={kappa}")
    blocks = N // kappa
    layers = [list(layer) for layer in logical_prep.layers]

    # 1. absorb the leading initialization prefix into per-block prep
    init_gates: List[List[Gate]] = [[] for _ in range(blocks)]
    consumed = 0
    for layer in layers:
        ok = True
        for g in layer:
            if g.kind == "H" or (g.kind == "CNOT" and kappa > 1 and
                                 g.qubits[0] // kappa == g.qubits[1] // kappa):
                continue
            ok = False
        if not ok or not layer:
            break
        for g in layer:
            block = g.qubits[0] // kappa
            init_gates[block].append(
                Gate(g.kind, tuple(q % kappa for q in g.qubits)))
        consumed += 1
    body = layers[consumed:]

    # physical layout: data blocks, then one bridge unit per block,
    # then nothing else (bridge units carry their own physical qubits)
    data_base = [b * c.n for b in range(blocks)]
    bridge_circ = gen_bell_bridge(c)
    bridge_size = bridge_circ.n_qubits
    bridge_base = [blocks * c.n + b * bridge_size for b in range(blocks)]
    total = blocks * c.n + blocks * bridge_size
    phys_of_wire = {w: bridge_base[w // kappa] + c.n + (w % kappa)
                    for w in range(N)}

    prep_parts: List[List[List[Gate]]] = []
    for b in range(blocks):
        extra_rows = _classify_block_init(c, init_gates[b])
        x_rows = [s.x for s in c.x_stabilizers()] + extra_rows
        block_prep = css_prep_circuit(c.n, x_rows)
        prep_parts.append([
            [_shift_gate(g, data_base[b], "") for g in layer]
            for layer in block_prep.layers
        ])
    for b in range(blocks):
        prefix = f"b{b}_"
        prep_parts.append([
            [_shift_gate(g, bridge_base[b], prefix) for g in layer]
            for layer in bridge_circ.layers
        ])
    out_layers = _zip_layers(prep_parts)
    prep_end_layer = len(out_layers)
    measured_blocks: List[BlockMeasurement] = []

    # 2. translate the remaining logical layers
    measured_wires: Set[int] = set()
    logical_label: Dict[str, Tuple[str, ...]] = {}

    def expand_condition(cond: Sequence[str]) -> Tuple[str, ...]:
        out: List[str] = []
        for lab in cond:
            out.extend(logical_label[lab])
        return tuple(out)

    pending_half: Dict[Tuple[int, int], Gate] = {}

    def flush_pending():
        if pending_half:
            g = next(iter(pending_half.values()))
            raise GeneratorError(f"unpaired logical CNOT {g.qubits} for kappa=2")

    for layer in body:
        phys_layer: List[Gate] = []
        mz_blocks: Dict[int, List[Gate]] = {}
        new_pending: Dict[Tuple[int, int], Gate] = {}
        for g in layer:
            for w in g.qubits:
                if w in measured_wires:
                    raise GeneratorError(f"wire {w} used after measurement")
            if g.kind in ("X", "Z"):
                i = g.qubits[0] % kappa
                b = g.qubits[0] // kappa
                name = g.kind if kappa == 1 else f"{g.kind}{i}"
                cond = expand_condition(g.condition) if g.condition else ()
                for p in c.transversal_table[name]:
                    phys_layer.append(Gate(p.kind,
                                           (data_base[b] + p.qubits[0],),
                                           condition=cond))
            elif g.kind == "CZ":
                a, bq = g.qubits
                if kappa == 1 or a // kappa != bq // kappa or "CZ" not in c.transversal_table:
                    raise GeneratorError("CZ is only transversal in-block")
                b = a // kappa
                for p in c.transversal_table["CZ"]:
                    phys_layer.append(Gate(p.kind, tuple(
                        data_base[b] + q for q in p.qubits)))
            elif g.kind == "CNOT":
                src, dst = g.qubits
                bs, bd = src // kappa, dst // kappa
                if bs == bd:
                    raise GeneratorError("in-block logical CNOT is not transversal")
                if kappa == 1:
                    for p in c.transversal_table["CNOT"]:
                        qs = [data_base[bs] + p.qubits[0] % c.n,
                              data_base[bd] + p.qubits[1] % c.n]
                        phys_layer.append(Gate("CNOT", tuple(qs)))
                    continue
                if src % kappa != dst % kappa:
                    raise GeneratorError(
                        "kappa=2 logical CNOT must preserve the in-block position")
                key = (bs, bd)
                partner = pending_half.pop(key, None)
                if partner is None:
                    partner = new_pending.pop(key, None)
                if partner is None:
                    new_pending[key] = g
                    continue
                if partner.qubits[0] % kappa == src % kappa:
                    raise GeneratorError(
                        f"duplicate logical CNOT between blocks {bs}->{bd}")
                for p in c.transversal_table["CNOT"]:
                    qs = (data_base[bs] + p.qubits[0] % c.n,
                          data_base[bd] + p.qubits[1] % c.n)
                    phys_layer.append(Gate("CNOT", qs))
            elif g.kind in ("MZ", "MX"):
                b = g.qubits[0] // kappa
                mz_blocks.setdefault(b, []).append(g)
            else:
                raise GeneratorError(f"gate {g.kind!r} is not transversal")
        flush_pending()
        pending_half = new_pending
        for b, gates in mz_blocks.items():
            kinds = {g.kind for g in gates}
            if len(gates) != kappa or len(kinds) != 1:
                raise GeneratorError(
                    f"block {b}: all {kappa} logical wires must be measured "
                    "together in one basis")
            kind = kinds.pop()
            basis = "Z" if kind == "MZ" else "X"
            labels = tuple(f"d{b}q{q}" for q in range(c.n))
            for q in range(c.n):
                phys_layer.append(Gate(kind, (data_base[b] + q,),
                                       label=labels[q]))
            supports = []
            for g in gates:
                i = g.qubits[0] % kappa
                logical = c.logical_z[i] if basis == "Z" else c.logical_x[i]
                mask = logical.z if basis == "Z" else logical.x
                if g.label is not None:
                    logical_label[g.label] = tuple(
                        labels[q] for q in range(c.n) if (mask >> q) & 1)
                supports.append(mask)
                measured_wires.add(g.qubits[0])
            measured_blocks.append(BlockMeasurement(
                c.name, basis, labels, tuple(supports)))
        # logical X0 and X1 of one block may expand onto a shared
        # physical qubit; split such collisions into sequential layers
        # (the expanded gates are Paulis, so order is immaterial)
        while phys_layer:
            used: Set[int] = set()
            now: List[Gate] = []
            later: List[Gate] = []
            for g in phys_layer:
                if any(q in used for q in g.qubits):
                    later.append(g)
                else:
                    used.update(g.qubits)
                    now.append(g)
            out_layers.append(now)
            phys_layer = later
    flush_pending()

    # 3. teleport the surviving wires: transversal CNOT data -> bridge,
    # X-basis readout of data blocks, Z-basis readout of bridge blocks,
    # then feed-forward Pauli fixes on the physical outputs
    live_blocks = [b for b in range(blocks)
                   if all(b * kappa + i not in measured_wires
                          for i in range(kappa))]
    for b in range(blocks):
        partial = [b * kappa + i in measured_wires for i in range(kappa)]
        if any(partial) and not all(partial):
            raise GeneratorError(f"block {b} is only partially measured")
    cnot_layer = [Gate("CNOT", (data_base[b] + q, bridge_base[b] + q))
                  for b in live_blocks for q in range(c.n)]
    out_layers.append(cnot_layer)
    meas_layer: List[Gate] = []
    fix_x: List[Gate] = []
    fix_z: List[Gate] = []
    for b in live_blocks:
        mx_labels = tuple(f"tx{b}q{q}" for q in range(c.n))
        mz_labels = tuple(f"tz{b}q{q}" for q in range(c.n))
        meas_layer.extend(Gate("MX", (data_base[b] + q,), label=mx_labels[q])
                          for q in range(c.n))
        meas_layer.extend(Gate("MZ", (bridge_base[b] + q,), label=mz_labels[q])
                          for q in range(c.n))
        x_supports = []
        z_supports = []
        for i in range(kappa):
            w = b * kappa + i
            phys = phys_of_wire[w]
            m1 = tuple(mx_labels[q] for q in sorted(c.logical_x[i].support()))
            m2 = tuple(mz_labels[q] for q in sorted(c.logical_z[i].support()))
            fix_x.append(Gate("X", (phys,), condition=m2))
            fix_z.append(Gate("Z", (phys,), condition=m1))
            x_supports.append(c.logical_x[i].x)
            z_supports.append(c.logical_z[i].z)
        measured_blocks.append(BlockMeasurement(
            c.name, "X", mx_labels, tuple(x_supports)))
        measured_blocks.append(BlockMeasurement(
            c.name, "Z", mz_labels, tuple(z_supports)))
    out_layers.append(meas_layer)
    out_layers.append(fix_x)
    out_layers.append(fix_z)

    outputs = tuple(phys_of_wire[w] for w in range(N)
                    if w not in measured_wires)
    return HybridAssembly(c.name, N, circuit(total, out_layers), outputs,
                          tuple(measured_blocks), prep_end_layer)
