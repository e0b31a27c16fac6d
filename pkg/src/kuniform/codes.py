"""Error-correcting code definitions: five-qubit [5,1,3], Steane [7,1,3],
rotated surface [L^2,1,L], and the [4,2,2] color code.

Generator conventions for steane713, surface(3), and color422 are fixed
to match the shipped Bell-bridge circuits (the bridge output must be a
logical-physical Bell pair under these logicals). Other surface sizes
use the standard rotated layout.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .circuit import Circuit, Gate, circuit
from .pauli import PauliString, gf2_rank_rows, pauli_in_group


class CodeError(ValueError):
    """Unknown code id or unsupported code operation."""


@dataclass(frozen=True)
class CodeSpec:
    """An [n, kappa, d] stabilizer code with fixed generator conventions."""

    name: str
    n: int
    kappa: int
    d: int
    stabilizers: Tuple[PauliString, ...]
    logical_x: Tuple[PauliString, ...]
    logical_z: Tuple[PauliString, ...]
    # logical gate name -> block-local physical gates. Single-block gates
    # use qubits 0..n-1; the inter-block CNOT uses 0..n-1 (control block)
    # and n..2n-1 (target block).
    transversal_table: Dict[str, Tuple[Gate, ...]] = field(hash=False)
    css: bool = True
    correctable: bool = True   # False -> detection-only decoding

    def __post_init__(self):
        ns = len(self.stabilizers)
        if ns != self.n - self.kappa:
            raise CodeError(f"{self.name}: need n-kappa stabilizers, got {ns}")
        for i, s in enumerate(self.stabilizers):
            for t in self.stabilizers[i + 1:]:
                if not s.commutes(t):
                    raise CodeError(f"{self.name}: stabilizers must commute")
        if gf2_rank_rows(p.x | (p.z << self.n) for p in self.stabilizers) != ns:
            raise CodeError(f"{self.name}: stabilizers must be independent")
        for i, lx in enumerate(self.logical_x):
            for j, lz in enumerate(self.logical_z):
                want = i != j
                if lx.commutes(lz) != want:
                    raise CodeError(f"{self.name}: bad logical pairing {i},{j}")
            for s in self.stabilizers:
                if not lx.commutes(s) or not self.logical_z[i].commutes(s):
                    raise CodeError(f"{self.name}: logicals must commute with stabilizers")

    def x_stabilizers(self) -> List[PauliString]:
        return [s for s in self.stabilizers if s.z == 0]

    def z_stabilizers(self) -> List[PauliString]:
        return [s for s in self.stabilizers if s.x == 0]

    def syndrome(self, error: PauliString) -> int:
        """Bit i set iff error anticommutes with stabilizers[i]."""
        out = 0
        for i, s in enumerate(self.stabilizers):
            if not s.commutes(error):
                out |= 1 << i
        return out


def _p(label: str) -> PauliString:
    return PauliString.from_label(label)


def _single_block_paulis(kind: str, support: Sequence[int]) -> Tuple[Gate, ...]:
    return tuple(Gate(kind, (q,)) for q in support)


def _pairwise_cnot(n: int) -> Tuple[Gate, ...]:
    return tuple(Gate("CNOT", (q, n + q)) for q in range(n))


def _kappa1_table(n: int, lx: PauliString, lz: PauliString,
                  css: bool = True) -> Dict[str, Tuple[Gate, ...]]:
    table = {
        "X": _single_block_paulis("X", lx.support()),
        "Z": _single_block_paulis("Z", lz.support()),
    }
    if css:   # pairwise CNOT is a logical CNOT only for CSS codes
        table["CNOT"] = _pairwise_cnot(n)
    return table


def _five_qubit() -> CodeSpec:
    stabs = (_p("XZZXI"), _p("IXZZX"), _p("XIXZZ"), _p("ZXIXZ"))
    lx, lz = _p("XXXXX"), _p("ZZZZZ")
    return CodeSpec("five_qubit", 5, 1, 3, stabs, (lx,), (lz,),
                    _kappa1_table(5, lx, lz, css=False), css=False)


def _steane713() -> CodeSpec:
    stabs = (_p("XXIIXXI"), _p("IXXIIXX"), _p("IIIXXXX"),
             _p("IZZZZII"), _p("IZZIIZZ"), _p("ZZIZIIZ"))
    lx, lz = _p("XIIIIXX"), _p("ZZZIIII")
    return CodeSpec("steane713", 7, 1, 3, stabs, (lx,), (lz,),
                    _kappa1_table(7, lx, lz))


def _surface3() -> CodeSpec:
    stabs = (_p("XXIIIIIII"), _p("IXXXIIIIX"), _p("IIIIXXIXX"), _p("IIIIIIXXI"),
             _p("ZZIIZIIIZ"), _p("IIZZIIIII"), _p("IIIIZZIII"), _p("IIZIIIZZZ"))
    lx, lz = _p("IXIIIIIXX"), _p("IIZIZIIIZ")
    return CodeSpec("surface:3", 9, 1, 3, stabs, (lx,), (lz,),
                    _kappa1_table(9, lx, lz))


def _rotated_surface_checks(L: int) -> Tuple[List[int], List[int]]:
    """X- and Z-check supports (bit masks over L*L qubits) for the
    standard rotated layout: checkerboard bulk faces, X half-faces on the
    top/bottom edges, Z half-faces on the left/right edges."""
    def q(r: int, c: int) -> int:
        return r * L + c

    x_rows: List[int] = []
    z_rows: List[int] = []
    for r in range(L - 1):
        for c in range(L - 1):
            mask = (1 << q(r, c)) | (1 << q(r, c + 1)) | \
                   (1 << q(r + 1, c)) | (1 << q(r + 1, c + 1))
            (x_rows if (r + c) % 2 == 0 else z_rows).append(mask)
    for c in range(L - 1):
        if (-1 + c) % 2 == 0:      # checkerboard continues above row 0
            x_rows.append((1 << q(0, c)) | (1 << q(0, c + 1)))
        if (L - 1 + c) % 2 == 0:   # and below row L-1
            x_rows.append((1 << q(L - 1, c)) | (1 << q(L - 1, c + 1)))
    for r in range(L - 1):
        if (r - 1) % 2 == 1:       # left of column 0
            z_rows.append((1 << q(r, 0)) | (1 << q(r + 1, 0)))
        if (r + L - 1) % 2 == 1:   # right of column L-1
            z_rows.append((1 << q(r, L - 1)) | (1 << q(r + 1, L - 1)))
    return x_rows, z_rows


def _rotated_surface(L: int) -> CodeSpec:
    n = L * L
    x_rows, z_rows = _rotated_surface_checks(L)
    stabs = tuple(PauliString(n, x=m) for m in x_rows) + \
        tuple(PauliString(n, z=m) for m in z_rows)
    lx = PauliString(n, x=sum(1 << (r * L + 0) for r in range(L)))   # left column
    lz = PauliString(n, z=sum(1 << (0 * L + c) for c in range(L)))   # top row
    return CodeSpec(f"surface:{L}", n, 1, L, stabs, (lx,), (lz,),
                    _kappa1_table(n, lx, lz))


COLOR422_LOGICAL_X = (_p("XIXI"), _p("XXII"))
COLOR422_LOGICAL_Z = (_p("ZZII"), _p("IZIZ"))


def _color422() -> CodeSpec:
    table: Dict[str, Tuple[Gate, ...]] = {
        "X0": _single_block_paulis("X", COLOR422_LOGICAL_X[0].support()),
        "X1": _single_block_paulis("X", COLOR422_LOGICAL_X[1].support()),
        "Z0": _single_block_paulis("Z", COLOR422_LOGICAL_Z[0].support()),
        "Z1": _single_block_paulis("Z", COLOR422_LOGICAL_Z[1].support()),
        # in-block logical CZ between the block's two logical qubits
        "CZ": (Gate("CZ", (0, 3)), Gate("CZ", (1, 2))),
        # block-transversal CNOT = logical CNOT on both pairs at once
        "CNOT": _pairwise_cnot(4),
    }
    return CodeSpec("color422", 4, 2, 2, (_p("XXXX"), _p("ZZZZ")),
                    COLOR422_LOGICAL_X, COLOR422_LOGICAL_Z, table,
                    correctable=False)


@functools.lru_cache(maxsize=None)
def build_code(code_id: str) -> CodeSpec:
    """Codes by id: "five_qubit", "steane713", "surface:L" (L=2..5),
    "color422"."""
    if code_id == "five_qubit":
        return _five_qubit()
    if code_id == "steane713":
        return _steane713()
    if code_id == "color422":
        return _color422()
    if code_id.startswith("surface:"):
        try:
            L = int(code_id.split(":", 1)[1])
        except ValueError:
            raise CodeError(f"bad surface size in {code_id!r}") from None
        if L not in (2, 3, 4, 5):
            raise CodeError(f"surface size L={L} unsupported (2..5)")
        return _surface3() if L == 3 else _rotated_surface(L)
    raise CodeError(f"unknown code id {code_id!r}")


# -- encoded states and preparation circuits -------------------------

def _block_paulis(c: CodeSpec, block: int, total: int,
                  paulis: Sequence[PauliString]) -> List[PauliString]:
    off = block * c.n
    return [PauliString(total, p.x << off, p.z << off, p.sign) for p in paulis]


def encoded_state(c: CodeSpec, basis: str, blocks: int = 1):
    """Tableau of |0...0> or |+...+> encoded across the given blocks."""
    from .tableau import StabilizerTableau
    if blocks < 1:
        raise CodeError("blocks must be >= 1")
    logicals = {"zero": c.logical_z, "plus": c.logical_x}.get(basis)
    if logicals is None:
        raise CodeError(f"unknown basis {basis!r}")
    total = blocks * c.n
    gens: List[PauliString] = []
    for b in range(blocks):
        gens.extend(_block_paulis(c, b, total, c.stabilizers))
        gens.extend(_block_paulis(c, b, total, logicals))
    return StabilizerTableau.from_stabilizers(gens)


def css_prep_circuit(n: int, x_rows: Sequence[int]) -> Circuit:
    """Circuit from |0>^n to the CSS-type state stabilized by X^row for
    each given row and by every Z-string orthogonal to all rows:
    H on the RREF pivots, then CNOT fanout along each row."""
    rows = list(x_rows)
    pivots: List[int] = []
    reduced: List[int] = []
    for row in rows:
        for p in reduced:
            row = min(row, row ^ p)
        if row:
            reduced.append(row)
    # back-substitute to full RREF so each pivot appears in one row only
    reduced.sort(reverse=True)
    for i in range(len(reduced)):
        for j in range(len(reduced)):
            if i != j:
                pb = reduced[i] & -reduced[i]
                if reduced[j] & pb:
                    reduced[j] ^= reduced[i]
    layers: List[List[Gate]] = []
    pivot_of = []
    for row in reduced:
        pivot_of.append((row & -row).bit_length() - 1)
    if reduced:
        layers.append([Gate("H", (p,)) for p in sorted(pivot_of)])
    # fanout: schedule CNOTs greedily into disjoint layers
    pending = []
    for row, piv in zip(reduced, pivot_of):
        for q in range(n):
            if q != piv and (row >> q) & 1:
                pending.append(Gate("CNOT", (piv, q)))
    while pending:
        used: set = set()
        layer: List[Gate] = []
        rest: List[Gate] = []
        for g in pending:
            if used.isdisjoint(g.qubits):
                layer.append(g)
                used.update(g.qubits)
            else:
                rest.append(g)
        layers.append(layer)
        pending = rest
    return circuit(n, layers)


def prep_circuit(c: CodeSpec, basis: str) -> Circuit:
    """Physical circuit preparing one encoded block from |0>^n.

    basis "zero"/"plus" prepare |0-bar>/|+-bar> on all logical qubits;
    "bell" (kappa=2 only) prepares the intra-block logical Bell state.
    """
    if not c.css:
        raise CodeError(f"{c.name}: no CSS preparation circuit")
    x_rows = [s.x for s in c.x_stabilizers()]
    if basis == "zero":
        pass
    elif basis == "plus":
        x_rows += [p.x for p in c.logical_x]
    elif basis == "bell":
        if c.kappa != 2:
            raise CodeError("bell basis needs kappa = 2")
        both = c.logical_x[0] * c.logical_x[1]
        x_rows.append(both.x)
    else:
        raise CodeError(f"unknown basis {basis!r}")
    return css_prep_circuit(c.n, x_rows)


def transversal(c: CodeSpec, gate: str, blocks: Sequence[int],
                total_blocks: int) -> List[Gate]:
    """Physical gates enacting a logical table entry on the given blocks."""
    if gate not in c.transversal_table:
        raise CodeError(f"{c.name}: gate {gate!r} is not transversal")
    template = c.transversal_table[gate]
    want = 2 if gate == "CNOT" else 1
    if len(blocks) != want:
        raise CodeError(f"{gate} acts on {want} block(s)")
    for b in blocks:
        if not 0 <= b < total_blocks:
            raise CodeError(f"block {b} out of range")
    if gate == "CNOT" and blocks[0] == blocks[1]:
        raise CodeError("CNOT blocks must differ")
    out = []
    for g in template:
        qubits = tuple(
            blocks[q // c.n] * c.n + (q % c.n) for q in g.qubits
        )
        out.append(Gate(g.kind, qubits))
    return out


# -- decoding --------------------------------------------------------

def _min_weight_table(n: int, check_masks: Sequence[int],
                      max_weight: int) -> Dict[int, int]:
    """syndrome -> lexicographically-least minimum-weight error mask,
    for single-type (pure X or pure Z) errors against parity checks."""
    table: Dict[int, int] = {0: 0}
    want = 1 << len(check_masks)
    for w in range(1, max_weight + 1):
        if len(table) == want:
            break
        for support in itertools.combinations(range(n), w):
            err = sum(1 << q for q in support)
            syn = 0
            for i, m in enumerate(check_masks):
                if (m & err).bit_count() & 1:
                    syn |= 1 << i
            table.setdefault(syn, err)
        if len(table) == want:
            break
    return table


@functools.lru_cache(maxsize=None)
def _css_tables(code_id: str) -> Tuple[Tuple[int, ...], Tuple[int, ...],
                                       Dict[int, int], Dict[int, int]]:
    """(x_check idx, z_check idx, table for X errors, table for Z errors).

    X errors flip Z-type checks and vice versa; indices refer to
    positions in c.stabilizers, so syndromes can be split consistently.
    """
    c = build_code(code_id)
    xi = tuple(i for i, s in enumerate(c.stabilizers) if s.z == 0)
    zi = tuple(i for i, s in enumerate(c.stabilizers) if s.x == 0)
    z_checks = [c.stabilizers[i].z for i in zi]
    x_checks = [c.stabilizers[i].x for i in xi]
    tx = _min_weight_table(c.n, z_checks, c.n)
    tz = _min_weight_table(c.n, x_checks, c.n)
    return xi, zi, tx, tz


@functools.lru_cache(maxsize=None)
def _generic_table(code_id: str) -> Dict[int, Tuple[int, int]]:
    """Full Pauli lookup for small non-CSS codes: syndrome -> (x, z)."""
    c = build_code(code_id)
    table: Dict[int, Tuple[int, int]] = {0: (0, 0)}
    want = 1 << len(c.stabilizers)
    n = c.n
    for w in range(1, n + 1):
        if len(table) == want:
            break
        for support in itertools.combinations(range(n), w):
            for kinds in itertools.product("XYZ", repeat=w):
                x = z = 0
                for q, k in zip(support, kinds):
                    if k != "Z":
                        x |= 1 << q
                    if k != "X":
                        z |= 1 << q
                syn = c.syndrome(PauliString(n, x, z))
                table.setdefault(syn, (x, z))
    return table


def decode(c: CodeSpec, syndrome: int) -> Optional[PauliString]:
    """Minimum-weight correction for the syndrome (bit i = stabilizer i
    violated). Detection-only codes return None for nonzero syndromes.
    """
    if syndrome >> len(c.stabilizers):
        raise CodeError("syndrome has too many bits")
    if not c.correctable:
        return PauliString(c.n) if syndrome == 0 else None
    if c.css:
        xi, zi, tx, tz = _css_tables(c.name)
        syn_x_checks = sum(((syndrome >> idx) & 1) << j for j, idx in enumerate(xi))
        syn_z_checks = sum(((syndrome >> idx) & 1) << j for j, idx in enumerate(zi))
        ex = tx[syn_z_checks]   # X error pattern explaining Z-check bits
        ez = tz[syn_x_checks]
        return PauliString(c.n, ex, ez)
    table = _generic_table(c.name)
    x, z = table[syndrome]
    return PauliString(c.n, x, z)
