"""Tests for code definitions, encoded states, preparation circuits,
transversal gates, and decoders."""
import itertools

import pytest

from kuniform.circuit import Gate, circuit
from kuniform.codes import (
    CodeError,
    CodeSpec,
    build_code,
    css_prep_circuit,
    decode,
    encoded_state,
    prep_circuit,
    transversal,
)
from kuniform.frame import conjugate_pauli
from kuniform.pauli import PauliString, gf2_rank_rows, pauli_in_group
from kuniform.tableau import StabilizerTableau, simulate
from kuniform.uniformity import verify

ALL_CODES = ["five_qubit", "steane713", "color422",
             "surface:2", "surface:3", "surface:4", "surface:5"]
CSS_CODES = [c for c in ALL_CODES if c != "five_qubit"]


def lift(p: PauliString, block: int, blocks: int) -> PauliString:
    off = block * p.n
    return PauliString(blocks * p.n, p.x << off, p.z << off, p.sign)


@pytest.mark.parametrize("code_id", ALL_CODES)
def test_code_parameters(code_id):
    c = build_code(code_id)
    assert len(c.stabilizers) == c.n - c.kappa
    assert len(c.logical_x) == len(c.logical_z) == c.kappa
    rows = [p.x | (p.z << c.n) for p in c.stabilizers]
    rows += [p.x | (p.z << c.n) for p in c.logical_x + c.logical_z]
    assert gf2_rank_rows(rows) == c.n + c.kappa


@pytest.mark.parametrize("code_id,n,kappa,d", [
    ("five_qubit", 5, 1, 3),
    ("steane713", 7, 1, 3),
    ("color422", 4, 2, 2),
    ("surface:2", 4, 1, 2),
    ("surface:3", 9, 1, 3),
    ("surface:4", 16, 1, 4),
    ("surface:5", 25, 1, 5),
])
def test_code_ids(code_id, n, kappa, d):
    c = build_code(code_id)
    assert (c.n, c.kappa, c.d) == (n, kappa, d)


@pytest.mark.parametrize("bad", ["surface:1", "surface:7", "surface:x", "shor"])
def test_unknown_codes_rejected(bad):
    with pytest.raises(CodeError):
        build_code(bad)


def _brute_distance(c: CodeSpec) -> int:
    best = c.n + 1
    stabs = list(c.stabilizers)
    for x in range(1 << c.n):
        for z in range(1 << c.n):
            w = (x | z).bit_count()
            if w == 0 or w >= best:
                continue
            p = PauliString(c.n, x, z)
            if all(p.commutes(s) for s in stabs) and not pauli_in_group(p, stabs):
                best = w
    return best


@pytest.mark.parametrize("code_id", ["five_qubit", "steane713", "color422",
                                     "surface:2", "surface:3"])
def test_distance_exhaustive(code_id):
    c = build_code(code_id)
    assert _brute_distance(c) == c.d


def _css_distance(c: CodeSpec) -> int:
    # for CSS codes the distance is attained by a pure-X or pure-Z logical
    best = c.n
    for log, stabs in (
        (c.logical_x[0].x, [s.x for s in c.x_stabilizers()]),
        (c.logical_z[0].z, [s.z for s in c.z_stabilizers()]),
    ):
        for mask in range(1 << len(stabs)):
            v = log
            for i, s in enumerate(stabs):
                if (mask >> i) & 1:
                    v ^= s
            best = min(best, v.bit_count())
    return best


@pytest.mark.parametrize("L", [4, 5])
def test_surface_distance_large(L):
    c = build_code(f"surface:{L}")
    assert _css_distance(c) == L


@pytest.mark.parametrize("code_id", CSS_CODES)
def test_css_split(code_id):
    c = build_code(code_id)
    assert c.css
    assert len(c.x_stabilizers()) + len(c.z_stabilizers()) == len(c.stabilizers)


@pytest.mark.parametrize("code_id", CSS_CODES)
@pytest.mark.parametrize("basis", ["zero", "plus"])
def test_prep_circuit_reaches_encoded_state(code_id, basis):
    c = build_code(code_id)
    circ = prep_circuit(c, basis)
    assert circ.n_qubits == c.n
    t, outcomes = simulate(circ)
    assert outcomes == {}
    assert t == encoded_state(c, basis)


def test_prep_circuit_bell_block():
    c = build_code("color422")
    t, _ = simulate(prep_circuit(c, "bell"))
    want = StabilizerTableau.from_stabilizers(
        list(c.stabilizers)
        + [c.logical_x[0] * c.logical_x[1], c.logical_z[0] * c.logical_z[1]]
    )
    assert t == want


def test_prep_circuit_rejections():
    with pytest.raises(CodeError):
        prep_circuit(build_code("five_qubit"), "zero")
    with pytest.raises(CodeError):
        prep_circuit(build_code("steane713"), "bell")
    with pytest.raises(CodeError):
        prep_circuit(build_code("steane713"), "minus")


def test_css_prep_circuit_ghz():
    # x_rows = {XXX} on 3 qubits prepares the GHZ state
    t, _ = simulate(css_prep_circuit(3, [0b111]))
    want = StabilizerTableau.from_stabilizers(
        [PauliString.from_label(s) for s in ("XXX", "ZZI", "IZZ")])
    assert t == want


@pytest.mark.parametrize("code_id", CSS_CODES)
def test_block_cnot_is_logical_cnot(code_id):
    c = build_code(code_id)
    circ = circuit(2 * c.n, [transversal(c, "CNOT", [0, 1], 2)])
    stabs2 = [lift(s, b, 2) for b in (0, 1) for s in c.stabilizers]
    for s in stabs2:
        assert pauli_in_group(conjugate_pauli(circ, s), stabs2)
    for i in range(c.kappa):
        lx, lz = c.logical_x[i], c.logical_z[i]
        cases = [
            (lift(lx, 0, 2), lift(lx, 0, 2) * lift(lx, 1, 2)),
            (lift(lz, 1, 2), lift(lz, 0, 2) * lift(lz, 1, 2)),
            (lift(lz, 0, 2), lift(lz, 0, 2)),
            (lift(lx, 1, 2), lift(lx, 1, 2)),
        ]
        for pin, pexp in cases:
            out = conjugate_pauli(circ, pin)
            assert pauli_in_group(out * pexp, stabs2)


def test_color422_logical_cz():
    c = build_code("color422")
    circ = circuit(4, [transversal(c, "CZ", [0], 1)])
    x1, z1 = c.logical_x[0], c.logical_z[0]
    x2, z2 = c.logical_x[1], c.logical_z[1]
    stabs = list(c.stabilizers)
    for pin, pexp in [(x1, x1 * z2), (x2, x2 * z1), (z1, z1), (z2, z2)]:
        assert pauli_in_group(conjugate_pauli(circ, pin) * pexp, stabs)
    for s in stabs:
        assert pauli_in_group(conjugate_pauli(circ, s), stabs)


@pytest.mark.parametrize("code_id,gate", [
    ("five_qubit", "CNOT"),
    ("steane713", "CZ"),
    ("surface:3", "T"),
])
def test_non_transversal_gates_rejected(code_id, gate):
    c = build_code(code_id)
    with pytest.raises(CodeError):
        transversal(c, gate, [0, 1] if gate == "CNOT" else [0], 2)


def test_transversal_block_validation():
    c = build_code("steane713")
    with pytest.raises(CodeError):
        transversal(c, "CNOT", [0, 0], 2)
    with pytest.raises(CodeError):
        transversal(c, "CNOT", [0, 2], 2)
    with pytest.raises(CodeError):
        transversal(c, "X", [0, 1], 2)


def test_transversal_gate_offsets():
    c = build_code("steane713")
    gates = transversal(c, "CNOT", [1, 0], 2)
    assert gates == [Gate("CNOT", (7 + q, q)) for q in range(7)]


@pytest.mark.parametrize("code_id", ["five_qubit", "steane713",
                                     "surface:3", "surface:4", "surface:5"])
def test_decode_corrects_all_single_errors(code_id):
    c = build_code(code_id)
    stabs = list(c.stabilizers)
    for q in range(c.n):
        for x, z in ((1, 0), (0, 1), (1, 1)):
            e = PauliString(c.n, x << q, z << q)
            corr = decode(c, c.syndrome(e))
            residual = PauliString(c.n, e.x ^ corr.x, e.z ^ corr.z)
            assert pauli_in_group(residual, stabs)


def test_decode_trivial_syndrome_is_identity():
    for code_id in ALL_CODES:
        assert decode(build_code(code_id), 0).weight() == 0


def test_color422_decode_is_detection_only():
    c = build_code("color422")
    for syndrome in (1, 2, 3):
        assert decode(c, syndrome) is None


def test_decode_syndrome_range_checked():
    with pytest.raises(CodeError):
        decode(build_code("color422"), 1 << 2)


@pytest.mark.parametrize("code_id,basis,k", [
    ("five_qubit", "zero", 2),
    ("steane713", "zero", 1),
    ("steane713", "plus", 1),
])
def test_encoded_states_are_uniform(code_id, basis, k):
    # distance-d codes give (d-1)-uniform encoded states
    t = encoded_state(build_code(code_id), basis)
    report = verify(t, k)
    assert report.is_uniform
    assert report.delta == 0.0


def test_encoded_state_multiblock():
    c = build_code("color422")
    t = encoded_state(c, "zero", blocks=3)
    assert t.n == 12
    for b in range(3):
        for p in list(c.stabilizers) + list(c.logical_z):
            assert t.expectation(lift(p, b, 3)) == 1


def test_encoded_state_rejections():
    c = build_code("steane713")
    with pytest.raises(CodeError):
        encoded_state(c, "bell")
    with pytest.raises(CodeError):
        encoded_state(c, "zero", blocks=0)
