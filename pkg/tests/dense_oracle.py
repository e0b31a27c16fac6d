"""Dense density-matrix reference implementations for small systems.

Everything here is brute force on 2^n x 2^n matrices and only meant for
cross-checking the bit-packed stabilizer code at n <= 8 or so.
"""
import numpy as np

I2 = np.eye(2, dtype=complex)
PX = np.array([[0, 1], [1, 0]], dtype=complex)
PY = np.array([[0, -1j], [1j, 0]], dtype=complex)
PZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = {"I": I2, "X": PX, "Y": PY, "Z": PZ}

H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.array([[1, 0], [0, 1j]], dtype=complex)


def pauli_matrix(p) -> np.ndarray:
    """Dense matrix of a PauliString (qubit 0 is the least significant)."""
    m = np.array([[p.sign]], dtype=complex)
    for ch in p.to_label():
        # qubit 0 least significant: new factor goes on the left of the kron
        m = np.kron(PAULIS[ch], m)
    return m


def one_qubit_op(n: int, q: int, u: np.ndarray) -> np.ndarray:
    m = np.array([[1]], dtype=complex)
    for i in range(n):
        m = np.kron(u if i == q else I2, m)
    return m


def cnot_op(n: int, c: int, t: int) -> np.ndarray:
    dim = 1 << n
    m = np.zeros((dim, dim), dtype=complex)
    for b in range(dim):
        out = b ^ (((b >> c) & 1) << t)
        m[out, b] = 1
    return m


def cz_op(n: int, a: int, b: int) -> np.ndarray:
    dim = 1 << n
    d = np.ones(dim, dtype=complex)
    for s in range(dim):
        if ((s >> a) & 1) and ((s >> b) & 1):
            d[s] = -1
    return np.diag(d)


def gate_matrix(n: int, gate) -> np.ndarray:
    if gate.kind == "H":
        return one_qubit_op(n, gate.qubits[0], H)
    if gate.kind == "S":
        return one_qubit_op(n, gate.qubits[0], S)
    if gate.kind == "X":
        return one_qubit_op(n, gate.qubits[0], PX)
    if gate.kind == "Z":
        return one_qubit_op(n, gate.qubits[0], PZ)
    if gate.kind == "CNOT":
        return cnot_op(n, *gate.qubits)
    if gate.kind == "CZ":
        return cz_op(n, *gate.qubits)
    raise ValueError(gate.kind)


def density_from_stabilizers(gens) -> np.ndarray:
    """rho = 2^-n * sum over the group of signed Pauli matrices."""
    n = gens[0].n
    dim = 1 << n
    rho = np.zeros((dim, dim), dtype=complex)
    for mask in range(1 << len(gens)):
        p = None
        for i, g in enumerate(gens):
            if (mask >> i) & 1:
                p = g if p is None else p * g
        if p is None:
            rho += np.eye(dim)
        else:
            rho += pauli_matrix(p)
    return rho / dim


def statevector(tableau) -> np.ndarray:
    """A pure-state vector consistent with a tableau (global phase free)."""
    rho = density_from_stabilizers(tableau.stab_rows)
    vals, vecs = np.linalg.eigh(rho)
    assert vals[-1] > 0.99
    return vecs[:, -1]


def partial_trace(rho: np.ndarray, n: int, keep) -> np.ndarray:
    """Trace out all qubits not in keep (qubit 0 least significant)."""
    keep = sorted(keep)
    k = len(keep)
    out = np.zeros((1 << k, 1 << k), dtype=complex)
    drop = [q for q in range(n) if q not in keep]

    def expand(sub: int, positions) -> int:
        full = 0
        for i, q in enumerate(positions):
            full |= ((sub >> i) & 1) << q
        return full

    for r in range(1 << k):
        for c in range(1 << k):
            acc = 0
            base_r = expand(r, keep)
            base_c = expand(c, keep)
            for e in range(1 << len(drop)):
                env = expand(e, drop)
                acc += rho[base_r | env, base_c | env]
            out[r, c] = acc
    return out


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    vals = np.linalg.eigvalsh(a - b)
    return float(np.abs(vals).sum()) / 2
