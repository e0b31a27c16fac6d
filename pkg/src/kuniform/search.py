"""Exhaustive search for brickwork circuits preparing k-uniform states.

The search enumerates fixed-depth sequences of macro layers (translationally
invariant time steps first, boundary modifications introduced progressively),
filters candidates with a cheap alpha-separated uniformity check, and
confirms survivors with full verification. Layer candidates are derived from
a code's transversal gate set: basis-rotation (H) layers, in-block CZ plus
brickwork-CNOT units for two-logical-qubit blocks, and bare brickwork CNOT
passes for single-logical-qubit blocks.
"""
import csv
import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from .circuit import Circuit, Gate, circuit, serialize
from .codes import CodeSpec, build_code
from .generators import _color_unit, _surface_layer, min_depth_lightcone
from .tableau import StabilizerTableau, simulate
from .uniformity import UniformityReport, verify


class SearchError(ValueError):
    pass


# a modification multiset: atom name -> count
Mods = Tuple[Tuple[str, int], ...]


@dataclass(frozen=True)
class LayerCandidate:
    """One macro time step. `build(N, mods)` expands it to physical layers;
    `atoms` lists the boundary modifications it admits, with per-layer caps
    (progressive atoms such as extending a flipped boundary region may be
    applied more than once)."""
    name: str
    build: Callable[[int, Dict[str, int]], List[List[Gate]]] = field(hash=False)
    atoms: Tuple[str, ...] = ()
    atom_cap: int = 1


def _h_layer_builder(which: str) -> Callable:
    def build(N: int, mods: Dict[str, int]) -> List[List[Gate]]:
        if which == "all":
            wires = list(range(N))
        elif which == "even":
            # the last wire of an odd chain never receives a brick partner,
            # so it stays |0> (same boundary rule as the generators)
            wires = [q for q in range(0, N, 2) if N % 2 == 0 or q < N - 1]
        else:
            wires = list(range(1, N, 2))
        return [[Gate("H", (q,)) for q in wires]]
    return build


def _surface_pass_builder(down_even: bool, down_odd: bool) -> Callable:
    def build(N: int, mods: Dict[str, int]) -> List[List[Gate]]:
        layers = []
        for parity, down in ((0, down_even), (1, down_odd)):
            layer = _surface_layer(
                N, parity, down,
                flip_ends=mods.get(f"flip-ends:{parity}", 0) > 0,
                drop_ends=mods.get(f"drop-ends:{parity}", 0) > 0)
            if layer:
                layers.append(layer)
        return layers
    return build


def _color_unit_builder(brick_b_down: bool) -> Callable:
    def build(N: int, mods: Dict[str, int]) -> List[List[Gate]]:
        skips = []
        if mods.get("cz-drop-low"):
            skips.append(2)
        if mods.get("cz-drop-high"):
            blocks = N // 2
            skips.append(blocks - 1 if blocks % 2 == 0 else blocks - 2)
        return _color_unit(N, down_below=2 * mods.get("cnot-flip-low", 0),
                           brick_b_down=brick_b_down, cz_skip=skips)
    return build


def enumerate_layers(c: CodeSpec, arch: str = "brickwork") -> List[LayerCandidate]:
    """Translationally invariant macro-layer candidates for a code's
    architecture, boundary modifications tagged per candidate."""
    if arch != "brickwork":
        raise SearchError(f"unknown architecture {arch!r}")
    cands = [LayerCandidate("H", _h_layer_builder("all"))]
    if c.kappa == 1 and "CNOT" in c.transversal_table:
        cands += [LayerCandidate("H:even", _h_layer_builder("even")),
                  LayerCandidate("H:odd", _h_layer_builder("odd"))]
        pass_atoms = ("flip-ends:0", "flip-ends:1",
                      "drop-ends:0", "drop-ends:1")
        for de, do in itertools.product((False, True), repeat=2):
            name = f"CNOT:{'d' if de else 'u'}{'d' if do else 'u'}"
            cands.append(LayerCandidate(
                name, _surface_pass_builder(de, do), pass_atoms))
    elif c.kappa == 2 and "CZ" in c.transversal_table and \
            "CNOT" in c.transversal_table:
        unit_atoms = ("cnot-flip-low", "cz-drop-low", "cz-drop-high")
        cands += [LayerCandidate("STEP:up", _color_unit_builder(False),
                                 unit_atoms, atom_cap=6),
                  LayerCandidate("STEP:bdown", _color_unit_builder(True),
                                 unit_atoms, atom_cap=6)]
    return cands


def realize(seq: Sequence[Tuple[LayerCandidate, Mods]], n_qubits: int) -> Circuit:
    """Expand a macro-layer sequence into a physical circuit."""
    layers: List[List[Gate]] = []
    for cand, mods in seq:
        layers.extend(cand.build(n_qubits, dict(mods)))
    return circuit(n_qubits, layers)


def sequence_name(seq: Sequence[Tuple[LayerCandidate, Mods]]) -> str:
    parts = []
    for cand, mods in seq:
        tag = "".join(f"+{a}" * c for a, c in mods)
        parts.append(cand.name + tag)
    return "|".join(parts)


def _mod_assignments(seq: Sequence[LayerCandidate],
                     total: int) -> Iterator[Tuple[Mods, ...]]:
    """All ways to spread `total` boundary modifications over a layer
    sequence, in a deterministic order."""
    slots = [(pos, atom) for pos, cand in enumerate(seq)
             for atom in cand.atoms]
    caps = {(pos, atom): seq[pos].atom_cap if atom.startswith("cnot-") else 1
            for pos, atom in slots}
    for combo in itertools.combinations_with_replacement(slots, total):
        counts: Dict[Tuple[int, str], int] = {}
        for slot in combo:
            counts[slot] = counts.get(slot, 0) + 1
        if any(v > caps[s] for s, v in counts.items()):
            continue
        per_pos: List[List[Tuple[str, int]]] = [[] for _ in seq]
        for (pos, atom), cnt in sorted(counts.items()):
            per_pos[pos].append((atom, cnt))
        yield tuple(tuple(m) for m in per_pos)


def enumerate_circuits(layers: Sequence[LayerCandidate], depth: int,
                       n_qubits: int, budget: int = 10**6,
                       max_mods: int = 4,
                       ) -> Iterator[Tuple[int, Tuple[Tuple[LayerCandidate, Mods], ...]]]:
    """Deterministic candidate stream, indices 0..budget: all fully
    invariant layer sequences in lexicographic order, then sequences with
    one boundary modification, then two, and so on."""
    if depth < 1:
        raise SearchError("depth must be >= 1")
    zeta = 0
    for n_mods in range(max_mods + 1):
        for base in itertools.product(layers, repeat=depth):
            for mods in (_mod_assignments(base, n_mods) if n_mods
                         else [tuple(() for _ in base)]):
                if zeta > budget:
                    return
                yield zeta, tuple(zip(base, mods))
                zeta += 1


@dataclass(frozen=True)
class SearchConfig:
    code_id: str
    k: int
    target_delta: float = 0.0
    alpha: Optional[int] = None       # None -> max(1, N // (2k)) per N
    initial_state: str = "0"          # product basis: "0" or "+"
    n_start: Optional[int] = None     # None -> smallest fit > 2k
    n_max: int = 8
    depth_start: Optional[int] = None  # None -> light-cone bound
    depth_max: int = 4
    budget: int = 10**6

    def __post_init__(self):
        code = build_code(self.code_id)
        if self.n_start is None:
            n0 = 2 * self.k + 1
            while n0 % code.kappa:
                n0 += 1
            object.__setattr__(self, "n_start", n0)
        if self.n_start <= 2 * self.k:
            raise SearchError(
                f"n_start must exceed 2k = {2 * self.k}, got {self.n_start}")
        if self.alpha is not None and self.alpha < 1:
            raise SearchError("alpha must be >= 1")
        if self.initial_state not in ("0", "+"):
            raise SearchError(f"unknown initial state {self.initial_state!r}")
        if not any(abs(self.target_delta - (2 - 2 ** (1 - r))) < 1e-12
                   for r in range(64)):
            raise SearchError(
                f"target_delta {self.target_delta} is not of the form "
                "2 - 2^(1-r)")


@dataclass(frozen=True)
class SearchHit:
    N: int
    zeta: int
    depth: int
    delta: float
    pattern: str
    circuit: Circuit
    report: UniformityReport


@dataclass
class SearchResult:
    config: SearchConfig
    hits: Dict[int, List[SearchHit]]          # N -> Theta_N
    prefilter_sizes: Dict[int, int]           # N -> |Theta~_N| at hit depth
    visited: Dict[int, int]                   # N -> candidates examined
    depth_found: Dict[int, Optional[int]]     # None -> not found

    def found(self, N: int) -> bool:
        return bool(self.hits.get(N))


def _initial_tableau(basis: str, N: int) -> StabilizerTableau:
    return StabilizerTableau.plus_state(N) if basis == "+" else \
        StabilizerTableau(N)


def run_search(cfg: SearchConfig) -> SearchResult:
    """The search loop: per N, enumerate depth-beta candidate circuits,
    admit those passing the alpha-separated filter into Theta~_N, confirm
    with full verification into Theta_N; on an empty Theta_N the depth is
    incremented up to the configured maximum."""
    code = build_code(cfg.code_id)
    cands = enumerate_layers(code)
    res = SearchResult(cfg, {}, {}, {}, {})
    for N in range(cfg.n_start, cfg.n_max + 1):
        if N % code.kappa:
            continue                      # does not fit the architecture
        alpha = cfg.alpha or max(1, N // (2 * cfg.k))
        beta = cfg.depth_start or min_depth_lightcone(cfg.k)
        res.visited[N] = 0
        res.depth_found[N] = None
        while beta <= cfg.depth_max:
            tilde: List[Tuple[int, str, Circuit, StabilizerTableau]] = []
            for zeta, seq in enumerate_circuits(cands, beta, N, cfg.budget):
                res.visited[N] += 1
                circ = realize(seq, N)
                t, _ = simulate(circ, _initial_tableau(cfg.initial_state, N))
                rep = verify(t, cfg.k, alpha)
                if rep.delta <= cfg.target_delta:
                    tilde.append((zeta, sequence_name(seq), circ, t))
            hits = []
            for zeta, name, circ, t in tilde:
                rep = verify(t, cfg.k, 1)
                if rep.delta <= cfg.target_delta:
                    hits.append(SearchHit(N, zeta, beta, rep.delta, name,
                                          circ, rep))
            if hits:
                res.hits[N] = hits
                res.prefilter_sizes[N] = len(tilde)
                res.depth_found[N] = beta
                break
            beta += 1
    return res


def pattern_report(res: SearchResult) -> Dict[str, object]:
    """First-hit layer pattern per N and whether it is consistent across
    all N where the search succeeded (the cross-N extraction step is a
    human judgment; this only surfaces the comparison)."""
    patterns = {N: hits[0].pattern for N, hits in sorted(res.hits.items())}
    return {"patterns": patterns,
            "consistent": len(set(patterns.values())) <= 1}


# ---------------------------------------------------------------------
# config files and result directories

_CONFIG_KEYS = {
    "code": ("code_id", str),
    "k": ("k", int),
    "delta": ("target_delta", float),
    "alpha": ("alpha", int),
    "initial_state": ("initial_state", str),
    "n_start": ("n_start", int),
    "n_max": ("n_max", int),
    "depth_start": ("depth_start", int),
    "depth_max": ("depth_max", int),
    "budget": ("budget", int),
}


def load_search_config(path) -> SearchConfig:
    """Key-value config file: `key = value`, one per line, `#` comments."""
    kwargs = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SearchError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise SearchError(f"{path}:{lineno}: unknown key {key!r}")
        name, conv = _CONFIG_KEYS[key]
        try:
            kwargs[name] = conv(value)
        except ValueError as exc:
            raise SearchError(f"{path}:{lineno}: bad value for {key}: {exc}")
    for required in ("code_id", "k"):
        if required not in kwargs:
            raise SearchError(f"{path}: missing required key "
                              f"{'code' if required == 'code_id' else 'k'}")
    return SearchConfig(**kwargs)


INDEX_COLUMNS = ("N", "zeta", "depth", "delta", "status", "file")


def write_search_result(res: SearchResult, outdir) -> Path:
    """Write circuit files plus a CSV index; returns the index path."""
    outdir = Path(outdir)
    (outdir / "circuits").mkdir(parents=True, exist_ok=True)
    index = outdir / "index.csv"
    with open(index, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(INDEX_COLUMNS)
        for N in sorted(res.depth_found):
            hits = res.hits.get(N, [])
            if not hits:
                w.writerow([N, "", "", "", "not_found", ""])
                continue
            for hit in hits:
                fname = f"circuits/N{N}_zeta{hit.zeta}.txt"
                (outdir / fname).write_text(serialize(hit.circuit))
                w.writerow([N, hit.zeta, hit.depth, hit.delta, "found",
                            fname])
    return index


def replay(cfg: SearchConfig, N: int, depth: int, zeta: int) -> Circuit:
    """Rebuild the candidate a given index refers to (the stream is
    deterministic, so an index row identifies its circuit exactly)."""
    cands = enumerate_layers(build_code(cfg.code_id))
    for z, seq in enumerate_circuits(cands, depth, N, cfg.budget):
        if z == zeta:
            return realize(seq, N)
    raise SearchError(f"index {zeta} exceeds the enumeration budget")
