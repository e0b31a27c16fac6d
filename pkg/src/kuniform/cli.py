"""Command-line interface: k-uniformity verification, circuit generation,
brickwork circuit search, noise-sweep simulation, and the kappa-decay study.

Exit codes: 0 success, 1 verification/assertion failure, 2 usage error.
All CSV outputs are byte-deterministic for fixed inputs and seed.
"""
import argparse
import csv
import json
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .circuit import CircuitError, parse, serialize
from .codes import CodeError, build_code, encoded_state
from .generators import (
    GeneratorError,
    _color_circuit,
    assemble_hybrid,
    gen_approx_kuniform,
    gen_bell_bridge,
    gen_color_kuniform,
    gen_ghz,
    gen_surface_kuniform,
)
from .noise import RESULT_COLUMNS, NoiseError, compare_schemes, reference_target
from .search import (
    SearchError,
    load_search_config,
    run_search,
    write_search_result,
)
from .tableau import simulate
from .uniformity import kappa_ratio, verify

USAGE_ERROR = 2
CHECK_FAILED = 1


class CliError(ValueError):
    pass


# ---------------------------------------------------------------------
# verify


def _verify_state(args):
    if (args.circuit is None) == (args.code is None):
        raise CliError("give exactly one of --circuit or --code")
    if args.circuit is not None:
        circ = parse(Path(args.circuit).read_text())
        return reference_target(circ)
    return encoded_state(build_code(args.code), args.basis)


def cmd_verify(args) -> int:
    t = _verify_state(args)
    try:
        rep = verify(t, args.k, args.alpha)
    except ValueError as exc:
        raise CliError(str(exc))
    if args.json:
        print(json.dumps({
            "k": rep.k, "alpha": rep.alpha, "min_IA": rep.min_IA,
            "r": rep.r, "delta": rep.delta, "witness": list(rep.witness),
            "subsets_scanned": rep.subsets_scanned,
            "is_uniform": rep.is_uniform,
        }, sort_keys=True))
    else:
        verdict = "exactly" if rep.is_uniform else f"Delta={rep.delta}"
        print(f"k={rep.k} alpha={rep.alpha}: min I_A={rep.min_IA} "
              f"(witness {list(rep.witness)}), r={rep.r}, {verdict} "
              f"k-uniform; {rep.subsets_scanned} subsets scanned")
    if args.expect_exact and rep.delta != 0.0:
        return CHECK_FAILED
    return 0


# ---------------------------------------------------------------------
# generate


def _build_circuit(args):
    fam = args.family
    if fam in ("surface", "color", "approx"):
        if args.k is None or args.n is None:
            raise CliError(f"--family {fam} needs --k and --n")
        gen = {"surface": gen_surface_kuniform, "color": gen_color_kuniform,
               "approx": gen_approx_kuniform}[fam]
        return gen(args.k, args.n)
    if fam == "ghz":
        if args.n is None:
            raise CliError("--family ghz needs --n")
        variant = {"log": "log_depth", "const": "const_depth"}.get(
            args.variant or "log")
        if variant is None:
            raise CliError(f"unknown ghz variant {args.variant!r}")
        return gen_ghz(args.n, variant)
    if fam == "bell":
        if args.code is None:
            raise CliError("--family bell needs --code")
        return gen_bell_bridge(build_code(args.code))
    if fam == "hybrid":
        if args.code is None:
            raise CliError("--family hybrid needs --code")
        sub = argparse.Namespace(family=args.base_family, k=args.k,
                                 n=args.n, variant=args.variant, code=None,
                                 base_family=None)
        if args.base_family is None:
            raise CliError("--family hybrid needs --base-family")
        if args.base_family == "ghz" and args.variant is None:
            sub.variant = "const"
        return assemble_hybrid(build_code(args.code), _build_circuit(sub)).circuit
    raise CliError(f"unknown family {fam!r}")


def cmd_generate(args) -> int:
    text = serialize(_build_circuit(args))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------
# search


def cmd_search(args) -> int:
    cfg = load_search_config(args.config)
    res = run_search(cfg)
    index = write_search_result(res, args.output)
    found = sum(1 for N in res.depth_found if res.found(N))
    print(f"searched N={cfg.n_start}..{cfg.n_max}: hits for {found} of "
          f"{len(res.depth_found)} sizes; index at {index}")
    return 0


# ---------------------------------------------------------------------
# simulate

_SWEEP_LIST_KEYS = {"schemes", "k", "p"}
_SWEEP_INT_KEYS = {"N", "shots", "seed", "k"}
_SWEEP_FLOAT_KEYS = {"p", "p0", "p1", "p2", "p3",
                     "p0_factor", "p1_factor", "p2_factor", "p3_factor"}


def load_sweep(path) -> Dict[str, object]:
    """Key-value sweep file; comma-separated values make lists."""
    sweep: Dict[str, object] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))

        def conv(v: str):
            if key in _SWEEP_FLOAT_KEYS:
                return float(v)
            if key in _SWEEP_INT_KEYS:
                return int(v)
            return v

        try:
            parts = [conv(v.strip()) for v in value.split(",")]
        except ValueError as exc:
            raise CliError(f"{path}:{lineno}: bad value for {key}: {exc}")
        sweep[key] = parts if (len(parts) > 1 or key in _SWEEP_LIST_KEYS) \
            else parts[0]
    return sweep


def _format_cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_rows(rows: List[Dict[str, object]], columns: Sequence[str],
               path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_format_cell(row[c]) for c in columns])


def _plot_sweep(rows: List[Dict[str, object]], path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 4))
    series: Dict[str, List] = {}
    for row in rows:
        label = row["scheme"]
        if row["k"] != "":
            label += f" k={row['k']}"
        series.setdefault(label, []).append(row)
    for label, pts in sorted(series.items()):
        pts = [p for p in pts if p["fidelity"] != ""]
        xs = [p["p2"] for p in pts]
        ys = [max(1 - p["fidelity"], 1e-12) for p in pts]
        if len(xs) > 1:
            ax.loglog(xs, ys, marker="o", label=label)
        else:
            ax.semilogy(range(len(ys)), ys, marker="o", label=label)
    ax.set_xlabel("two-qubit error rate")
    ax.set_ylabel("infidelity")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def cmd_simulate(args) -> int:
    sweep = load_sweep(args.sweep)
    try:
        rows = compare_schemes(sweep)
    except (ValueError, KeyError) as exc:
        raise CliError(f"bad sweep: {exc}")
    write_rows(rows, RESULT_COLUMNS, args.output)
    print(f"wrote {len(rows)} rows to {args.output}")
    if args.plot:
        _plot_sweep(rows, args.plot)
        print(f"wrote plot to {args.plot}")
    return 0


# ---------------------------------------------------------------------
# decay

DECAY_FAMILIES = {"C1": 0, "C3": 4}   # boundary-flip extent of the unit
DECAY_DEFAULT_K = {"C1": 6, "C3": 5}  # the Delta=1 construction targets
DECAY_COLUMNS = ("family", "k", "N", "depth", "kappa")


def decay_rows(family: str, N: int, depths: Sequence[int],
               k: Optional[int] = None) -> List[Dict[str, object]]:
    """kappa at each depth for repeated brickwork units. Depth counts
    macro layers as in the search module: depth 1 is the basis (H) layer
    alone, depth d adds d-1 repetitions of the family's unit."""
    if family not in DECAY_FAMILIES:
        raise CliError(f"unknown decay family {family!r}")
    k = k if k is not None else DECAY_DEFAULT_K[family]
    rows = []
    for d in depths:
        if d < 1:
            raise CliError("depths must be >= 1")
        t, _ = simulate(_color_circuit(N, d - 1, DECAY_FAMILIES[family]))
        kr = kappa_ratio(t, k)
        kappa = float("inf") if kr.no_uniform_subsets else kr.ratio
        rows.append({"family": family, "k": k, "N": N, "depth": d,
                     "kappa": kappa})
    return rows


def cmd_decay(args) -> int:
    depths = [int(v) for v in args.depths.split(",")]
    rows = decay_rows(args.family, args.n, depths, args.k)
    write_rows(rows, DECAY_COLUMNS, args.output)
    print(f"wrote {len(rows)} rows to {args.output}")
    return 0


# ---------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kuniform")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="k-uniformity of a circuit or code state")
    v.add_argument("--circuit", help="circuit file to verify the output of")
    v.add_argument("--code", help="code id for an encoded basis state")
    v.add_argument("--basis", choices=("zero", "plus"), default="zero")
    v.add_argument("--k", type=int, required=True)
    v.add_argument("--alpha", type=int, default=1)
    v.add_argument("--json", action="store_true")
    v.add_argument("--expect-exact", action="store_true",
                   help="exit 1 unless Delta = 0")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("generate", help="write a preparation circuit")
    g.add_argument("--family", required=True,
                   choices=("surface", "color", "approx", "ghz", "bell",
                            "hybrid"))
    g.add_argument("--k", type=int)
    g.add_argument("--n", type=int)
    g.add_argument("--variant", help="ghz variant: log or const")
    g.add_argument("--code", help="code id for bell/hybrid families")
    g.add_argument("--base-family", choices=("surface", "color", "ghz"),
                   help="logical-level family for hybrid assembly")
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("search", help="run a brickwork circuit search")
    s.add_argument("--config", required=True)
    s.add_argument("-o", "--output", required=True, help="result directory")
    s.set_defaults(func=cmd_search)

    m = sub.add_parser("simulate", help="noise sweep comparing schemes")
    m.add_argument("--sweep", required=True, help="key-value sweep file")
    m.add_argument("-o", "--output", required=True, help="CSV path")
    m.add_argument("--plot", help="optional SVG path")
    m.set_defaults(func=cmd_simulate)

    d = sub.add_parser("decay", help="kappa vs depth for repeated units")
    d.add_argument("--family", required=True, choices=tuple(DECAY_FAMILIES))
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--depths", required=True, help="comma-separated depths")
    d.add_argument("--k", type=int, help="override the family's default k")
    d.add_argument("-o", "--output", required=True, help="CSV path")
    d.set_defaults(func=cmd_decay)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    try:
        return args.func(args)
    except (CliError, CircuitError, CodeError, GeneratorError, NoiseError,
            SearchError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
