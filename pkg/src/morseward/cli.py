"""Command line interface: ``morseward <command> INPUT... [options]``.

Exit status: 0 success, 1 usage error, 2 input format error, 3 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

from .chain import FilteredComplex, Reduction, identity_reduction, loads_complex, subcomplex_at
from .exceptions import (
    ComplexFormatError,
    FrameNestingError,
    ImageFormatError,
    InvalidComplexError,
    InvariantViolation,
    MorsewardError,
)
from .image import (
    DigitalImage,
    build_cubical,
    build_simplicial,
    frames_filtration,
    graylevel_filtration,
    parse_image,
    single_step_filtration,
    sweep_filtration,
)
from .intlinalg import AbelianGroup
from .morse import reduce_complex, reduce_filtered_complex
from .persist import Bar, Barcode, barcode, homology_at, persistent_group, triple_group
from .validation import check_complex

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_INVARIANT = 0, 1, 2, 3
SKIP_REDUCTION_LIMIT = 5000

Query = Tuple[int, ...]


class UsageError(MorsewardError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    inputs: List[str]
    complex_kind: str = "simplicial"
    filtration: Optional[str] = None
    steps: Optional[int] = None
    thresholds: Optional[List[int]] = None
    threshold: Optional[int] = None
    fmt: Optional[str] = None
    queries: Union[str, List[Query]] = field(default_factory=list)
    skip_reduction: bool = False
    dump_dvf: bool = False
    emit_generators: bool = False
    threads: int = 1
    out: Optional[str] = None


def parse_query(text: str) -> Union[str, Query]:
    if text.strip() == "all":
        return "all"
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"query {text!r} is not 'i,j,n', 'i,j,k,n' or 'all'") from None
    if len(parts) not in (3, 4):
        raise argparse.ArgumentTypeError(f"query {text!r} needs 3 or 4 indices")
    return parts


def _int_list(text: str) -> List[int]:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma separated integer list") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("inputs", nargs="+", metavar="INPUT",
                        help="image files (ascii grid, PGM P2/P5) or one complex file; several images are frames")
    common.add_argument("--complex", dest="complex_kind", choices=("simplicial", "cubical"), default="simplicial")
    common.add_argument("--filtration", choices=("frames", "rows", "cols", "gray"))
    common.add_argument("--steps", type=int, help="number of sweep bands or gray levels")
    common.add_argument("--thresholds", type=_int_list, help="increasing gray thresholds, e.g. 64,128,255")
    common.add_argument("--threshold", type=int, help="foreground cut-off for binary modes")
    common.add_argument("--query", dest="queries", action="append", type=parse_query, default=[],
                        help="i,j,n or i,j,k,n or all (repeatable)")
    common.add_argument("--format", dest="fmt", choices=("text", "json", "svg"))
    common.add_argument("--skip-reduction", action="store_true", help="compute on the unreduced complex")
    common.add_argument("--dump-dvf", action="store_true", help="print vector fields as (a;b) pairs")
    common.add_argument("--emit-generators", action="store_true", help="include representative cycles")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--out", help="write output to this path instead of stdout")

    parser = _Parser(prog="morseward", description="Integer persistent homology of digital images.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "info": "cell counts per degree and filtration step",
        "reduce": "discrete Morse reduction statistics",
        "homology": "homology groups of the whole complex",
        "persist": "persistent groups H^{i,j}_n and H^{i,j,k}_n",
        "barcode": "integer barcode as JSON, SVG or text",
        "generators": "representative cycles of persistent groups",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    queries = ns.queries
    if "all" in queries:
        queries = "all"
    return RunConfig(
        command=ns.command,
        inputs=ns.inputs,
        complex_kind=ns.complex_kind,
        filtration=ns.filtration,
        steps=ns.steps,
        thresholds=ns.thresholds,
        threshold=ns.threshold,
        fmt=ns.fmt,
        queries=queries,
        skip_reduction=ns.skip_reduction,
        dump_dvf=ns.dump_dvf,
        emit_generators=ns.emit_generators,
        threads=ns.threads,
        out=ns.out,
    )


# ---------------------------------------------------------------------------
# Loading


@dataclass
class Loaded:
    complex: FilteredComplex
    names: Tuple[str, ...]


def _gray_thresholds(img: DigitalImage, steps: int) -> List[int]:
    top = img.maxval + 1
    return sorted({-(-k * top // steps) - 1 for k in range(1, steps + 1)})


def load(cfg: RunConfig) -> Loaded:
    blobs = []
    for path in cfg.inputs:
        try:
            with open(path, "rb") as fh:
                blobs.append(fh.read())
        except OSError as exc:
            raise ImageFormatError(f"cannot read {path}: {exc.strerror}") from None
    if blobs[0].lstrip().startswith(b"morseward-complex"):
        if len(blobs) > 1:
            raise UsageError("a complex file must be the only input")
        C = check_complex(loads_complex(blobs[0].decode("utf-8", errors="replace")))
        return Loaded(C, tuple(f"{n}-cells" for n in range(max(C.max_dim + 1, 1))))
    images = [parse_image(b) for b in blobs]
    mode = cfg.filtration or ("frames" if len(images) > 1 else None)
    if mode != "frames" and len(images) > 1:
        raise UsageError(f"several inputs need --filtration frames, not {mode}")
    if mode == "frames":
        img, spec = frames_filtration(images, cfg.threshold)
    elif mode in ("rows", "cols"):
        img = images[0]
        spec = sweep_filtration(img, mode, cfg.steps or 1, cfg.threshold)
    elif mode == "gray":
        img = images[0]
        thresholds = cfg.thresholds or (_gray_thresholds(img, cfg.steps) if cfg.steps else None)
        if not thresholds:
            raise UsageError("--filtration gray needs --thresholds or --steps")
        spec = graylevel_filtration(img, thresholds)
    else:
        img = images[0]
        spec = single_step_filtration(img, cfg.threshold)
    build = build_simplicial if cfg.complex_kind == "simplicial" else build_cubical
    top = "triangles" if cfg.complex_kind == "simplicial" else "squares"
    return Loaded(build(img, spec), ("vertices", "edges", top))


def _counts_text(counts: Sequence[int], names: Sequence[str]) -> str:
    width = max(len(names), len(counts))
    full = list(counts) + [0] * (width - len(counts))
    labels = list(names) + [f"{n}-cells" for n in range(len(names), width)]
    return ", ".join(f"{c} {name}" for c, name in zip(full, labels))


def _reduce(cfg: RunConfig, C: FilteredComplex) -> Reduction:
    if cfg.skip_reduction:
        if C.num_cells > SKIP_REDUCTION_LIMIT:
            raise UsageError(
                f"--skip-reduction is limited to {SKIP_REDUCTION_LIMIT} cells; this complex has {C.num_cells}"
            )
        return identity_reduction(C)
    if C.steps <= 1:
        return reduce_complex(C)
    return reduce_filtered_complex(C, threads=cfg.threads)


def _label(C: FilteredComplex, cid):
    label = C.cell(cid).label
    return cid if label is None else label


def _generator_repr(C: FilteredComplex, chain) -> list:
    items = sorted(chain.coeffs.items(), key=lambda kv: repr(kv[0]))
    return [[_jsonable(_label(C, cid)), v] for cid, v in items]


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(v) for v in x]
    return x


def _group_json(g: AbelianGroup, gens=None) -> dict:
    out = {"rank": g.rank, "torsion": list(g.torsion), "components": g.labels()}
    if gens is not None:
        out["generators"] = gens
    return out


# ---------------------------------------------------------------------------
# Commands


def cmd_info(cfg: RunConfig, loaded: Loaded) -> str:
    C = loaded.complex
    per_step = [subcomplex_at(C, i).counts() for i in range(1, C.steps + 1)]
    if cfg.fmt == "json":
        return json.dumps({
            "counts": C.counts(),
            "names": list(loaded.names),
            "steps": C.steps,
            "per_step": per_step,
            "euler_characteristic": C.euler_characteristic(),
        }, indent=2) + "\n"
    lines = [_counts_text(C.counts(), loaded.names), f"filtration steps: {C.steps}"]
    for i, counts in enumerate(per_step, start=1):
        lines.append(f"step {i}: {_counts_text(counts, loaded.names)}")
    lines.append(f"Euler characteristic: {C.euler_characteristic()}")
    return "\n".join(lines) + "\n"


def cmd_reduce(cfg: RunConfig, loaded: Loaded) -> str:
    C = loaded.complex
    rho = _reduce(cfg, C)
    D = rho.dst
    fields = rho.stats.get("fields", {})
    if cfg.fmt == "json":
        data = {
            "input_counts": C.counts(),
            "vectors": {str(n): len(V) for n, V in fields.items()},
            "critical_counts": D.counts(),
            "input_cells": C.num_cells,
            "critical_cells": D.num_cells,
        }
        if cfg.dump_dvf:
            data["fields"] = {str(n): V.one_based() for n, V in fields.items()}
        return json.dumps(data, indent=2) + "\n"
    lines = [f"input: {_counts_text(C.counts(), loaded.names)} ({C.num_cells} cells)"]
    for n, V in fields.items():
        lines.append(f"degree {n} vector field: {len(V)} vectors")
    share = 100.0 * D.num_cells / C.num_cells if C.num_cells else 0.0
    lines.append(f"critical: {_counts_text(D.counts(), loaded.names)} ({D.num_cells} cells, {share:.2f}% of input)")
    if cfg.dump_dvf:
        for n, V in fields.items():
            lines.append(f"dvf degree {n}: {V.to_text()}")
    return "\n".join(lines) + "\n"


def cmd_homology(cfg: RunConfig, loaded: Loaded) -> str:
    C = loaded.complex
    rho = _reduce(cfg, C)
    D = rho.dst
    m = C.steps
    result = []
    for n in range(max(C.max_dim + 1, 1)):
        g = homology_at(D, m, n)
        gens = [_generator_repr(C, rho.map_chain_back(x)) for x in g.generators] if cfg.emit_generators else None
        result.append((n, g, gens))
    if cfg.fmt == "json":
        return json.dumps({"homology": [dict(degree=n, **_group_json(g, gens)) for n, g, gens in result]},
                          indent=2) + "\n"
    lines = []
    for n, g, gens in result:
        lines.append(f"H_{n} = {g}")
        if gens is not None:
            for label, gen in zip(g.labels(), gens):
                lines.append(f"  {label}: {json.dumps(gen)}")
    return "\n".join(lines) + "\n"


def _expand_queries(cfg: RunConfig, C: FilteredComplex, default_all: bool) -> List[Query]:
    m = C.steps
    top = max(C.max_dim, 0)
    if cfg.queries == "all" or (not cfg.queries and default_all):
        return [(i, j, n) for n in range(top + 1) for i in range(1, m + 1) for j in range(i, m + 1)]
    if not cfg.queries:
        return [(m, m, n) for n in range(top + 1)]
    for q in cfg.queries:
        idx = q[:-1]
        if any(not 0 <= x <= m for x in idx):
            raise UsageError(f"query {','.join(map(str, q))}: indices must lie in [0, {m}]")
        if list(idx) != sorted(idx):
            raise UsageError(f"query {','.join(map(str, q))}: indices must be non-decreasing")
        if q[-1] < 0:
            raise UsageError("degree must be non-negative")
        if len(q) == 4 and q[0] < 1:
            raise UsageError("triple groups need i >= 1")
    return list(cfg.queries)


def _query_group(D: FilteredComplex, q: Query) -> AbelianGroup:
    if len(q) == 3:
        i, j, n = q
        return persistent_group(D, i, j, n)
    i, j, k, n = q
    return triple_group(D, i, j, k, n)


def _query_name(q: Query) -> str:
    return "H^{" + ",".join(map(str, q[:-1])) + "}_" + str(q[-1])


def cmd_persist(cfg: RunConfig, loaded: Loaded) -> str:
    C = loaded.complex
    queries = _expand_queries(cfg, C, default_all=True)
    rho = _reduce(cfg, C)
    D = rho.dst
    results = []
    for q in queries:
        g = _query_group(D, q)
        gens = [_generator_repr(C, rho.map_chain_back(x)) for x in g.generators] if cfg.emit_generators else None
        results.append((q, g, gens))
    if cfg.fmt == "json":
        return json.dumps({"steps": C.steps, "queries": [
            dict(query=list(q), name=_query_name(q), **_group_json(g, gens)) for q, g, gens in results
        ]}, indent=2) + "\n"
    lines = []
    for q, g, gens in results:
        lines.append(f"Persistent Homology {_query_name(q)}")
        for idx, label in enumerate(g.labels()):
            lines.append(f"Component {label}")
            if gens is not None:
                lines.append(f"  generator: {json.dumps(gens[idx])}")
    return "\n".join(lines) + "\n"


def cmd_generators(cfg: RunConfig, loaded: Loaded) -> str:
    C = loaded.complex
    queries = _expand_queries(cfg, C, default_all=False)
    rho = _reduce(cfg, C)
    D = rho.dst
    results = []
    for q in queries:
        g = _query_group(D, q)
        results.append((q, g, [_generator_repr(C, rho.map_chain_back(x)) for x in g.generators]))
    if cfg.fmt == "json":
        return json.dumps({"queries": [
            dict(query=list(q), name=_query_name(q), **_group_json(g, gens)) for q, g, gens in results
        ]}, indent=2) + "\n"
    lines = []
    for q, g, gens in results:
        lines.append(f"Generators of {_query_name(q)} = {g}")
        for label, gen in zip(g.labels(), gens):
            lines.append(f"{label}: {json.dumps(gen)}")
    return "\n".join(lines) + "\n"


def cmd_barcode(cfg: RunConfig, loaded: Loaded) -> str:
    C = loaded.complex
    rho = _reduce(cfg, C)
    bc = barcode(rho.dst, generators=cfg.emit_generators, reduction=rho)
    if cfg.emit_generators:
        bars = []
        for b in bc.bars:
            gen = None
            if b.generator is not None:
                gen = tuple((_label(C, cid), v) for cid, v in b.generator)
            bars.append(Bar(b.dim, b.birth, b.death, b.label, gen))
        bc = Barcode(bc.steps, tuple(bars))
    fmt = cfg.fmt or "json"
    if fmt == "svg":
        return bc.to_svg()
    if fmt == "json":
        return bc.to_json() + "\n"
    lines = [f"barcode over {bc.steps} steps"]
    for b in bc.bars:
        end = "inf" if b.death is None else str(b.death)
        lines.append(f"H{b.dim} [{b.birth}, {end}) {b.label}")
    return "\n".join(lines) + "\n"


COMMANDS = {
    "info": cmd_info,
    "reduce": cmd_reduce,
    "homology": cmd_homology,
    "persist": cmd_persist,
    "barcode": cmd_barcode,
    "generators": cmd_generators,
}


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(text)


def run(cfg: RunConfig) -> int:
    if cfg.fmt == "svg" and cfg.command != "barcode":
        raise UsageError("--format svg is only available for barcode")
    if cfg.threads < 1:
        raise UsageError("--threads must be at least 1")
    loaded = load(cfg)
    text = COMMANDS[cfg.command](cfg, loaded)
    try:
        _emit(text, cfg.out)
    except OSError as exc:
        raise UsageError(f"cannot write {cfg.out}: {exc.strerror}") from None
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return run(config_from_args(ns))
    except InvariantViolation as exc:
        print(f"morseward: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (ImageFormatError, ComplexFormatError, FrameNestingError, InvalidComplexError) as exc:
        print(f"morseward: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (MorsewardError, ValueError) as exc:
        print(f"morseward: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
