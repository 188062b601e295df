"""Command-line entry point: ``reflab <subcommand>``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from . import affine, analysis
from .core import DEFAULT_CAP, CoxeterMatrix, generate_slice, load_matrix, universal
from .errors import InvalidMatrix, ReflabError, SliceTooLarge
from .orders import (
    AInfinityBlock,
    Backward,
    Lexicographic,
    a_infinity_order,
    sort_truncation,
    verify_reflection_order,
)
from .scalars import Mode, fmt, to_exact
from .subgroups import barycentric, dihedral_closure, maximal_dihedral

log = logging.getLogger("reflab")

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_CAP = 0, 1, 2, 3


class ParseError(ReflabError):
    """Bad command-line value or config file."""


# --- helpers ------------------------------------------------------------------

def cap_from_env(default: int = DEFAULT_CAP) -> int:
    raw = os.environ.get("REFLAB_CAP")
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"REFLAB_CAP must be an integer, got {raw!r}") from None


def _ints(text: str, name: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ParseError(f"{name}: expected comma-separated integers, got {text!r}") from None


def parse_spec(text: str, rank: int):
    """``lex:1,2,3`` (1-based simple-root order), ``backward:<spec>``, ``ainf``."""
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    if kind == "backward":
        return Backward(parse_spec(arg, rank))
    if kind == "lex":
        order = _ints(arg, "lex") if arg else list(range(1, rank + 1))
        if sorted(order) != list(range(1, rank + 1)):
            raise ParseError(f"lex order must permute 1..{rank}")
        return Lexicographic.permutation([i - 1 for i in order], rank)
    if kind == "ainf":
        return AInfinityBlock()
    raise ParseError(f"unknown order spec {text!r}")


def _matrix(args) -> tuple:
    if getattr(args, "matrix", None):
        matrix, mode = load_matrix(args.matrix)
    else:
        matrix, mode = universal(3), None
    if getattr(args, "mode", None):
        mode = Mode(args.mode)
    return matrix, mode


def _slice(matrix: CoxeterMatrix, depth: int, mode, cap: int):
    return generate_slice(matrix, depth, mode, cap=cap)


def _write_csv(rows: list, header: list, out: Optional[str]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    _emit(buf.getvalue(), out)


def _emit(text: str, out: Optional[str]) -> None:
    if out and out != "-":
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# --- subcommands ----------------------------------------------------------------

def cmd_roots(args, cap: int) -> int:
    matrix, mode = _matrix(args)
    sl = _slice(matrix, args.depth, mode, cap)
    n = sl.rank
    rows = []
    for r in sl:
        pid, letter = r.parent if r.parent else ("", "")
        rows.append([r.id, r.depth, *[fmt(x) for x in r.coeffs], pid, "" if letter == "" else letter + 1])
    _write_csv(rows, ["id", "depth", *[f"coeff_{i + 1}" for i in range(n)], "parent_id", "parent_letter"], args.out)
    if args.normroots:
        from .svg import normroots_rows
        _write_csv(normroots_rows(sl), ["id", *[f"x{i + 1}" for i in range(n)], "qvalue_sign"], args.normroots)
    return EXIT_OK


def cmd_dihedral(args, cap: int) -> int:
    matrix, mode = _matrix(args)
    sl = _slice(matrix, args.depth, mode, cap)
    pair = _ints(args.pair, "--pair")
    if len(pair) != 2 or not all(0 <= x < len(sl) for x in pair):
        raise ParseError(f"--pair needs two root ids in 0..{len(sl) - 1}")
    sub = (maximal_dihedral if args.maximal else dihedral_closure)(pair[0], pair[1], sl)
    _emit(_dump({
        "pair": pair,
        "canonical_pair": list(sub.canonical_pair),
        "canonical_coeffs": [[fmt(x) for x in v] for v in sub.canonical_coeffs],
        "bform": fmt(sub.bform),
        "classification": str(sub.classification),
        "roots_in_slice": list(sub.positive_roots_in_slice),
    }), args.out)
    return EXIT_OK


def cmd_order(args, cap: int) -> int:
    if args.spec.lower().startswith("ainf"):
        _, _, n = args.spec.partition(":")
        t = a_infinity_order(int(n) if n else 6)
    else:
        matrix, mode = _matrix(args)
        sl = _slice(matrix, args.depth, mode, cap)
        t = sort_truncation(sl, parse_spec(args.spec, sl.rank))
    rows = [[k, rid, *[fmt(x) for x in t.slice.coeffs(rid)]] for k, rid in enumerate(t.sorted_ids)]
    n = t.slice.rank
    _write_csv(rows, ["position", "root_id", *[f"coeff_{i + 1}" for i in range(n)]], args.out)
    if args.verify:
        rep = verify_reflection_order(t)
        sys.stdout.write(_dump(rep.violations and [list(v) for v in rep.violations] or []))
        return EXIT_OK if rep.ok else EXIT_FAIL
    return EXIT_OK


def cmd_affine_order(args, cap: int) -> int:
    model = affine.affine_model(args.type)
    sl = generate_slice(model.matrix, args.depth, cap=cap)
    wa, wb = affine.default_words(model.name, args.level)
    t = affine.two_sided_order(wa, wb, sl)
    beta_id = {b: k for k, b in enumerate(model.datum.roots)}
    rows = []
    for k, rid in enumerate(t.sorted_ids):
        ar = model.to_affine(sl.coeffs(rid))
        rows.append([k, rid, beta_id[ar.beta], ar.level, *[fmt(x) for x in sl.coeffs(rid)]])
    _write_csv(rows, ["position", "root_id", "beta_id", "level",
                      *[f"coeff_{i + 1}" for i in range(model.rank)]], args.out)
    if not args.verify:
        return EXIT_OK
    rep = verify_reflection_order(t)
    plus = affine.check_inversion_identity(wa, model, 1, args.level)
    minus = affine.check_inversion_identity(wb, model, -1, args.level)
    summary = {
        "type": model.name,
        "depth": args.depth,
        "word_plus": str(wa),
        "word_minus": str(wb),
        "verify": rep.to_json(),
        "inversions_plus": plus.to_json(),
        "inversions_minus": minus.to_json(),
    }
    sys.stderr.write(_dump(summary))
    return EXIT_OK if rep.ok and plus.ok and minus.ok else EXIT_FAIL


def _depths(text: Optional[str], default: list) -> list:
    ds = _ints(text, "--depths") if text else default
    if any(b <= a for a, b in zip(ds, ds[1:])):
        raise ParseError("--depths must be strictly increasing")
    return ds


def run_lemma(lemma: str, matrix: CoxeterMatrix, depths: list, spec_text: str, cap: int) -> dict:
    top = max(depths)
    sl = generate_slice(matrix, top, cap=cap)
    if lemma == "c-range":
        return analysis.certify_c_range(sl)
    if lemma == "density":
        lo, hi = (depths + depths)[:2] if len(depths) == 1 else depths[:2]
        return analysis.certify_density(sl, lo, hi)
    if lemma == "coherence":
        return analysis.fiber_coherence(sl)
    spec = parse_spec(spec_text, matrix.rank)
    if lemma == "blocks":
        counts, violations = {}, []
        for d in range(min(depths), top + 1):
            try:
                bd = analysis.block_decompose_universal(sort_truncation(sl.truncate(d), spec))
                counts[str(d)] = len(bd.blocks)
            except ReflabError as exc:
                violations.append({"depth": d, "error": str(exc)})
        return analysis.report("blocks", {"depths": [min(depths), top], "spec": spec_text}, violations, {"blocks": counts})
    if len(depths) < 2:
        raise ParseError(f"{lemma} needs --depths d,D")
    d, D = depths[0], depths[1]
    if lemma == "stability":
        rep = analysis.stability(spec, matrix, d, D, probe=sl)
        return analysis.report("stability", {"d": d, "D": D, "spec": spec_text}, [], rep.to_json())
    if lemma == "char3":
        c, _ = analysis.transverse_fiber(sl.truncate(d), axis=1)
        U = [r.id for r in sl if barycentric(r.coeffs, 1, sl.mode) == c]
        res = analysis.char3_diagnostic(spec, matrix, U, d, D, probe=sl)
        bad = [] if res["growing"] == res["pairs"] else [{"stable_pairs": res["pairs"] - res["growing"]}]
        return analysis.report("char3", {"d": d, "D": D, "spec": spec_text, "axis": 2, "c": fmt(c)}, bad,
                               {k: v for k, v in res.items() if k != "growing_pairs"})
    raise ParseError(f"unknown lemma {lemma!r}")


def cmd_certify(args, cap: int) -> int:
    matrix, _ = _matrix(args)
    depths = _depths(args.depths, [6])
    rep = run_lemma(args.lemma, matrix, depths, args.spec, cap)
    _emit(_dump(rep), args.json)
    return EXIT_FAIL if rep["status"] == "fail" else EXIT_OK


# --- certify-all ------------------------------------------------------------------

@dataclass
class RunConfig:
    matrix: Optional[str] = None  # defaults to the rank-3 universal group
    universal_depth: int = 8
    affine_depth: int = 6
    affine_level: int = 8
    density_low: int = 4
    spec: str = "lex:1,2,3"
    affine_types: list = field(default_factory=lambda: ["A1~", "A2~"])
    seed: int = 0
    json: Optional[str] = None

    @classmethod
    def load(cls, path: str) -> "RunConfig":
        p = Path(path)
        text = p.read_text(encoding="utf-8")
        try:
            if p.suffix.lower() == ".toml":
                import tomli
                data = tomli.loads(text)
            else:
                data = json.loads(text)
        except Exception as exc:  # both decoders raise their own ValueError subclasses
            raise ParseError(f"{path}: {exc}") from None
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ParseError(f"{path}: unknown config keys {sorted(unknown)}")
        cfg = cls(**data)
        if cfg.density_low >= cfg.universal_depth or cfg.universal_depth < 5 or cfg.affine_depth < 3:
            raise ParseError("config needs density_low < universal_depth, universal_depth >= 5, affine_depth >= 3")
        return cfg


def certify_all(cfg: RunConfig, cap: int) -> dict:
    if cfg.matrix:
        matrix, _ = load_matrix(cfg.matrix)
    else:
        matrix = universal(3)
    d = cfg.universal_depth
    results = []
    results.append(run_lemma("c-range", matrix, [d], cfg.spec, cap))
    results.append(run_lemma("density", matrix, [cfg.density_low, d], cfg.spec, cap))
    results.append(run_lemma("coherence", matrix, [min(d, 6)], cfg.spec, cap))
    results.append(run_lemma("blocks", matrix, [4, d], cfg.spec, cap))

    # universal lexicographic stability: split counts must grow along the ladder
    spec = parse_spec(cfg.spec, matrix.rank)
    sl = generate_slice(matrix, d, cap=cap)
    ladder = [(d - 4, d - 1), (d - 3, d)]
    splits = [analysis.stability(spec, matrix, a, b, probe=sl).split_count for a, b in ladder]
    results.append(analysis.report(
        "stability", {"spec": cfg.spec, "ladder": ladder},
        [] if splits[1] > splits[0] else [{"splits": splits}], {"splits": splits}))
    for a, b in ladder:
        results.append(run_lemma("char3", matrix, [a, b], cfg.spec, cap))

    for kind in cfg.affine_types:
        results.extend(_affine_checks(kind, cfg, cap))
    statuses = [r["status"] for r in results]
    overall = "fail" if "fail" in statuses else ("inconclusive" if "inconclusive" in statuses else "pass")
    return {
        "config": asdict(cfg) | {"json": None},
        "results": results,
        "status": overall,
        "summary": {s: statuses.count(s) for s in ("pass", "inconclusive", "fail")},
    }


def _affine_checks(kind: str, cfg: RunConfig, cap: int) -> list:
    model = affine.affine_model(kind)
    D = cfg.affine_depth
    sl = generate_slice(model.matrix, D, cap=cap)
    spec = affine.two_sided_spec(model.name, cfg.affine_level)
    t = sort_truncation(sl, spec)
    rep = verify_reflection_order(t)
    out = [analysis.report(f"two-sided-verify[{model.name}]", {"depth": D},
                           [list(v) for v in rep.violations] + [list(p) for p in rep.dihedral_violations],
                           {"roots": rep.roots, "planes_checked": rep.planes_checked})]
    for sign, word in ((1, spec.word_a), (-1, spec.word_b)):
        inv = affine.check_inversion_identity(word, model, sign, cfg.affine_level, ambient=sl)
        out.append(analysis.report(
            f"inversion-identity[{model.name},{'+' if sign > 0 else '-'}]",
            {"word": str(word), "level_bound": cfg.affine_level},
            [] if inv.ok else [inv.discrepancy], {"letters": inv.letters_used}))
    # scattered regime: the number of split adjacencies stays put along the ladder
    ladder = [(a, a + 1) for a in range(D - 3, D)]
    splits = [analysis.stability(spec, model.matrix, a, b, probe=sl).split_count for a, b in ladder]
    out.append(analysis.report(f"stability[{model.name}]", {"ladder": ladder},
                               [] if len(set(splits)) == 1 else [{"splits": splits}], {"splits": splits}))
    return out


def cmd_certify_all(args, cap: int) -> int:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    if args.json:
        cfg.json = args.json
    summary = certify_all(cfg, cap)
    _emit(_dump(summary), cfg.json)
    for r in summary["results"]:
        log.info("%-32s %s", r["lemma"], r["status"])
    return EXIT_FAIL if summary["status"] == "fail" else EXIT_OK


# --- svg -----------------------------------------------------------------------------

def _fiber_arg(text: str) -> tuple:
    parts = dict(p.split("=", 1) for p in text.split(",") if "=" in p)
    try:
        return int(parts["axis"]) - 1, to_exact(parts["c"])
    except (KeyError, ValueError) as exc:
        raise ParseError(f"--highlight-fiber expects axis=I,c=P/Q: {exc}") from None


def cmd_svg(args, cap: int) -> int:
    from .svg import SvgOptions, normroots_rows, render_svg

    matrix, mode = _matrix(args)
    sl = _slice(matrix, args.depth, mode, cap)
    opts = SvgOptions(title=args.title)
    opts.fibers = [_fiber_arg(f) for f in args.highlight_fiber or []]
    for seg in args.highlight_segment or []:
        ids, _, labels = seg.partition(":")
        pair = _ints(ids, "--highlight-segment")
        if len(pair) != 2:
            raise ParseError("--highlight-segment expects a,b[:label_a,label_b]")
        opts.segments.append((*pair, *(labels.split(",", 1) if labels else ("", ""))))
    _emit(render_svg(sl, opts), args.out)
    if args.normroots:
        _write_csv(normroots_rows(sl), ["id", *[f"x{i + 1}" for i in range(sl.rank)], "qvalue_sign"], args.normroots)
    return EXIT_OK


# --- entry point -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="reflab", description="Root systems and reflection orders of Coxeter groups.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, depth=True):
        sp.add_argument("--matrix", help="Coxeter matrix file (JSON or TOML); default: rank-3 universal")
        sp.add_argument("--mode", choices=[m.value for m in Mode])
        if depth:
            sp.add_argument("--depth", type=int, default=4)

    sp = sub.add_parser("roots", help="list the roots of a depth slice as CSV")
    common(sp)
    sp.add_argument("--out")
    sp.add_argument("--normroots", help="also write normalized coordinates to this CSV")
    sp.set_defaults(func=cmd_roots)

    sp = sub.add_parser("dihedral", help="dihedral subgroup generated by two roots")
    common(sp)
    sp.add_argument("--pair", required=True, help="two root ids, e.g. 3,4")
    sp.add_argument("--maximal", action="store_true", help="use every slice root on the plane")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_dihedral)

    sp = sub.add_parser("order", help="sort a slice by a reflection order")
    common(sp)
    sp.add_argument("--spec", default="lex:1,2,3", help="lex:1,2,3 | backward:lex:... | ainf:N")
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_order)

    sp = sub.add_parser("affine-order", help="two-sided order of an affine group")
    sp.add_argument("--type", required=True, choices=sorted(affine.BUILTIN))
    sp.add_argument("--depth", type=int, default=6)
    sp.add_argument("--level", type=int, default=8, help="level bound for the inversion identity")
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_affine_order)

    sp = sub.add_parser("certify", help="run one finite certifier")
    common(sp, depth=False)
    sp.add_argument("--lemma", required=True, choices=["c-range", "density", "blocks", "char3", "stability", "coherence"])
    sp.add_argument("--depths", help="comma-separated, e.g. 4,8")
    sp.add_argument("--spec", default="lex:1,2,3")
    sp.add_argument("--json")
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("certify-all", help="run every certifier and write a JSON summary")
    sp.add_argument("--config", help="RunConfig file (JSON or TOML)")
    sp.add_argument("--json")
    sp.set_defaults(func=cmd_certify_all)

    sp = sub.add_parser("svg", help="barycentric picture of a rank-3 slice")
    common(sp)
    sp.add_argument("--highlight-fiber", action="append", help="axis=1,c=2/3 (repeatable)")
    sp.add_argument("--highlight-segment", action="append", help="a,b[:label_a,label_b] (repeatable)")
    sp.add_argument("--title")
    sp.add_argument("--out")
    sp.add_argument("--normroots")
    sp.set_defaults(func=cmd_svg)
    return p


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cap = cap_from_env()
        return args.func(args, cap)
    except SliceTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ParseError, InvalidMatrix, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ReflabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
