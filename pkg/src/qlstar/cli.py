"""Command-line front end.

Every command takes a problem source: a JSON problem file or one of the
built-in fixtures ``fixture:A`` ... ``fixture:D`` and ``fixture:D+twin``.
Rays on the command line are text encodings such as ``"(0,_,-1)"`` or
0-based universe indices.

Exit codes: 0 ok, 1 parse error, 2 validation or precondition failure
(including failed theorem checks), 3 internal cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence

from . import __version__
from . import qlpaths as P
from .checks import run_suite
from .fixtures import basis_rays, fixture_form, twin_universe
from .qform import FormError, GramForm, Vector, eval_b, eval_q, validate
from .qlcore import CapExceeded, PreconditionError, Universe, _bits, all_cliques, build_universe
from .qlcore import max_ql_sets, tilde_c
from .rayspace import RayError, cs_rays, format_ray, parse_ray, ray_from_json, ray_of, ray_to_json
from .tscalar import DENSE, DISCRETE, SemifieldError, format_scalar, parse_scalar

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_CAP = 0, 1, 2, 3
DEFAULT_CAP = 2000


class ParseError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # bad command lines are parse errors too
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


@dataclass
class Problem:
    form: GramForm
    generators: List
    closure: str = "none"
    cap: int = DEFAULT_CAP
    seed: int = 0
    name: str = "file"

    def universe(self) -> Universe:
        return build_universe(self.form, self.generators, self.closure, self.cap)

    def to_json(self) -> dict:
        out = self.form.to_json()
        out["universe"] = {"generators": [ray_to_json(g) for g in self.generators],
                           "closure": self.closure, "cap": self.cap}
        out["seed"] = self.seed
        return out


# -- problem files -------------------------------------------------------------

def _syntax_scalar(text, where: str):
    # syntax is checked against the dense spec; integrality is a validation matter
    try:
        parse_scalar(text, DENSE)
    except SemifieldError as exc:
        raise ParseError(f"{where}: {exc}") from None


def _closure_text(c) -> str:
    if c in (None, "none", "subset_sums"):
        return c or "none"
    if isinstance(c, dict) and set(c) == {"skeleton"}:
        return f"skeleton({int(c['skeleton'])})"
    if isinstance(c, str):
        m = re.fullmatch(r"skeleton(?:\((\d+)\))?", c.strip())
        if m:
            return f"skeleton({m.group(1) or 1})"
    raise ParseError(f"universe.closure: unknown closure {c!r}")


def _generator(g, spec, where: str):
    try:
        if isinstance(g, dict):
            if set(g) != {"vector"}:
                raise ParseError(f"{where}: expected {{'vector': [...]}}")
            ents = g["vector"]
            for k, s in enumerate(ents):
                _syntax_scalar(s, f"{where}.vector[{k}]")
            return ray_of(Vector([parse_scalar(s, spec) for s in ents], spec))
        return ray_from_json(g, spec)
    except (RayError, SemifieldError, FormError) as exc:
        raise ParseError(f"{where}: {exc}") from None


def load_problem(data: dict, name: str = "file") -> Problem:
    """Build a problem from decoded JSON; raises ParseError or validation errors."""
    if not isinstance(data, dict):
        raise ParseError("problem file must be a JSON object")
    kind = data.get("semifield", "dense")
    if kind not in ("dense", "discrete"):
        raise ParseError(f"semifield: expected 'dense' or 'discrete', got {kind!r}")
    spec = DISCRETE if kind == "discrete" else DENSE
    diag = data.get("diag")
    if not isinstance(diag, list):
        raise ParseError("diag: expected a list of scalars")
    for k, s in enumerate(diag):
        _syntax_scalar(s, f"diag[{k}]")
    cross = []
    for k, c in enumerate(data.get("cross", [])):
        if not (isinstance(c, list) and len(c) == 3 and all(isinstance(v, int) for v in c[:2])):
            raise ParseError(f"cross[{k}]: expected [i, j, scalar] with 1-based i, j")
        _syntax_scalar(c[2], f"cross[{k}]")
        cross.append((c[0] - 1, c[1] - 1, c[2]))
    selfs = data.get("self", "balanced")
    if selfs != "balanced":
        if not isinstance(selfs, list):
            raise ParseError("self: expected 'balanced' or a list of scalars")
        for k, s in enumerate(selfs):
            _syntax_scalar(s, f"self[{k}]")
    if "dim" in data and data["dim"] != len(diag):
        raise FormError(f"dim is {data['dim']} but diag has {len(diag)} entries")
    form = GramForm(diag, cross, selfs, spec)
    uni = data.get("universe", {})
    if not isinstance(uni, dict):
        raise ParseError("universe: expected an object")
    gens = uni.get("generators")
    if gens is None:
        gens = basis_rays(form.n)
    else:
        if not isinstance(gens, list):
            raise ParseError("universe.generators: expected a list")
        gens = [_generator(g, spec, f"universe.generators[{k}]") for k, g in enumerate(gens)]
    closure = _closure_text(uni.get("closure", "none"))
    cap = uni.get("cap", DEFAULT_CAP)
    seed = data.get("seed", 0)
    if not isinstance(cap, int) or not isinstance(seed, int):
        raise ParseError("universe.cap and seed must be integers")
    return Problem(form, gens, closure, cap, seed, name)


def fixture_problem(key: str) -> Problem:
    key = key.upper()
    if key == "D+TWIN":
        U = twin_universe()
        return Problem(U.form, list(U.rays), name="D+twin")
    try:
        f = fixture_form(key)
    except KeyError:
        raise ParseError(f"unknown fixture {key!r}; use A, B, C, D or D+twin") from None
    return Problem(f, basis_rays(f.n), name=key)


def read_problem(source: str) -> Problem:
    if source.lower().startswith("fixture:"):
        return fixture_problem(source.split(":", 1)[1])
    try:
        with open(source, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {source}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return load_problem(data, source)


def parse_vector(text: str, spec, where: str = "vector") -> Vector:
    s = text.strip()
    if s[:1] in "([" and s[-1:] in ")]":
        s = s[1:-1]
    parts = [p.strip() for p in s.split(",")]
    for k, p in enumerate(parts):
        _syntax_scalar(p, f"{where}[{k}]")
    return Vector([parse_scalar(p, spec) for p in parts], spec)


def parse_ray_arg(text: str, spec, where: str = "ray"):
    s = text.strip()
    if re.fullmatch(r"\d+", s):
        return int(s)
    try:
        return parse_ray(s, spec)
    except RayError as exc:
        raise ParseError(f"{where}: {exc}") from None


def _rays(U: Universe, texts: Sequence[str]) -> List[int]:
    return [U.idx(parse_ray_arg(t, U.form.spec, f"ray {k + 1}")) for k, t in enumerate(texts)]


# -- output helpers ------------------------------------------------------------

def emit(obj) -> None:
    if isinstance(obj, str):
        sys.stdout.write(obj if obj.endswith("\n") else obj + "\n")
    else:
        sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _labels(U: Universe, idx) -> List[str]:
    return [U.label(i) for i in idx]


def _path_json(U: Universe, p) -> dict:
    p = P.as_path(U, p)
    return {"length": len(p) - 1, "rays": _labels(U, p)}


# -- commands ------------------------------------------------------------------

def cmd_validate(args) -> int:
    prob = read_problem(args.problem)
    U = prob.universe()
    rep = validate(prob.form)
    emit({"ok": rep.ok, "violations": list(rep.violations), "rays": len(U),
          "problem": prob.to_json()})
    return EXIT_OK if rep.ok else EXIT_INVALID


def cmd_eval(args) -> int:
    prob = read_problem(args.problem)
    f = prob.form
    vs = [parse_vector(t, f.spec, f"vector {k + 1}") for k, t in enumerate(args.vectors)]
    if args.pair:
        if len(vs) != 2:
            raise PreconditionError("--pair needs exactly two vectors")
        emit(format_scalar(eval_b(f, vs[0], vs[1])))
        return EXIT_OK
    for v in vs:
        emit(format_scalar(eval_q(f, v)))
    return EXIT_OK


def cmd_cs(args) -> int:
    prob = read_problem(args.problem)
    f = prob.form
    rays = []
    for k, t in enumerate((args.ray_a, args.ray_b)):
        r = parse_ray_arg(t, f.spec, f"ray {k + 1}")
        rays.append(prob.universe().rays[r] if isinstance(r, int) else r)
    for r in rays:
        if len(r) != f.n:
            raise FormError(f"ray {format_ray(r)} does not match dimension {f.n}")
    emit(str(cs_rays(f, rays[0], rays[1])))
    return EXIT_OK


def cmd_graph(args) -> int:
    U = read_problem(args.problem).universe()
    g = P.decorate(U) if args.decorated else P.build_ql_graph(U)
    emit(g.to_dot() if args.dot else g.to_json())
    return EXIT_OK


def cmd_stars(args) -> int:
    U = read_problem(args.problem).universe()
    rows = []
    for i in range(len(U)):
        rows.append({"ray": U.label(i),
                     "star": _labels(U, _bits(U.adj[i])),
                     "up": _labels(U, _bits(U.up[i])),
                     "down": _labels(U, _bits(U.down[i]))})
    emit({"rays": len(U), "stars": rows})
    return EXIT_OK


def cmd_cliques(args) -> int:
    U = read_problem(args.problem).universe()
    if args.containing:
        C = _rays(U, args.containing)
        sets = max_ql_sets(U, C)
        out = {"containing": _labels(U, C),
               "maximal": [_labels(U, sorted(s)) for s in sets],
               "tilde": _labels(U, sorted(tilde_c(U, C)))}
    else:
        cl = all_cliques(U)
        top = [m for m in cl if not any(k != m and k & m == m for k in cl)]
        out = {"maximal": [_labels(U, _bits(m)) for m in top]}
    emit(out)
    return EXIT_OK


def cmd_path(args) -> int:
    U = read_problem(args.problem).universe()
    a, b = _rays(U, [args.start, args.end])
    p = P.minimal_path(U, a, b)
    if p is None:
        raise PreconditionError(f"{U.label(a)} and {U.label(b)} are not connected")
    emit(_path_json(U, p))
    return EXIT_OK


def _reduction_json(U, red) -> dict:
    out = {"path": _labels(U, red.path), "kind": "basic" if red.direction == "basic" else "elementary"}
    if red.direction != "basic":
        out.update({"position": red.position, "pillar": U.label(red.pillar),
                    "direction": red.direction, "bridge": _labels(U, red.bridge.path),
                    "support": list(red.bridge.support)})
    return out


def cmd_reduce(args) -> int:
    U = read_problem(args.problem).universe()
    p = _rays(U, args.rays)
    if args.mode == "basic":
        final, trace = P.reduce_to_direct(U, p)
        steps = []
        prev = tuple(p)
        for q in trace:
            # replay the first-position rule to name the chord that was used
            i = next(i for i in range(len(prev))
                     if (r := P.basic_reduction(U, prev, i)) is not None and r.indices == q.indices)
            s = i + len(prev) - len(q) + 1
            steps.append({"path": q.labels(), "kind": "basic", "position": i,
                          "bridge": _labels(U, (prev[i], prev[s]))})
            prev = q.indices
    else:
        final, trace = P.reduce_elementary(U, p)
        steps = [_reduction_json(U, r) for r in trace]
    emit({"input": _path_json(U, p), "mode": args.mode, "steps": steps,
          "result": _path_json(U, final), "direct": P.is_direct(U, final)})
    return EXIT_OK


def cmd_anchors(args) -> int:
    U = read_problem(args.problem).universe()
    p = _rays(U, args.rays)
    S = P.anchor_set(U, p, args.strategy)
    if args.dot:
        emit(P.diagram_to_dot(P.anchor_diagram(U, p, S)))
        return EXIT_OK
    out = {"path": _path_json(U, p), "m": S.m}
    out.update(S.to_json(U))
    out["anchors"] = _labels(U, S.anchors)
    out["bound m <= n <= 2m"] = S.bound_holds()
    emit(out)
    return EXIT_OK


def cmd_flocks(args) -> int:
    U = read_problem(args.problem).universe()
    p = _rays(U, args.rays)
    S = P.anchor_set(U, p, args.strategy)
    fp = P.flocks(U, p, S)
    out = {"path": _path_json(U, p), "anchors": _labels(U, S.anchors)}
    out.update(fp.to_json())
    out["tracks"] = [[t.start, t.end] for t in P.tracks(U, S)]
    out["flocky"] = P.is_flocky(U, p, S)
    emit(out)
    return EXIT_OK


def cmd_modify(args) -> int:
    U = read_problem(args.problem).universe()
    p = _rays(U, args.rays)
    S = P.anchor_set(U, p, args.strategy)
    trs = P.tracks(U, S)
    out = {"input": _path_json(U, p), "anchors": _labels(U, S.anchors),
           "tracks": [[t.start, t.end] for t in trs]}
    if not trs:
        out.update({"result": _path_json(U, p), "note": "no tracks"})
    elif args.track is not None:
        if not 0 <= args.track < len(trs):
            raise PreconditionError(f"track {args.track} out of range (0..{len(trs) - 1})")
        mod = P.flock_modification(U, p, S, trs[args.track])
        out.update({"result": _path_json(U, mod.path), "inserted": _labels(U, mod.inserted),
                    "flock": [mod.s, mod.r]})
    else:
        q, steps, skipped = P.total_flock_modification(U, p, S)
        out.update({"result": _path_json(U, q), "modified": len(steps),
                    "skipped": [[t.start, t.end] for t in skipped]})
    emit(out)
    return EXIT_OK


def cmd_check(args) -> int:
    universes = None
    if args.problem:
        prob = read_problem(args.problem)
        universes = {prob.name: prob.universe()}
        seed = prob.seed if args.seed is None else args.seed
    else:
        seed = 0 if args.seed is None else args.seed
    results = run_suite(args.suite, seed, args.samples, universes)
    fails = [r.name for r in results if r.status == "fail"]
    known = [r.name for r in results if r.status == "known-defect"]
    emit({"suite": args.suite, "seed": seed, "samples": args.samples,
          "results": [r.to_json() for r in results],
          "failed": fails, "known_defects": known})
    bad = fails + (known if args.strict else [])
    return EXIT_INVALID if bad else EXIT_OK


# -- entry point ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qlstar", description="Supertropical quadratic forms, QL-stars and QL-paths.")
    ap.add_argument("--version", action="version", version=f"qlstar {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def cmd(name, fn, help_text, path_args=False):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("problem", help="problem file or fixture:A..D, fixture:D+twin")
        if path_args:
            sp.add_argument("rays", nargs="+", help="path rays as encodings or universe indices")
        sp.set_defaults(func=fn)
        return sp

    cmd("validate", cmd_validate, "check a problem file and print its normalized form")
    sp = cmd("eval", cmd_eval, "evaluate q on vectors")
    sp.add_argument("vectors", nargs="+", help='vectors such as "(t:0, 0, g:1)"')
    sp.add_argument("--pair", action="store_true", help="print b(x, y) for two vectors instead")
    sp = cmd("cs", cmd_cs, "CS-ratio of two rays")
    sp.add_argument("ray_a")
    sp.add_argument("ray_b")
    sp = cmd("graph", cmd_graph, "QL-graph of the universe")
    sp.add_argument("--decorated", action="store_true", help="add arrows for strict star inclusion")
    fmt = sp.add_mutually_exclusive_group()
    fmt.add_argument("--dot", action="store_true")
    fmt.add_argument("--json", action="store_true", help="default")
    cmd("stars", cmd_stars, "star, upset and downset of every ray")
    sp = cmd("cliques", cmd_cliques, "maximal quasilinear sets")
    sp.add_argument("--containing", nargs="+", metavar="RAY")
    sp = cmd("path", cmd_path, "a minimal QL-path between two rays")
    sp.add_argument("start")
    sp.add_argument("end")
    sp = cmd("reduce", cmd_reduce, "reduce a QL-path to a direct one", path_args=True)
    sp.add_argument("--mode", choices=("basic", "elementary"), default="basic")
    for name, fn, text in (("anchors", cmd_anchors, "anchor set of a direct path"),
                           ("flocks", cmd_flocks, "flock partition of a direct path"),
                           ("modify", cmd_modify, "flock modification of a minimal path")):
        sp = cmd(name, fn, text, path_args=True)
        sp.add_argument("--strategy", choices=("greedy", "special"), default="greedy")
        if name == "anchors":
            sp.add_argument("--dot", action="store_true", help="emit the anchor diagram")
        if name == "modify":
            sp.add_argument("--track", type=int, help="modify only this track (0-based)")
    sp = sub.add_parser("check", help="run the theorem checks")
    sp.add_argument("problem", nargs="?", help="problem file; default is the built-in fixtures")
    sp.add_argument("--fixtures", action="store_true", help="use the built-in fixtures (default)")
    sp.add_argument("--suite", choices=("core", "convexity", "paths", "all"), default="all")
    sp.add_argument("--samples", type=int, default=10)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--strict", action="store_true", help="treat known defects as failures")
    sp.set_defaults(func=cmd_check)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "fixtures", False) and args.problem:
        ap.error("give either a problem file or --fixtures")
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"qlstar: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapExceeded as exc:
        print(f"qlstar: cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (FormError, PreconditionError, SemifieldError, RayError) as exc:
        print(f"qlstar: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
