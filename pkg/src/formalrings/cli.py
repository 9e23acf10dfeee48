"""Command line entry point: validate, analyze, generate, glue, enumerate."""

from __future__ import annotations

import argparse
import os
import sys
import time

from . import config
from .analysis import (
    Permutation,
    check_criterion,
    check_essential_criterion,
    classify,
    essential_socle_direct,
    verify_corner_prop,
    verify_fixed_point_prop,
    verify_residue_cycles,
    verify_simple_injective_cor,
    verify_structure_props,
)
from .constructions import (
    compatible_finite_fields,
    cycle_ring,
    glue_general,
    prepare_glue,
    ring_from_name,
    serial_quiver_algebra,
    support_pattern_ring,
)
from .enumerate import SUITES, EnumerationJob, run_job
from .errors import EXIT_DISCREPANCY, EXIT_USAGE, FormalRingError, SizeLimitExceeded
from .formal import build, corner
from .specio import dumps_report, emit_spec, load_ring, report_document


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _write(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _int_list(text: str | None) -> list[int]:
    if not text:
        return []
    return [int(t) for t in text.replace(" ", "").split(",") if t]


def _theorems(R, pi) -> dict:
    out = {"structure": verify_structure_props(R, pi), "fixed_points": verify_fixed_point_prop(R, pi)}
    try:
        out["simple_injectives"] = verify_simple_injective_cor(R)
    except SizeLimitExceeded as exc:
        out["simple_injectives"] = {"skipped": str(exc)}
    out["corners"] = verify_corner_prop(R, pi)
    out["residue_cycles"] = verify_residue_cycles(R, pi)
    return out


def _theorems_hold(th: dict) -> bool:
    ok = all(v["holds"] for v in th["structure"].values())
    for key in ("fixed_points", "simple_injectives", "corners", "residue_cycles"):
        if isinstance(th[key], list):
            ok = ok and all(v["holds"] for v in th[key])
    return ok


def analysis_body(R, permutation: str | None = None, essential: bool = False, theorems: bool = False) -> tuple[dict, list[str]]:
    """Report body and human-readable lines for one ring."""
    lines = []
    body = {"ring": {"name": R.name, "order": R.order, "sizes": [list(r) for r in R.sizes],
                     "row_sizes": [R.row_size(i) for i in range(R.order)]}}
    if permutation is not None:
        pi = Permutation.parse(permutation, R.order)
        if pi.n != R.order:
            raise ValueError(f"permutation {permutation} acts on {pi.n} points, ring has order {R.order}")
        rep = check_criterion(R, pi)
        body["criterion"] = rep.to_dict()
        verdict = "is" if rep.passed else "is not"
        lines.append(f"{pi} {verdict} a Nakayama permutation")
        for c in rep.failures():
            lines.append(f"  condition ({c.condition}) fails at index {c.index + 1}: {c.witness}")
        target = pi
    else:
        rep = classify(R)
        body["analysis"] = rep.to_dict()
        lines.append(rep.summary())
        target = rep.nakayama
    if essential:
        if target is None:
            body["essential"] = None
            lines.append("essential-socle conditions skipped: no Nakayama permutation")
        else:
            ess = check_essential_criterion(R, target, strict=False)
            right, rw = essential_socle_direct(R, "right", with_witness=True)
            left, lw = essential_socle_direct(R, "left", with_witness=True)
            body["essential"] = {"criterion": ess.to_dict(), "right_direct": right, "left_direct": left,
                                 "right_witness": rw, "left_witness": lw}
            lines.append(f"essential-socle conditions {'hold' if ess.passed else 'fail'}; "
                         f"direct: right {'essential' if right else 'not essential'}, left {'essential' if left else 'not essential'}")
            for c in ess.failures():
                lines.append(f"  condition ({c.condition}) fails at index {c.index + 1}: {c.witness}")
    if theorems:
        if target is None or (permutation is not None and not rep.passed):
            body["theorems"] = None
            lines.append("structural checks skipped: no Nakayama permutation")
        else:
            th = _theorems(R, target)
            body["theorems"] = th
            lines.append(f"structural checks {'hold' if _theorems_hold(th) else 'FAIL'}")
    return body, lines


# ------------------------------------------------------------------ commands

def cmd_validate(args) -> int:
    text = _read(args.path)
    R = load_ring(text)
    print(f"ok: order {R.order}, row sizes {[R.row_size(i) for i in range(R.order)]}")
    return 0


def cmd_analyze(args) -> int:
    text = _read(args.path)
    start = time.perf_counter()
    R = load_ring(text)
    body, lines = analysis_body(R, args.permutation, args.essential, args.theorems)
    meta = {"seconds": round(time.perf_counter() - start, 3)} if args.timing else None
    if args.json is not None:
        _write(dumps_report(report_document("analysis", text, body, meta)), args.json)
        if args.json == "-":
            return 0
    print("\n".join(lines))
    return 0


def _generate(args):
    g = args.generator
    if g == "cycle":
        return cycle_ring(ring_from_name(args.base), n=args.n)
    if g == "trivext":
        K = ring_from_name(args.base)
        name = args.base if args.base.startswith("trivext") else f"trivext({K.name})"
        return build([ring_from_name(name)], [[None]], name=name)
    if g == "support":
        return support_pattern_ring(args.n, _int_list(args.I), ring_from_name(args.base))
    if g == "serial":
        return serial_quiver_algebra(args.q, args.n, args.bound)
    if g == "ring":
        S = ring_from_name(args.base)
        return build([S], [[None]], name=S.name)
    raise ValueError(f"unknown generator {g}")


def cmd_generate(args) -> int:
    R = _generate(args)
    _write(emit_spec(R), args.output)
    return 0


def cmd_glue(args) -> int:
    left_text, right_text = _read(args.left), _read(args.right)
    S, S2 = load_ring(left_text), load_ring(right_text)
    I = [i - 1 for i in _int_list(args.left_corners)] or None
    J = [j - 1 for j in _int_list(args.right_corners)] or None
    pair = None
    if args.twist:
        from .rings import residue_field

        q = residue_field(S.rings[(I or [0])[0]]).residue_field.size
        pair = compatible_finite_fields(q, args.twist)
    spec = prepare_glue(S, S2, pair, I, J)
    G = glue_general(S, S2, spec=spec)
    _write(emit_spec(G), args.output)
    body, lines = analysis_body(G, essential=args.essential, theorems=args.theorems)
    n = S.order
    body["glue"] = {"left_corners": [i + 1 for i in spec.left.indices],
                    "right_corners": [j + 1 for j in spec.right.indices],
                    "twist": args.twist,
                    "expected": str(_concat(spec)),
                    "left_round_trip": corner(G, range(n), check=False).same_tables(S),
                    "right_round_trip": corner(G, range(n, G.order), check=False).same_tables(S2)}
    if args.json is not None:
        doc = report_document("glue", left_text + "\x00" + right_text, body)
        _write(dumps_report(doc), args.json)
    if args.output not in (None, "-"):
        print("\n".join(lines))
    else:
        sys.stderr.write("\n".join(lines) + "\n")
    return 0


def _concat(spec):
    from .analysis import concatenate

    return concatenate(spec.sigma, spec.sigma2)


def cmd_enumerate(args) -> int:
    menu = tuple(m for m in (args.menu or "").split(";") if m.strip())
    checks = tuple(args.checks.split(",")) if args.checks else SUITES
    if args.random:
        job = EnumerationJob(args.order, args.carrier_bound, menu, "random", args.seed, args.count, checks)
    else:
        job = EnumerationJob(args.order, args.carrier_bound, menu, "exhaustive", None, 0, checks)
    census = run_job(job, dump_dir=args.dump)
    doc = report_document("enumeration", None, {"census": census.to_dict()})
    if args.json is not None:
        _write(dumps_report(doc), args.json)
    c = census
    print(f"generated {c.generated}, unique {c.unique}, with Nakayama permutation {c.nakayama}, "
          f"without {c.no_nakayama}, discrepancies {len(c.discrepancies)}")
    for d in census.discrepancies:
        print(f"  {d.suite}: {d.ring_hash[:16]} {d.detail} -> {d.reproducer}")
    return 0 if census.passed else EXIT_DISCREPANCY


# -------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="formalrings", description="Finite formal matrix rings: build, check, analyze.")
    p.add_argument("--max-row", type=int, help=f"bound on |e_iR| for brute-force checks (env {config.ROW_LIMIT_ENV})")
    p.add_argument("--max-flatten", type=int, help=f"bound on flattened ring size (env {config.FLATTEN_LIMIT_ENV})")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="build a ring file and report axiom violations")
    v.add_argument("path")
    v.set_defaults(func=cmd_validate)

    a = sub.add_parser("analyze", help="Nakayama permutation, criterion and classification")
    a.add_argument("path")
    a.add_argument("--permutation", help="check this permutation, e.g. '(1 2 3)' or 'id'")
    a.add_argument("--essential", action="store_true", help="also check essential-socle conditions")
    a.add_argument("--theorems", action="store_true", help="also run the structural checks")
    a.add_argument("--json", nargs="?", const="-", help="write the JSON report (default stdout)")
    a.add_argument("--timing", action="store_true", help="add wall-clock metadata to the report")
    a.set_defaults(func=cmd_analyze)

    g = sub.add_parser("generate", help="emit a ring file for a built-in construction")
    g.add_argument("generator", choices=["cycle", "trivext", "support", "serial", "ring"])
    g.add_argument("--base", default="Z/4", help="diagonal ring name")
    g.add_argument("--n", type=int, default=2)
    g.add_argument("--I", help="comma-separated shifts for support patterns")
    g.add_argument("--q", type=int, default=2)
    g.add_argument("--bound", type=int, default=2)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_generate)

    gl = sub.add_parser("glue", help="glue two rings with Nakayama permutations")
    gl.add_argument("left")
    gl.add_argument("right")
    gl.add_argument("--twist", type=int, default=0, help="Frobenius power relating the glue fields")
    gl.add_argument("--left-corners", help="1-based union of cycles in the left ring")
    gl.add_argument("--right-corners", help="1-based union of cycles in the right ring")
    gl.add_argument("--essential", action="store_true")
    gl.add_argument("--theorems", action="store_true")
    gl.add_argument("--json", nargs="?", const="-")
    gl.add_argument("-o", "--output")
    gl.set_defaults(func=cmd_glue)

    e = sub.add_parser("enumerate", help="run the equivalence suites over small rings")
    e.add_argument("--order", type=int, default=2)
    e.add_argument("--carrier-bound", type=int, default=4)
    e.add_argument("--menu", default="GF(2);Z/4;GF(2)[x]/(x^2)", help="semicolon-separated diagonal rings")
    e.add_argument("--random", action="store_true")
    e.add_argument("--seed", type=int, default=1)
    e.add_argument("--count", type=int, default=500)
    e.add_argument("--checks", help=f"comma-separated subset of {','.join(SUITES)}")
    e.add_argument("--dump", help="directory for reproducer ring files")
    e.add_argument("--json", nargs="?", const="-")
    e.set_defaults(func=cmd_enumerate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = {config.ROW_LIMIT_ENV: args.max_row, config.FLATTEN_LIMIT_ENV: args.max_flatten}
    saved = {k: os.environ.get(k) for k in overrides}
    for k, v in overrides.items():
        if v is not None:
            os.environ[k] = str(v)
    try:
        return args.func(args)
    except FormalRingError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        if exc.witness is not None:
            sys.stderr.write(f"witness: {exc.witness}\n")
        return exc.exit_code
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    finally:
        for k, v in saved.items():
            if v is None:
                os.environ.pop(k, None)
            else:
                os.environ[k] = v


if __name__ == "__main__":
    sys.exit(main())
