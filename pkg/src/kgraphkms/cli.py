"""Command line interface: validation, spectra, state computation, fuzzing.

Exit codes: 0 on success with a clean graph, 2 when validation or the
connectivity assumptions fail (suppressed by --allow-violations), 1 on
parse or computation errors.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .components import check_assumptions, decompose
from .dumbbell import (
    Dumbbell2Params,
    DumbbellBounds,
    figure3_params,
    fuzz_ordering,
    make_dumbbell2,
    make_dumbbell3,
    matrices_2,
    matrices_3,
    CommutationError,
)
from .engine import (
    AssumptionError,
    Dynamics,
    ExtremeState,
    STATE_TOL,
    extreme_states_at,
    normalize_dynamics,
    phase_diagram,
    verify_state,
)
from .formats import InputDocument, ParseError, emit_report, input_to_json, parse_input
from .skeleton import Skeleton, validate_skeleton
from .spectral import common_pf_eigenvector, spectral_radius

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _common_sections(doc: InputDocument, tol: float) -> dict:
    return {
        "tool": {"name": "kgraphkms", "version": __version__},
        "tolerances": {"state": tol},
        "attestations": {"rationally_independent": doc.rationally_independent},
        "warnings": list(doc.warnings),
    }


def _validation_section(report) -> dict:
    return {
        "passed": report.passed,
        "violations": [
            {"rule": v.rule, "message": v.message, "where": list(v.where)}
            for v in report.violations
        ],
    }


def _build_graph(doc: InputDocument) -> Skeleton:
    return Skeleton(doc.vertices, doc.matrices)


def _build_dynamics(skel: Skeleton, doc: InputDocument) -> Dynamics:
    if doc.dynamics_type == "preferred":
        return normalize_dynamics(skel, "preferred", doc.rationally_independent)
    return normalize_dynamics(
        skel, doc.r, doc.rationally_independent, rescale=doc.normalize
    )


def _state_payload(skel: Skeleton, dyn: Dynamics, state: ExtremeState, tol: float) -> dict:
    check = verify_state(skel, dyn, state.beta, state.m, tol=tol)
    if not check.passed:
        raise RuntimeError(f"state failed verification at emission: {check}")
    return {
        "beta": state.beta,
        "m": {label: value for label, value in zip(skel.vertex_labels, state.m)},
        "kind": state.kind,
        "anchor": list(state.anchor),
        "depth": state.depth,
        "factors_through_ck": state.factors_through_ck,
    }


def _components_section(skel: Skeleton) -> dict:
    decomp = decompose(skel)
    return {
        "order": [[skel.vertex_labels[v] for v in comp] for comp in decomp.components],
        "trivial": list(decomp.trivial),
        "coordinatewise_irreducible": list(decomp.coordinatewise_irreducible),
        "radii": [list(r) for r in decomp.radii],
    }


def _assumptions_section(skel: Skeleton) -> dict:
    return asdict(check_assumptions(skel))


def _dynamics_section(dyn: Dynamics) -> dict:
    return {
        "r": list(dyn.r),
        "normalization_factor": dyn.normalization_factor,
        "preferred": dyn.preferred,
        "critical_colours": sorted(dyn.critical_colours),
        "log_radii": list(dyn.log_radii),
    }


def _phase_section(skel: Skeleton, dyn: Dynamics, diagram, tol: float) -> dict:
    return {
        "critical_betas": [
            {
                "value": b,
                "symbolic": sym,
                "extreme_states": [_state_payload(skel, dyn, s, tol) for s in states],
            }
            for b, sym, states in zip(
                diagram.critical_betas, diagram.symbolic_betas, diagram.critical_points
            )
        ],
        "intervals": [
            {
                "lo": iv.lo,
                "hi": None if math.isinf(iv.hi) else iv.hi,
                "extreme_count": iv.extreme_count,
                "pieces": [list(labels) for labels in iv.piece_labels],
            }
            for iv in diagram.intervals
        ],
        "terminal_beta": diagram.terminal_beta,
    }


def _prepare(args) -> tuple[dict, InputDocument, Skeleton | None, int]:
    """Parse, validate and build; shared entry for the graph subcommands."""
    doc = parse_input(_read_input(args.input))
    report = _common_sections(doc, args.tol)
    validation = validate_skeleton(doc.vertices, doc.matrices)
    report["validation"] = _validation_section(validation)
    if not validation.passed:
        try:
            skel = _build_graph(doc)
        except ValueError:
            skel = None
        code = EXIT_OK if args.allow_violations and skel is not None else EXIT_VIOLATION
        return report, doc, skel, code
    return report, doc, _build_graph(doc), EXIT_OK


def _cmd_validate(args) -> int:
    report, _, _, code = _prepare(args)
    print(emit_report(report, args.format))
    return code


def _cmd_components(args) -> int:
    report, doc, skel, code = _prepare(args)
    if skel is None:
        print(emit_report(report, args.format))
        return code or EXIT_VIOLATION
    report["components"] = _components_section(skel)
    report["assumptions"] = _assumptions_section(skel)
    if not check_assumptions(skel).all_pass and not args.allow_violations:
        code = EXIT_VIOLATION
    print(emit_report(report, args.format))
    return code


def _cmd_spectra(args) -> int:
    report, doc, skel, code = _prepare(args)
    if skel is None:
        print(emit_report(report, args.format))
        return code or EXIT_VIOLATION
    decomp = decompose(skel)
    section: dict = {
        "global_radii": [spectral_radius(m) for m in skel.matrices],
        "components": [],
    }
    for c, comp in enumerate(decomp.components):
        entry = {
            "vertices": [skel.vertex_labels[v] for v in comp],
            "radii": list(decomp.radii[c]),
        }
        if decomp.coordinatewise_irreducible[c]:
            idx = list(comp)
            blocks = [
                [[skel.matrices[i][a][b] for b in idx] for a in idx]
                for i in range(skel.k)
            ]
            pf = common_pf_eigenvector(blocks)
            entry["pf_vector"] = list(pf[0].vector)
        section["components"].append(entry)
    report["spectra"] = section
    print(emit_report(report, args.format))
    return code


def _cmd_kms(args) -> int:
    report, doc, skel, code = _prepare(args)
    if skel is None or (code and not args.allow_violations):
        print(emit_report(report, args.format))
        return code or EXIT_VIOLATION
    dyn = _build_dynamics(skel, doc)
    report["dynamics"] = _dynamics_section(dyn)
    assumptions = check_assumptions(skel)
    report["assumptions"] = asdict(assumptions)
    if not assumptions.all_pass and not args.allow_violations:
        print(emit_report(report, args.format))
        return EXIT_VIOLATION
    diagram = phase_diagram(skel, dyn, allow_violations=args.allow_violations)
    states = extreme_states_at(skel, dyn, args.beta, diagram=diagram)
    report["kms"] = {
        "beta": args.beta,
        "extreme_count": len(states),
        "extreme_states": [_state_payload(skel, dyn, s, args.tol) for s in states],
    }
    print(emit_report(report, args.format))
    return code


def _cmd_phase(args) -> int:
    report, doc, skel, code = _prepare(args)
    if skel is None or (code and not args.allow_violations):
        print(emit_report(report, args.format))
        return code or EXIT_VIOLATION
    dyn = _build_dynamics(skel, doc)
    report["dynamics"] = _dynamics_section(dyn)
    assumptions = check_assumptions(skel)
    report["assumptions"] = asdict(assumptions)
    if not assumptions.all_pass and not args.allow_violations:
        print(emit_report(report, args.format))
        return EXIT_VIOLATION
    diagram = phase_diagram(skel, dyn, allow_violations=args.allow_violations)
    report["phase"] = _phase_section(skel, dyn, diagram, args.tol)
    print(emit_report(report, args.format))
    return code


def _parse_pairs(raw: str, expect: int) -> list[tuple[int, int]]:
    values = [int(t) for t in raw.replace(" ", "").split(",") if t != ""]
    if len(values) != 2 * expect:
        raise ValueError(f"expected {2 * expect} comma-separated integers, got {len(values)}")
    return [(values[2 * i], values[2 * i + 1]) for i in range(expect)]


def _cmd_dumbbell(args) -> int:
    try:
        if args.figure == 2:
            loops_v, loops_w, bridge = _parse_pairs(args.params, 3)
            params = Dumbbell2Params(loops_v, loops_w, bridge)
            skel = make_dumbbell2(params)
            matrices = matrices_2(params)
        else:
            lu, lv, lw, bvu, bwu = _parse_pairs(args.params, 5)
            params = figure3_params(lu, lv, lw, bvu, bwu)
            skel = make_dumbbell3(params)
            matrices = matrices_3(params)
    except CommutationError as exc:
        print(
            emit_report(
                {"dumbbell": {"accepted": False, "relation": exc.relation, "detail": str(exc)}},
                args.format,
            )
        )
        return EXIT_VIOLATION
    doc = InputDocument(
        vertices=skel.vertex_labels,
        matrices=matrices,
        dynamics_type="preferred",
        r=None,
        normalize=True,
        rationally_independent=True,
        warnings=(),
    )
    print(input_to_json(doc))
    return EXIT_OK


def _cmd_fuzz(args) -> int:
    lo, hi = (int(t) for t in args.loops.split(":"))
    blo, bhi = (int(t) for t in args.bridges.split(":"))
    bounds = DumbbellBounds(
        loop_lo=lo,
        loop_hi=hi,
        bridge_lo=blo,
        bridge_hi=bhi,
        zero_wv_bridge=args.zero_wv,
        positive_bridges=not args.zero_wv,
    )
    result = fuzz_ordering(args.seed, args.count, bounds)
    report = {
        "fuzz": {
            "seed": args.seed,
            "samples": result.samples,
            "hypothesis_met": result.hypothesis_met,
            "conclusion_holds": result.conclusion_holds,
            "hypothesis_not_met": result.hypothesis_not_met,
            "contradictions": [
                {"params": asdict(p), "statuses": s} for p, s in result.contradictions
            ],
        }
    }
    print(emit_report(report, args.format))
    return EXIT_OK if not result.contradictions else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kgraphkms",
        description="Equilibrium-state simplices of finite higher-rank graph algebras, "
        "computed from commuting vertex matrices.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def graph_command(name: str, help_text: str):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("input", nargs="?", default="-", help="input JSON file, or - for stdin")
        cmd.add_argument("--format", choices=("json", "text"), default="json")
        cmd.add_argument("--tol", type=float, default=STATE_TOL)
        cmd.add_argument("--allow-violations", action="store_true")
        return cmd

    graph_command("validate", "check the input against every skeleton invariant").set_defaults(func=_cmd_validate)
    graph_command("components", "strongly connected components and assumptions").set_defaults(func=_cmd_components)
    graph_command("spectra", "per-component and global Perron roots").set_defaults(func=_cmd_spectra)
    kms = graph_command("kms", "extreme states at one inverse temperature")
    kms.add_argument("--beta", type=float, required=True)
    kms.set_defaults(func=_cmd_kms)
    graph_command("phase", "critical values and the full simplex structure").set_defaults(func=_cmd_phase)

    dumbbell = sub.add_parser("dumbbell", help="emit an input document for a dumbbell graph")
    dumbbell.add_argument("--figure", type=int, choices=(2, 3), required=True)
    dumbbell.add_argument(
        "--params",
        required=True,
        help="figure 2: loops_v1,loops_v2,loops_w1,loops_w2,bridge1,bridge2; "
        "figure 3: loops per vertex u,v,w then bridges v->u and w->u, colour pairs",
    )
    dumbbell.add_argument("--format", choices=("json", "text"), default="json")
    dumbbell.set_defaults(func=_cmd_dumbbell)

    fuzz = sub.add_parser("fuzz", help="fuzz the spectral-ordering property on random dumbbells")
    fuzz.add_argument("--seed", type=int, default=0)
    fuzz.add_argument("--count", type=int, default=100)
    fuzz.add_argument("--loops", default="2:9", help="loop bundle range lo:hi")
    fuzz.add_argument("--bridges", default="1:9", help="bridge bundle range lo:hi")
    fuzz.add_argument("--zero-wv", action="store_true", help="pin the w->v bundle to zero")
    fuzz.add_argument("--format", choices=("json", "text"), default="json")
    fuzz.set_defaults(func=_cmd_fuzz)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except AssumptionError as exc:
        print(f"assumption violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
