"""Decomposition analysis of power-law kinetic reaction networks.

Exit codes: 0 success, 1 negative analysis result, 2 input error,
3 search resource limit reached.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from .decomposition import Decomposition, DecompositionError, make_decomposition, profile
from .equilibria import (
    CertificationError,
    LPCertificate,
    NotCertified,
    apply_main_theorem,
    assumed_certificate,
    certify_block_plp,
    corollary_check,
    find_equilibrium_numeric,
    parametrize_equilibria,
)
from .independence import coordinate_graph, finest_independent, independent_wr_cf
from .io import CRNDocument, ParseError, parse_blocks, parse_crn, parse_points
from .kinetic_complexes import KineticComplexError, induced_decomposition, kinetic_counts_check, kinetic_network
from .kinetics import KineticsError, classify_nodes, classify_system, sfrf_eval
from .network import NetworkError, degree_profile, is_eulerian, linkage_classes, summarize
from .search import FOUND, NOT_FOUND_GREEDY, NOT_FOUND_PROVEN, RESOURCE_LIMIT, SearchLimits, verify_wr_cf, wr_cf_search

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3
_OUTCOME_EXIT = {FOUND: EXIT_OK, NOT_FOUND_PROVEN: EXIT_NEGATIVE, NOT_FOUND_GREEDY: EXIT_NEGATIVE,
                 RESOURCE_LIMIT: EXIT_LIMIT}


class InputError(ValueError):
    pass


# ------------------------------------------------------------------ helpers


def _load(path: str) -> tuple[CRNDocument, str]:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return parse_crn(raw.decode("utf-8")), hashlib.sha256(raw).hexdigest()


def _blocks_json(net, D: Decomposition) -> list[list[str]]:
    return D.as_labels()


def _profile_json(net, D: Decomposition) -> dict:
    p = profile(net, D)
    return {
        "independent": p.independent,
        "incidence_independent": p.incidence_independent,
        "bi_independent": p.bi_independent,
        "weakly_reversible": p.weakly_reversible,
        "zero_deficiency_blocks": p.zdd,
        "common_complexes": [net.complex_name(c) for c in p.common_complexes],
        "kind": p.kind,
        "rank": p.s,
        "block_ranks": list(p.block_ranks),
        "n_minus_l": p.n_minus_l,
        "block_n_minus_l": list(p.block_n_minus_l),
        "deficiency": p.delta,
        "block_deficiencies": list(p.block_deficiencies),
        "deficiency_relation": p.deficiency_relation,
    }


def _decomposition_from(doc: CRNDocument, choice: str | None) -> tuple[Decomposition | None, str]:
    """Decomposition given by a file, by blocks inside the document, or searched (``auto``)."""
    net, F = doc.network, doc.F
    if choice is None:
        if not doc.blocks:
            return None, "none"
        return make_decomposition(net, [m for _, m in doc.blocks]), "document"
    if choice == "auto":
        res = independent_wr_cf(net, F)
        if res.found:
            return res.decomposition, "independent weakly reversible CF search"
        res = wr_cf_search(net, F, "exhaustive")
        if res.found:
            return res.decomposition, "weakly reversible CF search"
        raise _Negative(res.outcome, f"no decomposition found automatically: {res.reason}")
    try:
        text = Path(choice).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {choice}: {exc.strerror}") from None
    return make_decomposition(net, [m for _, m in parse_blocks(text)]), choice


class _Negative(Exception):
    def __init__(self, outcome: str, message: str):
        super().__init__(message)
        self.outcome = outcome


def _summary_json(net, reactions=None) -> dict:
    s = summarize(net, reactions)
    return {"species": s.m, "complexes": s.n, "reactions": s.r, "linkage_classes": s.l,
            "strong_linkage_classes": s.sl, "terminal_classes": s.t, "rank": s.s,
            "deficiency": s.delta, "weakly_reversible": s.weakly_reversible, "t_minimal": s.t_minimal}


# ----------------------------------------------------------------- commands


def cmd_analyze(doc: CRNDocument, args) -> tuple[dict, int]:
    net, F = doc.network, doc.F
    sc = classify_system(net, F)
    out = {
        "summary": _summary_json(net),
        "kinetics": sc.kind,
        "nf_nodes": sorted(net.complex_name(y) for y in sc.nf_nodes),
        "linkage_classes": [
            {"complexes": [net.complex_name(c) for c in cx], "reactions": [net.labels[j] for j in rs],
             "eulerian": is_eulerian(net, rs)}
            for cx, rs in linkage_classes(net)
        ],
    }
    D, source = _decomposition_from(doc, args.decomposition)
    if D is not None:
        ok, violations = verify_wr_cf(net, F, D)
        out["decomposition"] = {"source": source, "blocks": _blocks_json(net, D),
                                "profile": _profile_json(net, D),
                                "weakly_reversible_cf": ok, "violations": violations}
    return out, EXIT_OK


def cmd_classify(doc: CRNDocument, args) -> tuple[dict, int]:
    net, F = doc.network, doc.F
    sc = classify_system(net, F)
    nodes = []
    for y, nc in classify_nodes(net, F).items():
        din, dout = degree_profile(net, y)
        nodes.append({
            "complex": net.complex_name(y),
            "type": "NF" if nc.is_nf else "CF",
            "cf_subsets": [[net.labels[j] for j in s] for s in nc.cf_subsets],
            "in_degree": din, "out_degree": dout,
        })
    nodes.sort(key=lambda d: d["complex"])
    return {
        "kinetics": sc.kind,
        "mass_action": sc.mass_action,
        "interaction_span_surjective": sc.interaction_span_surjective,
        "factor_span_surjective": sc.factor_span_surjective,
        "nodes": nodes,
        "defaulted_mass_action": list(doc.mass_action_default),
    }, EXIT_OK


def cmd_decompose(doc: CRNDocument, args) -> tuple[dict, int]:
    net, F = doc.network, doc.F
    limits = SearchLimits(max_cycles=args.max_cycles, max_branches=args.max_branches)
    if args.independent:
        fi = finest_independent(net)
        cg = coordinate_graph(net)
        D = fi.decomposition
        return {
            "task": "finest independent decomposition",
            "coordinate_graph": {
                "basis": [net.labels[j] for j in cg.basis],
                "edges": [[net.labels[cg.basis[a]], net.labels[cg.basis[b]]] for a, b in cg.edges],
                "connected": cg.connected,
                "dependencies": {net.labels[j]: [str(c) for c in coef] for j, coef in sorted(cg.dependencies.items())},
            },
            "blocks": _blocks_json(net, D),
            "nontrivial": fi.nontrivial,
            "profile": _profile_json(net, D),
        }, EXIT_OK
    if args.independent_wr_cf:
        res = independent_wr_cf(net, F, limits)
        task = "independent weakly reversible CF-decomposition"
    else:
        res = wr_cf_search(net, F, args.mode, limits)
        task = "weakly reversible CF-decomposition"
    out = {"task": task, **res.to_dict()}
    out["eulerian_linkage_classes"] = [i + 1 for i in res.eulerian_classes]
    if res.found:
        out["profile"] = _profile_json(net, res.decomposition)
    return out, _OUTCOME_EXIT[res.outcome]


def cmd_kinetic_complexes(doc: CRNDocument, args) -> tuple[dict, int]:
    net, F = doc.network, doc.F
    kn = kinetic_network(net, F)
    counts = kinetic_counts_check(net, F)
    out = {
        "kinetic_complexes": [] if kn.network is None else
        [kn.network.complex_name(i) for i in range(kn.n)],
        "kinetic_reactions": [] if kn.network is None else [
            {"label": q.label, "reaction": kn.network.reaction_string(j),
             "from": [net.labels[p] for p in kn.provenance[q.label]]}
            for j, q in enumerate(kn.network.reactions)
        ],
        "n": kn.n, "r": kn.r, "l": kn.l, "s": kn.s, "deficiency": kn.deficiency,
        "orphaned_reactions": [net.labels[q] for q in kn.orphans],
        "loops_removed": {net.labels[q]: c for q, c in kn.loops.items() if c},
        "counts": {
            "per_reaction": {lab: {"actual": a, "formula": b} for lab, (a, b) in counts.per_reaction.items()},
            "n_bound": counts.n_bound, "r_bound": counts.r_bound,
            "interaction_span_surjective": counts.interaction_span_surjective,
            "equalities_hold": counts.equalities_hold,
        },
    }
    D, source = _decomposition_from(doc, args.decomposition)
    if D is not None:
        ind = induced_decomposition(net, F, D)
        out["induced"] = {
            "source": source,
            "blocks": _blocks_json(net, D),
            "block_counts": [{"n": b.n, "l": b.l, "s": b.s} for b in ind.blocks],
            "n": ind.n_tilde, "l": ind.l_tilde, "s": ind.s_tilde, "deficiency": ind.deficiency,
            "is_decomposition": ind.is_decomposition,
            "independent": ind.independent,
            "bi_level_independent": ind.bi_level_independent,
            "bi_level_weakly_reversible": ind.bi_level_weakly_reversible,
            "bi_level_bi_independent": ind.bi_level_bi_independent,
            "equal_flux_dims": ind.equal_flux_dims,
            "relations": ind.relations,
            "warnings": ind.warnings,
        }
    return out, EXIT_OK


def _block_index(token: str, names: list[str], k: int) -> int:
    if token in names:
        return names.index(token)
    try:
        i = int(token)
    except ValueError:
        raise InputError(f"unknown block {token!r}") from None
    if not 1 <= i <= k:
        raise InputError(f"block number {i} out of range 1..{k}")
    return i - 1


def cmd_plp(doc: CRNDocument, args) -> tuple[dict, int]:
    net, F = doc.network, doc.F
    choice = args.decomposition
    if choice is None and not doc.blocks:
        choice = "auto"
    D, source = _decomposition_from(doc, choice)
    names = [n for n, _ in doc.blocks] if source == "document" else []
    assumed = {_block_index(t, names, D.k) for t in (args.assume_plp or [])}
    certs: list[LPCertificate | NotCertified] = []
    for i, b in enumerate(D.blocks):
        if i in assumed:
            certs.append(assumed_certificate(net, F, b))
            continue
        try:
            certs.append(certify_block_plp(net, F, b))
        except CertificationError as exc:
            certs.append(NotCertified((str(exc),), b))
    main = apply_main_theorem(net, F, D, certs)
    cor = corollary_check(net, F, D, certs)
    out = {
        "decomposition": {"source": source, "blocks": _blocks_json(net, D)},
        "block_certificates": [c.to_dict() for c in certs],
        "theorem": main.to_dict(),
        "corollary": cor.to_dict(),
    }
    report = main if main.applicable else (cor if cor.applicable else None)
    if report is not None and doc.rates is not None:
        rng = np.random.default_rng(args.seed)
        guesses = [np.ones(net.m)] + [np.exp(rng.normal(size=net.m)) for _ in range(9)]
        x = find_equilibrium_numeric(net, F, doc.rates, guesses)
        if x is None:
            out["numeric"] = {"converged": False}
        else:
            fam = parametrize_equilibria(report, x, net, F, doc.rates)
            pts = [fam.sample(rng) for _ in range(args.samples)]
            res = [float(np.max(np.abs(sfrf_eval(net, F, doc.rates, p)))) for p in pts]
            out["numeric"] = {
                "converged": True,
                "reference_equilibrium": dict(zip(net.species, (float(v) for v in x))),
                "samples": len(pts),
                "max_sample_residual": max(res) if res else 0.0,
            }
    return out, EXIT_OK if report is not None else EXIT_NEGATIVE


def cmd_check_equilibrium(doc: CRNDocument, args) -> tuple[dict, int]:
    net, F = doc.network, doc.F
    if doc.rates is None:
        raise InputError("check-equilibrium needs rate lines for every reaction")
    try:
        text = Path(args.point).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {args.point}: {exc.strerror}") from None
    pts = parse_points(text, net.species)
    rows = []
    for p in pts:
        r = float(np.max(np.abs(sfrf_eval(net, F, doc.rates, p))))
        rows.append({"point": dict(zip(net.species, p)), "residual": r, "equilibrium": r < args.tol})
    return {"tolerance": args.tol, "points": rows}, EXIT_OK if all(x["equilibrium"] for x in rows) else EXIT_NEGATIVE


# ------------------------------------------------------------------ rendering


def _text(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for key, val in obj.items():
            if isinstance(val, (dict, list)) and val and not _flat(val):
                lines.append(f"{pad}{key}:")
                lines.extend(_text(val, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_scalar(val)}")
    elif isinstance(obj, list):
        for val in obj:
            if isinstance(val, (dict, list)) and not _flat(val):
                lines.append(f"{pad}-")
                lines.extend(_text(val, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(val)}")
    else:
        lines.append(pad + _scalar(obj))
    return lines


def _flat(val) -> bool:
    if isinstance(val, dict):
        return False
    return all(not isinstance(v, (dict, list)) or (isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v))
               for v in val)


def _scalar(val) -> str:
    if isinstance(val, list):
        return "[" + ", ".join(_scalar(v) for v in val) + "]"
    if isinstance(val, bool):
        return "yes" if val else "no"
    if val is None:
        return "-"
    if isinstance(val, float):
        return f"{val:.6g}"
    return str(val)


COMMANDS = {
    "analyze": cmd_analyze,
    "classify": cmd_classify,
    "decompose": cmd_decompose,
    "kinetic-complexes": cmd_kinetic_complexes,
    "plp": cmd_plp,
    "check-equilibrium": cmd_check_equilibrium,
}


def _common_options(defaults: bool) -> argparse.ArgumentParser:
    # subcommands suppress defaults so options given before the subcommand survive
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text" if defaults else argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=0 if defaults else argparse.SUPPRESS,
                        help="seed for numeric samplers")
    return common


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plkdecomp", description=__doc__.splitlines()[0],
                                parents=[_common_options(True)])
    common = _common_options(False)
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="network summary and optional decomposition profile")
    a.add_argument("file")
    a.add_argument("--decomposition", help="block file or 'auto'")

    c = sub.add_parser("classify", parents=[common], help="CF/NF node classification")
    c.add_argument("file")

    d = sub.add_parser("decompose", parents=[common], help="search for decompositions")
    d.add_argument("file")
    g = d.add_mutually_exclusive_group(required=True)
    g.add_argument("--wr-cf", action="store_true")
    g.add_argument("--independent", action="store_true")
    g.add_argument("--independent-wr-cf", action="store_true")
    d.add_argument("--mode", choices=("greedy", "exhaustive"), default="exhaustive")
    d.add_argument("--max-cycles", type=int, default=SearchLimits.max_cycles)
    d.add_argument("--max-branches", type=int, default=SearchLimits.max_branches)

    k = sub.add_parser("kinetic-complexes", parents=[common], help="network of kinetic complexes")
    k.add_argument("file")
    k.add_argument("--decomposition", help="block file or 'auto'")

    q = sub.add_parser("plp", parents=[common], help="log-parametrized equilibria certificate")
    q.add_argument("file")
    q.add_argument("--decomposition", help="block file or 'auto' (default: document blocks, else auto)")
    q.add_argument("--assume-plp", nargs="*", metavar="BLOCK", help="blocks asserted to be PLP (name or 1-based index)")
    q.add_argument("--samples", type=int, default=20, help="parametrized points to check when rates are given")

    e = sub.add_parser("check-equilibrium", parents=[common], help="residuals at given points")
    e.add_argument("file")
    e.add_argument("--point", required=True, help="file with one 'X=value, ...' line per point")
    e.add_argument("--tol", type=float, default=1e-8)
    return p


def run_command(argv: list[str]) -> tuple[dict, int, str]:
    """Parse arguments, run, and return ``(report, exit_code, format)``."""
    args = build_parser().parse_args(argv)
    report: dict = {"command": args.command}
    try:
        doc, digest = _load(args.file)
        report["input_sha256"] = digest
        result, code = COMMANDS[args.command](doc, args)
        report["result"] = result
    except (ParseError, NetworkError, DecompositionError, KineticsError, KineticComplexError,
            InputError, ValueError) as exc:
        report["error"] = str(exc)
        code = EXIT_INPUT
    except _Negative as exc:
        report["error"] = str(exc)
        code = _OUTCOME_EXIT.get(exc.outcome, EXIT_NEGATIVE)
    return report, code, args.format


def main(argv: list[str] | None = None) -> int:
    report, code, fmt = run_command(sys.argv[1:] if argv is None else argv)
    if fmt == "json":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print("\n".join(_text(report)))
    return code


if __name__ == "__main__":
    sys.exit(main())
