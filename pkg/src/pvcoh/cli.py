"""Command-line front end.

Every subcommand writes one JSON document (sorted keys, no timestamps) so
identical inputs give byte-identical output. Errors are reported as
{"error": {"code", "message"}} with exit status 2.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

from .abelian import GroupPresentation
from .approximants import build_proper_sequence, cech_cohomology_of_hull
from .delta_complex import DeltaComplex, simplicial_cohomology
from .errors import PVCohError
from .koszul import (
    build_koszul_complex,
    koszul_cohomology,
    chain_isomorphism,
    point_system,
    system_from_json,
    system_from_tiling,
    torus_covariant_complex,
)
from .pv import (
    CantorCircleFunction,
    cantor_circle_normal_form,
    frequency_module,
    h1_rank_from_normal_form,
    pv_cohomology_hull,
    theta_relations,
)
from .spectral import (
    couple_equivalence,
    couple_from_skeleton_filtration,
    pages,
    sequence_couple_limit,
    skeleton_filtered_complex,
)
from .tiling import Tiling1DSample, cut_and_project_sample, parse_alpha, sample_from_spec


def _threads() -> int:
    raw = os.environ.get("PVCOH_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"PVCOH_THREADS must be a positive integer, got {raw!r}")
    if n < 1:
        raise ValueError("PVCOH_THREADS must be at least 1")
    return n


def _load_json(path: str):
    with open(path) as fh:
        return json.load(fh)


def _sample(args) -> Tiling1DSample:
    if args.input:
        obj = _load_json(args.input)
        if "type" in obj:
            return sample_from_spec(obj)
        if obj.get("source"):
            return sample_from_spec(obj["source"])
        if "letters" in obj:
            return Tiling1DSample.from_word(obj["letters"])
        raise ValueError("input is neither a tiling spec nor a generated sample")
    return cut_and_project_sample(parse_alpha(args.alpha), args.points)


def _groups(gs: list[GroupPresentation]) -> dict:
    return {str(n): g.to_json() for n, g in enumerate(gs)}


def _limits(limits) -> dict:
    return {str(n): {"group": d.limit.to_json(), "status": d.status.value} for n, d in enumerate(limits)}


def _pv_run(args, seq_full):
    """Hull limit on the first ``levels`` levels; theta relations use one more level when available."""
    L = min(args.levels, len(seq_full.levels))
    seq = seq_full.prefix(L)
    report = pv_cohomology_hull(seq, check_relations=False)
    theta = [theta_relations(seq_full, l) for l in range(min(L, len(seq_full.levels) - 1))]
    return seq, report, theta


# ---------------------------------------------------------------- subcommands

def cmd_generate(args):
    s = _sample(args)
    if args.format == "text":
        return s.letters + "\n"
    return s.to_json()


def cmd_approximants(args):
    seq = build_proper_sequence(_sample(args), args.levels)
    if args.format == "dot":
        return seq.to_dot()
    return seq.to_json()


def cmd_cohomology(args):
    if args.input and "cells" in _load_json(args.input):
        K = DeltaComplex.load(args.input)
        return {"simplicial": _groups(simplicial_cohomology(K))}
    seq = build_proper_sequence(_sample(args), args.levels)
    return {
        "levels": [_groups(simplicial_cohomology(lv.complex)) for lv in seq.levels],
        "limit": _limits(cech_cohomology_of_hull(seq)),
        "truncated": seq.truncated,
    }


def cmd_pv(args):
    seq_full = build_proper_sequence(_sample(args), args.levels + 1)
    seq, report, theta = _pv_run(args, seq_full)
    out = report.to_json()
    out["certificates"]["theta_relations"] = [r.to_json() for r in theta]
    out["n_levels"] = len(seq.levels)
    out["truncated"] = seq.truncated
    return out


def _random_function(rng: random.Random) -> CantorCircleFunction:
    terms = tuple((rng.randint(-3, 3), rng.randint(-6, 6), rng.randint(-6, 6)) for _ in range(rng.randint(1, 3)))
    return CantorCircleFunction(terms, rng.randint(-3, 3))


def cmd_cantor_circle(args):
    alpha = parse_alpha(args.alpha)
    rng = random.Random(args.seed)
    if args.input:
        fs = [CantorCircleFunction.from_json(o) for o in _load_json(args.input)]
    else:
        fs = [_random_function(rng) for _ in range(5)]
    forms = [{"function": f.to_json(), "normal_form": list(cantor_circle_normal_form(f, alpha))} for f in fs]
    return {
        "normal_forms": forms,
        "frequency_module": frequency_module(alpha).to_json(),
        "h1_rank": h1_rank_from_normal_form(alpha, fs),
    }


def _system(args):
    if args.system:
        obj = _load_json(args.system)
        if args.d is not None:
            obj = dict(obj, d=args.d)
        return system_from_json(obj)
    if args.d is not None and args.d != 1:
        return point_system(args.d)
    return system_from_tiling(_sample(args), args.resolution + 1)


def cmd_koszul(args):
    sys_ = _system(args)
    R = args.resolution
    cx = build_koszul_complex(sys_, R)
    out = {"complex": cx.to_json(), "ranks": list(cx.ranks)}
    if R >= 2:
        out["cohomology"] = koszul_cohomology(sys_, R).to_json()
    return out


def cmd_ahss(args):
    if args.input:
        K = DeltaComplex.load(args.input)
        sp = pages(couple_from_skeleton_filtration(K))
        kg = sp.k_groups()
        return {
            "pages": sp.to_json(),
            "converged_at": sp.converged_at,
            "K": {k: g.to_json() for k, g in kg.items()} if kg else None,
        }
    seq = build_proper_sequence(_sample(args), args.levels)
    return sequence_couple_limit([lv.complex for lv in seq.levels], seq.connecting_maps).to_json()


def _same_groups(a: list[GroupPresentation], b: list[GroupPresentation]) -> bool:
    return [g.to_json() for g in a] == [g.to_json() for g in b]


def cmd_verify(args):
    alpha = parse_alpha(args.alpha)
    sample = _sample(args)
    seq_full = build_proper_sequence(sample, args.levels + 1)
    seq, report, theta = _pv_run(args, seq_full)
    cech = cech_cohomology_of_hull(seq)
    certs = {
        "theta_relations": all(r.ok for r in theta),
        "dd_zero": not any(report.dd),
        "chain_equivalence": not any(report.chain_equivalence),
        "route_levels": all(
            _same_groups(report.level_groups[l], simplicial_cohomology(lv.complex)) for l, lv in enumerate(seq.levels)
        ),
        "route_limit": [d.limit.to_json() for d in report.limits] == [d.limit.to_json() for d in cech],
    }
    rng = random.Random(args.seed)
    ok = True
    for _ in range(50):
        f, g = _random_function(rng), _random_function(rng)
        if cantor_circle_normal_form(f + g.coboundary(), alpha) != cantor_circle_normal_form(f, alpha):
            ok = False
            break
    certs["normal_form_invariance"] = ok
    certs["normal_form_rank"] = h1_rank_from_normal_form(alpha) == report.limits[1].limit.rank
    ksys = system_from_tiling(sample, 4)
    certs["koszul_dd_zero"] = all(not build_koszul_complex(ksys, R).dd_violations() for R in (1, 2, 3))
    try:
        for R in (1, 2, 3):
            chain_isomorphism(build_koszul_complex(ksys, R), torus_covariant_complex(ksys, R))
        certs["koszul_torus_form"] = True
    except PVCohError:
        certs["koszul_torus_form"] = False
    try:
        for lv in seq.levels[:3]:
            couple_equivalence(skeleton_filtered_complex(lv.complex))
        certs["couple_equivalence"] = True
    except PVCohError:
        certs["couple_equivalence"] = False
    return {"certificates": certs, "passed": all(certs.values()), "n_levels": len(seq.levels)}


COMMANDS = {
    "generate": cmd_generate,
    "approximants": cmd_approximants,
    "cohomology": cmd_cohomology,
    "pv": cmd_pv,
    "cantor-circle": cmd_cantor_circle,
    "koszul": cmd_koszul,
    "ahss": cmd_ahss,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pvcoh", description="Cohomology of 1D tiling spaces and Cantor dynamical systems.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--alpha", default="golden", help="golden, silver, e, 'a,b,c,n' for (a+b*sqrt n)/c, or 'cf:a0,a1,...'")
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--resolution", type=int, default=3)
    p.add_argument("--points", type=int, default=3000, help="size of the generated tiling sample")
    p.add_argument("--input")
    p.add_argument("--output")
    p.add_argument("--format", choices=["json", "dot", "text"], default="json")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--system", help="Z^d system JSON for koszul")
    p.add_argument("--d", type=int, help="dimension override for koszul")
    return p


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.levels < 1:
            raise ValueError("--levels must be at least 1")
        if args.input and not os.path.exists(args.input):
            raise FileNotFoundError(f"no such file: {args.input}")
        if args.system and not os.path.exists(args.system):
            raise FileNotFoundError(f"no such file: {args.system}")
        _threads()
        result = COMMANDS[args.command](args)
    except PVCohError as e:
        _emit(json.dumps({"error": {"code": e.code, "message": str(e)}}, sort_keys=True) + "\n", None)
        return 2
    except (ValueError, KeyError, ArithmeticError, OSError) as e:
        _emit(json.dumps({"error": {"code": type(e).__name__, "message": str(e)}}, sort_keys=True) + "\n", None)
        return 2
    if isinstance(result, str):
        _emit(result, args.output)
    else:
        _emit(json.dumps(result, sort_keys=True, indent=2) + "\n", args.output)
    if args.command == "verify":
        return 0 if result["passed"] else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
