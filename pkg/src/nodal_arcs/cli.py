"""Command-line front end.

    nodal-arcs construct arc|bicovering|cap  --p P [--s S] [--m M | --m1 A --m2 B] [--N N] ...
    nodal-arcs verify    arc|bicovering|cap  --in FILE [--mode exhaustive|sample] ...
    nodal-arcs aux       identities|count|witnesses --p P --m M [--a A --b B] ...

Exit codes: 0 verified pass, 1 a verified property failed, 2 usage or
parameter error (JSON error object on stderr), 3 only sampled evidence.
Outputs are canonical JSON and never depend on --threads.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import SCHEMA
from .arcbuilder import (ArcParams, GuaranteeFlags, build_almost_bicovering,
                         build_theorem1_arc)
from .auxcurves import (CosetScanner, CurveParams, check_degenerate, check_identities,
                        count_points_M, secant_witnesses, witness_summary)
from .capspace import (LiftField, artifact_hash, build_theorem2_cap, cap_coverage,
                       complete_with_center, is_cap, lift_arc)
from .cubicgroup import CubicPoint, NodalCubic
from .errors import InvalidParameters, NodalArcsError
from .gfield import GF
from .planegeom import bicover_classify, exceptional_set, is_arc, point_class

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_SAMPLED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def sha256(obj) -> str:
    return hashlib.sha256(canonical(obj).encode()).hexdigest()


# --- parameter parsing ---

def _field(args) -> GF:
    if args.p is None:
        raise InvalidParameters("--p is required")
    return GF.prime_power(args.p, args.s)


def _field_from(desc: dict) -> GF:
    return GF.prime_power(desc["p"], desc.get("s", 1), desc.get("modulus"))


def _tbar(curve: NodalCubic, text: str | None):
    """``c0,c1`` (components over F_q) or ``g^k`` (power of the generator of mu_{q+1})."""
    if text is None:
        return None
    text = text.strip()
    if text.startswith("g^"):
        return curve.g ** int(text[2:])
    parts = [int(x) for x in text.split(",")]
    if len(parts) != 2:
        raise InvalidParameters("--tbar must be 'c0,c1' or 'g^k'")
    return curve.F2.from_components([curve.Fq(c % curve.q) for c in parts])


def _config(args, keys) -> dict:
    return {k: getattr(args, k) for k in keys}


CONSTRUCT_KEYS = ("p", "s", "m", "m1", "m2", "N", "tbar", "beta_sq")
VERIFY_KEYS = ("mode", "samples", "seed")


# --- construct ---

def cmd_construct(args) -> tuple[int, dict, dict]:
    F = _field(args)
    curve = NodalCubic(F, args.beta_sq)
    tbar = _tbar(curve, args.tbar)
    config = dict(_config(args, CONSTRUCT_KEYS), command="construct", kind=args.kind)
    if args.kind == "arc":
        arc = build_theorem1_arc(ArcParams(F, args.m, tbar, beta_sq=args.beta_sq))
        art = dict(arc.to_json(), kind="arc")
        summary = {"size": arc.size, "claimed_size": arc.claimed_size}
    elif args.kind == "bicovering":
        arc = build_almost_bicovering(ArcParams(F, args.m, tbar, args.m1, args.m2, args.beta_sq))
        art = dict(arc.to_json(), kind="bicovering")
        summary = {"size": arc.size, "claimed_size": arc.claimed_size, "center": list(arc.center)}
    else:
        N = args.N if args.N is not None else 4
        cap, arc, center_class, flags = build_theorem2_cap(F, args.m1, args.m2, N, m=args.m,
                                                           beta_sq=args.beta_sq, tbar=tbar)
        qp = cap.lift.ext.order
        art = dict(cap.to_json(), kind="cap", arc=arc.to_json(), flags=flags.to_json(),
                   beta_sq=arc.curve.beta_sq.value, claimed_size=(arc.size + 1) * qp)
        if args.m1 is not None:
            n = (F.order + 1) // arc.m
            art["size_bound"] = ((args.m1 + args.m2 - 3) * n + 3) * qp
        summary = {"size": cap.size, "claimed_size": art["claimed_size"],
                   "size_bound": art.get("size_bound"), "completion": cap.completion,
                   "arc_size": arc.size}
    art["schema"] = SCHEMA
    art["config"] = config
    summary.update(kind=args.kind, flags=art["flags"], sha256=sha256(art))
    return EXIT_PASS, art, summary


# --- verify ---

def _load(path: str | None) -> dict:
    if path is None:
        raise InvalidParameters("--in is required")
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidParameters(f"cannot read artifact: {exc}") from None
    if not isinstance(data, dict) or data.get("schema") != SCHEMA:
        raise InvalidParameters(f"artifact lacks schema {SCHEMA!r}")
    return data


def _plane_checks(data: dict, args) -> tuple[dict, dict, bool]:
    """Checks shared by arc and bicovering artifacts: (results, asserted, sampled)."""
    F = _field_from(data["field"])
    curve = NodalCubic(F, data["beta_sq"])
    pts = [tuple(P) for P in data["points"]]
    ok, witness = is_arc(F, pts, args.threads)
    res: dict = {"is_arc": ok, "size": len(pts), "claimed_size": data.get("claimed_size")}
    asserted = {"is_arc": ok}
    if not ok:
        res["collinear_triple"] = [list(P) for P in witness]
        return res, asserted, False
    E = exceptional_set(F, curve.beta_sq)
    res["exceptional_ok"] = all(tuple(P) in E for P in data["exceptional"])
    asserted["exceptional_ok"] = res["exceptional_ok"]
    rep = bicover_classify(F, pts, args.mode, args.samples, args.seed, args.threads,
                           beta_sq=curve.beta_sq)
    res["bicover"] = rep.to_json()
    flags = GuaranteeFlags(**data["flags"])
    if data["kind"] == "arc":
        res["complete"] = rep.complete
        res["complete_guaranteed"] = flags.thm1_bound
        if rep.complete is not None and flags.thm1_bound:
            asserted["complete"] = rep.complete
    else:
        center = tuple(data["center"])
        cls = point_class(F, pts, center)
        res["center_class"] = cls
        q = F.order
        expected = "internal_only" if q % 4 == 1 else "external_only"
        res["center_not_bicovered"] = cls != "bicovered"
        asserted["center_not_bicovered"] = res["center_not_bicovered"]
        res["center_matches_q_mod_4"] = cls == expected
        res["almost_bicovering"] = None if rep.is_bicovering is None else \
            rep.center == center
        res["almost_bicovering_guaranteed"] = flags.bico_bound
        if res["almost_bicovering"] is not None and flags.bico_bound:
            asserted["almost_bicovering"] = res["almost_bicovering"]
        # coset labels of the non-exceptional points must be exactly M, each coset whole
        m, n = data["m"], (q + 1) // data["m"]
        labels: dict[int, int] = {}
        for P in pts:
            if list(P) in data["exceptional"]:
                continue
            v = curve.point_to_param(CubicPoint("affine", F(P[0]), F(P[1])))
            lab = curve.coset_label(v, m)
            labels[lab] = labels.get(lab, 0) + 1
        res["labels_match_M"] = sorted(labels) == sorted(data["M"]) and \
            all(c == n for c in labels.values())
        asserted["labels_match_M"] = res["labels_match_M"]
    return res, asserted, args.mode == "sample"


def _cap_checks(data: dict, args) -> tuple[dict, dict, bool]:
    F = _field_from(data["field"])
    N = data["N"]
    pts = np.asarray(data["points"], dtype=np.int64)
    res: dict = {"size": len(pts), "claimed_size": data.get("claimed_size"),
                 "size_bound": data.get("size_bound")}
    ok, witness = is_cap(F, pts, args.threads)
    res["is_cap"] = ok
    asserted = {"is_cap": ok}
    if not ok:
        res["collinear_triple"] = [list(P) for P in witness]
        return res, asserted, False
    arc = data.get("arc")
    if arc is not None:
        # rebuild the cap from the embedded arc and compare point sets
        prov = data.get("provenance", {})
        res["arc_hash_ok"] = prov.get("arc_sha256") == artifact_hash(arc)
        arc_pts = [tuple(P) for P in arc["points"]]
        rebuilt = lift_arc(F, arc_pts, N)
        if data["completion"] != "none":
            cls = point_class(F, arc_pts, tuple(arc["center"]))
            side = {"external_only": "external", "internal_only": "internal",
                    "uncovered": "external"}.get(cls, cls)
            res["center_class"] = cls
            res["completion_rule_ok"] = {"external": "tau", "internal": "tau2"}.get(side) == \
                data["completion"]
            asserted["completion_rule_ok"] = res["completion_rule_ok"]
            rebuilt = complete_with_center(rebuilt, tuple(arc["center"]), side)
        key = lambda A: sorted(map(tuple, np.asarray(A).tolist()))
        res["rebuilt_matches"] = key(rebuilt.points) == key(pts)
        qp = LiftField(F, N).ext.order
        res["size_formula_ok"] = len(pts) == (len(arc_pts) + (data["completion"] != "none")) * qp
        for k in ("arc_hash_ok", "rebuilt_matches", "size_formula_ok"):
            asserted[k] = res[k]
    cov = cap_coverage(F, pts, args.mode, args.samples, args.seed, args.threads,
                       check_cap=False)
    res["coverage"] = cov.to_json()
    flags = data.get("flags") or {}
    res["complete_guaranteed"] = bool(flags.get("thm2_bound"))
    if cov.complete is not None and res["complete_guaranteed"]:
        asserted["complete"] = cov.complete
    return res, asserted, args.mode == "sample"


def cmd_verify(args) -> tuple[int, dict, dict]:
    data = _load(args.inp)
    if data.get("kind") != args.kind:
        raise InvalidParameters(f"artifact kind {data.get('kind')!r} is not {args.kind!r}")
    if args.mode == "sample" and args.samples <= 0:
        raise InvalidParameters("--samples must be positive in sample mode")
    if args.kind == "cap":
        res, asserted, sampled = _cap_checks(data, args)
    else:
        res, asserted, sampled = _plane_checks(data, args)
    passed = all(asserted.values())
    code = EXIT_FAIL if not passed else (EXIT_SAMPLED if sampled else EXIT_PASS)
    report = {"schema": SCHEMA, "kind": "report", "artifact_kind": args.kind,
              "artifact_sha256": sha256(data),
              "config": dict(_config(args, VERIFY_KEYS), command="verify", kind=args.kind),
              "results": res, "asserted": asserted, "passed": passed, "exit_code": code}
    summary = {"kind": args.kind, "passed": passed, "exit_code": code,
               "asserted": asserted, "sha256": sha256(report)}
    return code, report, summary


# --- aux ---

def cmd_aux(args) -> tuple[int, dict, dict]:
    F = _field(args)
    curve = NodalCubic(F, args.beta_sq)
    if args.m is None:
        raise InvalidParameters("--m is required")
    tbar = _tbar(curve, args.tbar)
    config = dict(_config(args, ("p", "s", "m", "tbar", "beta_sq", "a", "b", "trials", "seed")),
                  command="aux", check=args.check)
    out: dict = {"schema": SCHEMA, "kind": "aux", "config": config}
    if args.check == "identities":
        rep = check_identities(curve, args.m, tbar, args.trials, args.seed)
        out["identities"] = rep
        code = EXIT_PASS if rep["all_passed"] else EXIT_FAIL
    else:
        if args.a is None or args.b is None:
            raise InvalidParameters("--a and --b are required")
        cp = CurveParams(curve, args.a, args.b, args.m, tbar)
        out["degenerate"] = check_degenerate(cp)
        cp.require_off_curve()
        sc = CosetScanner(curve, args.m, cp.tbar)
        cnt = count_points_M(cp, sc)
        out["count"] = cnt["count"]
        out["window"] = cnt["window"]
        out["window_detail"] = cnt["window_detail"]
        ws = secant_witnesses(cp, sc)
        out.update(witness_summary(ws))
        if args.check == "witnesses":
            out["pairs"] = [{"r": w.r, "v": w.v, "points": [list(w.P1), list(w.P2)],
                             "position": w.position.value} for w in ws]
        code = EXIT_PASS
    out["exit_code"] = code
    summary = {k: v for k, v in out.items() if k not in ("pairs", "config", "schema")}
    return code, out, summary


# --- entry point ---

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="nodal-arcs", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--p", type=int, help="characteristic (> 3)")
        p.add_argument("--s", type=int, default=1, help="q = p^s")
        p.add_argument("--m", type=int)
        p.add_argument("--tbar", help="coset representative: 'c0,c1' or 'g^k'")
        p.add_argument("--beta-sq", dest="beta_sq", type=int,
                       help="non-square beta^2 of F_q (default: least non-square)")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--out", help="write JSON here instead of standard output")

    c = sub.add_parser("construct", help="build an arc, bicovering arc or cap")
    c.add_argument("kind", choices=["arc", "bicovering", "cap"])
    common(c)
    c.add_argument("--m1", type=int)
    c.add_argument("--m2", type=int)
    c.add_argument("--N", type=int, help="dimension of the cap (multiple of 4)")

    v = sub.add_parser("verify", help="verify an artifact")
    v.add_argument("kind", choices=["arc", "bicovering", "cap"])
    v.add_argument("--in", dest="inp", required=True)
    v.add_argument("--mode", choices=["exhaustive", "sample"], default="exhaustive")
    v.add_argument("--samples", type=int, default=0)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--threads", type=int, default=1)
    v.add_argument("--out")

    a = sub.add_parser("aux", help="auxiliary-curve checks")
    a.add_argument("check", choices=["identities", "count", "witnesses"])
    common(a)
    a.add_argument("--a", type=int)
    a.add_argument("--b", type=int)
    a.add_argument("--trials", type=int, default=100)
    a.add_argument("--seed", type=int, default=0)
    return ap


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "threads", 1) < 1:
            raise InvalidParameters("--threads must be positive")
        handler = {"construct": cmd_construct, "verify": cmd_verify, "aux": cmd_aux}[args.command]
        code, payload, summary = handler(args)
    except UsageError as exc:
        sys.stderr.write(canonical({"error": "UsageError", "message": str(exc)}))
        return EXIT_USAGE
    except NodalArcsError as exc:
        if exc.code == "InternalAssertionFailure":
            raise
        sys.stderr.write(canonical({"error": exc.code, "message": str(exc)}))
        return EXIT_USAGE
    text = canonical(payload)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        sys.stdout.write(canonical(summary))
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
