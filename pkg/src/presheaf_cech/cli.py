"""Command-line entry point: ``presheaf-cech <command> [options]``.

Exit codes: 0 success, 1 a verified claim failed, 2 invalid input.
Reports are deterministic: the same inputs and seeds give the same bytes.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys

from . import __version__
from .cech import cohomology_report
from .classify import classify
from .errors import BudgetExceeded, FunctorialityError, InvalidSiteError, PresheafCechError
from .generators import FLAVORS, GeneratorConfig, generate
from .plus import plus, sheafify
from .presheaf import SetPresheaf, abelianize, validate_presheaf
from .site import validate_site
from .theorems import CLAIMS, run_suite

EXIT_OK, EXIT_CLAIM_FAILED, EXIT_INVALID = 0, 1, 2


class InputError(Exception):
    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = [str(v) for v in violations]


def _read_json(path, what):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {what} file {path}: {exc.strerror}") from exc
    try:
        return json.loads(data), hashlib.sha256(data).hexdigest()
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        where = f"line {exc.lineno} column {exc.colno}" if isinstance(exc, json.JSONDecodeError) else "encoding"
        raise InputError(f"{what} file {path} is not valid JSON ({where}): {exc}") from exc


def _unwrap(raw, key):
    # accept bare objects, {"site": ..., "presheaf": ...} bundles and generate reports
    if isinstance(raw, dict) and isinstance(raw.get("result"), dict):
        raw = raw["result"]
    if isinstance(raw, dict) and key in raw:
        raw = raw[key]
    return raw


def _load_site(path, digests):
    raw, digests["site"] = _read_json(path, "site")
    raw = _unwrap(raw, "site")
    try:
        return validate_site(raw)
    except InvalidSiteError as exc:
        raise InputError("invalid site", exc.violations) from exc


def _load_presheaf(site, path, digests):
    raw, digests["presheaf"] = _read_json(path, "presheaf")
    raw = _unwrap(raw, "presheaf")
    try:
        if isinstance(raw, dict) and "sections" in raw:
            return abelianize(SetPresheaf.from_json(site, raw))
        return validate_presheaf(site, raw)
    except FunctorialityError as exc:
        raise InputError("invalid presheaf", exc.violations) from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid presheaf: {exc}") from exc


def _inputs(args, need_presheaf=True):
    digests = {}
    if not args.site:
        raise InputError("--site is required")
    site = _load_site(args.site, digests)
    F = None
    if args.presheaf:
        F = _load_presheaf(site, args.presheaf, digests)
    elif need_presheaf:
        raise InputError("--presheaf is required")
    return site, F, digests


def _manifest(args, digests, **extra):
    m = {"command": args.command, "tool_version": __version__, "inputs": digests}
    m.update(extra)
    return m


# commands


def cmd_validate(args):
    site, F, digests = _inputs(args, need_presheaf=False)
    result = {"site": {"valid": True, "objects": len(site.objects), "warnings": list(site.warnings)}}
    if F is not None:
        result["presheaf"] = {"valid": True, "dims": F.dims}
    lines = [f"site: valid ({len(site.objects)} objects)"]
    lines += [f"  warning: {w}" for w in site.warnings]
    if F is not None:
        lines.append(f"presheaf: valid, dims {F.dims}")
    return EXIT_OK, _manifest(args, digests), result, lines


def cmd_cohomology(args):
    site, F, digests = _inputs(args)
    if args.object is not None and args.object not in site.index:
        raise InputError(f"unknown object {args.object!r}")
    if args.max_degree < -1:
        raise InputError("--max-degree must be at least -1")
    objects = None if args.object is None else [args.object]
    report = cohomology_report(F, args.max_degree, objects)
    result = report.to_json()
    lines = []
    for x, per_deg in result["cohomology"].items():
        for n, entry in per_deg.items():
            covers = ", ".join(f"[{k}]:{d}" for k, d in entry["per_cover"].items())
            lines.append(f"H^{n}({x}) = {entry['colimit']}    per cover {covers}")
    for x in result["non_filtered_cover_posets"]:
        lines.append(f"note: the cover poset of {x} is not filtered")
    return EXIT_OK, _manifest(args, digests, max_degree=args.max_degree), result, lines


def _verdict_lines(v):
    lines = [f"separated: {v.separated}", f"lavish: {v.lavish}", f"sheaf: {v.sheaf}"]
    for k, w in v.witnesses.items():
        if w is not None:
            lines.append(f"  not {k}: object {w[0]}, cover [{w[1]}]")
    return lines


def cmd_classify(args):
    _, F, digests = _inputs(args)
    v = classify(F)
    return EXIT_OK, _manifest(args, digests), v.to_json(), _verdict_lines(v)


def cmd_plus(args):
    _, F, digests = _inputs(args)
    r = plus(F)
    result = {"plus_presheaf": r.plus_presheaf.to_json(), "unit": r.unit.to_json()}
    return EXIT_OK, _manifest(args, digests), result, [f"F+ dims: {r.plus_presheaf.dims}"]


def cmd_sheafify(args):
    _, F, digests = _inputs(args)
    sh, unit = sheafify(F)
    v = classify(sh)
    result = {"sheaf": sh.to_json(), "unit": unit.to_json(), "verdict": v.to_json()}
    lines = [f"F++ dims: {sh.dims}"] + _verdict_lines(v)
    return EXIT_OK, _manifest(args, digests), result, lines


def cmd_verify(args):
    digests = {}
    F = None
    if args.site or args.presheaf:
        _, F, digests = _inputs(args)
    claims = CLAIMS if args.suite == "all" else (args.suite,)
    if F is not None and "lemma2" in claims:
        claims = tuple(c for c in claims if c != "lemma2")
        if not claims:
            raise InputError("the lemma2 suite runs on random squares and takes no presheaf")
    outcomes = []
    for claim in claims:
        outcomes.extend(run_suite(claim, seeds=args.seeds, start=args.seed, presheaf=F))
    counts = {s: sum(o.status == s for o in outcomes) for s in ("pass", "fail", "precondition")}
    result = {"summary": counts, "outcomes": [o.to_json() for o in outcomes]}
    lines = [f"{o.claim:10s} {o.status:12s} {o.instance}" for o in outcomes]
    lines.append(f"{counts['pass']} pass, {counts['fail']} fail, {counts['precondition']} precondition")
    code = EXIT_CLAIM_FAILED if counts["fail"] else EXIT_OK
    manifest = _manifest(args, digests, suite=args.suite, seed=args.seed, seeds=args.seeds)
    return code, manifest, result, lines


def cmd_generate(args):
    try:
        cfg = GeneratorConfig(seed=args.seed, max_objects=args.max_objects, max_dim=args.max_dim,
                              max_covers=args.max_covers, max_legs=args.max_legs,
                              budget=args.budget, flavor=args.flavor)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    try:
        result = generate(cfg)
    except BudgetExceeded as exc:
        raise InputError(f"{exc} (stats: {exc.stats})") from exc
    lines = [f"site objects: {result['site']['objects']}", f"dims: {result['presheaf'].get('dims')}"]
    return EXIT_OK, _manifest(args, {}, seed=args.seed), result, lines


COMMANDS = {
    "validate": cmd_validate,
    "cohomology": cmd_cohomology,
    "classify": cmd_classify,
    "plus": cmd_plus,
    "sheafify": cmd_sheafify,
    "verify": cmd_verify,
    "generate": cmd_generate,
}


def build_parser():
    p = argparse.ArgumentParser(prog="presheaf-cech",
                                description="Cech cohomology and sheaf conditions for presheaves on finite poset sites.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, presheaf=True):
        sp.add_argument("--site", help="site JSON file")
        if presheaf:
            sp.add_argument("--presheaf", help="presheaf JSON file")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--output", help="write the report here instead of stdout")

    common(sub.add_parser("validate", help="check a site and optionally a presheaf"))
    sp = sub.add_parser("cohomology", help="per-cover and colimit cohomology dimensions")
    common(sp)
    sp.add_argument("--object")
    sp.add_argument("--max-degree", type=int, default=2)
    common(sub.add_parser("classify", help="separated / lavish / sheaf verdict"))
    common(sub.add_parser("plus", help="one plus construction and its unit"))
    common(sub.add_parser("sheafify", help="two plus constructions and the composite unit"))
    sp = sub.add_parser("verify", help="run the claim suites")
    common(sp)
    sp.add_argument("--suite", choices=CLAIMS + ("all",), default="all")
    sp.add_argument("--seeds", type=int, default=10, help="random instances per suite")
    sp.add_argument("--seed", type=int, default=0, help="first random seed")
    sp = sub.add_parser("generate", help="random site and presheaf")
    sp.add_argument("--format", choices=("text", "json"), default="json")
    sp.add_argument("--output")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--flavor", choices=FLAVORS, default="arbitrary")
    defaults = GeneratorConfig()
    for name in ("max_objects", "max_dim", "max_covers", "max_legs", "budget"):
        sp.add_argument("--" + name.replace("_", "-"), type=int, default=getattr(defaults, name))
    return p


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        code, manifest, result, lines = COMMANDS[args.command](args)
    except InputError as exc:
        if getattr(args, "format", "text") == "json":
            report = {"manifest": {"command": args.command, "tool_version": __version__},
                      "error": str(exc), "violations": exc.violations}
            _emit(json.dumps(report, indent=2, ensure_ascii=False) + "\n", None)
        print(f"error: {exc}", file=sys.stderr)
        for v in exc.violations:
            print(f"  - {v}", file=sys.stderr)
        return EXIT_INVALID
    except PresheafCechError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.format == "json":
        text = json.dumps({"manifest": manifest, "result": result}, indent=2, ensure_ascii=False) + "\n"
    else:
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
