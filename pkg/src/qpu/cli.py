"""Command-line entry point: ``qpu <subcommand> ...``.

Exit codes: 0 verified / true, 1 falsified / false, 2 usage or capacity error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__, catalog
from .escalate import (
    EscalationBudgetError,
    criterion_check,
    escalate_tree,
    is_proper,
    missed_primes,
    prime_truant,
)
from .forms import DiagonalForm, FormError, parse_form
from .goodvec import WorkBudgetError, good_residue_set, good_vectors
from .local import genus_of
from .prooflib import (
    MateTransferClaim,
    ScriptFormatError,
    SieveBoundError,
    builtin_scripts,
    builtin_transfer_claims,
    load_script_file,
    verify_mate_transfer,
    verify_scripts,
)
from .sieve import RepresentationSieve, SieveCapacityError, SieveFormatError, build_sieve, represents_direct


class UsageError(Exception):
    pass


def _diag(text: str) -> DiagonalForm:
    f = parse_form(text)
    if not isinstance(f, DiagonalForm):
        raise UsageError(f"{text!r} must be a diagonal coefficient list")
    return f


def _emit(args, command: str, inputs: dict, result, witnesses=None) -> None:
    if not getattr(args, "json", None):
        return
    cert = {
        "command": command,
        "inputs": inputs,
        "result": result,
        "witnesses": witnesses if witnesses is not None else [],
        "tool_version": __version__,
    }
    Path(args.json).write_text(json.dumps(cert, sort_keys=True, indent=2) + "\n")


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("QPU_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"QPU_THREADS must be an integer, got {env!r}") from None
    return 1


# ---------------------------------------------------------------------------
# subcommands


def cmd_represents(args) -> int:
    f = parse_form(args.form)
    w = represents_direct(f, args.n)
    if w is None:
        print(f"{args.n} is not represented by {f}")
    else:
        print(f"{args.n} = {f} at {list(w.witness)}")
    _emit(args, "represents", {"form": str(f), "n": args.n}, {"represented": w is not None},
          [list(w.witness)] if w else [])
    return 0 if w else 1


def cmd_sieve(args) -> int:
    if args.action == "info":
        if not args.path:
            raise UsageError("sieve info needs --path")
        sv = RepresentationSieve.load(args.path)
        print(f"bound {sv.bound}; {int(sv.bits.sum())} represented, {int((~sv.bits).sum())} missing")
        return 0
    f = parse_form(args.form)
    sv = build_sieve(f, args.bound)
    if args.action == "build":
        if not args.path:
            raise UsageError("sieve build needs --path")
        sv.save(args.path)
        print(f"wrote sieve of {f} up to {args.bound} to {args.path}")
    else:
        vals = sv.missing() if args.missing else sv.values()
        out = "\n".join(map(str, vals.tolist())) + "\n"
        if args.path:
            Path(args.path).write_text(out)
        else:
            sys.stdout.write(out)
    return 0


def cmd_truant(args) -> int:
    f = _diag(args.form)
    t = prime_truant(f, args.bound)
    print("none" if t is None else t)
    _emit(args, "truant", {"form": str(f), "bound": args.bound}, {"truant": t})
    return 0 if t is None else 1


def cmd_criterion(args) -> int:
    f = _diag(args.form)
    ok, missed = criterion_check(f)
    print("prime-universal (criterion S)" if ok else f"not prime-universal; misses {missed}")
    _emit(args, "criterion", {"form": str(f)}, {"prime_universal": ok, "missed": missed})
    return 0 if ok else 1


def cmd_proper(args) -> int:
    f = _diag(args.form)
    ok, missed = criterion_check(f)
    if not ok:
        print(f"not prime-universal (misses {missed}); properness does not apply")
        _emit(args, "proper", {"form": str(f)}, {"prime_universal": False, "proper": None})
        return 1
    prop = is_proper(f)
    print("proper" if prop else "not proper")
    _emit(args, "proper", {"form": str(f)}, {"prime_universal": True, "proper": prop})
    return 0 if prop else 1


def cmd_escalate(args) -> int:
    try:
        tree = escalate_tree(args.max_rank, node_cap=args.node_cap, audit_bound=args.audit, resolve_stuck=True)
    except EscalationBudgetError as exc:
        print(str(exc), file=sys.stderr)
        if args.tree:
            Path(args.tree).write_text(exc.tree.to_json())
        return 2
    proper = tree.proper_by_rank()
    for k, forms in proper.items():
        print(f"rank {k}: {len(forms)} proper")
        if args.list:
            for f in forms:
                print(f"  {f!r}")
    print(f"{tree.node_count} nodes")
    bad = tree.contradictions()
    if args.audit:
        print(f"criterion/audit disagreements: {len(bad)}")
    if args.tree:
        Path(args.tree).write_text(tree.to_json())
    if args.dot:
        Path(args.dot).write_text(tree.to_dot())
    _emit(args, "escalate", {"max_rank": args.max_rank, "audit": args.audit},
          {"proper": {str(k): [str(f) for f in v] for k, v in proper.items()}, "nodes": tree.node_count,
           "disagreements": [list(c) for c, _ in bad]})
    return 0 if not bad else 1


def _mates_for(f, g_texts):
    if g_texts:
        return [parse_form(t) for t in g_texts]
    if not isinstance(f, DiagonalForm):
        raise UsageError("give --g mates explicitly for a non-diagonal form")
    return list(genus_of(f).mates)


def cmd_goodvec(args) -> int:
    f, g = parse_form(args.f), parse_form(args.g)
    cert = good_vectors(f, g, args.d, args.a)
    print(f"good {cert.good_count} / {cert.total_count}")
    print(f"precedes: {'true' if cert.holds else 'false'}")
    if args.json:
        Path(args.json).write_text(json.dumps(
            {"command": "goodvec", "inputs": {"f": args.f, "g": args.g, "d": args.d, "a": args.a},
             "result": {"precedes": cert.holds, "good_count": cert.good_count, "total_count": cert.total_count},
             "witnesses": cert.to_dict()["witnesses"], "tool_version": __version__},
            sort_keys=True, indent=2) + "\n")
    return 0 if cert.holds else 1


def cmd_good_residues(args) -> int:
    f = parse_form(args.f)
    mates = _mates_for(f, args.g)
    rs = sorted(good_residue_set(f, mates, args.d))
    print(f"good residues mod {args.d}: {rs}")
    _emit(args, "good-residues", {"f": str(f), "mates": [str(m) for m in mates], "d": args.d}, {"residues": rs})
    return 0


def cmd_proof_script(args) -> int:
    if args.file:
        scripts = load_script_file(args.file)
    else:
        scripts = list(builtin_scripts())
    if args.name:
        scripts = [s for s in scripts if s.name == args.name]
        if not scripts:
            raise UsageError(f"no script named {args.name!r}")
    if args.list:
        for s in scripts:
            print(f"{s.name}: g={s.target} M={s.modulus} base={s.base}" + (" (searched table)" if s.reconstructed else ""))
        return 0
    reports = verify_scripts(scripts, args.bound)
    for r in reports:
        print(r.summary())
    ok = all(r.ok for r in reports)
    _emit(args, "proof-script", {"bound": args.bound, "names": [s.name for s in scripts]},
          {"ok": ok}, [r.to_dict() for r in reports])
    return 0 if ok else 1


def cmd_mate_transfer(args) -> int:
    if args.g:
        if not (args.mate and args.modulus and args.residues):
            raise UsageError("mate-transfer needs --g, --mate, --modulus and --residues")
        claims = [MateTransferClaim(parse_form(args.g), parse_form(args.mate), args.modulus,
                                    frozenset(int(r) for r in args.residues.split(",")), args.bound, "custom")]
    else:
        claims = list(builtin_transfer_claims())
    ok = True
    out = []
    for c in claims:
        r = verify_mate_transfer(c)
        ok &= r.ok
        print(f"{c.name or c.g}: {'holds' if r.ok else 'FAILS'} ({r.checked} values checked; counterexamples {r.counterexamples[:10]})")
        out.append({"name": c.name, "g": str(c.g), "mate": str(c.mate), "modulus": c.modulus,
                    "residues": sorted(c.residues), "bound": c.bound, "counterexamples": r.counterexamples})
    _emit(args, "mate-transfer", {"count": len(claims)}, {"ok": ok}, out)
    return 0 if ok else 1


def _print_table(which: str) -> int:
    ok = True
    if which == "1":
        for k, forms in catalog.higher_proper_forms().items():
            for f in forms:
                good, _ = criterion_check(f)
                prop = good and is_proper(f)
                ok &= prop
                print(f"{f!r:24} {'proper prime-universal' if prop else 'FAILS'}")
        tree = escalate_tree(6)
        got = tree.proper_by_rank()
        want = catalog.higher_proper_forms()
        same = all(set(got[k]) == set(want[k]) for k in (5, 6))
        ok &= same
        print(f"escalation reproduces the rank 5/6 list: {same}")
    elif which == "2":
        for p, forms in catalog.SINGLE_EXCEPTIONS.items():
            for f in forms:
                got = missed_primes(f, 10**5)
                ok &= got == [p]
                print(f"{f!r:22} listed {p:>3}  missed primes <= 1e5: {got}")
    elif which == "candidates":
        for f in catalog.QUATERNARY_CANDIDATES:
            good, missed = criterion_check(f)
            ok &= good
            print(f"{f!r:16} {'prime-universal' if good else missed}")
    elif which == "truants":
        for f, p in catalog.TRUANTS.items():
            got = prime_truant(f, 10**5)
            ok &= got == p
            print(f"{f!r:22} listed {p:>3}  computed {got}")
    return 0 if ok else 1


def _run_check(n: int):
    from .checks import CHECKS

    return CHECKS[n]()


def cmd_verify(args) -> int:
    if args.table:
        return _print_table(args.table)
    from .checks import CHECKS

    if args.all:
        nums = sorted(CHECKS)
    elif args.criterion:
        nums = sorted(set(args.criterion))
        unknown = [n for n in nums if n not in CHECKS]
        if unknown:
            raise UsageError(f"unknown criteria {unknown}")
    else:
        raise UsageError("verify-paper needs --all, --criterion N or --table")
    workers = _threads(args)
    if workers > 1 and len(nums) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_check, nums))
    else:
        results = [_run_check(n) for n in nums]
    for r in results:
        print(r.line())
    ok = all(r.ok for r in results)
    _emit(args, "verify-paper", {"criteria": nums}, {"ok": ok}, [r.to_dict() for r in results])
    return 0 if ok else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="write a JSON certificate")
    common.add_argument("--threads", type=int, default=None, help="worker processes (default: $QPU_THREADS or 1)")

    p = argparse.ArgumentParser(prog="qpu", description="Prime-universal diagonal quadratic forms toolkit")
    p.add_argument("--version", action="version", version=f"qpu {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("represents", parents=[common], help="is n represented by a form")
    s.add_argument("--form", required=True)
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_represents)

    s = sub.add_parser("sieve", parents=[common], help="build, export or inspect a representation sieve")
    s.add_argument("action", choices=["build", "export", "info"])
    s.add_argument("--form")
    s.add_argument("--bound", type=int, default=10**6)
    s.add_argument("--path", help="sieve file (build/info) or text output (export)")
    s.add_argument("--missing", action="store_true", help="export the non-represented values")
    s.set_defaults(func=cmd_sieve)

    s = sub.add_parser("truant", parents=[common], help="smallest prime not represented")
    s.add_argument("--form", required=True)
    s.add_argument("--bound", type=int, default=10**5)
    s.set_defaults(func=cmd_truant)

    s = sub.add_parser("criterion", parents=[common], help="test the ten criterion primes")
    s.add_argument("--form", required=True)
    s.set_defaults(func=cmd_criterion)

    s = sub.add_parser("proper", parents=[common], help="is a prime-universal form proper")
    s.add_argument("--form", required=True)
    s.set_defaults(func=cmd_proper)

    s = sub.add_parser("escalate", parents=[common], help="run the escalation tree")
    s.add_argument("--max-rank", type=int, default=6)
    s.add_argument("--audit", type=int, default=None, metavar="B", help="audit every node against primes <= B")
    s.add_argument("--node-cap", type=int, default=500_000)
    s.add_argument("--tree", metavar="PATH", help="write the tree as JSON")
    s.add_argument("--dot", metavar="PATH", help="write the tree as a graphviz file")
    s.add_argument("--list", action="store_true", help="list the proper forms")
    s.set_defaults(func=cmd_escalate)

    s = sub.add_parser("goodvec", parents=[common], help="good vectors and the precedes relation")
    s.add_argument("--f", required=True)
    s.add_argument("--g", required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--a", type=int, required=True)
    s.set_defaults(func=cmd_goodvec)

    s = sub.add_parser("good-residues", parents=[common], help="residues where every genus mate precedes f")
    s.add_argument("--f", required=True)
    s.add_argument("--g", action="append", help="a genus mate (repeatable); default: recorded genus")
    s.add_argument("--d", type=int, required=True)
    s.set_defaults(func=cmd_good_residues)

    s = sub.add_parser("proof-script", parents=[common], help="verify covering-congruence scripts")
    s.add_argument("--name")
    s.add_argument("--file", help="script file (default: the built-in set)")
    s.add_argument("--bound", type=int, default=10**6)
    s.add_argument("--list", action="store_true")
    s.set_defaults(func=cmd_proof_script)

    s = sub.add_parser("mate-transfer", parents=[common], help="check Q(mate) inside Q(g) on a congruence")
    s.add_argument("--g")
    s.add_argument("--mate")
    s.add_argument("--modulus", type=int)
    s.add_argument("--residues", help="comma-separated residues")
    s.add_argument("--bound", type=int, default=10**4)
    s.set_defaults(func=cmd_mate_transfer)

    s = sub.add_parser("verify-paper", parents=[common], help="run the reproduction checks")
    s.add_argument("--all", action="store_true")
    s.add_argument("--criterion", type=int, action="append")
    s.add_argument("--table", choices=["1", "2", "candidates", "truants"])
    s.set_defaults(func=cmd_verify)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # --help and --version exit 0; argparse errors exit 2
        return 0 if exc.code in (0, None) else 2
    try:
        return args.func(args)
    except (UsageError, FormError, SieveCapacityError, SieveFormatError, SieveBoundError,
            ScriptFormatError, WorkBudgetError, ValueError, KeyError, OSError) as exc:
        print(f"qpu: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
