"""Deterministic command-line front end.

Exit codes: 0 for success / true verdicts, 1 for false or absent verdicts
(including INCONCLUSIVE), 2 for malformed input.  All rationals print as
p/q.  Identical invocations on identical files produce byte-identical
output.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import acceptance, fixtures
from .certify import BlockSequence, InconclusiveReport, refine_to_certificate
from .dyadic import Branch, meet
from .errors import ParseError, TreefamError
from .families import (
    PhiWitness,
    Plain,
    build_phi,
    canonical_stream,
    check_phi_report,
    decide_membership,
    explain_certificate,
    format_certificate,
    parse_certificate,
    parse_params,
)
from .norms import norm_composite, norm_tsirelson, norm_xn, parse_ladder
from .ordinals import Ordinal
from .schreier import schreier_enumerate, schreier_member


def _frac(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _parse_nat_set(text: str) -> tuple[int, ...]:
    if not text.strip():
        return ()
    try:
        return tuple(sorted(set(int(t) for t in text.split(","))))
    except ValueError as exc:
        raise ParseError("natural-number set is comma-separated integers", text) from exc


def _parse_range(text: str) -> range:
    if ".." in text:
        a, b = text.split("..", 1)
        return range(int(a), int(b) + 1)
    raise ParseError("universe is written lo..hi", text)


def _parse_branch_set(text: str) -> frozenset[Branch]:
    return frozenset(Branch.parse(t) for t in text.split(","))


def _fmt_branch_set(F) -> str:
    return ",".join(str(b) for b in sorted(F, key=lambda b: b.sort_key))


# -- subcommand handlers ------------------------------------------------------


def _cmd_schreier(args) -> int:
    alpha = Ordinal.parse(args.alpha)
    if args.mode == "check":
        F = _parse_nat_set(args.set)
        verdict = schreier_member(alpha, F)
        print("true" if verdict else "false")
        return 0 if verdict else 1
    universe = _parse_range(args.universe)
    for F in schreier_enumerate(alpha, universe):
        print("{" + ",".join(str(n) for n in F) + "}")
    return 0


def _cmd_meet(args) -> int:
    a, b = Branch.parse(args.left), Branch.parse(args.right)
    print(meet(a, b))
    return 0


def _cert_block(params, sigma, F, cert) -> str:
    lines = [
        f"regime {params}",
        f"sigma {sigma}",
        f"set {_fmt_branch_set(F)}",
        "cert",
        format_certificate(cert),
    ]
    return "\n".join(lines)


def _cmd_gmember(args) -> int:
    params = parse_params(args.regime)
    sigma = Branch.parse(args.sigma)
    F = _parse_branch_set(args.set)
    cert = decide_membership(params, F, sigma)
    if cert is None:
        print("non-member")
        return 1
    print("member")
    print(_cert_block(params, sigma, F, cert))
    return 0


def _cmd_gcert(args) -> int:
    text = Path(args.file).read_text()
    lines = text.splitlines()
    start = next(
        (i for i, ln in enumerate(lines) if ln.startswith("regime ")), None
    )
    if start is None:
        raise ParseError("certificate file needs a 'regime' line", args.file)
    params = parse_params(lines[start].split(None, 1)[1])
    sigma = Branch.parse(lines[start + 1].split(None, 1)[1])
    F = _parse_branch_set(lines[start + 2].split(None, 1)[1])
    if lines[start + 3].strip() != "cert":
        raise ParseError("expected 'cert' marker", lines[start + 3])
    cert = parse_certificate("\n".join(lines[start + 4 :]))
    errs = explain_certificate(params, F, sigma, cert)
    if errs:
        print("invalid")
        for e in errs:
            print(e)
        return 1
    print("valid")
    return 0


def _phi_block(w: PhiWitness) -> str:
    lines = [f"regime {w.regime}", f"alpha {w.alpha}", f"sigma {w.sigma}"]
    lines.extend(f"tau {k + 1} {tau}" for k, tau in enumerate(w.taus))
    return "\n".join(lines)


def _cmd_phi(args) -> int:
    if args.mode == "build":
        params = parse_params(args.regime)
        if args.seed is None:
            stream = canonical_stream()
        else:
            rng = fixtures.rng_for(args.seed)
            stream = iter(lambda: fixtures.random_branch(rng, 10), None)
        w = build_phi(stream, params, args.m, probe_budget=args.budget)
        block = _phi_block(w)
        if args.out:
            Path(args.out).write_text(block + "\n")
        print(block)
        return 0
    lines = Path(args.file).read_text().splitlines()
    header = {ln.split()[0]: ln.split(None, 1)[1] for ln in lines if ln.strip()}
    regime = parse_params(header["regime"])
    taus = []
    for ln in lines:
        if ln.startswith("tau "):
            _, _, lit = ln.split(None, 2)
            taus.append(Branch.parse(lit))
    w = PhiWitness(
        Branch.parse(header["sigma"]), tuple(taus), Ordinal.parse(header["alpha"]), regime
    )
    report = check_phi_report(w)
    if report is None:
        print("true")
        return 0
    print("false")
    print(report)
    return 1


def _cmd_norm(args) -> int:
    if args.mode == "xn":
        params = parse_params(args.level)
        x = fixtures.parse_vector(Path(args.vec).read_text())
        val, F = norm_xn(x, params)
        print(f"value={_frac(val)}")
        print(f"witness={_fmt_branch_set(F) if F else 'empty'}")
        return 0
    if args.mode == "t":
        alpha = Ordinal.parse(args.alpha)
        x = fixtures.parse_seq_vector(Path(args.vec).read_text())
        val, tree = norm_tsirelson(x, alpha)
        print(f"value={_frac(val)}")
        print(f"witness={_witness_text(tree)}")
        return 0
    ladder = parse_ladder(args.regime)
    t_alpha = Ordinal.parse(args.talpha)
    x = fixtures.parse_vector(Path(args.vec).read_text())
    enc = norm_composite(x, ladder, t_alpha, args.trunc)
    print(enc)
    fams = ";".join(
        f"{n}:{_fmt_branch_set(F) if F else 'empty'}" for n, F in enc.witness.families
    )
    print(f"witness-levels={fams}")
    print(f"witness-tree={_witness_text(enc.witness.tree)}")
    return 0


def _witness_text(tree) -> str:
    from .norms import Point, Split

    if isinstance(tree, Point):
        return f"e{tree.position}"
    if isinstance(tree, Split):
        return "(" + "+".join(_witness_text(c) for c in tree.children) + ")/2"
    return "0"


def _cmd_certify(args) -> int:
    seq_path = Path(args.seq)
    vec_paths = [
        seq_path.parent / line.strip()
        for line in seq_path.read_text().splitlines()
        if line.strip() and not line.strip().startswith("#")
    ]
    vectors = tuple(fixtures.parse_vector(p.read_text()) for p in vec_paths)
    seq = BlockSequence(vectors)
    result = refine_to_certificate(seq, n=args.n, level_scan=args.scan, seed=args.seed)
    if isinstance(result, InconclusiveReport):
        print(result)
        return 1
    print(
        f"ell1-certificate mode={result.mode} n={result.n} "
        f"base-level={result.base_level} constant={_frac(result.constant)}"
    )
    print(f"sigma {result.sigma}")
    for k, entry in enumerate(result.entries):
        if result.mode == "SKIPPED":
            F, sig_k, _ = entry
            print(f"entry {k + 1} sigma_k={sig_k} set={_fmt_branch_set(F)}")
        elif result.mode == "ATTACHED":
            F, _ = entry
            print(f"entry {k + 1} set={_fmt_branch_set(F)}")
        else:
            pos, tau, coeff = entry
            print(f"entry {pos} branch={tau} coeff={_frac(coeff)}")
    print(f"unions-checked={result.unions_checked} samples-checked={result.samples_checked}")
    return 0


def _cmd_gen(args) -> int:
    rng = fixtures.rng_for(args.seed)
    if args.mode == "pairs":
        for _ in range(args.count):
            level = rng.randint(1, args.max_level)
            F, sigma = fixtures.certified_pair(rng, level, args.max_size)
            print(f"level={level} sigma={sigma} set={_fmt_branch_set(F)}")
        return 0
    if args.mode == "queries":
        for _ in range(args.count):
            F, sigma = fixtures.random_query(rng, args.max_size)
            print(f"sigma={sigma} set={_fmt_branch_set(F)}")
        return 0
    if args.mode == "vector":
        pool = [fixtures.random_branch(rng, 6) for _ in range(4 * args.size)]
        x = fixtures.random_vector(rng, pool, args.size)
        out = fixtures.format_vector(x)
        if args.out:
            Path(args.out).write_text(out)
        print(out, end="")
        return 0
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    names = []
    pool = [Branch("0" * k + "1", 0) for k in range(1, 2 * args.count + 2)]
    rng.shuffle(pool)
    for i in range(args.count):
        x = fixtures.random_vector(rng, pool[2 * i : 2 * i + 2], 2)
        name = f"vec{i + 1:02d}.txt"
        (outdir / name).write_text(fixtures.format_vector(x))
        names.append(name)
    (outdir / "seq.txt").write_text("\n".join(names) + "\n")
    print(str(outdir / "seq.txt"))
    return 0


def _cmd_selftest(args) -> int:
    report, ok = acceptance.run_all(seed=args.seed, scale=args.scale)
    print(report)
    return 0 if ok else 1


# -- parser -------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="treefam")
    sub = top.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("schreier", help="Schreier family membership and enumeration")
    ssub = p.add_subparsers(dest="mode", required=True)
    chk = ssub.add_parser("check")
    chk.add_argument("--alpha", required=True)
    chk.add_argument("--set", required=True)
    en = ssub.add_parser("enum")
    en.add_argument("--alpha", required=True)
    en.add_argument("--universe", required=True)

    p = sub.add_parser("meet", help="meet of two branches")
    p.add_argument("left")
    p.add_argument("right")

    p = sub.add_parser("gmember", help="decide family membership with certificate")
    p.add_argument("--regime", required=True)
    p.add_argument("--sigma", required=True)
    p.add_argument("--set", required=True)

    p = sub.add_parser("gcert", help="verify a certificate file")
    gsub = p.add_subparsers(dest="mode", required=True)
    gv = gsub.add_parser("verify")
    gv.add_argument("--file", required=True)

    p = sub.add_parser("phi", help="largeness witnesses")
    psub = p.add_subparsers(dest="mode", required=True)
    pb = psub.add_parser("build")
    pb.add_argument("--regime", required=True)
    pb.add_argument("--m", type=int, required=True)
    pb.add_argument("--seed", type=int, default=None)
    pb.add_argument("--budget", type=int, default=4096)
    pb.add_argument("--out", default=None)
    pc = psub.add_parser("check")
    pc.add_argument("--file", required=True)

    p = sub.add_parser("norm", help="exact norms and enclosures")
    nsub = p.add_subparsers(dest="mode", required=True)
    nx = nsub.add_parser("xn")
    nx.add_argument("--level", required=True)
    nx.add_argument("--vec", required=True)
    nt = nsub.add_parser("t")
    nt.add_argument("--alpha", required=True)
    nt.add_argument("--vec", required=True)
    nc = nsub.add_parser("composite")
    nc.add_argument("--regime", required=True)
    nc.add_argument("--talpha", required=True)
    nc.add_argument("--trunc", type=int, required=True)
    nc.add_argument("--vec", required=True)

    p = sub.add_parser("certify", help="l1 lower-bound certificates")
    csub = p.add_subparsers(dest="mode", required=True)
    ce = csub.add_parser("ell1")
    ce.add_argument("--seq", required=True)
    ce.add_argument("--n", type=int, default=1)
    ce.add_argument("--scan", type=int, default=8)
    ce.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("gen", help="reproducible fixtures")
    gsub = p.add_subparsers(dest="mode", required=True)
    gp = gsub.add_parser("pairs")
    gp.add_argument("--seed", type=int, required=True)
    gp.add_argument("--count", type=int, default=10)
    gp.add_argument("--max-level", type=int, default=3, dest="max_level")
    gp.add_argument("--max-size", type=int, default=6, dest="max_size")
    gq = gsub.add_parser("queries")
    gq.add_argument("--seed", type=int, required=True)
    gq.add_argument("--count", type=int, default=10)
    gq.add_argument("--max-size", type=int, default=5, dest="max_size")
    gv = gsub.add_parser("vector")
    gv.add_argument("--seed", type=int, required=True)
    gv.add_argument("--size", type=int, default=4)
    gv.add_argument("--out", default=None)
    gs = gsub.add_parser("seq")
    gs.add_argument("--seed", type=int, required=True)
    gs.add_argument("--count", type=int, default=4)
    gs.add_argument("--outdir", required=True)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("--scale", choices=["tiny", "small", "full"], default="small")
    p.add_argument("--seed", type=int, default=acceptance.DEFAULT_SEED)

    return top


_HANDLERS = {
    "schreier": _cmd_schreier,
    "meet": _cmd_meet,
    "gmember": _cmd_gmember,
    "gcert": _cmd_gcert,
    "phi": _cmd_phi,
    "norm": _cmd_norm,
    "certify": _cmd_certify,
    "gen": _cmd_gen,
    "selftest": _cmd_selftest,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return _HANDLERS[args.verb](args)
    except ParseError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except TreefamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
