"""The acceptance suite: one function per criterion, shared by the test
module and the selftest command.

Every check is exact rational arithmetic at a pinned tolerance (usually
equality); reports carry counts but never timings, so identical seeds give
byte-identical output.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import fixtures
from .dyadic import Branch, meet, meet_length
from .families import (
    Attached,
    Leaf,
    Lift,
    Plain,
    Schreier,
    Skipped,
    build_phi,
    canonical_stream,
    decide_membership,
    decide_membership_any_sigma,
    leaves,
    restrict_certificate,
    verify_certificate,
)
from .norms import (
    PlainLadder,
    SeqVector,
    Vector,
    lambda_constant,
    norm_composite,
    norm_tsirelson,
    norm_xn,
    pn_value,
)
from .oracles import PoolOracle, branch_pool, naive_tsirelson
from .ordinals import Ordinal
from .schreier import schreier_enumerate
from .certify import BlockSequence, check_skipped_hypotheses

DEFAULT_SEED = 20240601

_SCALES = {
    "full": dict(
        c1=200, c2_m=10, c2_ns=(1, 2), c2_N=16, c3=500, c4_min_nodes=2000,
        c5_words=6, c6_words=4, c6_pool=6, c7=500, c8=100, c9_m=8, c9_ns=(1, 2),
    ),
    "small": dict(
        c1=25, c2_m=6, c2_ns=(1,), c2_N=10, c3=60, c4_min_nodes=200,
        c5_words=4, c6_words=3, c6_pool=5, c7=60, c8=20, c9_m=5, c9_ns=(1,),
    ),
    "tiny": dict(
        c1=6, c2_m=4, c2_ns=(1,), c2_N=6, c3=12, c4_min_nodes=30,
        c5_words=3, c6_words=2, c6_pool=4, c7=16, c8=6, c9_m=4, c9_ns=(1,),
    ),
}


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number:02d} {self.name}: {verdict} ({self.detail})"


def _pool_vectors(seed: int, count: int, size: int = 5):
    rng = fixtures.rng_for(seed)
    pool = [Branch("0" * k + "1", 0) for k in range(1, 9)] + [
        Branch("1" + "0" * k + "1", 1) for k in range(0, 4)
    ]
    return [fixtures.random_vector(rng, pool, rng.randint(1, size)) for _ in range(count)]


# -- 1: Tsirelson oracle equivalence ----------------------------------------


def criterion_1(scale: str = "full", seed: int = DEFAULT_SEED) -> CriterionResult:
    p = _SCALES[scale]
    one = Ordinal.from_int(1)
    bad = 0
    fixed_ok = True
    v = SeqVector.from_pairs({1: 1, 2: 1})
    fixed_ok &= norm_tsirelson(v, one)[0] == Fraction(1)
    v = SeqVector.from_pairs({3: 1, 4: 1, 5: 1, 6: 1})
    fixed_ok &= norm_tsirelson(v, one)[0] == Fraction(3, 2)
    rng = fixtures.rng_for(seed)
    for _ in range(p["c1"]):
        x = fixtures.random_seq_vector(rng, 1, 8, rng.randint(1, 8))
        val, wit = norm_tsirelson(x, one)
        if val != naive_tsirelson(x, one) or wit.evaluate(x) != val:
            bad += 1
    ok = bad == 0 and fixed_ok
    return CriterionResult(
        1, "tsirelson-oracle", ok,
        f"{p['c1']} seeded vectors, {bad} disagreements, pinned values "
        f"{'ok' if fixed_ok else 'WRONG'}",
    )


# -- 2: basis lower estimate at desk scale -----------------------------------


def criterion_2(scale: str = "full", seed: int = DEFAULT_SEED) -> CriterionResult:
    p = _SCALES[scale]
    m, N = p["c2_m"], p["c2_N"]
    w = build_phi(canonical_stream(), Plain(Ordinal.from_int(1)), m)
    lam = lambda_constant(N)
    ladder = PlainLadder()
    one = Ordinal.from_int(1)
    checked = 0
    bad = 0
    for n in p["c2_ns"]:
        for F in schreier_enumerate(Ordinal.from_int(n), range(1, m + 1)):
            if not F:
                continue
            x = Vector.from_pairs({w.taus[j - 1]: 1 / lam.upper for j in F})
            enc = norm_composite(x, ladder, one, N)
            bound = lam.lower * len(F) / (2**n * lam.upper)
            checked += 1
            if enc.lower < bound:
                bad += 1
    return CriterionResult(
        2, "basis-ell1-lower", bad == 0,
        f"m={m} N={N} levels {p['c2_ns']}: {checked} admissible sets, {bad} below bound",
    )


# -- 3 & 4: heredity and structure corollaries --------------------------------

_BATCHES: dict = {}


def _batch(seed: int, count: int):
    key = (seed, count)
    if key in _BATCHES:
        return _BATCHES[key]
    rng = fixtures.rng_for(seed + 3)
    out = []
    while len(out) < count:
        level = rng.randint(1, 3)
        F, sigma = fixtures.certified_pair(rng, level, max_size=6)
        if len(F) > 6:
            continue
        params = Plain(Ordinal.from_int(level))
        cert = decide_membership(params, F, sigma)
        out.append((params, level, F, sigma, cert))
    _BATCHES[key] = out
    return out


def criterion_3(scale: str = "full", seed: int = DEFAULT_SEED) -> CriterionResult:
    p = _SCALES[scale]
    batch = _batch(seed, p["c3"])
    failures = 0
    subsets = 0
    for params, _, F, sigma, cert in batch:
        if cert is None:
            failures += 1
            continue
        elems = sorted(F, key=lambda b: b.sort_key)
        for mask in range(1, 1 << len(elems)):
            G = frozenset(e for i, e in enumerate(elems) if mask >> i & 1)
            subsets += 1
            if decide_membership(params, G, sigma) is None:
                failures += 1
                continue
            pruned = restrict_certificate(params, F, sigma, cert, G)
            if not verify_certificate(params, G, sigma, pruned):
                failures += 1
    return CriterionResult(
        3, "heredity-constructive", failures == 0,
        f"{len(batch)} certificates, {subsets} subsets, {failures} failures",
    )


def _walk_nodes(cert, sigma):
    yield cert, sigma
    if isinstance(cert, Skipped):
        for sig_i, inner in cert.parts:
            yield from _walk_nodes(inner, sig_i)
    elif isinstance(cert, Attached):
        for inner in cert.parts:
            yield from _walk_nodes(inner, sigma)
    elif isinstance(cert, Lift):
        yield from _walk_nodes(cert.inner, sigma)


def criterion_4(scale: str = "full", seed: int = DEFAULT_SEED) -> CriterionResult:
    p = _SCALES[scale]
    batch = _batch(seed, p["c3"])
    nodes = 0
    failures = 0
    certified = []
    for params, _, F, sigma, cert in batch:
        if cert is None:
            failures += 1
            continue
        certified.append((F, sigma, cert))
        # restrictions are generated certificates as well
        for drop in sorted(F, key=lambda b: b.sort_key):
            G = F - {drop}
            if G:
                certified.append(
                    (G, sigma, restrict_certificate(params, F, sigma, cert, G))
                )
    for F, sigma, cert in certified:
        for node, sig in _walk_nodes(cert, sigma):
            nodes += 1
            lv = sorted(leaves(node), key=lambda b: b.sort_key)
            ml = [meet_length(sig, t) for t in lv]
            if None in ml:
                failures += 1
                continue
            if node.varmin != min(ml) or node.varmax != max(ml):
                failures += 1
            if len(lv) >= 2:
                mp = min(
                    meet_length(a, b)
                    for i, a in enumerate(lv)
                    for b in lv[i + 1 :]
                )
                if node.varmin > mp:
                    failures += 1
            if isinstance(node, Leaf) and len(node.chain) > node.varmin:
                failures += 1
            if isinstance(node, (Skipped, Attached)) and len(node.parts) > node.varmin:
                failures += 1
            lo = sig.prefix_word(min(ml))
            hi = sig.prefix_word(max(ml))
            for t, l in zip(lv, ml):
                word = sig.prefix_word(l)
                if not (word.startswith(lo) and hi.startswith(word)):
                    failures += 1
    enough = nodes >= p["c4_min_nodes"]
    return CriterionResult(
        4, "structure-corollaries", failures == 0 and enough,
        f"{nodes} nodes checked (minimum {p['c4_min_nodes']}), {failures} failures",
    )


# -- 5: little lemma, exhaustively --------------------------------------------


def criterion_5(scale: str = "full", seed: int = DEFAULT_SEED) -> CriterionResult:
    p = _SCALES[scale]
    pool = branch_pool(p["c5_words"])
    n = len(pool)
    meets = [[meet(a, b) for b in pool] for a in pool]
    bad = 0
    total = 0
    for i in range(n):
        for j in range(n):
            mij = meets[i][j]
            row = meets[i]
            for k in range(n):
                if i == j == k:
                    continue
                total += 1
                left = row[k].proper_initial_of(mij)  # sigma^tau < sigma^sigma'
                right = row[k] == meets[j][k]  # sigma^tau == sigma'^tau
                if left != right:
                    bad += 1
    return CriterionResult(
        5, "little-lemma-exhaustive", bad == 0,
        f"{len(pool)} branches, {total} triples, {bad} equivalence failures",
    )


# -- 6: canonical witness completeness ----------------------------------------


def criterion_6(scale: str = "full", seed: int = DEFAULT_SEED) -> CriterionResult:
    p = _SCALES[scale]
    universe = branch_pool(p["c6_words"])
    pool = branch_pool(p["c6_pool"])
    oracle = PoolOracle(pool)
    disagreements = 0
    checked = 0
    levels = [Plain(Ordinal.from_int(1)), Plain(Ordinal.from_int(2))]
    sets = []
    n = len(universe)
    for i in range(n):
        sets.append((universe[i],))
        for j in range(i + 1, n):
            sets.append((universe[i], universe[j]))
            for k in range(j + 1, n):
                sets.append((universe[i], universe[j], universe[k]))
    for tup in sets:
        F = frozenset(tup)
        for params in levels:
            engine_says = decide_membership_any_sigma(params, F) is not None
            profiles = set()
            oracle_says = False
            for s in pool:
                if s in F:
                    continue
                profile = tuple(sorted((t.sort_key, meet_length(s, t)) for t in F))
                if profile in profiles:
                    continue
                profiles.add(profile)
                if oracle.member(params, F, s):
                    oracle_says = True
                    break
            checked += 1
            if engine_says != oracle_says:
                disagreements += 1
    return CriterionResult(
        6, "witness-completeness-oracle", disagreements == 0,
        f"{len(sets)} sets x 2 levels = {checked} decisions, "
        f"{disagreements} disagreements",
    )


# -- 7: ladder and regime coherence -------------------------------------------


def criterion_7(scale: str = "full", seed: int = DEFAULT_SEED) -> CriterionResult:
    p = _SCALES[scale]
    batch = _batch(seed, min(p["c3"], 120))
    ladder_bad = 0
    for params, level, F, sigma, cert in batch:
        if cert is None:
            ladder_bad += 1
            continue
        up = Plain(Ordinal.from_int(level + 1))
        lifted = Lift(cert, None, cert.varmin, cert.varmax)
        if not verify_certificate(up, F, sigma, lifted):
            ladder_bad += 1
        if decide_membership(up, F, sigma) is None:
            ladder_bad += 1
    rng = fixtures.rng_for(seed + 7)
    regime_bad = 0
    one = Ordinal.from_int(1)
    queries = fixtures.mixed_queries(rng, p["c7"], max_level=3, max_size=5)
    for F, sigma, level in queries:
        plain = decide_membership(Plain(Ordinal.from_int(level)), F, sigma)
        param = decide_membership(Schreier(one, level), F, sigma)
        if (plain is None) != (param is None):
            regime_bad += 1
    ok = ladder_bad == 0 and regime_bad == 0
    return CriterionResult(
        7, "ladder-and-regime", ok,
        f"{len(batch)} lifts ({ladder_bad} bad), {len(queries)} regime queries "
        f"({regime_bad} disagreements)",
    )


# -- 8: enclosure soundness ----------------------------------------------------


def criterion_8(scale: str = "full", seed: int = DEFAULT_SEED) -> CriterionResult:
    p = _SCALES[scale]
    ladder = PlainLadder()
    one = Ordinal.from_int(1)
    ns = (4, 8, 12, 16, 20)
    bad = 0
    lams = [lambda_constant(N) for N in ns]
    for (na, a), (nb, b) in zip(zip(ns, lams), list(zip(ns, lams))[1:]):
        if not (a.lower <= b.lower and b.upper <= a.upper):
            bad += 1
        if a.width() > Fraction(1, 2**na):
            bad += 1
    nest_vecs = _pool_vectors(seed + 80, max(3, p["c8"] // 10), size=4)
    for x in nest_vecs:
        prev = None
        for N in ns:
            enc = norm_composite(x, ladder, one, N)
            if enc.width() > x.ell1() / 2**N:
                bad += 1
            if prev is not None and not (
                prev.lower <= enc.lower and enc.upper <= prev.upper
            ):
                bad += 1
            prev = enc
    pn_vecs = _pool_vectors(seed + 81, p["c8"], size=4)
    pn_bad = 0
    for x in pn_vecs:
        enc = norm_composite(x, ladder, one, 8)
        for n in range(1, 9):
            if pn_value(x, n, ladder) > enc.upper:
                pn_bad += 1
    ok = bad == 0 and pn_bad == 0
    return CriterionResult(
        8, "enclosure-soundness", ok,
        f"lambda+{len(nest_vecs)} nests ({bad} bad), {len(pn_vecs)} projection "
        f"bounds ({pn_bad} bad)",
    )


# -- 9: skipped-branching constant ---------------------------------------------


def criterion_9(scale: str = "full", seed: int = DEFAULT_SEED) -> CriterionResult:
    p = _SCALES[scale]
    m = p["c9_m"]
    w = build_phi(canonical_stream(), Plain(Ordinal.from_int(1)), m)
    lam = lambda_constant(12)
    vectors = [Vector.from_pairs({tau: 1 / lam.upper}) for tau in w.taus]
    seq = BlockSequence(tuple(vectors))
    data = []
    for tau in w.taus:
        l = meet_length(w.sigma, tau)
        word = tau.prefix_word(l + 1) + str(1 - tau.bit(l + 2))
        sig_k = Branch(word, 1 - int(word[-1]))
        data.append((frozenset((tau,)), sig_k, Leaf((tau,), l + 1, l + 1)))
    c = Fraction(1, 2)
    bad = 0
    unions = 0
    for n in p["c9_ns"]:
        cert = check_skipped_hypotheses(seq, data, w.sigma, c, n, 1, seed=seed)
        unions += cert.unions_checked
        if cert.constant != 2 * c / 2 ** (1 + n):
            bad += 1
    return CriterionResult(
        9, "skipped-constant", bad == 0,
        f"m={m}, n in {p['c9_ns']}: {unions} unions certified, {bad} constant mismatches",
    )


# -- 10: determinism -----------------------------------------------------------


def criterion_10(scale: str = "full", seed: int = DEFAULT_SEED) -> CriterionResult:
    first = render_report(run_criteria(seed, "tiny", upto=9), seed, "tiny")
    second = render_report(run_criteria(seed, "tiny", upto=9), seed, "tiny")
    ok = first == second
    return CriterionResult(
        10, "selftest-determinism", ok,
        "two tiny-scale runs byte-identical" if ok else "reports differ",
    )


_CRITERIA = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
]


def run_criteria(seed: int, scale: str, upto: int = 10) -> list[CriterionResult]:
    return [fn(scale, seed) for fn in _CRITERIA[:upto]]


def render_report(results: list[CriterionResult], seed: int, scale: str) -> str:
    lines = [f"treefam selftest seed={seed} scale={scale}"]
    lines.extend(r.line() for r in results)
    passed = sum(r.passed for r in results)
    lines.append(f"selftest: {passed}/{len(results)} criteria passed")
    return "\n".join(lines)


def run_all(seed: int = DEFAULT_SEED, scale: str = "small") -> tuple[str, bool]:
    results = run_criteria(seed, scale)
    report = render_report(results, seed, scale)
    return report, all(r.passed for r in results)
