"""Hereditary branch families on the dyadic tree, with proof-carrying membership.

A pair (F, sigma) -- F a finite set of branches, sigma a witness branch --
belongs to the level-1 family when the meets sigma^tau form a strict chain
whose length is controlled either by its first meet (plain regime) or by a
Schreier side condition (parametric regime).  Higher levels close under two
branching rules:

* skipped: blocks with their own witnesses sigma_i whose meets with sigma
  form a strict chain lying below each block's varmin;
* attached: blocks sharing the root witness, with strictly separated
  varmax/varmin ranges.

Plain levels are indexed by ordinals below w^w (limit levels gated through
the fundamental sequence); the parametric regime is indexed by a finite
level and a Schreier ordinal.  Membership is decided by dynamic programming
over meet profiles and returns a Certificate that an independent verifier
re-checks clause by clause.

Two facts proved at every level justify the search strategy and are
re-tested at desk scale by the acceptance suite: membership depends on the
witness only through its meets with F, and a member with at least two
elements always has a witness whose varmin equals the minimal pairwise
meet length of F.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import islice
from typing import Iterable, Iterator, Optional, Union

from .dyadic import Branch, Node, meet, meet_length
from .errors import CapExceeded, ParseError, ProbeBudgetExceeded, TreefamError
from .ordinals import Ordinal, fundamental_step
from .schreier import schreier_convolve_member, schreier_member

_ONE = Ordinal.from_int(1)


# ---------------------------------------------------------------------------
# family parameters


@dataclass(frozen=True)
class Plain:
    """The family at ordinal level alpha (cardinality side conditions)."""

    alpha: Ordinal

    def __post_init__(self):
        if self.alpha.is_zero:
            raise ValueError("plain family levels start at 1")

    def __str__(self):
        return f"plain:{self.alpha}"


@dataclass(frozen=True)
class Schreier:
    """The parametric family: finite level with Schreier-alpha side conditions."""

    alpha: Ordinal
    level: int

    def __post_init__(self):
        if self.alpha.is_zero:
            raise ValueError("Schreier side-condition index starts at 1")
        if self.level < 1:
            raise ValueError("parametric family levels start at 1")

    def __str__(self):
        return f"schreier:{self.alpha}:{self.level}"


FamilyParams = Union[Plain, Schreier]


def parse_params(text: str) -> FamilyParams:
    parts = text.strip().split(":")
    if parts[0] == "plain" and len(parts) == 2:
        return Plain(Ordinal.parse(parts[1]))
    if parts[0] == "schreier" and len(parts) == 3:
        try:
            level = int(parts[2])
        except ValueError as exc:
            raise ParseError("bad parametric level", text) from exc
        return Schreier(Ordinal.parse(parts[1]), level)
    raise ParseError("regime literal is plain:<ordinal> or schreier:<ordinal>:<n>", text)


def _is_base(params: FamilyParams) -> bool:
    if isinstance(params, Plain):
        return params.alpha == _ONE
    return params.level == 1


def _is_limit_level(params: FamilyParams) -> bool:
    return isinstance(params, Plain) and params.alpha.is_limit


def _pred(params: FamilyParams) -> FamilyParams:
    if isinstance(params, Plain):
        return Plain(params.alpha.predecessor())
    return Schreier(params.alpha, params.level - 1)


def _gate_step(params: Plain, n: int) -> Plain:
    return Plain(fundamental_step(params.alpha, n))


def _side_ok(params: FamilyParams, values: tuple[int, ...]) -> bool:
    """Branching side condition on an ascending tuple of meet values."""
    if isinstance(params, Plain):
        return len(values) <= values[0]
    return schreier_member(params.alpha, values)


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class Leaf:
    """Level-1 chain: branches ordered by meet length with the root witness."""

    chain: tuple[Branch, ...]
    varmin: int
    varmax: int


@dataclass(frozen=True)
class Skipped:
    """Skipped branching: (witness, inner certificate) per block."""

    parts: tuple[tuple[Branch, "Certificate"], ...]
    varmin: int
    varmax: int


@dataclass(frozen=True)
class Attached:
    """Attached branching: inner certificates sharing the root witness."""

    parts: tuple["Certificate", ...]
    varmin: int
    varmax: int


@dataclass(frozen=True)
class Lift:
    """Inclusion step: gate=None lifts one successor level; gate=n certifies a
    limit level through the n-th fundamental approximant (needs varmin >= n)."""

    inner: "Certificate"
    gate: int | None
    varmin: int
    varmax: int


Certificate = Union[Leaf, Skipped, Attached, Lift]


def leaves(cert: Certificate) -> frozenset[Branch]:
    if isinstance(cert, Leaf):
        return frozenset(cert.chain)
    if isinstance(cert, Skipped):
        out: frozenset[Branch] = frozenset()
        for _, inner in cert.parts:
            out |= leaves(inner)
        return out
    if isinstance(cert, Attached):
        out = frozenset()
        for inner in cert.parts:
            out |= leaves(inner)
        return out
    return leaves(cert.inner)


def certificate_depth(cert: Certificate) -> int:
    """Nesting depth counting branching nodes (lifts are free)."""
    if isinstance(cert, Leaf):
        return 1
    if isinstance(cert, Skipped):
        return 1 + max(certificate_depth(inner) for _, inner in cert.parts)
    if isinstance(cert, Attached):
        return 1 + max(certificate_depth(inner) for inner in cert.parts)
    return certificate_depth(cert.inner)


def _finite_meets(sigma: Branch, taus: Iterable[Branch]) -> dict[Branch, int] | None:
    out = {}
    for tau in taus:
        l = meet_length(sigma, tau)
        if l is None:
            return None
        out[tau] = l
    return out


# ---------------------------------------------------------------------------
# verifier


def explain_certificate(
    params: FamilyParams, F: Iterable[Branch], sigma: Branch, cert: Certificate
) -> list[str]:
    """Empty list iff the certificate proves (F, sigma) at the given level.

    Structural mismatches (leaves != F) are reported separately from clause
    violations, which name the failing clause and node.
    """
    errs: list[str] = []
    fset = frozenset(F)
    if leaves(cert) != fset:
        errs.append(
            f"structural: certificate leaves {{{_fmt_branches(leaves(cert))}}} "
            f"differ from F {{{_fmt_branches(fset)}}}"
        )
    _check_node(params, cert, sigma, "cert", errs)
    return errs


def verify_certificate(
    params: FamilyParams, F: Iterable[Branch], sigma: Branch, cert: Certificate
) -> bool:
    return not explain_certificate(params, F, sigma, cert)


def _fmt_branches(bs: Iterable[Branch]) -> str:
    return ",".join(str(b) for b in sorted(bs, key=lambda b: b.sort_key))


def _check_caches(node, sigma: Branch, path: str, errs: list[str]) -> None:
    """Cached varmin/varmax must equal the min/max meet length over the leaves."""
    ml = _finite_meets(sigma, leaves(node))
    if ml is None:
        errs.append(f"clause[{path}] meet-infinite: sigma lies in the leaf set")
        return
    lo, hi = min(ml.values()), max(ml.values())
    if node.varmin != lo:
        errs.append(f"clause[{path}] cache-varmin: cached {node.varmin}, recomputed {lo}")
    if node.varmax != hi:
        errs.append(f"clause[{path}] cache-varmax: cached {node.varmax}, recomputed {hi}")


def _check_node(
    level: FamilyParams, node: Certificate, sigma: Branch, path: str, errs: list[str]
) -> None:
    if isinstance(node, Leaf):
        if not _is_base(level):
            errs.append(f"clause[{path}] level-shape: leaf at non-base level {level}")
            return
        if not node.chain:
            errs.append(f"clause[{path}] leaf-chain: empty chain")
            return
        if len(set(node.chain)) != len(node.chain):
            errs.append(f"clause[{path}] leaf-chain: repeated branch")
            return
        lens = []
        for tau in node.chain:
            l = meet_length(sigma, tau)
            if l is None:
                errs.append(f"clause[{path}] leaf-i: sigma equals chain element {tau}")
                return
            lens.append(l)
        if lens[0] < 1:
            errs.append(f"clause[{path}] leaf-ii: first meet with sigma is empty")
        if any(a >= b for a, b in zip(lens, lens[1:])):
            errs.append(f"clause[{path}] leaf-ii: meets not strictly increasing")
        elif not _side_ok(level, tuple(lens)):
            errs.append(f"clause[{path}] leaf-iii: side condition fails on {tuple(lens)}")
        _check_caches(node, sigma, path, errs)
        return

    if isinstance(node, Lift):
        if node.gate is None:
            if _is_base(level):
                errs.append(f"clause[{path}] lift: nothing below the base level")
                return
            if _is_limit_level(level):
                errs.append(f"clause[{path}] lift: ungated lift at limit level {level}")
                return
            _check_node(_pred(level), node.inner, sigma, path + ".inner", errs)
        else:
            if not _is_limit_level(level):
                errs.append(f"clause[{path}] lift-gate: gate at non-limit level {level}")
                return
            if node.gate < 1:
                errs.append(f"clause[{path}] lift-gate: gate must be >= 1")
                return
            if node.inner.varmin < node.gate:
                errs.append(
                    f"clause[{path}] lift-gate: varmin {node.inner.varmin} < gate {node.gate}"
                )
            _check_node(_gate_step(level, node.gate), node.inner, sigma, path + ".inner", errs)
        if (node.varmin, node.varmax) != (node.inner.varmin, node.inner.varmax):
            errs.append(f"clause[{path}] cache-lift: caches differ from inner certificate")
        _check_caches(node, sigma, path, errs)
        return

    # branching nodes need a successor level
    if _is_base(level) or _is_limit_level(level):
        errs.append(f"clause[{path}] level-shape: branching at non-successor level {level}")
        return
    prev = _pred(level)

    if isinstance(node, Skipped):
        if not node.parts:
            errs.append(f"clause[{path}] skipped: no parts")
            return
        part_leaves = [leaves(inner) for _, inner in node.parts]
        _check_disjoint(part_leaves, path, "skipped-i", errs)
        ms = []
        for idx, (sig_i, inner) in enumerate(node.parts):
            sub = f"{path}.parts[{idx}]"
            l = meet_length(sigma, sig_i)
            if l is None:
                errs.append(f"clause[{sub}] skipped-ii: inner witness equals sigma")
                return
            ms.append(l)
            _check_node(prev, inner, sig_i, sub, errs)
            if l >= inner.varmin:
                errs.append(
                    f"clause[{sub}] skipped-iv: |sigma^sigma_i| = {l} not below varmin {inner.varmin}"
                )
        if ms[0] < 1:
            errs.append(f"clause[{path}] skipped-iii: first witness meet is empty")
        if any(a >= b for a, b in zip(ms, ms[1:])):
            errs.append(f"clause[{path}] skipped-iii: witness meets not strictly increasing")
        elif not _side_ok(level, tuple(ms)):
            errs.append(f"clause[{path}] skipped-v: side condition fails on {tuple(ms)}")
        if (node.varmin, node.varmax) != (ms[0], ms[-1]):
            errs.append(f"clause[{path}] cache-skipped: caches differ from witness meets")
        _check_caches(node, sigma, path, errs)
        return

    if isinstance(node, Attached):
        if not node.parts:
            errs.append(f"clause[{path}] attached: no parts")
            return
        part_leaves = [leaves(inner) for inner in node.parts]
        _check_disjoint(part_leaves, path, "attached-i", errs)
        for idx, inner in enumerate(node.parts):
            _check_node(prev, inner, sigma, f"{path}.parts[{idx}]", errs)
        for idx, (a, b) in enumerate(zip(node.parts, node.parts[1:])):
            if a.varmax >= b.varmin:
                errs.append(
                    f"clause[{path}] attached-ii: varmax {a.varmax} of part {idx} "
                    f"not below varmin {b.varmin} of part {idx + 1}"
                )
        firsts = tuple(inner.varmin for inner in node.parts)
        if any(a >= b for a, b in zip(firsts, firsts[1:])):
            errs.append(f"clause[{path}] attached-ii: part varmins not strictly increasing")
        elif not _side_ok(level, firsts):
            errs.append(f"clause[{path}] attached-iii: side condition fails on {firsts}")
        if (node.varmin, node.varmax) != (node.parts[0].varmin, node.parts[-1].varmax):
            errs.append(f"clause[{path}] cache-attached: caches differ from end parts")
        _check_caches(node, sigma, path, errs)
        return

    errs.append(f"clause[{path}] unknown node type {type(node).__name__}")


def _check_disjoint(sets, path, clause, errs):
    seen: set[Branch] = set()
    for s in sets:
        if seen & s:
            errs.append(f"clause[{path}] {clause}: parts are not pairwise disjoint")
            return
        seen |= s


# ---------------------------------------------------------------------------
# decision engine


def _min_pairwise(F: Iterable[Branch]) -> int | None:
    """Minimal pairwise meet length; None for singletons."""
    elems = sorted(F, key=lambda b: b.sort_key)
    best = None
    for i in range(len(elems)):
        for j in range(i + 1, len(elems)):
            l = meet_length(elems[i], elems[j])
            if l is None:
                raise AssertionError("distinct branches expected")
            if best is None or l < best:
                best = l
    return best


class Engine:
    """Memoized membership search.  Results are independent of cache state."""

    def __init__(self, depth_cap: int = 8):
        self.depth_cap = depth_cap
        self._fixed: dict = {}
        self._proj: dict = {}

    def clear(self) -> None:
        self._fixed.clear()
        self._proj.clear()

    # -- fixed root witness ------------------------------------------------

    def decide_fixed(
        self, params: FamilyParams, G: frozenset[Branch], sigma: Branch
    ) -> Optional[Certificate]:
        key = (params, sigma, G)
        if key in self._fixed:
            return self._fixed[key]
        res = self._decide_fixed(params, G, sigma)
        self._fixed[key] = res
        return res

    def _decide_fixed(self, params, G, sigma):
        ml = _finite_meets(sigma, G)
        if ml is None:
            raise TreefamError("sigma is an element of F")
        if min(ml.values()) < 1:
            return None  # every certificate forces varmin >= 1
        if _is_base(params):
            return self._try_leaf(params, G, ml)
        if _is_limit_level(params):
            varmin = min(ml.values())
            for n in range(1, varmin + 1):
                inner = self.decide_fixed(_gate_step(params, n), G, sigma)
                if inner is not None:
                    return Lift(inner, n, inner.varmin, inner.varmax)
            return None
        prev = _pred(params)
        inner = self.decide_fixed(prev, G, sigma)
        if inner is not None:
            return Lift(inner, None, inner.varmin, inner.varmax)
        classes = self._meet_classes(G, ml)
        got = self._try_skipped(params, prev, classes)
        if got is not None:
            return got
        return self._try_attached(params, prev, classes, sigma)

    @staticmethod
    def _try_leaf(params, G, ml):
        chain = sorted(G, key=lambda t: ml[t])
        lens = tuple(ml[t] for t in chain)
        if len(set(lens)) != len(lens):
            return None
        if lens[0] < 1 or not _side_ok(params, lens):
            return None
        return Leaf(tuple(chain), lens[0], lens[-1])

    @staticmethod
    def _meet_classes(G, ml):
        """Blocks of equal meet length, ascending; the only candidate blocks
        of a skipped branching, and the atoms of attached splits."""
        by_len: dict[int, list[Branch]] = {}
        for tau, l in ml.items():
            by_len.setdefault(l, []).append(tau)
        return [
            (l, frozenset(by_len[l])) for l in sorted(by_len)
        ]

    def _try_skipped(self, params, prev, classes):
        lens = tuple(l for l, _ in classes)
        if lens[0] < 1 or not _side_ok(params, lens):
            return None
        parts = []
        for l, C in classes:
            got = self.proj_exceeding(prev, C, l)
            if got is None:
                return None
            parts.append(got)
        return Skipped(tuple(parts), lens[0], lens[-1])

    def _try_attached(self, params, prev, classes, sigma):
        m = len(classes)
        if m < 2:
            return None

        def valid_firsts(firsts):
            if isinstance(params, Plain):
                return len(firsts) <= firsts[0]
            return schreier_member(params.alpha, firsts)

        def rec(start, firsts, acc):
            firsts = firsts + (classes[start][0],)
            if not valid_firsts(firsts):
                return None
            for end in range(start, m):
                group = frozenset().union(*(C for _, C in classes[start : end + 1]))
                cert = self.decide_fixed(prev, group, sigma)
                if cert is None:
                    continue
                if end == m - 1:
                    if len(acc) + 1 >= 2:
                        return acc + (cert,)
                else:
                    done = rec(end + 1, firsts, acc + (cert,))
                    if done is not None:
                        return done
            return None

        parts = rec(0, (), ())
        if parts is None:
            return None
        return Attached(parts, parts[0].varmin, parts[-1].varmax)

    # -- existential witness -------------------------------------------------

    def proj_exceeding(
        self, params: FamilyParams, C: frozenset[Branch], thresh: int
    ) -> Optional[tuple[Branch, Certificate]]:
        """Some witness sigma' with (C, sigma') a member and varmin > thresh.

        For singletons any depth is achievable; otherwise the best
        achievable varmin equals the minimal pairwise meet length, and a
        witness attaining it exists whenever C is a member at all.
        """
        if len(C) == 1:
            (tau,) = C
            return self._singleton_witness(params, tau, thresh)
        mp = _min_pairwise(C)
        if mp <= thresh:
            return None
        key = (params, C)
        if key in self._proj:
            got = self._proj[key]
        else:
            got = self._proj_search(params, C, mp)
            self._proj[key] = got
        return got

    def _singleton_witness(self, params, tau, thresh):
        depth = thresh + 1
        word = tau.prefix_word(depth) + str(1 - tau.bit(depth + 1))
        sig = Branch(word, 1 - int(word[-1]))
        leaf = Leaf((tau,), depth, depth)
        if not _side_ok(params if _is_base(params) else _base_of(params), (depth,)):
            return None  # singleton side conditions always hold in practice
        return sig, self._lift_to(params, leaf)

    def _lift_to(self, params, cert):
        """Lift a certificate from the base level up to ``params``; limit
        levels are entered through gate 1, which any varmin >= 1 passes."""
        if _is_base(params):
            return cert
        if _is_limit_level(params):
            inner = self._lift_to(_gate_step(params, 1), cert)
            return Lift(inner, 1, inner.varmin, inner.varmax)
        inner = self._lift_to(_pred(params), cert)
        return Lift(inner, None, inner.varmin, inner.varmax)

    def _proj_search(self, params, C, mp):
        profiles = set()
        for cand in _canonical_candidates(C):
            if cand in C:
                continue
            ml = _finite_meets(cand, C)
            if ml is None or min(ml.values()) != mp:
                continue
            profile = tuple(sorted((t.sort_key, l) for t, l in ml.items()))
            if profile in profiles:
                continue
            profiles.add(profile)
            cert = self.decide_fixed(params, C, cand)
            if cert is not None:
                return cand, cert
        return None


def _base_of(params: FamilyParams) -> FamilyParams:
    if isinstance(params, Plain):
        return Plain(_ONE)
    return Schreier(params.alpha, 1)


def _canonical_candidates(C: frozenset[Branch]) -> list[Branch]:
    """Flipped prefixes of members (plus one-bit extensions, both tails).

    Every realizable meet profile against C is produced by deviating from
    some member at some depth; prefixes beyond the cap cannot change any
    side condition at this set size.
    """
    cap = max(len(t.word) for t in C) + len(C) + 2
    out: list[Branch] = []
    seen = set()
    for tau in sorted(C, key=lambda b: b.sort_key):
        for l in range(cap + 1):
            base = tau.prefix_word(l) + str(1 - tau.bit(l + 1))
            for ext in ("", "0", "1"):
                word = base + ext
                for tail in (0, 1):
                    b = Branch(word, tail)
                    if b not in seen:
                        seen.add(b)
                        out.append(b)
    return out


_ENGINE = Engine()


def clear_caches() -> None:
    _ENGINE.clear()


def _checked_input(F: Iterable[Branch], cap: int) -> frozenset[Branch]:
    fset = frozenset(F)
    if not fset:
        raise TreefamError("F must be nonempty")
    if len(fset) > cap:
        raise CapExceeded(f"|F| = {len(fset)} exceeds cap {cap}")
    return fset


def decide_membership(
    params: FamilyParams,
    F: Iterable[Branch],
    sigma: Branch,
    cap: int = 12,
    engine: Engine | None = None,
) -> Optional[Certificate]:
    """A verifiable certificate for (F, sigma), or None."""
    eng = engine or _ENGINE
    fset = _checked_input(F, cap)
    if sigma in fset:
        raise TreefamError("sigma is an element of F")
    cert = eng.decide_fixed(params, fset, sigma)
    if cert is not None and certificate_depth(cert) > eng.depth_cap:
        raise CapExceeded(f"certificate depth exceeds cap {eng.depth_cap}")
    return cert


def decide_membership_any_sigma(
    params: FamilyParams,
    F: Iterable[Branch],
    cap: int = 12,
    engine: Engine | None = None,
) -> Optional[tuple[Branch, Certificate]]:
    """Some witness and certificate placing F in the family projection."""
    eng = engine or _ENGINE
    fset = _checked_input(F, cap)
    return eng.proj_exceeding(params, fset, 0)


# ---------------------------------------------------------------------------
# constructive structure lemmas


def restrict_certificate(
    params: FamilyParams,
    F: Iterable[Branch],
    sigma: Branch,
    cert: Certificate,
    G: Iterable[Branch],
) -> Certificate:
    """Prune a valid certificate to a nonempty subset; never searches."""
    fset = frozenset(F)
    gset = frozenset(G)
    if not gset or not gset <= fset:
        raise TreefamError("G must be a nonempty subset of F")
    errs = explain_certificate(params, fset, sigma, cert)
    if errs:
        raise TreefamError(f"invalid input certificate: {errs[0]}")
    return _restrict(cert, sigma, gset)


def _restrict(node: Certificate, sigma: Branch, keep: frozenset[Branch]) -> Certificate:
    if isinstance(node, Leaf):
        chain = tuple(t for t in node.chain if t in keep)
        ml = {t: meet_length(sigma, t) for t in chain}
        return Leaf(chain, ml[chain[0]], ml[chain[-1]])
    if isinstance(node, Skipped):
        parts = []
        ms = []
        for sig_i, inner in node.parts:
            sub = keep & leaves(inner)
            if sub:
                parts.append((sig_i, _restrict(inner, sig_i, sub)))
                ms.append(meet_length(sigma, sig_i))
        return Skipped(tuple(parts), ms[0], ms[-1])
    if isinstance(node, Attached):
        parts = []
        for inner in node.parts:
            sub = keep & leaves(inner)
            if sub:
                parts.append(_restrict(inner, sigma, sub))
        return Attached(tuple(parts), parts[0].varmin, parts[-1].varmax)
    inner = _restrict(node.inner, sigma, keep)
    return Lift(inner, node.gate, inner.varmin, inner.varmax)


def minimize_witness(
    params: FamilyParams, F: Iterable[Branch], sigma: Branch, cert: Certificate
) -> tuple[Branch, Certificate]:
    """A witness whose varmin equals the minimal pairwise meet length of F."""
    fset = frozenset(F)
    if len(fset) < 2:
        raise TreefamError("witness minimization needs |F| >= 2")
    errs = explain_certificate(params, fset, sigma, cert)
    if errs:
        raise TreefamError(f"invalid input certificate: {errs[0]}")
    mp = _min_pairwise(fset)
    if cert.varmin > mp:
        raise TreefamError(
            f"varmin {cert.varmin} exceeds minimal pairwise meet {mp}"
        )  # impossible for a valid certificate
    sig, out = _minimize(params, sigma, cert, mp)
    return sig, out


def _minimize(level, sigma, node, mp):
    if isinstance(node, Leaf):
        return sigma, node  # a chain of >= 2 already attains the pairwise minimum
    if isinstance(node, Skipped):
        if len(node.parts) >= 2:
            return sigma, node
        sig_1, inner = node.parts[0]
        sig, core = _minimize(_pred(level), sig_1, inner, mp)
        return sig, Lift(core, None, core.varmin, core.varmax)
    if isinstance(node, Attached):
        if len(node.parts) >= 2:
            return sigma, node
        sig, core = _minimize(_pred(level), sigma, node.parts[0], mp)
        return sig, Lift(core, None, core.varmin, core.varmax)
    if node.gate is None:
        sig, core = _minimize(_pred(level), sigma, node.inner, mp)
        return sig, Lift(core, None, core.varmin, core.varmax)
    sig, core = _minimize(_gate_step(level, node.gate), sigma, node.inner, mp)
    return sig, Lift(core, node.gate, core.varmin, core.varmax)


# ---------------------------------------------------------------------------
# largeness witnesses


@dataclass(frozen=True)
class PhiWitness:
    """An order chain tau_1, tau_2, ... whose meets with sigma strictly
    increase; the guarantee is that qualifying index sets map into the family."""

    sigma: Branch
    taus: tuple[Branch, ...]
    alpha: Ordinal
    regime: FamilyParams

    def phi(self, F: Iterable[int]) -> frozenset[Branch]:
        return frozenset(self.taus[k - 1] for k in F)


def canonical_stream() -> Iterator[Branch]:
    """0^k 1 with zero tail: meets with the all-zero branch are exactly k."""
    k = 1
    while True:
        yield Branch("0" * k + "1", 0)
        k += 1


def build_phi(
    stream: Iterable[Branch],
    params: FamilyParams,
    m: int,
    probe_budget: int = 4096,
) -> PhiWitness:
    """Greedy comb extraction from a branch stream.

    Walks the tree along the majority side, popping one minority branch per
    node from depth 1 on; the popped branches meet the surviving majority
    path at strictly increasing depths starting at 1.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    batch: list[Branch] = []
    seen = set()
    for b in islice(stream, probe_budget):
        if b not in seen:
            seen.add(b)
            batch.append(b)
    chain: list[Branch] = []
    through = batch
    depth = 0
    max_depth = max((len(b.word) for b in batch), default=0) + 2
    while len(chain) < m:
        if len(through) <= 1 or depth > max_depth:
            raise ProbeBudgetExceeded(
                f"stream too thin: extracted {len(chain)} of {m} chain branches"
            )
        zeros = [b for b in through if b.bit(depth + 1) == 0]
        ones = [b for b in through if b.bit(depth + 1) == 1]
        major, minor = (zeros, ones) if len(zeros) >= len(ones) else (ones, zeros)
        if depth >= 1 and minor:
            chain.append(minor[0])
        through = major
        depth += 1
    if not through:
        raise ProbeBudgetExceeded("no branch left to act as the witness")
    sigma = through[0]
    alpha = params.alpha
    return PhiWitness(sigma, tuple(chain), alpha, params)


def check_phi(w: PhiWitness) -> bool:
    return check_phi_report(w) is None


def check_phi_report(w: PhiWitness) -> str | None:
    """None when the witness guarantee holds; otherwise the first failure."""
    m = len(w.taus)
    if len(set(w.taus)) != m:
        return "chain branches are not pairwise distinct"
    lens = []
    for tau in w.taus:
        l = meet_length(w.sigma, tau)
        if l is None:
            return f"sigma equals chain branch {tau}"
        lens.append(l)
    if lens and lens[0] < 1:
        return "first meet with sigma is empty"
    if any(a >= b for a, b in zip(lens, lens[1:])):
        return "meets with sigma are not strictly increasing"
    for F in _nonempty_subsets(m):
        if isinstance(w.regime, Plain):
            qualifies = schreier_member(w.alpha, F)
        else:
            qualifies = schreier_convolve_member(w.alpha, w.regime.level, F)
        if not qualifies:
            continue
        image = w.phi(F)
        cert = decide_membership(w.regime, image, w.sigma)
        if cert is None:
            return f"phi({set(F)}) failed to certify"
        if cert.varmin != lens[min(F) - 1]:
            return (
                f"phi({set(F)}): varmin {cert.varmin} differs from "
                f"|sigma^tau_min| = {lens[min(F) - 1]}"
            )
    return None


def _nonempty_subsets(m: int) -> Iterator[tuple[int, ...]]:
    for mask in range(1, 1 << m):
        yield tuple(k + 1 for k in range(m) if mask & (1 << k))


# ---------------------------------------------------------------------------
# certificate text format


def format_certificate(cert: Certificate, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(cert, Leaf):
        chain = ",".join(str(b) for b in cert.chain)
        return f"{pad}LEAF varmin={cert.varmin} varmax={cert.varmax} chain={chain}"
    if isinstance(cert, Skipped):
        lines = [f"{pad}SKIPPED varmin={cert.varmin} varmax={cert.varmax}"]
        for sig_i, inner in cert.parts:
            lines.append(f"{pad}  PART sigma={sig_i}")
            lines.append(format_certificate(inner, indent + 2))
        return "\n".join(lines)
    if isinstance(cert, Attached):
        lines = [f"{pad}ATTACHED varmin={cert.varmin} varmax={cert.varmax}"]
        for inner in cert.parts:
            lines.append(format_certificate(inner, indent + 1))
        return "\n".join(lines)
    gate = "" if cert.gate is None else f" gate={cert.gate}"
    head = f"{pad}LIFT{gate} varmin={cert.varmin} varmax={cert.varmax}"
    return head + "\n" + format_certificate(cert.inner, indent + 1)


def parse_certificate(text: str) -> Certificate:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    cert, rest = _parse_cert_lines(lines, 0, 0)
    if rest != len(lines):
        raise ParseError("trailing certificate lines", lines[rest])
    return cert


def _line_indent(line: str) -> int:
    return (len(line) - len(line.lstrip(" "))) // 2


def _parse_kv(tokens: list[str], line: str) -> dict[str, str]:
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise ParseError("expected key=value", line)
        k, v = tok.split("=", 1)
        out[k] = v
    return out


def _parse_cert_lines(lines: list[str], i: int, indent: int):
    line = lines[i]
    if _line_indent(line) != indent:
        raise ParseError("bad certificate indentation", line)
    tokens = line.split()
    kind = tokens[0]
    kv = _parse_kv([t for t in tokens[1:] if "=" in t], line)
    if kind == "LEAF":
        chain = tuple(Branch.parse(t) for t in kv["chain"].split(","))
        return Leaf(chain, int(kv["varmin"]), int(kv["varmax"])), i + 1
    if kind == "LIFT":
        gate = int(kv["gate"]) if "gate" in kv else None
        inner, nxt = _parse_cert_lines(lines, i + 1, indent + 1)
        return Lift(inner, gate, int(kv["varmin"]), int(kv["varmax"])), nxt
    if kind == "ATTACHED":
        parts = []
        j = i + 1
        while j < len(lines) and _line_indent(lines[j]) == indent + 1:
            inner, j = _parse_cert_lines(lines, j, indent + 1)
            parts.append(inner)
        return Attached(tuple(parts), int(kv["varmin"]), int(kv["varmax"])), j
    if kind == "SKIPPED":
        parts = []
        j = i + 1
        while j < len(lines) and lines[j].strip().startswith("PART "):
            part_kv = _parse_kv(lines[j].split()[1:], lines[j])
            sig_i = Branch.parse(part_kv["sigma"])
            inner, j = _parse_cert_lines(lines, j + 1, indent + 2)
            parts.append((sig_i, inner))
        return Skipped(tuple(parts), int(kv["varmin"]), int(kv["varmax"])), j
    raise ParseError(f"unknown certificate node {kind!r}", line)
