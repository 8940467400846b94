"""treefam: exact-arithmetic families of finite branch sets on the dyadic
tree, the Schreier hierarchy, Tsirelson-type norms, and constructive
l1 lower-bound certificates."""

from .dyadic import Branch, MeetResult, Node, is_proper_initial, meet, meet_length
from .errors import (
    CapExceeded,
    HypothesisViolation,
    ParseError,
    ProbeBudgetExceeded,
    TreefamError,
)
from .families import (
    Attached,
    Certificate,
    FamilyParams,
    Leaf,
    Lift,
    PhiWitness,
    Plain,
    Schreier,
    Skipped,
    build_phi,
    canonical_stream,
    check_phi,
    check_phi_report,
    decide_membership,
    decide_membership_any_sigma,
    explain_certificate,
    format_certificate,
    leaves,
    minimize_witness,
    parse_certificate,
    parse_params,
    restrict_certificate,
    verify_certificate,
)
from .norms import (
    NormEnclosure,
    PlainLadder,
    SchreierLadder,
    SeqVector,
    Vector,
    functional_apply,
    lambda_constant,
    norm_composite,
    norm_tsirelson,
    norm_xn,
    parse_ladder,
    pn_value,
    vector_sum,
)
from .ordinals import Ordinal, cnf_compare, fundamental_step
from .schreier import (
    schreier_convolve_enumerate,
    schreier_convolve_member,
    schreier_enumerate,
    schreier_member,
)
from .certify import (
    BlockSequence,
    Ell1Certificate,
    InconclusiveReport,
    basis_certificate,
    check_attached_hypotheses,
    check_skipped_hypotheses,
    extract_high_varmin,
    refine_to_certificate,
    small_functional_bound,
)

__version__ = "0.1.0"
