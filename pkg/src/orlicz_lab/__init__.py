"""Numerical laboratory for Orlicz-space risk measures.

Luxemburg and Orlicz norms, conjugate Orlicz functions,
doubling-condition failure witnesses, coherent risk measures with
Fenchel-Moreau conjugation on finite spaces, symbolic disjoint block
sequences, and an LP-certified order-closed cone whose induced risk
measure has the Fatou property but no scenario representation.
"""

from .errors import (
    BoundViolation,
    BracketInvalid,
    CertificateError,
    CrossCheckFailure,
    EmptyScenarioSet,
    HypothesisViolation,
    InputError,
    InvalidSchedule,
    NotAMember,
    NumericFailure,
    OrliczLabError,
    SpaceMismatch,
    TruncationTooSmall,
    WitnessNotFound,
)
from .orlicz_functions import (
    CATALOG,
    EntropyFunction,
    ExpFunction,
    OrliczFunction,
    PiecewiseLinearFunction,
    PiecewiseSlopeSchedule,
    PowerFunction,
    build_sparse_pair,
    conjugate,
    conjugate_value,
    delta2_witnesses,
    parse_phi_spec,
    phi_spec_string,
    sparse_schedule,
    young_check,
)
from .finite_model import (
    FiniteSpace,
    RandomVariable,
    expectation,
    order_convergence_check,
    pairing,
    read_positions_csv,
    uniform_space,
    write_positions_csv,
)
from .norms import holder_check, luxemburg_norm, modular, orlicz_norm, phi_inverse
from .block_sequences import (
    REGIONS,
    Block,
    BlockSequence,
    block_luxemburg_norm,
    blocks_from_json,
    blocks_to_json,
    build_disjoint_sequence,
    discretize,
    dual_block_orlicz_norm,
    series_modular,
)
from .risk_measures import (
    RiskMeasure,
    ScenarioSet,
    acceptance_eval,
    acceptance_measure,
    avar_scenarios,
    axiom_suite,
    entropic_measure,
    fatou_harness,
    parse_measure_spec,
    scenario_eval,
    scenario_measure,
    scenarios_from_json,
    scenarios_to_json,
    worstcase_scenarios,
)
from .duality import (
    ConjugateValue,
    biconjugate,
    conjugate_rho,
    duality_report,
    extract_scenarios,
)
from .counterexample import (
    Combo,
    CounterexampleInstance,
    MembershipCertificate,
    TImage,
    build_instance,
    certificate_from_json,
    certificate_to_json,
    diagonal_pairs,
    gap_exhibit,
    instance_from_json,
    instance_to_json,
    limit_certificate,
    membership,
    rho_c,
    summing,
    t_operator,
    verify_certificate,
    weak_approx_select,
)
from .closure_lab import (
    as_extraction,
    mazur_min_norm,
    order_dominator,
    split_with_budget,
)

__version__ = "0.1.0"
