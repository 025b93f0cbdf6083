"""Valuation profiles and congruence certificates for multiplicative
functions on arithmetic progressions."""

from .arith import (
    INFINITY,
    ArithError,
    ExtendedNat,
    Factorization,
    Progression,
    QuadraticClass,
    coprime_part,
    decompose_progression,
    factorize,
    kronecker_symbol,
    nu,
    primes_in_progression,
    quadratic_class,
)
from .engine import (
    CERTIFIED,
    CERTIFIED_EXACT,
    REFUTED,
    UPPER_BOUND,
    VERIFIED_TO_HORIZON,
    Certificate,
    CertainNat,
    Decomposition,
    EngineConfig,
    certify_congruence,
    coprime_min,
    decompose_valuation,
    gcd_prime_min,
    reverify_certificate,
    scan_valuation,
)
from .functions import (
    CoverageError,
    FnDescriptor,
    ValuationProfile,
    eval_fn,
    eval_mod,
    load_custom,
    phi,
    sigma,
    table_descriptor,
    tau_descriptor,
    valuation_profile,
)
from .classify import (
    SearchHit,
    SearchReport,
    phi_congruence_evidence,
    phi_value_formula,
    search_congruences,
    sigma_suite,
    structure_audit,
    structure_check,
    two_squares_audit,
)
from .config import RunConfig, load_config
from .tau import TauTable, tau_prime_power, tau_table, verify_sd_congruences

__version__ = "0.1.0"
