"""Valuation minima over progressions and congruence certificates.

The minimum of nu_p(f(A*n+B)) over all n splits into three parts: a fixed
term from primes locked inside gcd(A, B), one minimum per gcd prime whose
exponent varies with n, and a minimum over the content coprime to the gcd.
The sum of the three certified minima is always a sound lower bound for the
true minimum, and a congruence mod p^k is certified whenever k is at most
that bound.  Refutations come only from scan witnesses, which are exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, isqrt

from .arith import (
    INFINITY,
    ArithError,
    ExtendedNat,
    Progression,
    decompose_progression,
    is_prime,
    nu,
    nu_int,
)
from .functions import FnDescriptor, eval_fn, eval_mod, valuation_at_prime_power
from .kernels import run_scan

CERTIFIED_EXACT = "certified_exact"
UPPER_BOUND = "upper_bound_at_horizon"

CERTIFIED = "certified"
VERIFIED_TO_HORIZON = "verified_to_horizon"
REFUTED = "refuted"


class EngineError(ArithError):
    pass


@dataclass(frozen=True)
class EngineConfig:
    horizon: int = 100_000
    exponent_horizon: int = 64
    witness_budget: int = 25
    candidate_bound: int = 1_000_000
    jobs: int = 1
    backend: str | None = None

    def __post_init__(self):
        for name in ("horizon", "exponent_horizon", "witness_budget",
                     "candidate_bound", "jobs"):
            if getattr(self, name) < 1:
                raise EngineError(f"config {name} must be >= 1")


DEFAULT_CONFIG = EngineConfig()


@dataclass(frozen=True)
class CertainNat:
    """A minimum with its epistemic status.

    certified_exact carries a justification (closed-form profile, a witness
    achieving the absolute floor 0, or a constructed residue witness); an
    upper_bound_at_horizon value only bounds the true minimum from above.
    """

    value: ExtendedNat
    certainty: str
    witness: int | None = None          # index n, or exponent e for prime terms
    witness_kind: str = "n"
    horizon: int | None = None
    justification: str = ""

    def to_json(self) -> dict:
        return {
            "value": self.value.to_json(),
            "certainty": self.certainty,
            "witness": self.witness,
            "witness_kind": self.witness_kind,
            "horizon": self.horizon,
            "justification": self.justification,
        }


# ---------------------------------------------------------------------------
# Scan of nu_p(f(A n + B))
# ---------------------------------------------------------------------------

def scan_valuation(fn: FnDescriptor, p: int, A: int, B: int,
                   horizon: int | None = None, *, stop_below: int = 1,
                   config: EngineConfig = DEFAULT_CONFIG) -> CertainNat:
    """Minimum of nu_p(f(A*n+B)) over n < horizon, with its first witness.

    Certainty is always upper_bound_at_horizon: a scan by itself cannot rule
    out smaller values beyond the horizon.  Scanning exits early once the
    running minimum falls below stop_below; the default 1 exits on the first
    zero, which no later n can undercut.
    """
    if not is_prime(p):
        raise EngineError(f"{p} is not prime")
    if A < 1 or B < 1:
        raise EngineError("scan needs A >= 1 and B >= 1")
    horizon = horizon or config.horizon
    out = run_scan(fn, p, A, B, horizon, stop_below=stop_below,
                   jobs=config.jobs, backend=config.backend)
    value = INFINITY if out.value is None else ExtendedNat(out.value)
    return CertainNat(value=value, certainty=UPPER_BOUND, witness=out.witness,
                      witness_kind="n", horizon=out.scanned,
                      justification=f"scan to {out.scanned}"
                      + (f"; {out.infinite_hits} vanishing values" if out.infinite_hits else ""))


# ---------------------------------------------------------------------------
# Per-prime exponent minima (primes dividing the gcd but not A')
# ---------------------------------------------------------------------------

def gcd_prime_min(fn: FnDescriptor, p: int, A_prime: int, B_prime: int,
                  start_exp: int, q: int, *,
                  config: EngineConfig = DEFAULT_CONFIG) -> CertainNat:
    """min over e >= start_exp of nu_p(f(q^e)).

    Valid because for q not dividing A' the exponent of q in A'*n + B'
    attains every value >= 0 on explicit residue classes of n, so every
    e >= start_exp really occurs.  Primes dividing A' are a contract
    violation here; their contribution is the fixed term.
    """
    if A_prime % q == 0:
        raise EngineError(f"prime {q} divides A'={A_prime}; it belongs to the fixed term")
    if gcd(A_prime, B_prime) != 1:
        raise EngineError("gcd(A', B') must be 1")
    a = start_exp

    if fn.family == "sigma":
        # the geometric sums avoid p on a bounded window of exponents
        window = a + max(p, 2) + 2
        for e in range(a, window + 1):
            if eval_mod(fn, q**e, p) != 0:
                return CertainNat(ExtendedNat(0), CERTIFIED_EXACT, witness=e,
                                  witness_kind="exponent",
                                  justification="divisor-sum profile: zero attained")
        raise EngineError("divisor-sum zero window exhausted; unreachable")

    if fn.family == "phi":
        if a == 0:
            return CertainNat(ExtendedNat(0), CERTIFIED_EXACT, witness=0,
                              witness_kind="exponent",
                              justification="exponent 0 gives f(1) = 1")
        val = (a - 1) if q == p else nu_int(p, q - 1)
        return CertainNat(ExtendedNat(val), CERTIFIED_EXACT, witness=a,
                          witness_kind="exponent",
                          justification="totient profile: constant in e for q != p, "
                                        "increasing for q = p")

    # no registered profile: bounded exponent scan
    best: ExtendedNat | None = None
    best_e = None
    for e in range(a, a + config.exponent_horizon + 1):
        v = valuation_at_prime_power(fn, p, q, e)
        if best is None or v < best:
            best, best_e = v, e
        if best == 0:
            return CertainNat(ExtendedNat(0), CERTIFIED_EXACT, witness=e,
                              witness_kind="exponent",
                              justification="zero attained in exponent scan")
    return CertainNat(best, UPPER_BOUND, witness=best_e, witness_kind="exponent",
                      horizon=a + config.exponent_horizon,
                      justification=f"exponent scan {a}..{a + config.exponent_horizon}")


# ---------------------------------------------------------------------------
# Minimum over the content coprime to C
# ---------------------------------------------------------------------------

def _square_witness(fn: FnDescriptor, p: int, A_prime: int, B_prime: int,
                    C: int) -> tuple[int, str] | None:
    """Index n making the C-coprime part of A'*n+B' a square or twice one.

    Only sound for p = 2 and the divisor-sum family: stripping primes of C
    from m^2 leaves all exponents even, so the divisor sum is odd; for k >= 1
    the same holds for 2*m^2.  The divisor count of 2*m^2 is even, so that
    leg is excluded for k = 0.
    """
    if p != 2 or fn.family != "sigma":
        return None
    legs: list[tuple[int, str]] = [(1, "square")]
    if (fn.k_param or 0) >= 1:
        legs.append((2, "twice-square"))
    for mult, label in legs:
        for m in range(1, A_prime + 1):
            if (mult * m * m - B_prime) % A_prime == 0:
                while mult * m * m < B_prime:
                    m += A_prime
                n = (mult * m * m - B_prime) // A_prime
                return n, label
    return None


def _prime_zero_witness(fn: FnDescriptor, p: int, A_prime: int, B_prime: int,
                        C: int, config: EngineConfig) -> CertainNat | None:
    """Certify 0 through a prime value of the progression, if one can.

    Family facts make most probes O(1): the divisor count of any prime is 2,
    so for odd p every prime in the progression witnesses, and for p = 2 no
    prime at all (for the totient and the power sums with k >= 1, only the
    prime 2 itself is odd-valued).  Other families search lazily up to the
    witness budget.
    """
    from .arith import is_prime as _is_prime

    if fn.family == "sigma" and (fn.k_param or 0) == 0:
        if p == 2:
            return None  # divisor count of every prime is 2
        return CertainNat(ExtendedNat(0), CERTIFIED_EXACT,
                          justification="every prime in the progression has "
                                        "divisor count 2, coprime to p; one "
                                        "avoiding C exists")
    if p == 2 and fn.family in ("sigma", "phi"):
        if B_prime <= 2 and (2 - B_prime) % A_prime == 0:
            n = (2 - B_prime) // A_prime
            if _coprime_value_at(fn, p, A_prime, B_prime, C, n) == 0:
                return CertainNat(ExtendedNat(0), CERTIFIED_EXACT, witness=n,
                                  justification="prime witness 2")
        return None  # every odd prime value is even under these families

    tried = 0
    m = B_prime
    while m <= config.candidate_bound and tried < config.witness_budget:
        if m > 1 and C % m != 0 and _is_prime(m):
            tried += 1
            if eval_mod(fn, m, p) != 0:
                n = (m - B_prime) // A_prime
                return CertainNat(ExtendedNat(0), CERTIFIED_EXACT, witness=n,
                                  justification=f"prime witness {m} in progression")
        m += A_prime
    return None


def coprime_min(fn: FnDescriptor, p: int, A_prime: int, B_prime: int, C: int,
                *, config: EngineConfig = DEFAULT_CONFIG,
                horizon: int | None = None) -> CertainNat:
    """min over n of nu_p(f(part of A'*n+B' coprime to C)).

    Zero is the absolute floor, so any single witness certifies exactness:
    a constructed square witness (p = 2, divisor sums), a prime in the
    progression avoiding p in f, or a zero found by the scan.  Positive
    minima are only ever reported as horizon bounds.
    """
    if gcd(A_prime, B_prime) != 1:
        raise EngineError("gcd(A', B') must be 1")
    horizon = horizon or config.horizon

    sq = _square_witness(fn, p, A_prime, B_prime, C)
    if sq is not None:
        n, label = sq
        check = _coprime_value_at(fn, p, A_prime, B_prime, C, n)
        if check != 0:
            raise EngineError(f"constructed {label} witness n={n} re-evaluated to {check}")
        return CertainNat(ExtendedNat(0), CERTIFIED_EXACT, witness=n,
                          justification=f"constructed {label} witness")

    by_prime = _prime_zero_witness(fn, p, A_prime, B_prime, C, config)
    if by_prime is not None:
        return by_prime

    out = run_scan(fn, p, A_prime, B_prime, horizon, stop_below=1, skip_c=C,
                   jobs=config.jobs, backend=config.backend)
    if out.value == 0:
        return CertainNat(ExtendedNat(0), CERTIFIED_EXACT, witness=out.witness,
                          justification="zero attained in scan (absolute floor)")
    value = INFINITY if out.value is None else ExtendedNat(out.value)
    return CertainNat(value=value, certainty=UPPER_BOUND, witness=out.witness,
                      horizon=out.scanned,
                      justification=f"scan to {out.scanned}")


def _coprime_value_at(fn: FnDescriptor, p: int, A_prime: int, B_prime: int,
                      C: int, n: int) -> ExtendedNat:
    from .arith import coprime_part, factorize
    m = coprime_part(A_prime * n + B_prime, C)
    total = ExtendedNat(0)
    for q, e in factorize(m).factors:
        total = total + nu(p, fn.eval_prime_power(q, e))
    return total


# ---------------------------------------------------------------------------
# Decomposition and certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Decomposition:
    progression: Progression
    fixed_term: ExtendedNat
    gcd_terms: tuple[tuple[int, int, CertainNat], ...]  # (q, start_exp, term)
    coprime_term: CertainNat
    total: ExtendedNat
    total_certainty: str

    def to_json(self) -> dict:
        return {
            "progression": self.progression.to_json(),
            "fixed_term": self.fixed_term.to_json(),
            "gcd_prime_terms": [
                {"q": q, "start_exponent": a, **t.to_json()}
                for q, a, t in self.gcd_terms
            ],
            "coprime_term": self.coprime_term.to_json(),
            "total": {"value": self.total.to_json(), "certainty": self.total_certainty},
        }


def decompose_valuation(fn: FnDescriptor, p: int, A: int, B: int,
                        config: EngineConfig = DEFAULT_CONFIG) -> Decomposition:
    """Lower-bound decomposition of min nu_p(f(A*n+B)).

    The three parts are individually exact or horizon bounds; their sum is
    exact only when every part is.  The sum is always a valid lower bound
    for the true minimum; the scanned minimum may exceed it when no single
    n attains all the per-part minima at once.
    """
    if not is_prime(p):
        raise EngineError(f"{p} is not prime")
    prog = decompose_progression(A, B)
    fixed = nu(p, eval_fn(fn, prog.G_locked)) if prog.G_locked > 1 else ExtendedNat(0)
    terms = []
    for q, a in prog.G_factors.factors:
        if prog.A_prime % q == 0:
            continue
        terms.append((q, a, gcd_prime_min(fn, p, prog.A_prime, prog.B_prime,
                                          a, q, config=config)))
    cop = coprime_min(fn, p, prog.A_prime, prog.B_prime, prog.G, config=config)
    total = fixed
    exact = True
    for _, _, t in terms:
        total = total + t.value
        exact = exact and t.certainty == CERTIFIED_EXACT
    total = total + cop.value
    exact = exact and cop.certainty == CERTIFIED_EXACT
    return Decomposition(progression=prog, fixed_term=fixed,
                         gcd_terms=tuple(terms), coprime_term=cop, total=total,
                         total_certainty=CERTIFIED_EXACT if exact else UPPER_BOUND)


@dataclass(frozen=True)
class Certificate:
    fn: FnDescriptor
    p: int
    k: int
    A: int
    B: int
    decomposition: Decomposition
    scan: CertainNat
    status: str
    refutation_witness: int | None
    scan_attains_total: bool | None
    config: EngineConfig

    def to_json(self) -> dict:
        return {
            "schema": "multcong.certificate/1",
            "fn": self.fn.to_json(),
            "p": self.p,
            "modulus_exponent": self.k,
            "A": self.A,
            "B": self.B,
            "decomposition": self.decomposition.to_json(),
            "scan": self.scan.to_json(),
            "status": self.status,
            "refutation_witness": self.refutation_witness,
            "scan_attains_total": self.scan_attains_total,
            "config": {
                "horizon": self.config.horizon,
                "exponent_horizon": self.config.exponent_horizon,
                "witness_budget": self.config.witness_budget,
                "candidate_bound": self.config.candidate_bound,
            },
        }


def certify_congruence(fn: FnDescriptor, p: int, k: int, A: int, B: int,
                       config: EngineConfig = DEFAULT_CONFIG) -> Certificate:
    """Certificate for f(A*n+B) = 0 (mod p^k) for all n.

    refuted: the scan found n with nu_p(f(A*n+B)) < k (exact witness).
    certified: k <= decomposition total and the total is exact, which makes
    it a proven lower bound on every valuation in the progression.
    verified_to_horizon: no witness below k up to the horizon, but no proof.
    """
    if k < 1:
        raise EngineError("modulus exponent k must be >= 1")
    scan = scan_valuation(fn, p, A, B, config.horizon, stop_below=k, config=config)
    dec = decompose_valuation(fn, p, A, B, config)
    refutation = None
    if scan.value < k:
        status = REFUTED
        refutation = scan.witness
        check = _progression_value_at(fn, p, A, B, scan.witness)
        if not check < k:
            raise EngineError(f"refutation witness n={scan.witness} re-evaluated to {check}")
    elif dec.total_certainty == CERTIFIED_EXACT and ExtendedNat(k) <= dec.total:
        status = CERTIFIED
    else:
        status = VERIFIED_TO_HORIZON
    attains = None
    if not scan.value.is_infinite and not dec.total.is_infinite:
        attains = scan.value == dec.total
    return Certificate(fn=fn, p=p, k=k, A=A, B=B, decomposition=dec, scan=scan,
                       status=status, refutation_witness=refutation,
                       scan_attains_total=attains, config=config)


def _progression_value_at(fn: FnDescriptor, p: int, A: int, B: int, n: int) -> ExtendedNat:
    return nu(p, eval_fn(fn, A * n + B))


def reverify_certificate(doc: dict, *, tau_table=None) -> bool:
    """Recompute a serialized certificate and compare the essential fields."""
    from .functions import phi, sigma, tau_descriptor

    fn_doc = doc["fn"]
    family = fn_doc["family"]
    if family == "sigma":
        fn = sigma(fn_doc["k"])
    elif family == "phi":
        fn = phi()
    elif family == "tau":
        if tau_table is None:
            raise EngineError("reverify of a tau certificate needs a tau table")
        fn = tau_descriptor(tau_table)
    else:
        raise EngineError(f"cannot rebuild descriptor for family {family!r}")
    cfg = EngineConfig(
        horizon=doc["config"]["horizon"],
        exponent_horizon=doc["config"]["exponent_horizon"],
        witness_budget=doc["config"]["witness_budget"],
        candidate_bound=doc["config"]["candidate_bound"],
    )
    fresh = certify_congruence(fn, doc["p"], doc["modulus_exponent"],
                               doc["A"], doc["B"], cfg)
    new = fresh.to_json()
    keys = ("status", "refutation_witness", "scan", "decomposition")
    return all(new[key] == doc[key] for key in keys)
