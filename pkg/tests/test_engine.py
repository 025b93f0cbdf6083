import json
from math import gcd

import pytest

from multcong.arith import INFINITY, ExtendedNat
from multcong.engine import (
    CERTIFIED,
    CERTIFIED_EXACT,
    REFUTED,
    UPPER_BOUND,
    VERIFIED_TO_HORIZON,
    EngineConfig,
    EngineError,
    certify_congruence,
    coprime_min,
    decompose_valuation,
    gcd_prime_min,
    reverify_certificate,
    scan_valuation,
)
from multcong.functions import eval_fn, phi, sigma, table_descriptor
from multcong.arith import nu

CFG = EngineConfig(horizon=20_000)
S0, S1 = sigma(0), sigma(1)
PHI = phi()


# --- scans ------------------------------------------------------------------

def test_scan_examples():
    r = scan_valuation(S1, 2, 8, 7, config=CFG)
    assert r.value == 3 and r.witness == 0 and r.certainty == UPPER_BOUND
    r = scan_valuation(S0, 2, 1, 1, 10, config=CFG)
    assert r.value == 0 and r.witness == 0
    r = scan_valuation(S1, 3, 3, 2, config=CFG)
    assert r.value == 1


def test_scan_monotone_in_horizon():
    prev = None
    for horizon in (10, 100, 1000, 10_000):
        v = scan_valuation(S1, 2, 24, 18, horizon, config=CFG).value
        if prev is not None:
            assert v <= prev
        prev = v


def test_scan_rejects_bad_args():
    with pytest.raises(EngineError):
        scan_valuation(S1, 4, 4, 3, 10)
    with pytest.raises(EngineError):
        scan_valuation(S1, 2, 0, 3, 10)


# --- per-prime exponent minima ----------------------------------------------

def test_gcd_prime_min_divisor_count():
    t = gcd_prime_min(S0, 2, 4, 1, 1, 3, config=CFG)
    assert t.value == 0 and t.certainty == CERTIFIED_EXACT
    # witness exponent must re-evaluate to the claimed zero
    assert nu(2, S0.eval_prime_power(3, t.witness)) == 0


def test_gcd_prime_min_totient():
    t = gcd_prime_min(PHI, 3, 2, 1, 2, 7, config=CFG)
    assert t.value == 1 and t.certainty == CERTIFIED_EXACT
    t = gcd_prime_min(PHI, 5, 2, 1, 3, 5, config=CFG)
    assert t.value == 2 and t.certainty == CERTIFIED_EXACT
    t = gcd_prime_min(PHI, 5, 2, 1, 0, 7, config=CFG)
    assert t.value == 0 and t.witness == 0


def test_gcd_prime_min_rejects_locked_prime():
    with pytest.raises(EngineError):
        gcd_prime_min(S0, 2, 6, 1, 1, 3, config=CFG)


def test_gcd_prime_min_sigma_always_zero():
    for k in (0, 1, 2, 3, 11):
        fn = sigma(k)
        for p in (2, 3, 5, 7):
            for q in (2, 3, 5, 11):
                for a in (0, 1, 2, 5):
                    if q == 3 and p == 3:
                        pass
                    t = gcd_prime_min(fn, p, q + 1, 1, a, q, config=CFG)
                    assert t.value == 0 and t.certainty == CERTIFIED_EXACT
                    assert t.witness >= a
                    assert nu(p, fn.eval_prime_power(q, t.witness)) == 0


def test_gcd_prime_min_unregistered_function():
    entries = {(3, e): 3 * e for e in range(1, 40)}  # nu_2 = nu_2(3e): zero at odd e
    fn = table_descriptor("toy", entries)
    t = gcd_prime_min(fn, 2, 2, 1, 1, 3, config=CFG)
    assert t.value == 0 and t.certainty == CERTIFIED_EXACT
    # all even values beyond the window: only a horizon bound
    entries2 = {(3, e): 2 for e in range(1, 200)}
    fn2 = table_descriptor("toy2", entries2)
    t = gcd_prime_min(fn2, 2, 2, 1, 1, 3, config=EngineConfig(horizon=100, exponent_horizon=20))
    assert t.value == 1 and t.certainty == UPPER_BOUND


# --- coprime-content minima ---------------------------------------------------

def test_coprime_min_square_witness():
    t = coprime_min(S0, 2, 4, 1, 3, config=CFG)
    assert t.value == 0 and t.certainty == CERTIFIED_EXACT
    assert "square" in t.justification


def test_coprime_min_twice_square_only_for_positive_k():
    # 2 is twice a square mod 3 but the divisor count of 2*m^2 is even
    t = coprime_min(S0, 2, 3, 2, 1, config=CFG)
    assert t.value == 1 and t.certainty == UPPER_BOUND
    # for sigma_1 the twice-square witness is sound: sigma(2) = 3 is odd
    t = coprime_min(S1, 2, 3, 2, 1, config=CFG)
    assert t.value == 0 and t.certainty == CERTIFIED_EXACT
    assert "twice-square" in t.justification


def test_coprime_min_prime_witness():
    t = coprime_min(S0, 3, 7, 3, 1, config=CFG)
    assert t.value == 0 and t.certainty == CERTIFIED_EXACT


def test_coprime_min_upper_bound_case():
    t = coprime_min(S1, 2, 8, 7, 1, config=EngineConfig(horizon=500))
    assert t.value == 3 and t.certainty == UPPER_BOUND


def test_coprime_min_rejects_common_factor():
    with pytest.raises(EngineError):
        coprime_min(S0, 2, 6, 3, 1, config=CFG)


# --- decomposition ------------------------------------------------------------

def test_decomposition_examples():
    d = decompose_valuation(S0, 2, 12, 3, CFG)
    assert d.fixed_term == 0
    assert [(q, t.value.value) for q, _, t in d.gcd_terms] == [(3, 0)]
    assert d.coprime_term.value == 0
    assert d.total == 0 and d.total_certainty == CERTIFIED_EXACT

    d = decompose_valuation(S0, 2, 9, 3, CFG)
    assert d.fixed_term == 1 and not d.gcd_terms
    assert d.coprime_term.value == 0
    assert d.total == 1 and d.total_certainty == CERTIFIED_EXACT

    for fn in (S0, S1, PHI):
        d = decompose_valuation(fn, 5, 1, 1, CFG)
        assert d.fixed_term == 0 and not d.gcd_terms
        assert d.total == d.coprime_term.value


def test_decomposition_vanishing_function_absorbs():
    # 4n+2 = 2*(2n+1): the locked factor 2 has f(2) = 0, so every value vanishes
    fn = table_descriptor("zero2", {(2, 1): 0, (3, 1): 1})
    d = decompose_valuation(fn, 2, 4, 2, EngineConfig(horizon=50))
    assert d.fixed_term.is_infinite
    assert d.total.is_infinite
    assert d.coprime_term.value == 0  # certified by the prime 3 in 2n+1


# --- certificates ---------------------------------------------------------------

def test_certify_verified_to_horizon():
    c = certify_congruence(S1, 2, 2, 4, 3, CFG)
    assert c.status == VERIFIED_TO_HORIZON
    assert c.scan.value == 2
    assert c.decomposition.total == 2 and c.decomposition.total_certainty == UPPER_BOUND


def test_certify_refuted_with_witness():
    c = certify_congruence(S0, 2, 2, 4, 3, CFG)
    assert c.status == REFUTED and c.refutation_witness == 0
    n = c.refutation_witness
    assert nu(2, eval_fn(S0, 4 * n + 3)) < 2


def test_certify_certified():
    # divisor count of 36n+6: locked part 6 contributes nu_2(4) = 2
    c = certify_congruence(S0, 2, 2, 36, 6, CFG)
    assert c.status == CERTIFIED
    assert c.decomposition.total == 2
    assert c.decomposition.total_certainty == CERTIFIED_EXACT


def test_certify_wrong_odd_k_divisor_sum_claim_is_refuted():
    # sigma_1(5n+2) is not divisible by 5 at n = 0
    c = certify_congruence(S1, 5, 1, 5, 2, CFG)
    assert c.status == REFUTED and c.refutation_witness == 0


def test_certify_rejects_bad_k():
    with pytest.raises(EngineError):
        certify_congruence(S1, 2, 0, 4, 3, CFG)


def test_certificate_json_round_trip_and_reverify():
    c = certify_congruence(S1, 2, 2, 4, 3, CFG)
    doc = c.to_json()
    # serialization is deterministic
    assert json.dumps(doc) == json.dumps(certify_congruence(S1, 2, 2, 4, 3, CFG).to_json())
    assert reverify_certificate(json.loads(json.dumps(doc)))
    # a tampered certificate no longer verifies
    doc["status"] = CERTIFIED
    assert not reverify_certificate(doc)


# --- engine-level invariants -----------------------------------------------------

GRID_CFG = EngineConfig(horizon=4000)


def brute_min(fn, p, A, B, horizon):
    best = None
    for n in range(horizon):
        v = nu(p, eval_fn(fn, A * n + B))
        if best is None or v < best:
            best = v
        if best == 0:
            break
    return best


def test_scan_never_below_decomposition_total():
    for fn in (S0, S1, PHI):
        for p in (2, 3):
            for A in range(1, 13):
                for B in range(1, 13):
                    d = decompose_valuation(fn, p, A, B, GRID_CFG)
                    s = scan_valuation(fn, p, A, B, config=GRID_CFG)
                    assert not s.value < d.total, (fn.name, p, A, B)


def test_scan_agrees_with_brute_force():
    for fn, p, A, B in [(S0, 2, 12, 3), (S1, 2, 4, 3), (PHI, 3, 21, 14),
                        (S1, 5, 5, 3), (sigma(2), 5, 5, 2), (PHI, 2, 5, 4)]:
        s = scan_valuation(fn, p, A, B, 300, config=GRID_CFG)
        assert s.value == brute_min(fn, p, A, B, 300)


def test_subprogression_refinement_only_raises_min():
    for t in (2, 3, 5):
        base = scan_valuation(S1, 2, 6, 5, 2000, config=GRID_CFG).value
        for j in range(t):
            refined = scan_valuation(S1, 2, 6 * t, 6 * j + 5, 2000, config=GRID_CFG).value
            assert not refined < base


def test_certified_totals_are_true_lower_bounds():
    # where the decomposition is exact, a long scan can meet but never beat it
    cases = [(S0, 2, 9, 3), (S0, 2, 36, 6), (S1, 2, 12, 3), (PHI, 3, 21, 14)]
    for fn, p, A, B in cases:
        d = decompose_valuation(fn, p, A, B, CFG)
        assert d.total_certainty == CERTIFIED_EXACT
        s = scan_valuation(fn, p, A, B, config=CFG)
        assert not s.value < d.total
