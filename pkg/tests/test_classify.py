from math import gcd

import pytest

from multcong.arith import ArithError
from multcong.classify import (
    is_sum_of_two_squares,
    phi_congruence_evidence,
    phi_value_formula,
    search_congruences,
    sigma_suite,
    structure_audit,
    structure_check,
    two_squares_audit,
)
from multcong.engine import EngineConfig, REFUTED, scan_valuation
from multcong.functions import phi, sigma

CFG = EngineConfig(horizon=20_000)


def test_search_divisor_count_mod_2():
    report = search_congruences(sigma(0), 2, 1, 12, CFG)
    pairs = {(h.A, h.B) for h in report.hits}
    assert (9, 3) in pairs and (9, 6) in pairs
    assert report.refuted + len(report.hits) == sum(range(1, 13))
    assert not report.errors
    # deterministic hit order
    assert [(h.A, h.B) for h in report.hits] == sorted((h.A, h.B) for h in report.hits)


def test_search_sigma1_mod_4():
    report = search_congruences(sigma(1), 2, 2, 4, CFG)
    assert (4, 3) in {(h.A, h.B) for h in report.hits}


def test_search_divisor_count_odd_prime_floor_hits_only():
    # 8n+4 = 4*(2n+1) carries the locked factor 4 with divisor count 3, so a
    # mod-3 congruence exists there; nothing exists beyond such locked floors
    report = search_congruences(sigma(0), 3, 1, 8, CFG)
    assert [(h.A, h.B) for h in report.hits] == [(8, 4)]
    hit = report.hits[0]
    assert hit.certificate.decomposition.fixed_term == 1
    assert hit.certificate.status == "certified"


def test_search_parallel_matches_serial():
    serial = search_congruences(sigma(0), 2, 1, 10, CFG)
    parallel = search_congruences(sigma(0), 2, 1, 10,
                                  EngineConfig(horizon=20_000, jobs=4))
    assert serial.to_json() == parallel.to_json()


def test_structure_check_requires_divisor_count_mod_two_power():
    report = search_congruences(sigma(0), 2, 1, 9, CFG)
    with pytest.raises(ArithError):
        structure_check(report.hits[0])


def test_structure_check_on_known_hit():
    report = search_congruences(sigma(0), 2, 2, 36, CFG)
    assert report.hits, "expected at least the 36n+6 family"
    for hit in report.hits:
        res = structure_check(hit)
        assert res["ok"], (hit.A, hit.B, res)
        assert hit.B % res["P"] == 0 and hit.A % res["P"] ** 2 == 0


def test_structure_audit_small_grid():
    out = structure_audit((2,), 60, CFG)
    (res,) = out["results"]
    assert res["structure_failures"] == []
    assert not res["errors"]
    assert res["hits"] >= 1


def test_two_squares_audit_odd_k():
    out = two_squares_audit(500, (1, 3))
    assert out["ok"]
    assert out["criterion_mismatches"] == []
    assert out["audited"] > 0


def test_two_squares_audit_even_k_detects_failures():
    # the divisor power sum with an even exponent is not forced to 0 mod 4:
    # sigma_2(3) = 10; the audit must surface this rather than hide it
    out = two_squares_audit(50, (2,))
    assert not out["ok"]
    assert out["failures"]["2"][0] == 3


def test_two_squares_criterion_examples():
    assert not is_sum_of_two_squares(3)
    assert is_sum_of_two_squares(25)
    assert not is_sum_of_two_squares(21)


def test_phi_formula_examples():
    assert phi_value_formula(3, 21, 14) == 1
    assert phi_value_formula(3, 9, 3) is None       # B' = 1 mod 3
    assert phi_value_formula(5, 11, 23) == 0
    assert phi_value_formula(2, 5, 4) is None       # p = 2 excluded: formula is wrong there


def test_phi_formula_p2_would_be_wrong():
    # the scan shows why p = 2 must be inapplicable
    s = scan_valuation(phi(), 2, 5, 4, 3000, config=CFG)
    assert s.value == 1  # a naive locked/varying/coprime total would say 0


def test_phi_formula_matches_scan_small_grid():
    cfg = EngineConfig(horizon=20_000)
    for p in (3, 5):
        for A in range(1, 25):
            for B in range(1, A + 1):
                expect = phi_value_formula(p, A, B)
                if expect is None:
                    continue
                got = scan_valuation(phi(), p, A, B, config=cfg).value
                assert got == expect, (p, A, B)


def test_phi_congruence_evidence_empty():
    out = phi_congruence_evidence((3, 5), 30, EngineConfig(horizon=5000))
    assert out["ok"] and out["non_refuted"] == []


def test_sigma_suite_rows():
    out = sigma_suite((1,), EngineConfig(horizon=20_000))
    rows = {(r["p"], r["A"], r["B"]): r for r in out["rows"]}
    assert rows[(2, 4, 3)]["pass"] is True
    assert rows[(2, 8, 7)]["pass"] is True
    assert rows[(3, 3, 2)]["pass"] is True
    # the claimed exact value mod 5 fails at n = 0; the suite must report it
    assert rows[(5, 5, 2)]["pass"] is False
    assert rows[(5, 5, 2)]["scanned"] == 0


def test_sigma_suite_mod7_rows():
    out = sigma_suite((3,), EngineConfig(horizon=20_000))
    asserted = [r for r in out["mod7"] if r["pass"] is not None]
    assert len(asserted) == 3 and all(r["pass"] for r in asserted)
    probe = [r for r in out["mod7"] if r["pass"] is None]
    assert probe[0]["b"] == 4 and probe[0]["scanned"] == 0


def test_divisor_count_bound_and_plus_one_only_at_p2():
    # scanned minimum never exceeds the locked-part valuation by more than 1,
    # and hitting the +1 forces p = 2
    from multcong.arith import decompose_progression, nu
    from multcong.functions import eval_fn
    s0 = sigma(0)
    cfg = EngineConfig(horizon=10_000)
    for p in (2, 3, 5):
        for A in range(1, 25):
            for B in range(1, A + 1):
                locked = decompose_progression(A, B).G_locked
                floor = nu(p, eval_fn(s0, locked)).value if locked > 1 else 0
                v = scan_valuation(s0, p, A, B, config=cfg).value
                assert v <= floor + 1, (p, A, B)
                if v == floor + 1:
                    assert p == 2, (p, A, B)


def test_residue_shape_pins_coprime_term_at_zero():
    # for divisor power sums at p = 2, a square or twice-square residue class
    # certifies the coprime term exactly 0 on every searched progression;
    # note it does NOT cap the scanned minimum (the per-part minima need not
    # be jointly attainable: V_2 of sigma_1 on 12n+3 is 2 with B' = 1 square)
    from multcong.arith import decompose_progression, quadratic_class
    from multcong.engine import CERTIFIED_EXACT
    for k in (1, 3):
        fn = sigma(k)
        report = search_congruences(fn, 2, 1, 20, EngineConfig(horizon=10_000))
        residue_hits = 0
        for hit in report.hits:
            prog = decompose_progression(hit.A, hit.B)
            qc = quadratic_class(prog.B_prime, prog.A_prime)
            if qc.is_square_mod or qc.is_twice_square_mod:
                residue_hits += 1
                term = hit.certificate.decomposition.coprime_term
                assert term.value == 0 and term.certainty == CERTIFIED_EXACT, \
                    (k, hit.A, hit.B)
        assert residue_hits > 0  # (12, 3) and friends keep this branch honest


def test_search_hits_reverify_from_serialized_form():
    import json
    from multcong.engine import reverify_certificate
    report = search_congruences(sigma(0), 2, 1, 10, EngineConfig(horizon=5000))
    assert report.hits
    for hit in report.hits[:3]:
        doc = json.loads(json.dumps(hit.certificate.to_json()))
        assert reverify_certificate(doc)
