import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multcong.arith import (
    INFINITY,
    ArithError,
    ExtendedNat,
    coprime_part,
    decompose_progression,
    factorize,
    is_prime,
    kronecker_symbol,
    nu,
    prime_sieve,
    primes_in_progression,
    quadratic_class,
)

SMALL_PRIMES = prime_sieve(200)


def test_factorize_unit():
    f = factorize(1)
    assert f.sign == 1 and f.factors == ()
    f = factorize(-1)
    assert f.sign == -1 and f.factors == ()


def test_factorize_examples():
    assert factorize(48).factors == ((2, 4), (3, 1))
    # tau(4) from the series expansion
    f = factorize(-1472)
    assert f.sign == -1 and f.factors == ((2, 6), (23, 1))


def test_factorize_rejects_zero():
    with pytest.raises(ArithError):
        factorize(0)


@given(st.lists(st.tuples(st.sampled_from(SMALL_PRIMES), st.integers(1, 5)),
                min_size=0, max_size=5),
       st.sampled_from([1, -1]))
def test_factorize_roundtrip(pairs, sign):
    fs = {}
    for q, e in pairs:
        fs[q] = fs.get(q, 0) + e
    n = sign
    for q, e in fs.items():
        n *= q**e
    f = factorize(n)
    assert f.sign == sign
    assert f.factors == tuple(sorted(fs.items()))
    assert f.value() == n


def test_nu_examples():
    assert nu(2, 48) == 4
    assert nu(5, 0).is_infinite
    assert nu(3, 1) == 0
    assert nu(2, -48) == 4  # sign ignored


def test_nu_rejects_composite_p():
    with pytest.raises(ArithError):
        nu(6, 12)


@given(st.sampled_from([2, 3, 5, 7]), st.integers(-10**6, 10**6),
       st.integers(-10**6, 10**6))
def test_nu_additive(p, a, b):
    if a != 0 and b != 0:
        assert nu(p, a * b).value == nu(p, a).value + nu(p, b).value


def test_extended_nat_algebra():
    assert (INFINITY + 3).is_infinite
    assert (ExtendedNat(2) + INFINITY).is_infinite
    assert ExtendedNat(2) + ExtendedNat(3) == 5
    assert min(INFINITY, ExtendedNat(7), key=lambda x: (x.is_infinite, x._value or 0)) == 7
    assert ExtendedNat(4) < INFINITY
    assert not INFINITY < ExtendedNat(4)
    with pytest.raises(ArithError):
        ExtendedNat(-1)


def test_coprime_part_examples():
    assert coprime_part(25, 3) == 25
    assert coprime_part(12, 6) == 1
    assert coprime_part(360, 10) == 9


@given(st.integers(1, 10**6), st.integers(1, 10**4))
def test_coprime_part_properties(n, c):
    from math import gcd
    cp = coprime_part(n, c)
    assert n % cp == 0
    assert gcd(cp, c) == 1
    # the removed part is supported on primes of c
    rest = n // cp
    for q, _ in factorize(rest).factors if rest > 1 else ():
        assert c % q == 0


def test_decompose_examples():
    pr = decompose_progression(12, 3)
    assert (pr.G, pr.A_prime, pr.B_prime, pr.G_locked) == (3, 4, 1, 1)
    pr = decompose_progression(7, 3)
    assert (pr.G, pr.A_prime, pr.B_prime, pr.G_locked) == (1, 7, 3, 1)
    # 2 divides both G and A'; its full multiplicity in G is locked
    pr = decompose_progression(8, 4)
    assert (pr.G, pr.A_prime, pr.B_prime, pr.G_locked) == (4, 2, 1, 4)


def test_decompose_roundtrip_grid():
    from math import gcd
    for A in range(1, 201):
        for B in range(1, 201):
            pr = decompose_progression(A, B)
            assert pr.G * pr.A_prime == A
            assert pr.G * pr.B_prime == B
            assert gcd(pr.A_prime, pr.B_prime) == 1
            assert pr.G % pr.G_locked == 0
            for q, _ in pr.G_locked_factors.factors:
                assert pr.A_prime % q == 0


def test_decompose_rejects_nonpositive():
    with pytest.raises(ArithError):
        decompose_progression(0, 3)
    with pytest.raises(ArithError):
        decompose_progression(3, 0)


def test_quadratic_class_examples():
    assert quadratic_class(1, 4).is_square_mod
    qc = quadratic_class(3, 4)
    assert not qc.is_square_mod and not qc.is_twice_square_mod
    qc = quadratic_class(7, 8)
    assert not qc.is_square_mod and not qc.is_twice_square_mod


def test_quadratic_class_rejects_common_factor():
    with pytest.raises(ArithError):
        quadratic_class(6, 9)


def test_quadratic_class_euler_criterion():
    # for odd prime modulus, residuosity must agree with the symbol
    for p in (3, 5, 7, 11, 13, 17):
        for b in range(1, p):
            qc = quadratic_class(b, p)
            assert qc.is_square_mod == (qc.kronecker == 1)
            euler = pow(b, (p - 1) // 2, p)
            assert qc.kronecker == (-1 if euler == p - 1 else euler)


def test_kronecker_known_values():
    assert kronecker_symbol(1, 1) == 1
    assert kronecker_symbol(2, 7) == 1
    assert kronecker_symbol(3, 7) == -1
    assert kronecker_symbol(14, 7) == 0
    assert kronecker_symbol(2, 8) == 0
    # multiplicativity in the lower argument
    for a in range(1, 30):
        for m, n in ((3, 5), (5, 7), (4, 9)):
            assert kronecker_symbol(a, m * n) == kronecker_symbol(a, m) * kronecker_symbol(a, n)


def test_primes_in_progression_examples():
    assert primes_in_progression(4, 3, 1, 3).primes == (3, 7, 11)
    assert primes_in_progression(1, 1, 1, 2).primes == (2, 3)
    assert primes_in_progression(4, 1, 5, 2).primes == (13, 17)


def test_primes_in_progression_rejects_common_factor():
    with pytest.raises(ArithError):
        primes_in_progression(6, 3, 1, 2)


def test_primes_in_progression_exhaustion():
    res = primes_in_progression(4, 3, 1, budget=100, candidate_bound=50)
    assert res.exhausted
    assert res.primes == (3, 7, 11, 19, 23, 31, 43, 47)


@given(st.integers(2, 10**6))
@settings(max_examples=200)
def test_is_prime_matches_trial_division(n):
    def trial(m):
        if m < 2:
            return False
        d = 2
        while d * d <= m:
            if m % d == 0:
                return False
            d += 1
        return True
    assert is_prime(n) == trial(n)
