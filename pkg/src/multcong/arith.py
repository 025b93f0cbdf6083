"""Exact integer arithmetic substrate.

Factorizations, p-adic valuations, progression decomposition, quadratic
residue classes, and primes in arithmetic progressions.  Everything here is
pure, deterministic, and exact (no floats); values are immutable and safe to
share across worker threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt


class ArithError(ValueError):
    """Domain violation in an arithmetic operation."""


# ---------------------------------------------------------------------------
# Extended naturals (valuations can be +infinity, for nu_p(0))
# ---------------------------------------------------------------------------

class ExtendedNat:
    """A non-negative integer or infinity, closed under + and min.

    Infinity absorbs addition; min(Infinity, x) = x for finite x.
    """

    __slots__ = ("_value",)

    def __init__(self, value: int | None):
        if value is not None:
            if not isinstance(value, int) or value < 0:
                raise ArithError(f"ExtendedNat needs a non-negative int, got {value!r}")
        self._value = value

    @property
    def is_infinite(self) -> bool:
        return self._value is None

    @property
    def value(self) -> int:
        if self._value is None:
            raise ArithError("infinite ExtendedNat has no finite value")
        return self._value

    def __add__(self, other: "ExtendedNat | int") -> "ExtendedNat":
        o = other if isinstance(other, ExtendedNat) else ExtendedNat(other)
        if self._value is None or o._value is None:
            return INFINITY
        return ExtendedNat(self._value + o._value)

    __radd__ = __add__

    def _key(self) -> tuple[int, int]:
        return (1, 0) if self._value is None else (0, self._value)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self._value == other
        if isinstance(other, ExtendedNat):
            return self._value == other._value
        return NotImplemented

    def __lt__(self, other: "ExtendedNat | int") -> bool:
        o = other if isinstance(other, ExtendedNat) else ExtendedNat(other)
        return self._key() < o._key()

    def __le__(self, other: "ExtendedNat | int") -> bool:
        o = other if isinstance(other, ExtendedNat) else ExtendedNat(other)
        return self._key() <= o._key()

    def __gt__(self, other): return not self.__le__(other)
    def __ge__(self, other): return not self.__lt__(other)

    def __hash__(self) -> int:
        return hash(self._value)

    def __repr__(self) -> str:
        return "ExtendedNat(inf)" if self._value is None else f"ExtendedNat({self._value})"

    def to_json(self) -> int | str:
        return "inf" if self._value is None else self._value

    @staticmethod
    def from_json(v) -> "ExtendedNat":
        return INFINITY if v == "inf" else ExtendedNat(int(v))


INFINITY = ExtendedNat(None)


def ext_min(values) -> ExtendedNat:
    """Minimum of a non-empty iterable of ExtendedNat."""
    best: ExtendedNat | None = None
    for v in values:
        if best is None or v < best:
            best = v
    if best is None:
        raise ArithError("ext_min of empty iterable")
    return best


# ---------------------------------------------------------------------------
# Primality and prime sieves
# ---------------------------------------------------------------------------

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

# Witness set deterministic for all n < 3.3e24 (Sorenson & Webster).
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test."""
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n % q == 0:
            return n == q
        if q * q > n:
            return True
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=8)
def prime_sieve(limit: int) -> tuple[int, ...]:
    """All primes <= limit, ascending."""
    if limit < 2:
        return ()
    bs = bytearray([1]) * (limit + 1)
    bs[0:2] = b"\x00\x00"
    for i in range(2, isqrt(limit) + 1):
        if bs[i]:
            bs[i * i :: i] = b"\x00" * len(range(i * i, limit + 1, i))
    return tuple(i for i in range(limit + 1) if bs[i])


# ---------------------------------------------------------------------------
# Factorization
# ---------------------------------------------------------------------------

_TRIAL_BOUND = 65536  # trial division alone is complete below _TRIAL_BOUND**2


@dataclass(frozen=True)
class Factorization:
    """Sign and sorted prime-power decomposition of a nonzero integer."""

    sign: int
    factors: tuple[tuple[int, int], ...]  # (prime, exponent), primes ascending

    def value(self) -> int:
        n = self.sign
        for q, e in self.factors:
            n *= q**e
        return n

    def exponent_of(self, q: int) -> int:
        for prime, e in self.factors:
            if prime == q:
                return e
        return 0

    def to_json(self) -> dict:
        return {"sign": self.sign, "factors": [[q, e] for q, e in self.factors]}


def _pollard_rho(n: int) -> int:
    # deterministic: fixed polynomial offsets tried in order
    if n % 2 == 0:
        return 2
    for c in range(1, 50):
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = gcd(abs(x - y), n)
        if d != n:
            return d
    raise ArithError(f"failed to split composite {n}")


def _factor_positive(n: int, out: dict[int, int]) -> None:
    for q in prime_sieve(_TRIAL_BOUND):
        if q * q > n:
            break
        while n % q == 0:
            out[q] = out.get(q, 0) + 1
            n //= q
    if n == 1:
        return
    if n < _TRIAL_BOUND * _TRIAL_BOUND or is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_rho(n)
    _factor_positive(d, out)
    _factor_positive(n // d, out)


def factorize(n: int) -> Factorization:
    """Exact factorization of a nonzero integer; rejects 0."""
    if n == 0:
        raise ArithError("0 has no factorization")
    sign = 1 if n > 0 else -1
    n = abs(n)
    fs: dict[int, int] = {}
    if n > 1:
        _factor_positive(n, fs)
    return Factorization(sign, tuple(sorted(fs.items())))


def nu(p: int, m: int) -> ExtendedNat:
    """Multiplicity of the prime p in m; nu(p, 0) is infinite, sign ignored."""
    if not is_prime(p):
        raise ArithError(f"nu needs a prime, got {p}")
    if m == 0:
        return INFINITY
    m = abs(m)
    v = 0
    while m % p == 0:
        v += 1
        m //= p
    return ExtendedNat(v)


def nu_int(p: int, m: int) -> int:
    """Finite valuation of a nonzero m; no primality check (internal fast path)."""
    m = abs(m)
    v = 0
    while m % p == 0:
        v += 1
        m //= p
    return v


def coprime_part(n: int, c: int) -> int:
    """Largest divisor of n coprime to c."""
    if n < 1 or c < 1:
        raise ArithError("coprime_part needs positive arguments")
    g = gcd(n, c)
    while g > 1:
        while n % g == 0:
            n //= g
        g = gcd(n, c)
    return n


# ---------------------------------------------------------------------------
# Progressions A*n + B
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Progression:
    """A*n + B with its shared-factor decomposition.

    G = gcd(A, B), A = G*A_prime, B = G*B_prime.  G_locked is the part of G
    supported on primes that also divide A_prime (their multiplicity in
    A*n + B never varies with n).
    """

    A: int
    B: int
    G: int
    A_prime: int
    B_prime: int
    G_locked: int
    G_factors: Factorization
    A_prime_factors: Factorization
    G_locked_factors: Factorization

    def to_json(self) -> dict:
        return {
            "A": self.A,
            "B": self.B,
            "G": self.G,
            "A_prime": self.A_prime,
            "B_prime": self.B_prime,
            "G_locked": self.G_locked,
        }


def decompose_progression(A: int, B: int) -> Progression:
    """Split A*n + B into locked, varying, and coprime prime content."""
    if A < 1 or B < 1:
        raise ArithError("progression needs A >= 1 and B >= 1")
    G = gcd(A, B)
    Ap, Bp = A // G, B // G
    gf = factorize(G)
    locked = 1
    for q, e in gf.factors:
        if Ap % q == 0:
            locked *= q**e
    return Progression(
        A=A, B=B, G=G, A_prime=Ap, B_prime=Bp, G_locked=locked,
        G_factors=gf,
        A_prime_factors=factorize(Ap),
        G_locked_factors=factorize(locked),
    )


# ---------------------------------------------------------------------------
# Quadratic residue machinery
# ---------------------------------------------------------------------------

def kronecker_symbol(a: int, n: int) -> int:
    """Kronecker symbol (a | n) for n >= 1."""
    if n < 1:
        raise ArithError("kronecker_symbol needs n >= 1")
    if n == 1:
        return 1
    result = 1
    # factor out 2s from n
    t = 0
    while n % 2 == 0:
        n //= 2
        t += 1
    if t:
        if a % 2 == 0:
            return 0
        if t % 2 == 1 and a % 8 in (3, 5):
            result = -result
    # Jacobi on the odd part
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


@dataclass(frozen=True)
class QuadraticClass:
    is_square_mod: bool
    is_twice_square_mod: bool
    kronecker: int

    def to_json(self) -> dict:
        return {
            "is_square_mod": self.is_square_mod,
            "is_twice_square_mod": self.is_twice_square_mod,
            "kronecker": self.kronecker,
        }


def quadratic_class(b: int, m: int) -> QuadraticClass:
    """Residue class data of b modulo m, by direct enumeration.

    The symbol is reported alongside, but for composite m a symbol value of
    +1 does not imply residuosity; the boolean fields are authoritative.
    """
    if b < 1 or m < 1:
        raise ArithError("quadratic_class needs positive arguments")
    if gcd(b, m) != 1:
        raise ArithError(f"quadratic_class needs gcd({b}, {m}) = 1")
    r = b % m
    squares = {x * x % m for x in range(m)}
    twice = {2 * x * x % m for x in range(m)}
    return QuadraticClass(
        is_square_mod=(r in squares) or m == 1,
        is_twice_square_mod=(r in twice) or m == 1,
        kronecker=kronecker_symbol(b, m),
    )


# ---------------------------------------------------------------------------
# Primes in arithmetic progressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProgressionPrimes:
    primes: tuple[int, ...]
    exhausted: bool  # candidate bound hit before the budget was filled
    candidate_bound: int


def primes_in_progression(A: int, B: int, exclude: int = 1, budget: int = 25,
                          candidate_bound: int = 10**6) -> ProgressionPrimes:
    """Up to `budget` primes q = B (mod A) with q not dividing `exclude`.

    Requires gcd(A, B) = 1 so that infinitely many such primes exist; may
    return fewer than `budget` only when candidate_bound cuts the search off,
    which the result records.
    """
    if A < 1 or B < 1:
        raise ArithError("primes_in_progression needs positive A, B")
    if gcd(A, B) != 1:
        raise ArithError(f"gcd({A}, {B}) > 1: progression has no prime tail")
    found: list[int] = []
    m = B
    while m <= candidate_bound and len(found) < budget:
        if m > 1 and is_prime(m) and (exclude % m != 0):
            found.append(m)
        m += A
    return ProgressionPrimes(tuple(found), exhausted=len(found) < budget,
                             candidate_bound=candidate_bound)


def mod_inverse(a: int, m: int) -> int:
    """Inverse of a modulo m; raises if not invertible."""
    g, x, _ = _ext_gcd(a % m, m)
    if g != 1:
        raise ArithError(f"{a} is not invertible modulo {m}")
    return x % m


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t
