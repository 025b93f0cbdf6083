"""Coefficients of q * prod(1 - q^n)^24, exact to a chosen horizon.

The cube of the Euler product is the sparse triangular-number series
sum (-1)^k (2k+1) q^(k(k+1)/2); three exact truncated squarings of it give
the 24th power.  Dense squarings are done by packing coefficients into one
big integer per sign (Kronecker substitution), so CPython's big-int multiply
does the convolution.  No floating point anywhere.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from math import gcd, isqrt

from .arith import ArithError, is_prime, nu_int, prime_sieve
from .functions import CoverageError, eval_mod, sigma

TAU_HORIZON_LIMIT = 500_000  # resource guard; the packed series grow ~N log N

_LEADING = (1, -24, 252, -1472, 4830)  # tau(1..5), anchors every load/build


@dataclass(frozen=True)
class TauTable:
    """tau(1..horizon); values[n] is tau(n), values[0] unused."""

    horizon: int
    values: tuple[int, ...]

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.horizon:
            raise CoverageError(f"tau table covers 1..{self.horizon}, asked for {n}")
        return self.values[n]


def _triangular_series(limit: int) -> list[int]:
    c = [0] * (limit + 1)
    k = 0
    while k * (k + 1) // 2 <= limit:
        c[k * (k + 1) // 2] = (2 * k + 1) if k % 2 == 0 else -(2 * k + 1)
        k += 1
    return c


def _truncated_square(coeffs: list[int], limit: int) -> list[int]:
    """Exact coefficients of the square of a signed series, up to q^limit.

    Sign handling: split into non-negative parts P - N and combine three
    packed products.  The packing width is derived from a proven bound on
    the product coefficients, so unpacking is exact by construction.
    """
    pos = [x if x > 0 else 0 for x in coeffs]
    neg = [-x if x < 0 else 0 for x in coeffs]
    mx = max(max(pos), max(neg), 1)
    width_bits = ((limit + 1) * mx * mx).bit_length() + 1
    wb = (width_bits + 7) // 8

    def pack(a: list[int]) -> int:
        return int.from_bytes(b"".join(x.to_bytes(wb, "little") for x in a), "little")

    p_int, n_int = pack(pos), pack(neg)
    pp, nn, pn = p_int * p_int, n_int * n_int, p_int * n_int

    nbytes = (2 * len(coeffs) + 2) * wb

    def unpack(v: int) -> list[int]:
        bs = v.to_bytes(nbytes, "little")
        return [int.from_bytes(bs[i * wb : (i + 1) * wb], "little") for i in range(limit + 1)]

    upp, unn, upn = unpack(pp), unpack(nn), unpack(pn)
    return [upp[i] + unn[i] - 2 * upn[i] for i in range(limit + 1)]


def tau_table(horizon: int) -> TauTable:
    """Exact tau(1..horizon) from the 24th-power expansion."""
    if horizon < 1:
        raise ArithError("tau_table needs horizon >= 1")
    if horizon > TAU_HORIZON_LIMIT:
        raise ArithError(
            f"tau_table horizon {horizon} exceeds the guard {TAU_HORIZON_LIMIT}"
        )
    limit = horizon - 1  # tau(n) is the q^(n-1) coefficient of the 24th power
    e3 = _triangular_series(limit)
    e6 = _truncated_square(e3, limit)
    e12 = _truncated_square(e6, limit)
    e24 = _truncated_square(e12, limit)
    values = (0,) + tuple(e24[n - 1] for n in range(1, horizon + 1))
    if horizon >= 5 and values[1:6] != _LEADING:
        raise ArithError("tau expansion failed its leading-coefficient anchor")
    return TauTable(horizon=horizon, values=values)


def tau_prime_power(table: TauTable, q: int, e: int) -> int:
    """tau(q^e) by the two-term recurrence from tau(q).

    tau(q^(m+1)) = tau(q) * tau(q^m) - q^11 * tau(q^(m-1)).
    """
    if not is_prime(q):
        raise ArithError(f"{q} is not prime")
    if e < 0:
        raise ArithError("exponent must be >= 0")
    if q > table.horizon:
        raise CoverageError(f"tau table covers primes <= {table.horizon}, asked for q={q} (e={e})")
    if e == 0:
        return 1
    prev, cur = 1, table[q]
    q11 = q**11
    for _ in range(e - 1):
        prev, cur = cur, table[q] * cur - q11 * prev
    return cur


# ---------------------------------------------------------------------------
# Exceptional congruences against divisor power sums
# ---------------------------------------------------------------------------

# (label, sigma exponent k, modulus, constant factor, power of m in the unit
#  factor, residue test) -- each asserts
#    tau(m) = const * m^unit_pow * sigma_k(m)  (mod modulus)
# for every m in the class; m outside the class is inapplicable.
_SD_CHECKS = (
    ("mod 2^11, m=1 (8)",  11,   2**11,    1,    0, lambda m: m % 8 == 1),
    ("mod 2^13, m=3 (8)",  11,   2**13, 1217,    0, lambda m: m % 8 == 3),
    ("mod 2^12, m=5 (8)",  11,   2**12, 1537,    0, lambda m: m % 8 == 5),
    ("mod 2^14, m=7 (8)",  11,   2**14,  705,    0, lambda m: m % 8 == 7),
    ("mod 3^6, m=1 (3)",   1231, 3**6,     1, -610, lambda m: m % 3 == 1),
    ("mod 3^7, m=2 (3)",   1231, 3**7,     1, -610, lambda m: m % 3 == 2),
    ("mod 5^3, m!=0 (5)",  71,   5**3,     1,  -30, lambda m: m % 5 != 0),
    ("mod 7, m=0,1,2,4 (7)",  9, 7,        1,    1, lambda m: m % 7 in (0, 1, 2, 4)),
    ("mod 7^2, m=3,5,6 (49)", 9, 7**2,     1,    1, lambda m: m % 49 in (3, 5, 6)),
)

RAMANUJAN_MOD7_CLASSES = (3, 5, 6)  # tau vanishes mod 7 on these classes


@dataclass(frozen=True)
class CongruenceReport:
    label: str
    checked: int
    passed: int
    failed: int
    inapplicable: int
    failures: tuple[int, ...]  # first few failing arguments

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "checked": self.checked,
            "passed": self.passed,
            "failed": self.failed,
            "inapplicable": self.inapplicable,
            "failures": list(self.failures),
        }


def verify_sd_congruences(table: TauTable, n_max: int) -> list[CongruenceReport]:
    """Check the exceptional divisor-sum congruences for arguments <= n_max.

    For the power-of-2 families the argument runs over 8n+r with index
    n <= n_max; for the rest the argument itself runs to n_max.  Inverse
    unit factors are taken modulo the congruence modulus; arguments outside
    a congruence's residue class count as inapplicable, never pass/fail.
    """
    reports: list[CongruenceReport] = []
    sig_cache: dict[int, object] = {}

    def sig(k):
        if k not in sig_cache:
            sig_cache[k] = sigma(k)
        return sig_cache[k]

    for label, k, modulus, const, unit_pow, applies in _SD_CHECKS:
        arg_max = 8 * n_max + 7 if modulus % 2 == 0 else n_max
        arg_max = min(arg_max, table.horizon)
        passed = failed = inapplicable = 0
        failures: list[int] = []
        for m in range(1, arg_max + 1):
            if not applies(m):
                inapplicable += 1
                continue
            if unit_pow < 0 and gcd(m, modulus) != 1:
                inapplicable += 1
                continue
            rhs = const * eval_mod(sig(k), m, modulus) % modulus
            if unit_pow:
                rhs = rhs * pow(m, unit_pow, modulus) % modulus
            if table[m] % modulus == rhs:
                passed += 1
            else:
                failed += 1
                if len(failures) < 10:
                    failures.append(m)
        reports.append(CongruenceReport(label, passed + failed, passed, failed,
                                        inapplicable, tuple(failures)))

    # tau(7n+b) = 0 (mod 7) for b in {3, 5, 6}
    for b in RAMANUJAN_MOD7_CLASSES:
        passed = failed = 0
        failures = []
        m = b
        while m <= min(7 * n_max + b, table.horizon):
            if table[m] % 7 == 0:
                passed += 1
            else:
                failed += 1
                if len(failures) < 10:
                    failures.append(m)
            m += 7
        reports.append(CongruenceReport(f"tau=0 mod 7, m={b} (7)", passed + failed,
                                        passed, failed, 0, tuple(failures)))
    return reports


def table_self_checks(table: TauTable, n_max: int | None = None) -> dict:
    """Internal consistency: multiplicativity, prime-power recurrence, parity.

    Returns counts; any nonzero failure count means the expansion is wrong.
    """
    n_max = min(n_max or table.horizon, table.horizon)
    mult_bad = []
    for n in range(2, n_max + 1):
        # split off the smallest prime power
        m = n
        q = None
        for cand in (2, 3, 5, 7, 11, 13):
            if m % cand == 0:
                q = cand
                break
        if q is None:
            continue
        e = 0
        while m % q == 0:
            m //= q
            e += 1
        if m > 1:
            if table[n] != table[q**e] * table[m]:
                mult_bad.append(n)
    rec_bad = []
    for q in prime_sieve(isqrt(n_max)):
        e = 2
        while q**e <= n_max:
            if table[q**e] != tau_prime_power(table, q, e):
                rec_bad.append(q**e)
            e += 1
    parity_bad = []
    for n in range(1, n_max + 1):
        odd_square = n % 2 == 1 and isqrt(n) ** 2 == n
        if (table[n] % 2 == 1) != odd_square:
            parity_bad.append(n)
    # coefficient-size sanity at primes (generous analytic bound)
    bound_bad = [q for q in prime_sieve(n_max) if abs(table[q]) >= 2 * q**6]
    return {
        "multiplicativity_failures": mult_bad[:10],
        "recurrence_failures": rec_bad[:10],
        "parity_failures": parity_bad[:10],
        "prime_bound_failures": bound_bad[:10],
        "ok": not (mult_bad or rec_bad or parity_bad or bound_bad),
    }


# ---------------------------------------------------------------------------
# Cache files
# ---------------------------------------------------------------------------

_CACHE_MAGIC = "tau-table v1"


def save_table(table: TauTable, path: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write(f"{_CACHE_MAGIC} horizon={table.horizon}\n")
        for n in range(1, table.horizon + 1):
            fh.write(f"{n} {table.values[n]}\n")
    os.replace(tmp, path)


def load_table(path: str) -> TauTable:
    """Load a cached table; the five leading anchor values must match."""
    with open(path, encoding="ascii") as fh:
        header = fh.readline().strip()
        if not header.startswith(_CACHE_MAGIC):
            raise ArithError(f"{path}: not a tau table cache")
        horizon = int(header.split("horizon=")[1])
        values = [0] * (horizon + 1)
        for line in fh:
            n_str, v_str = line.split()
            values[int(n_str)] = int(v_str)
    table = TauTable(horizon=horizon, values=tuple(values))
    for n, expect in enumerate(_LEADING, start=1):
        if n <= horizon and table[n] != expect:
            raise ArithError(f"{path}: anchor value tau({n}) != {expect}; cache rejected")
    return table


def cached_tau_table(horizon: int, cache_dir: str | None = None) -> TauTable:
    """tau table from the cache directory, building and saving on miss."""
    cache_dir = cache_dir or os.environ.get("MULTCONG_CACHE_DIR")
    if not cache_dir:
        return tau_table(horizon)
    os.makedirs(cache_dir, exist_ok=True)
    path = os.path.join(cache_dir, f"tau_{horizon}.txt")
    if os.path.exists(path):
        try:
            table = load_table(path)
            if table.horizon >= horizon:
                return table
        except (ArithError, ValueError):
            pass  # fall through to a rebuild
    table = tau_table(horizon)
    save_table(table, path)
    return table
