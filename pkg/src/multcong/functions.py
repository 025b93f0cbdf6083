"""Multiplicative functions defined by exact values at prime powers.

A descriptor carries an exact prime-power evaluator plus optional structural
facts about valuation sequences e -> nu_p(f(q^e)); those registered facts are
the only way an infinite minimum over exponents can be resolved exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .arith import ArithError, ExtendedNat, factorize, is_prime, nu, nu_int


class CoverageError(LookupError):
    """A table-backed descriptor was asked outside its stored range."""


class DocumentError(ValueError):
    """Malformed custom-function document; message carries a line number."""


# ---------------------------------------------------------------------------
# Valuation profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ValuationProfile:
    """Description of e -> nu_p(f(q^e)) for fixed primes p, q.

    kind is one of:
      "closed-form"           rule() gives the exact valuation for every e >= 1
      "eventually-periodic"   (preperiod, period, values) detected at a finite
                              horizon; descriptive, not a certification source
      "unknown"               sampled values only
    """

    kind: str
    p: int
    q: int
    rule: Callable[[int], ExtendedNat] | None = None
    label: str = ""
    preperiod: int = 0
    period: int = 0
    samples: tuple = ()

    def value_at(self, e: int) -> ExtendedNat:
        if self.kind == "closed-form" and self.rule is not None:
            return self.rule(e)
        if e < len(self.samples):
            return self.samples[e]
        if self.kind == "eventually-periodic" and self.period > 0 and self.samples:
            i = self.preperiod + (e - self.preperiod) % self.period
            return self.samples[i]
        raise CoverageError(f"profile has no value at e={e}")


@dataclass(frozen=True)
class FnDescriptor:
    """An integer-valued multiplicative function.

    prime_power(q, e) must return the exact value f(q^e) with f(q^0) = 1.
    zero_possible marks functions that may vanish at some argument.
    """

    name: str
    prime_power: Callable[[int, int], int]
    family: str = "custom"          # sigma | phi | tau | table
    k_param: int | None = None      # exponent for the sigma family
    zero_possible: bool = False
    table_horizon: int | None = None

    def eval_prime_power(self, q: int, e: int) -> int:
        if e < 0:
            raise ArithError("exponent must be >= 0")
        if not is_prime(q):
            raise ArithError(f"{q} is not prime")
        if e == 0:
            return 1
        return self.prime_power(q, e)

    def to_json(self) -> dict:
        d: dict = {"name": self.name, "family": self.family}
        if self.k_param is not None:
            d["k"] = self.k_param
        return d


def eval_fn(f: FnDescriptor, n: int) -> int:
    """f(n) through the factorization of n; exact."""
    if n < 1:
        raise ArithError("eval needs n >= 1")
    out = 1
    for q, e in factorize(n).factors:
        out *= f.eval_prime_power(q, e)
    return out


def eval_mod(f: FnDescriptor, n: int, modulus: int) -> int:
    """f(n) mod modulus without materializing f(n).

    For the sigma family each prime-power factor is a geometric sum taken
    termwise with modular exponentiation, so huge exponents stay cheap.
    """
    if modulus < 2:
        raise ArithError("modulus must be >= 2")
    if n < 1:
        raise ArithError("eval_mod needs n >= 1")
    out = 1
    for q, e in factorize(n).factors:
        if f.family == "sigma":
            k = f.k_param or 0
            qk = pow(q, k, modulus)
            s, x = 0, 1
            for _ in range(e + 1):
                s = (s + x) % modulus
                x = x * qk % modulus
            out = out * s % modulus
        else:
            out = out * (f.eval_prime_power(q, e) % modulus) % modulus
    return out % modulus


def valuation_at_prime_power(f: FnDescriptor, p: int, q: int, e: int) -> ExtendedNat:
    """nu_p(f(q^e)), exact, infinity when f(q^e) = 0."""
    return nu(p, f.eval_prime_power(q, e))


# ---------------------------------------------------------------------------
# Built-in families
# ---------------------------------------------------------------------------

def sigma(k: int) -> FnDescriptor:
    """Divisor power sum: sum of d^k over divisors d."""
    if k < 0:
        raise ArithError("sigma needs k >= 0")

    def pp(q: int, e: int) -> int:
        return sum(q ** (i * k) for i in range(e + 1))

    return FnDescriptor(name=f"sigma_{k}", prime_power=pp, family="sigma", k_param=k)


def phi() -> FnDescriptor:
    """Euler's totient."""

    def pp(q: int, e: int) -> int:
        return q ** (e - 1) * (q - 1)

    return FnDescriptor(name="phi", prime_power=pp, family="phi")


def tau_descriptor(table) -> FnDescriptor:
    """Coefficients of the weight-12 cusp form, backed by a coefficient table.

    `table` is a tau.TauTable; prime powers beyond table coverage raise
    CoverageError naming (q, e).
    """
    from .tau import tau_prime_power  # local import to avoid a cycle

    def pp(q: int, e: int) -> int:
        return tau_prime_power(table, q, e)

    return FnDescriptor(name="tau", prime_power=pp, family="tau",
                        zero_possible=True, table_horizon=table.horizon)


def table_descriptor(name: str, entries: dict[tuple[int, int], int]) -> FnDescriptor:
    """A function given by an explicit (q, e) -> value table."""

    def pp(q: int, e: int) -> int:
        try:
            return entries[(q, e)]
        except KeyError:
            raise CoverageError(f"table '{name}' has no entry for (q={q}, e={e})") from None

    horizon = max((q**e for q, e in entries), default=1)
    return FnDescriptor(name=name, prime_power=pp, family="table",
                        zero_possible=True, table_horizon=horizon)


# ---------------------------------------------------------------------------
# Registered closed-form profiles and profile detection
# ---------------------------------------------------------------------------

def registered_profile(f: FnDescriptor, p: int, q: int) -> ValuationProfile | None:
    """Closed-form valuation profile for the built-in families, if any."""
    if f.family == "sigma":
        k = f.k_param or 0
        if k == 0:
            return ValuationProfile(
                kind="closed-form", p=p, q=q,
                rule=lambda e: nu(p, e + 1),
                label="divisor count: value at q^e is e+1",
            )
        return ValuationProfile(
            kind="closed-form", p=p, q=q,
            rule=lambda e: nu(p, sum(q ** (i * k) for i in range(e + 1))),
            label=f"geometric sum of q^({k}i), i = 0..e",
        )
    if f.family == "phi":
        def phi_rule(e: int) -> ExtendedNat:
            if e == 0:
                return ExtendedNat(0)
            base = nu_int(p, q - 1) if q != p else 0
            return ExtendedNat(base + (e - 1 if q == p else 0))
        return ValuationProfile(
            kind="closed-form", p=p, q=q, rule=phi_rule,
            label="totient: nu_p(q-1) plus e-1 when q = p",
        )
    return None


def valuation_profile(f: FnDescriptor, p: int, q: int, horizon: int = 64) -> ValuationProfile:
    """Profile of e -> nu_p(f(q^e)): registered closed form when available,
    otherwise sampled values with a minimal eventual-period fit, else unknown.
    """
    if not (is_prime(p) and is_prime(q)):
        raise ArithError("valuation_profile needs primes p, q")
    reg = registered_profile(f, p, q)
    if reg is not None:
        return reg
    samples = tuple(valuation_at_prime_power(f, p, q, e) for e in range(horizon + 1))
    fit = _detect_period(samples)
    if fit is not None:
        pre, per = fit
        return ValuationProfile(kind="eventually-periodic", p=p, q=q,
                                preperiod=pre, period=per, samples=samples,
                                label=f"detected at horizon {horizon}")
    return ValuationProfile(kind="unknown", p=p, q=q, samples=samples,
                            label=f"sampled to horizon {horizon}")


def _detect_period(samples: tuple) -> tuple[int, int] | None:
    n = len(samples)
    for per in range(1, n // 3 + 1):
        for pre in range(0, n - 3 * per):
            if all(samples[i] == samples[i + per] for i in range(pre, n - per)):
                return pre, per
    return None


# ---------------------------------------------------------------------------
# Custom-function documents
# ---------------------------------------------------------------------------

def load_custom(text: str, *, tau_table=None) -> FnDescriptor:
    """Build a descriptor from a key-value document.

    Grammar (one `key = value` pair per line, '#' comments):
        family = sigma | phi | tau | table
        k      = <int>            (sigma only)
        name   = <string>         (optional, table only)
        table  = <q> <e> <value>  (repeatable, table only)

    Errors cite the offending line number.
    """
    family = None
    k = None
    name = None
    entries: dict[tuple[int, int], int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DocumentError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key == "family":
            if val not in ("sigma", "phi", "tau", "table"):
                raise DocumentError(f"line {lineno}: unknown family {val!r}")
            family = val
        elif key == "k":
            try:
                k = int(val)
            except ValueError:
                raise DocumentError(f"line {lineno}: k must be an integer, got {val!r}") from None
        elif key == "name":
            name = val
        elif key == "table":
            parts = val.split()
            if len(parts) != 3:
                raise DocumentError(f"line {lineno}: table entry needs 'q e value'")
            try:
                q, e, v = (int(x) for x in parts)
            except ValueError:
                raise DocumentError(f"line {lineno}: table entry needs integers") from None
            if not is_prime(q) or e < 1:
                raise DocumentError(f"line {lineno}: table entry needs prime q and e >= 1")
            entries[(q, e)] = v
        else:
            raise DocumentError(f"line {lineno}: unknown key {key!r}")
    if family is None:
        raise DocumentError("line 1: missing required key 'family'")
    if family == "sigma":
        if k is None:
            raise DocumentError("line 1: family sigma needs k")
        return sigma(k)
    if family == "phi":
        return phi()
    if family == "tau":
        if tau_table is None:
            from .tau import tau_table as build
            tau_table = build(10000)
        return tau_descriptor(tau_table)
    if not entries:
        raise DocumentError("line 1: family table needs at least one table entry")
    return table_descriptor(name or "table", entries)
