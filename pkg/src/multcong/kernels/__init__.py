"""Block evaluation of n -> nu_p(f(A*n + B)) over index ranges.

The hot path sieves a whole block at once: for each prime q up to
sqrt(max value) the divisible indices form arithmetic progressions, so
exponents are extracted by stepping, and per-prime-power valuations come
from a precomputed exact table.  The single large prime cofactor left per
element is handled by family-specific rules; the few elements those rules
cannot settle in 64-bit arithmetic are redone exactly with big integers,
so results are exact everywhere.

Backend selection: MULTCONG_BACKEND=numba|numpy (default numba when
importable).  Both backends return identical arrays.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from math import gcd, isqrt

import numpy as np

from ..arith import ArithError, factorize, nu_int, prime_sieve
from ..functions import CoverageError, FnDescriptor

INF_SENTINEL = 1 << 40  # accumulated finite valuations stay far below this

_FAMILY_CODES = {"sigma": 0, "phi": 1, "table": 2}


def backend_name() -> str:
    env = os.environ.get("MULTCONG_BACKEND", "").strip().lower()
    if env in ("numba", "numpy"):
        return env
    if env:
        raise ArithError(f"MULTCONG_BACKEND must be 'numba' or 'numpy', got {env!r}")
    try:
        import numba  # noqa: F401
        return "numba"
    except ImportError:
        return "numpy"


def _get_backend(name: str | None = None):
    name = name or backend_name()
    if name == "numba":
        from . import numba_backend as mod
    elif name == "numpy":
        from . import numpy_backend as mod
    else:
        raise ArithError(f"unknown backend {name!r}")
    return mod


@dataclass
class ScanPlan:
    """Prepared arrays for scanning one (fn, p, A, B) progression."""

    fn: FnDescriptor
    p: int
    A: int
    B: int
    skip_c: int
    mmax: int
    family_code: int
    kparam: int
    primes: np.ndarray        # int64, sieve primes
    n_effective: int          # primes[:n_effective] are <= isqrt(mmax)
    contrib: np.ndarray       # int64 [n_primes, emax+1], INF_SENTINEL marks f=0
    skip: np.ndarray          # bool, True for primes dividing skip_c
    pcap_T: int
    pcap_P: int
    large_nu: np.ndarray      # int64 over values (family 2 only), else size 0


_contrib_cache: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}


def _contrib_table(fn: FnDescriptor, p: int, prime_limit: int, emax: int):
    """Exact nu_p(f(q^e)) for sieve primes q <= prime_limit, 1 <= e <= emax."""
    key = (fn.family, fn.k_param, fn.name, p, prime_limit, emax)
    hit = _contrib_cache.get(key)
    if hit is not None:
        return hit
    primes = np.array(prime_sieve(prime_limit), dtype=np.int64)
    table = np.zeros((len(primes), emax + 1), dtype=np.int64)
    for qi, q in enumerate(primes.tolist()):
        for e in range(1, emax + 1):
            val = fn.eval_prime_power(q, e)
            table[qi, e] = INF_SENTINEL if val == 0 else nu_int(p, val)
    _contrib_cache[key] = (primes, table)
    return primes, table


def make_plan(fn: FnDescriptor, p: int, A: int, B: int, horizon: int,
              skip_c: int = 1) -> ScanPlan | None:
    """Build a kernel plan, or None when the function has no fast path."""
    code = _FAMILY_CODES.get(fn.family)
    if fn.family == "tau":
        code = 2
    if code is None:
        return None
    if fn.family == "table" and fn.name != "tau":
        return None  # arbitrary tables go through the exact path
    mmax = A * (horizon - 1) + B
    if mmax >= 1 << 52:
        raise ArithError(f"scan range too large for 64-bit kernels (max value {mmax})")
    if fn.family == "tau" and fn.table_horizon is not None and mmax > fn.table_horizon:
        bad_n = (fn.table_horizon - B) // A + 1
        raise CoverageError(
            f"tau table covers values <= {fn.table_horizon}; n={max(bad_n, 0)} "
            f"needs f({A}*{bad_n}+{B})"
        )
    # bucket the table size so nearby scan ranges share one cached table
    sieve_limit = 4
    while sieve_limit <= isqrt(mmax):
        sieve_limit *= 2
    emax = max(mmax.bit_length(), 54)
    primes, contrib = _contrib_table(fn, p, sieve_limit, emax)
    n_eff = int(np.searchsorted(primes, isqrt(mmax) + 1))
    skip = np.zeros(len(primes), dtype=np.bool_)
    if skip_c > 1:
        for qi, q in enumerate(primes.tolist()):
            if skip_c % q == 0:
                skip[qi] = True
    pcap_T = 1
    while p ** (pcap_T + 1) < (1 << 31):
        pcap_T += 1
    if code == 2:
        large = np.zeros(mmax + 1, dtype=np.int64)
        lo = isqrt(mmax)
        for r in prime_sieve(mmax):
            if r > lo:
                val = fn.eval_prime_power(r, 1)
                large[r] = INF_SENTINEL if val == 0 else nu_int(p, val)
    else:
        large = np.zeros(0, dtype=np.int64)
    kparam = fn.k_param if fn.k_param is not None else 0
    return ScanPlan(fn=fn, p=p, A=A, B=B, skip_c=skip_c, mmax=mmax,
                    family_code=code, kparam=kparam, primes=primes,
                    n_effective=n_eff, contrib=contrib, skip=skip,
                    pcap_T=pcap_T, pcap_P=p**pcap_T, large_nu=large)


def block_valuations(plan: ScanPlan, n0: int, cnt: int,
                     backend: str | None = None) -> np.ndarray:
    """Exact valuations for indices n0 .. n0+cnt-1 (INF_SENTINEL for f=0)."""
    mod = _get_backend(backend)
    out = np.empty(cnt, dtype=np.int64)
    esc_idx = np.empty(cnt + 1, dtype=np.int64)
    esc_rem = np.empty(cnt, dtype=np.int64)
    mod.scan_block(
        plan.A, plan.B, n0, cnt, plan.p,
        plan.primes, plan.n_effective, plan.contrib, plan.skip,
        plan.family_code, plan.kparam, plan.pcap_P,
        plan.large_nu, plan.skip_c, out, esc_idx, esc_rem,
    )
    n_esc = int(esc_idx[0])
    for j in range(n_esc):
        i = int(esc_idx[1 + j])
        r = int(esc_rem[j])
        val = plan.fn.eval_prime_power(r, 1)
        out[i] += INF_SENTINEL if val == 0 else nu_int(plan.p, val)
    return out


def exact_valuations(fn: FnDescriptor, p: int, A: int, B: int, n0: int, cnt: int,
                     skip_c: int = 1) -> np.ndarray:
    """Reference path: per-element big-integer evaluation via factorization."""
    out = np.empty(cnt, dtype=np.int64)
    for i in range(cnt):
        m = A * (n0 + i) + B
        total = 0
        for q, e in factorize(m).factors:
            if skip_c % q == 0:
                continue
            try:
                val = fn.eval_prime_power(q, e)
            except CoverageError as exc:
                raise CoverageError(f"{exc} (needed at n={n0 + i})") from None
            total += INF_SENTINEL if val == 0 else nu_int(p, val)
        out[i] = total
    return out


@dataclass(frozen=True)
class ScanOutcome:
    value: int | None        # None means every scanned value was infinite
    witness: int | None
    scanned: int             # indices [0, scanned) were evaluated
    infinite_hits: int       # elements where f vanished


def run_scan(fn: FnDescriptor, p: int, A: int, B: int, horizon: int, *,
             stop_below: int = 1, skip_c: int = 1, jobs: int = 1,
             backend: str | None = None) -> ScanOutcome:
    """Minimum valuation over n < horizon with deterministic early exit.

    Scanning stops once the running minimum drops below `stop_below` (0 can
    never be undercut, so the default exits on the first zero).  The result
    is identical for any `jobs`; workers only precompute blocks.
    """
    plan = make_plan(fn, p, A, B, horizon, skip_c=skip_c)

    def block(n0: int, cnt: int) -> np.ndarray:
        if plan is None:
            return exact_valuations(fn, p, A, B, n0, cnt, skip_c=skip_c)
        return block_valuations(plan, n0, cnt, backend=backend)

    bounds: list[tuple[int, int]] = []
    n0, size = 0, 256
    while n0 < horizon:
        cnt = min(size, horizon - n0)
        bounds.append((n0, cnt))
        n0 += cnt
        size = min(size * 4, 32768)

    best: int | None = None
    best_n: int | None = None
    scanned = 0
    inf_hits = 0

    def consume(start: int, vals: np.ndarray) -> bool:
        nonlocal best, best_n, scanned, inf_hits
        inf_hits += int(np.count_nonzero(vals >= INF_SENTINEL))
        finite = np.where(vals < INF_SENTINEL)[0]
        if finite.size:
            sub = vals[finite]
            i = int(finite[int(np.argmin(sub))])
            v = int(vals[i])
            if best is None or v < best:
                best, best_n = v, start + i
        scanned = start + len(vals)
        return best is not None and best < stop_below

    if jobs <= 1 or len(bounds) <= 1:
        for start, cnt in bounds:
            if consume(start, block(start, cnt)):
                break
    else:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            pending = [pool.submit(block, s, c) for s, c in bounds]
            for (start, _), fut in zip(bounds, pending):
                if consume(start, fut.result()):
                    for other in pending:
                        other.cancel()
                    break
    return ScanOutcome(value=best, witness=best_n, scanned=scanned,
                       infinite_hits=inf_hits)
