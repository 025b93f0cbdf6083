"""Pure-numpy scan kernel: the fallback when the JIT backend is disabled.

Identical results to numba_backend.scan_block; vectorized over hit indices
per sieve prime instead of compiled inner loops.
"""

from __future__ import annotations

import numpy as np

INF_SENTINEL = 1 << 40


def _modinv(a: int, m: int) -> int:
    g, x = m, 0
    b, y = a % m, 1
    while b:
        q = g // b
        g, b = b, g - q * b
        x, y = y, x - q * y
    return x % m


def scan_block(A, B, n0, cnt, p, primes, n_eff, contrib, skip,
               family, kparam, pcap_P, large_nu, skip_c, out, esc_idx, esc_rem):
    out[:cnt] = 0
    rem = A * (np.arange(n0, n0 + cnt, dtype=np.int64)) + B
    plist = primes[:n_eff].tolist()
    for qi, q in enumerate(plist):
        if A % q == 0:
            if B % q != 0:
                continue
            idx = np.arange(0, cnt, dtype=np.int64)
        else:
            x0 = ((q - B % q) * _modinv(A % q, q)) % q
            start = (x0 - n0 % q) % q
            if start >= cnt:
                continue
            idx = np.arange(start, cnt, q, dtype=np.int64)
        sub = rem[idx]
        e = np.zeros(idx.size, dtype=np.int64)
        active = sub % q == 0
        while active.any():
            sub[active] //= q
            e[active] += 1
            active &= sub % q == 0
        rem[idx] = sub
        if not skip[qi]:
            hit = e > 0
            if hit.any():
                out[idx[hit]] += contrib[qi, e[hit]]  # indices are distinct

    large = np.where(rem > 1)[0]
    if skip_c > 1 and large.size:
        keep = np.array([skip_c % int(rem[i]) != 0 for i in large], dtype=bool)
        large = large[keep]
    n_esc = 0
    if large.size:
        r = rem[large]
        if family == 0:
            if kparam == 0:
                if p == 2:
                    out[large] += 1
            elif p == 2:
                if kparam % 2 == 1:
                    out[large] += _valuation_vec(r + 1, 2)
                else:
                    out[large] += 1
            else:
                keep = r % p != 0
                li, rr = large[keep], r[keep]
                y = (_powmod_vec(rr % pcap_P, kparam, pcap_P) + 1) % pcap_P
                bad = y == 0
                for i, rv in zip(li[bad].tolist(), rr[bad].tolist()):
                    esc_idx[1 + n_esc] = i
                    esc_rem[n_esc] = rv
                    n_esc += 1
                good = ~bad
                out[li[good]] += _valuation_vec(y[good], p)
        elif family == 1:
            out[large] += _valuation_vec(r - 1, p)
        else:
            out[large] += large_nu[r]
    esc_idx[0] = n_esc


def _powmod_vec(base: np.ndarray, exp: int, mod: int) -> np.ndarray:
    # mod < 2^31, so products of residues stay inside int64
    result = np.ones_like(base)
    b = base % mod
    e = exp
    while e:
        if e & 1:
            result = result * b % mod
        b = b * b % mod
        e >>= 1
    return result


def _valuation_vec(x: np.ndarray, p: int) -> np.ndarray:
    v = np.zeros_like(x)
    x = x.copy()
    active = x % p == 0
    while active.any():
        x[active] //= p
        v[active] += 1
        active &= x % p == 0
    return v
