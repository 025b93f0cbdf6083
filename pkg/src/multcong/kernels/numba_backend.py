"""JIT-compiled scan kernel.  Same contract as numpy_backend.scan_block."""

from __future__ import annotations

import numpy as np
from numba import njit

INF_SENTINEL = 1 << 40


@njit(cache=True)
def _modinv(a, m):
    g, x = m, 0
    b, y = a % m, 1
    while b:
        q = g // b
        g, b = b, g - q * b
        x, y = y, x - q * y
    return x % m


@njit(nogil=True, cache=True)
def scan_block(A, B, n0, cnt, p, primes, n_eff, contrib, skip,
               family, kparam, pcap_P, large_nu, skip_c, out, esc_idx, esc_rem):
    rem = np.empty(cnt, np.int64)
    for i in range(cnt):
        out[i] = 0
        rem[i] = A * (n0 + i) + B
    n_esc = 0
    for qi in range(n_eff):
        q = primes[qi]
        if A % q == 0:
            if B % q != 0:
                continue
            start, step = 0, 1
        else:
            x0 = ((q - B % q) * _modinv(A % q, q)) % q
            start = (x0 - n0 % q) % q
            step = q
        i = start
        while i < cnt:
            r = rem[i]
            e = 0
            while r % q == 0:
                r //= q
                e += 1
            rem[i] = r
            if e > 0 and not skip[qi]:
                out[i] += contrib[qi, e]
            i += step

    # the remaining cofactor is 1 or a single prime > sqrt(max value)
    for i in range(cnt):
        r = rem[i]
        if r <= 1:
            continue
        if skip_c > 1 and skip_c % r == 0:
            continue
        if family == 0:  # divisor power sums
            if kparam == 0:
                if p == 2:
                    out[i] += 1
            elif p == 2:
                if kparam % 2 == 1:
                    x = r + 1
                    v = 0
                    while x % 2 == 0:
                        x //= 2
                        v += 1
                    out[i] += v
                else:
                    out[i] += 1
            else:
                if r % p != 0:
                    x = r % pcap_P
                    y = 1
                    kk = kparam
                    while kk:
                        if kk & 1:
                            y = (y * x) % pcap_P
                        x = (x * x) % pcap_P
                        kk >>= 1
                    y = (y + 1) % pcap_P
                    if y == 0:
                        # valuation reaches the 64-bit cap; settle exactly outside
                        esc_idx[1 + n_esc] = i
                        esc_rem[n_esc] = r
                        n_esc += 1
                    else:
                        v = 0
                        while y % p == 0:
                            y //= p
                            v += 1
                        out[i] += v
        elif family == 1:  # totient
            x = r - 1
            v = 0
            while x % p == 0:
                x //= p
                v += 1
            out[i] += v
        else:  # table-backed
            out[i] += large_nu[r]
    esc_idx[0] = n_esc
