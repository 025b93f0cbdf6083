from math import gcd, isqrt

import pytest

from multcong.arith import ArithError, prime_sieve
from multcong.functions import CoverageError
from multcong.tau import (
    TAU_HORIZON_LIMIT,
    load_table,
    save_table,
    table_self_checks,
    tau_prime_power,
    tau_table,
    verify_sd_congruences,
)

TABLE = tau_table(3000)


def test_leading_coefficients():
    assert TABLE.values[1:6] == (1, -24, 252, -1472, 4830)
    assert TABLE[1] == 1


def test_multiplicativity_small():
    assert TABLE[6] == TABLE[2] * TABLE[3] == -6048
    for m in range(2, 55):
        for n in range(2, 55):
            if gcd(m, n) == 1 and m * n <= TABLE.horizon:
                assert TABLE[m * n] == TABLE[m] * TABLE[n]


def test_prime_power_recurrence():
    assert tau_prime_power(TABLE, 2, 2) == TABLE[2] ** 2 - 2**11 == -1472
    assert tau_prime_power(TABLE, 7, 0) == 1
    assert tau_prime_power(TABLE, 3, 2) == 252**2 - 3**11 == -113643
    # recurrence agrees with the table wherever both exist
    for q in prime_sieve(isqrt(TABLE.horizon)):
        e = 1
        while q**e <= TABLE.horizon:
            assert tau_prime_power(TABLE, q, e) == TABLE[q**e]
            e += 1


def test_prime_power_coverage_error():
    with pytest.raises(CoverageError):
        tau_prime_power(TABLE, 3001 if TABLE.horizon < 3001 else 30011, 1)
    with pytest.raises(ArithError):
        tau_prime_power(TABLE, 4, 1)


def test_parity_law():
    for n in range(1, TABLE.horizon + 1):
        odd_square = n % 2 == 1 and isqrt(n) ** 2 == n
        assert (TABLE[n] % 2 == 1) == odd_square


def test_self_checks_pass():
    assert table_self_checks(TABLE, 2000)["ok"]


def test_resource_guard():
    with pytest.raises(ArithError):
        tau_table(TAU_HORIZON_LIMIT + 1)


def test_cache_roundtrip(tmp_path):
    path = str(tmp_path / "tau.txt")
    save_table(TABLE, path)
    loaded = load_table(path)
    assert loaded.values == TABLE.values

    # corrupt a leading anchor value: load must refuse
    lines = open(path).read().splitlines()
    lines[2] = "2 -23"
    bad = str(tmp_path / "bad.txt")
    with open(bad, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    with pytest.raises(ArithError):
        load_table(bad)


def test_sd_congruences_small():
    reports = verify_sd_congruences(TABLE, 300)
    assert len(reports) == 12  # nine families + three vanishing classes
    for r in reports:
        assert r.failed == 0, (r.label, r.failures)
        assert r.passed > 0
    by_label = {r.label: r for r in reports}
    # arguments divisible by 3 are outside both power-of-3 classes
    assert by_label["mod 3^6, m=1 (3)"].inapplicable > 0
    assert by_label["mod 5^3, m!=0 (5)"].inapplicable > 0
