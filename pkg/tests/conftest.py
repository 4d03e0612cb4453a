import numpy as np
import pytest

# Hardware-anchored defaults used across the suite (angular frequencies, rad/us).
OMEGA = 2 * np.pi * 1.21
DETUNING = 2 * np.pi * 0.22
V_NN = 2 * np.pi * 7.3
SPACING = 7.0


def brute_force_configs(n_sites: int, periodic: bool) -> list[int]:
    """Independent oracle: scan all 2^N words and keep the blockade-allowed ones."""
    out = []
    for c in range(1 << n_sites):
        ok = all(not (c >> i & 1 and c >> (i + 1) & 1) for i in range(n_sites - 1))
        if periodic and n_sites > 1:
            ok = ok and not (c & 1 and c >> (n_sites - 1) & 1)
        if periodic and n_sites == 1:
            ok = ok and c == 0
        if ok:
            out.append(c)
    return out


def fibonacci(n: int) -> int:
    """Iterative recurrence with Fib(1) = Fib(2) = 1."""
    a, b = 1, 1
    for _ in range(n - 1):
        a, b = b, a + b
    return a


def lucas(n: int) -> int:
    a, b = 2, 1  # L(0), L(1)
    for _ in range(n):
        a, b = b, a + b
    return a


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20250810)
