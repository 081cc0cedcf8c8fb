import numpy as np


def prime_mask(limit: int) -> np.ndarray:
    """Boolean array over [0, limit], True at primes (Eratosthenes)."""
    mask = np.ones(max(limit + 1, 2), dtype=bool)
    mask[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return mask[: limit + 1]


def primes_upto(limit: int) -> np.ndarray:
    if limit < 2:
        return np.array([], dtype=np.int64)
    return np.flatnonzero(prime_mask(limit)).astype(np.int64)


def primes_between(lo: int, hi: int) -> np.ndarray:
    ps = primes_upto(hi)
    return ps[ps >= lo]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True
