"""Integer factorization for radicand normalization.

Trial division by small primes, then Brent's variant of Pollard rho on the
cofactor.  Radicands met in practice are far below 2**64, so this is never
the bottleneck.
"""

from functools import lru_cache
from math import gcd, isqrt
import random

TRIAL_LIMIT = 10**6


def _sieve(limit):
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for p in range(2, isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = bytearray(len(range(p * p, limit + 1, p)))
    return [i for i, f in enumerate(flags) if f]


_PRIMES = None


def small_primes():
    global _PRIMES
    if _PRIMES is None:
        _PRIMES = _sieve(TRIAL_LIMIT)
    return _PRIMES


def is_probable_prime(n):
    """Deterministic Miller-Rabin for n < 3.3e24, probabilistic beyond."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def pollard_brent(n, seed=0):
    """Return a nontrivial factor of the composite odd n."""
    if n % 2 == 0:
        return 2
    rng = random.Random(seed)
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n):
    """Prime factorization of n >= 1 as a dict prime -> exponent."""
    if n < 1:
        raise ValueError(f"factorize expects a positive integer, got {n}")
    out = {}
    for p in small_primes():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n > 1:
        stack = [n]
        while stack:
            m = stack.pop()
            if m == 1:
                continue
            if is_probable_prime(m):
                out[m] = out.get(m, 0) + 1
                continue
            r = isqrt(m)
            if r * r == m:
                stack += [r, r]
                continue
            d = pollard_brent(m)
            stack += [d, m // d]
    return dict(sorted(out.items()))


@lru_cache(maxsize=65536)
def squarefree_part(n):
    """Split n = f**2 * s with s squarefree; returns (s, f)."""
    if n < 1:
        raise ValueError(f"squarefree_part expects n >= 1, got {n}")
    s = f = 1
    for p, e in factorize(n).items():
        f *= p ** (e // 2)
        if e % 2:
            s *= p
    return s, f
