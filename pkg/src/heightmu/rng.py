"""Deterministic random streams and random primes.

Every randomized routine takes an explicit seed and derives an independent
generator per trial/sample from ``(seed, *keys)``, so results do not depend
on evaluation order.
"""

import hashlib
import random

import gmpy2


def derive_rng(seed, *keys):
    tag = ":".join(str(k) for k in (seed,) + keys).encode()
    digest = hashlib.blake2b(tag, digest_size=16).digest()
    return random.Random(int.from_bytes(digest, "big"))


def random_prime(rng, bits=62):
    """Uniform-ish random prime with exactly ``bits`` bits."""
    lo = 1 << (bits - 1)
    while True:
        p = int(gmpy2.next_prime(lo + rng.getrandbits(bits - 1)))
        if p < (lo << 1):
            return p


def is_prime(p):
    return bool(gmpy2.is_prime(p, 40))
