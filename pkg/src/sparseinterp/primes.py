"""Primality testing and seeded prime sampling."""
import random

# Miller-Rabin with these witnesses is exact below 3.3e24
_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_SMALL = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)
_EXTRA_ROUNDS = 40


class NoPrimeError(ValueError):
    pass


class InsufficientPrimesError(ValueError):
    def __init__(self, lo, hi, wanted, available):
        super().__init__(
            f"only {available} primes in [{lo}, {hi}], {wanted} requested")
        self.lo, self.hi = lo, hi
        self.wanted = wanted
        self.available = available


def _strong_probable_prime(n, a, d, s):
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(x):
    if x < 2:
        return False
    for p in _SMALL:
        if x % p == 0:
            return x == p
    d, s = x - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if not all(_strong_probable_prime(x, a, d, s) for a in _WITNESSES):
        return False
    if x < 3317044064679887385961981:
        return True
    # beyond the deterministic range: 40 extra random bases, error < 4^-40
    rng = random.Random(x)
    return all(_strong_probable_prime(x, rng.randrange(2, x - 1), d, s)
               for _ in range(_EXTRA_ROUNDS))


def primes_in(lo, hi):
    return [x for x in range(max(lo, 2), hi + 1) if is_prime(x)]


class PrimeSampler:
    """Seeded source of every random draw made by one interpolation run."""

    def __init__(self, seed=0):
        self.seed = seed
        self.rng = random.Random(seed)

    def randint(self, lo, hi):
        return self.rng.randint(lo, hi)

    def shuffle(self, xs):
        self.rng.shuffle(xs)


# Below this width the interval is enumerated rather than rejection-sampled.
_ENUMERATE_WIDTH = 1 << 12


def random_prime(lo, hi, sampler):
    if lo > hi:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    if hi - lo < _ENUMERATE_WIDTH:
        cands = primes_in(lo, hi)
        if not cands:
            raise NoPrimeError(f"no prime in [{lo}, {hi}]")
        return cands[sampler.randint(0, len(cands) - 1)]
    # wide intervals: prime density ~ 1/ln(hi), so rejection terminates fast;
    # a primeless wide interval would need a gap > 4096, impossible below 2^62
    while True:
        x = sampler.randint(lo, hi)
        if is_prime(x):
            return x


def distinct_primes(lo, hi, count, sampler):
    if count < 1:
        raise ValueError("count must be positive")
    if lo > hi:
        raise InsufficientPrimesError(lo, hi, count, 0)
    width = hi - lo + 1
    if width <= max(_ENUMERATE_WIDTH, 64 * count):
        pool = primes_in(lo, hi)
        if len(pool) < count:
            raise InsufficientPrimesError(lo, hi, count, len(pool))
        sampler.shuffle(pool)
        return pool[:count]
    chosen, seen = [], set()
    # rejection sampling without replacement; bail out to enumeration if the
    # interval turns out to be nearly exhausted
    attempts = 0
    while len(chosen) < count:
        x = sampler.randint(lo, hi)
        attempts += 1
        if x not in seen and is_prime(x):
            seen.add(x)
            chosen.append(x)
        if attempts > 200 * count * max(1, hi.bit_length()):
            pool = [p for p in primes_in(lo, hi) if p not in seen]
            if len(pool) + len(chosen) < count:
                raise InsufficientPrimesError(
                    lo, hi, count, len(pool) + len(chosen))
            sampler.shuffle(pool)
            chosen.extend(pool[:count - len(chosen)])
    return chosen
