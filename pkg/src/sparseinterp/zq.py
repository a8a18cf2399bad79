"""Scalar arithmetic in Z/qZ for a word-size prime q."""
from dataclasses import dataclass

WORD_BOUND = 1 << 62


@dataclass(frozen=True)
class Modulus:
    q: int

    def __post_init__(self):
        from .primes import is_prime

        if not 2 < self.q < WORD_BOUND:
            raise ValueError(f"modulus {self.q} outside (2, 2^62)")
        if not is_prime(self.q):
            raise ValueError(f"modulus {self.q} is not prime")

    def __int__(self):
        return self.q


def _q(m):
    return m.q if isinstance(m, Modulus) else int(m)


def mod_mul(a, b, m):
    return a * b % _q(m)


def mod_pow(base, exp, m):
    if exp < 0:
        raise ValueError("negative exponent")
    # builtin pow is square-and-multiply on arbitrary-precision exponents
    return pow(base, exp, _q(m))


def mod_inv(a, m):
    q = _q(m)
    if a % q == 0:
        raise ZeroDivisionError(f"{a} is not invertible mod {q}")
    return pow(a, -1, q)


def signed_lift(a, m):
    """Representative of a in [-q/2, q/2]."""
    q = _q(m)
    a %= q
    return a - q if 2 * a > q else a
