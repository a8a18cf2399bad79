"""Dense arithmetic in (Z/qZ)[z]/(z^p - 1)."""
import numpy as np

try:
    import gmpy2
except ImportError:  # pragma: no cover
    gmpy2 = None


class DimensionError(ValueError):
    pass


class CyclicPoly:
    """Element of (Z/qZ)[z]/(z^p - 1); ``coeffs[j]`` is the coefficient of z^j.

    Coefficients live in a read-only ``uint64`` array, so q < 2^62 keeps every
    sum of two residues inside the word.
    """

    __slots__ = ("p", "q", "coeffs")

    def __init__(self, p, q, coeffs):
        coeffs = np.asarray(coeffs, dtype=np.uint64)
        if p < 1 or coeffs.shape != (p,):
            raise DimensionError(f"expected {p} coefficients, got {coeffs.shape}")
        coeffs.flags.writeable = False
        self.p = p
        self.q = int(q)
        self.coeffs = coeffs

    @classmethod
    def zero(cls, p, q):
        return cls(p, q, np.zeros(p, dtype=np.uint64))

    @classmethod
    def constant(cls, c, p, q):
        a = np.zeros(p, dtype=np.uint64)
        a[0] = int(c) % int(q)
        return cls(p, q, a)

    @classmethod
    def monomial(cls, c, e, p, q):
        a = np.zeros(p, dtype=np.uint64)
        a[e % p] = int(c) % int(q)
        return cls(p, q, a)

    def __eq__(self, other):
        if not isinstance(other, CyclicPoly):
            return NotImplemented
        return (self.p == other.p and self.q == other.q
                and np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.p, self.q, self.coeffs.tobytes()))

    def __repr__(self):
        terms = [f"{c}*z^{j}" for c, j in reversed(nonzero_terms(self))]
        return f"CyclicPoly(p={self.p}, q={self.q}, {' + '.join(terms) or '0'})"

    def __add__(self, other):
        return cyclic_add(self, other)

    def __sub__(self, other):
        return cyclic_sub(self, other)

    def __mul__(self, other):
        return cyclic_mul(self, other)

    def __neg__(self):
        return cyclic_neg(self)

    def is_zero(self):
        return not self.coeffs.any()


def _check(a, b):
    if a.p != b.p or a.q != b.q:
        raise DimensionError(
            f"ring mismatch: (p={a.p}, q={a.q}) vs (p={b.p}, q={b.q})")


def cyclic_add(a, b):
    _check(a, b)
    q = np.uint64(a.q)
    return CyclicPoly(a.p, a.q, (a.coeffs + b.coeffs) % q)


def cyclic_neg(a):
    q = np.uint64(a.q)
    return CyclicPoly(a.p, a.q, (q - a.coeffs) % q)


def cyclic_sub(a, b):
    _check(a, b)
    q = np.uint64(a.q)
    return CyclicPoly(a.p, a.q, (a.coeffs + (q - b.coeffs)) % q)


def _slot_bytes(p, q):
    # a folded slot accumulates at most p products, each < q^2
    bits = 2 * (q - 1).bit_length() + p.bit_length() + 1
    return (bits + 7) // 8


def _pack(coeffs, width):
    buf = np.zeros((coeffs.shape[0], width), dtype=np.uint8)
    raw = coeffs.astype("<u8").view(np.uint8).reshape(-1, 8)
    n = min(8, width)
    buf[:, :n] = raw[:, :n]
    return int.from_bytes(buf.tobytes(), "little")


def cyclic_mul(a, b):
    """Exact cyclic convolution by Kronecker packing into one big integer.

    Each coefficient array becomes an integer in radix 2^(8w), the integers
    are multiplied (GMP when available), and the high half is folded onto the
    low half since z^p = 1.  The slot width w leaves room for the p-term
    unreduced sums, so no carries cross slots.
    """
    _check(a, b)
    p, q = a.p, a.q
    if p == 1:
        return CyclicPoly(1, q, [int(a.coeffs[0]) * int(b.coeffs[0]) % q])
    w = _slot_bytes(p, q)
    x, y = _pack(a.coeffs, w), _pack(b.coeffs, w)
    if gmpy2 is not None:
        prod = int(gmpy2.mpz(x) * gmpy2.mpz(y))
    else:
        prod = x * y
    shift = 8 * w * p
    folded = (prod & ((1 << shift) - 1)) + (prod >> shift)
    raw = folded.to_bytes(w * p, "little")
    out = [int.from_bytes(raw[i:i + w], "little") % q
           for i in range(0, w * p, w)]
    return CyclicPoly(p, q, out)


def sparse_to_cyclic(terms, p, q):
    """Reduce sum(c * z^E) modulo z^p - 1; terms sharing E mod p add up."""
    q = int(q)
    acc = {}
    for c, e in terms:
        j = e % p
        acc[j] = (acc.get(j, 0) + c) % q
    a = np.zeros(p, dtype=np.uint64)
    for j, c in acc.items():
        a[j] = c
    return CyclicPoly(p, q, a)


def nonzero_terms(a):
    idx = np.flatnonzero(a.coeffs)
    return [(int(a.coeffs[j]), int(j)) for j in idx]
