"""From term images (coefficient, exponent residue, prime) back to terms."""
from collections import Counter
from dataclasses import dataclass, field
from itertools import groupby
from math import gcd
from typing import NamedTuple

from .sparse import d_adic_expand
from .zq import signed_lift


class TermImage(NamedTuple):
    coeff: int
    expo: int
    prime: int


@dataclass
class CoeffGroup:
    coeff: int
    pairs: list = field(default_factory=list)  # (expo, prime)
    valid: bool = True

    @property
    def u(self):
        return len(self.pairs)


def group_images(images):
    """Group images by coefficient; a prime seen twice with different residues
    invalidates the group."""
    groups = []
    ordered = sorted(images, key=lambda t: (t.coeff, t.prime, t.expo))
    for c, run in groupby(ordered, key=lambda t: t.coeff):
        g = CoeffGroup(c)
        last = None
        for t in run:
            if last is not None and t.prime == last.prime:
                if t.expo != last.expo:
                    g.valid = False
                continue
            g.pairs.append((t.expo, t.prime))
            last = t
        groups.append(g)
    return groups


def crt_combine(pairs):
    """Least non-negative E with E = r_i mod m_i for every (r_i, m_i)."""
    E, M = 0, 1
    for r, m in pairs:
        if gcd(M, m) != 1:
            raise ValueError(f"modulus {m} not coprime to {M}")
        # E + M*t = r (mod m)
        t = (r - E) * pow(M, -1, m) % m
        E += M * t
        M *= m
    return E


def recover_terms(groups, mu, D, n, q, alpha, counts=None):
    """Accept groups seen in at least ceil(mu/2) primes and rebuild their terms.

    Pairs are taken by descending prime until the product reaches D^n; the
    remaining pairs must agree with the CRT result or the group is dropped.
    ``counts`` (a Counter) collects the reason for every decision.
    """
    counts = Counter() if counts is None else counts
    bound = D ** n
    threshold = -(-mu // 2)
    alpha_inv = pow(alpha, -1, q)
    out = []
    for g in groups:
        if not g.valid:
            counts["invalid"] += 1
            continue
        if g.u < threshold:
            counts["below_threshold"] += 1
            continue
        pairs = sorted(g.pairs, key=lambda rp: rp[1], reverse=True)
        prod, cut = 1, 0
        while cut < len(pairs) and prod < bound:
            prod *= pairs[cut][1]
            cut += 1
        if prod < bound:
            counts["underdetermined"] += 1
            continue
        E = crt_combine(pairs[:cut])
        if E >= bound:
            counts["out_of_range"] += 1
            continue
        if any(E % p != r for r, p in pairs[cut:]):
            counts["inconsistent"] += 1
            continue
        c = signed_lift(g.coeff * pow(alpha_inv, E, q), q)
        out.append((c, d_adic_expand(E, D, n)))
        counts["accepted"] += 1
    return out


def collision_census(planted, primes):
    """Per prime, how many planted terms share their exponent residue."""
    codes = [E for _, E in planted.kronecker_terms()]
    census = {}
    for p in primes:
        hits = Counter(E % p for E in codes)
        census[p] = sum(v for v in hits.values() if v > 1)
    return census
