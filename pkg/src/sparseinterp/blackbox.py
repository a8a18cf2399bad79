"""Black-box evaluators answering f(a_0 z^{D_0}, ...) mod (z^p - 1) over Z/qZ."""
from dataclasses import dataclass

from .cyclic import CyclicPoly, cyclic_mul, sparse_to_cyclic
from .sparse import ParseError, SparsePoly, canonicalize


class CircuitError(ValueError):
    pass


class OversizeError(ValueError):
    pass


@dataclass(frozen=True)
class SubstitutionSpec:
    q: int
    p: int
    alpha_powers: tuple
    d_powers: tuple

    @classmethod
    def build(cls, q, p, alpha, n, D):
        """alpha_j = alpha^(D^j) mod q and D_j = D^j mod p."""
        q = int(q)
        alpha_powers = tuple(pow(alpha, D ** j, q) for j in range(n))
        d_powers = tuple(pow(D, j, p) for j in range(n))
        return cls(q, p, alpha_powers, d_powers)

    @property
    def n(self):
        return len(self.alpha_powers)


def _check_spec(bb, spec):
    if spec.n != bb.n:
        raise ValueError(f"substitution has {spec.n} variables, box has {bb.n}")


def _image_terms(f, spec):
    q, p = spec.q, spec.p
    out = []
    for c, exps in f.terms:
        coeff = c % q
        idx = 0
        for e, a, d in zip(exps, spec.alpha_powers, spec.d_powers):
            if e:
                coeff = coeff * pow(a, e, q) % q
                idx += e * d
        out.append((coeff, idx % p))
    return out


def _map_sparse(f, spec):
    return sparse_to_cyclic(_image_terms(f, spec), spec.p, spec.q)


@dataclass(frozen=True)
class Explicit:
    poly: SparsePoly

    @property
    def n(self):
        return self.poly.n

    @property
    def D(self):
        return self.poly.D

    def evaluate_mod(self, spec):
        _check_spec(self, spec)
        return _map_sparse(self.poly, spec)


@dataclass(frozen=True)
class Product:
    """Product of sparse factors; ``D`` bounds the expanded product."""
    factors: tuple
    D: int

    def __post_init__(self):
        if not self.factors:
            raise ValueError("product needs at least one factor")
        if len({f.n for f in self.factors}) != 1:
            raise ValueError("factors disagree on the number of variables")
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def n(self):
        return self.factors[0].n

    def evaluate_mod(self, spec):
        _check_spec(self, spec)
        acc = _map_sparse(self.factors[0], spec)
        for f in self.factors[1:]:
            acc = cyclic_mul(acc, _map_sparse(f, spec))
        return acc


_ARITY = {"in": 1, "const": 1, "add": 2, "sub": 2, "mul": 2}


@dataclass(frozen=True)
class Circuit:
    """Straight-line program; instructions are ``(op, *args)`` tuples.

    ``("in", j)`` loads variable j, ``("const", c)`` an integer, and
    ``("add"|"sub"|"mul", i, k)`` combine earlier results.  The last
    instruction is the output.
    """
    instructions: tuple
    n: int
    D: int

    def __post_init__(self):
        ins = tuple(tuple(i) for i in self.instructions)
        object.__setattr__(self, "instructions", ins)
        if not ins:
            raise CircuitError("empty program")
        for pos, (op, *args) in enumerate(ins):
            if op not in _ARITY or len(args) != _ARITY[op]:
                raise CircuitError(f"instruction {pos}: malformed {op!r}")
            if op == "in" and not 0 <= args[0] < self.n:
                raise CircuitError(f"instruction {pos}: variable {args[0]} out of range")
            if op in ("add", "sub", "mul") and not all(0 <= a < pos for a in args):
                raise CircuitError(f"instruction {pos}: reference must precede it")

    def _run(self, load, const, add, sub, mul):
        vals = []
        for op, *args in self.instructions:
            if op == "in":
                vals.append(load(args[0]))
            elif op == "const":
                vals.append(const(args[0]))
            else:
                a, b = vals[args[0]], vals[args[1]]
                vals.append({"add": add, "sub": sub, "mul": mul}[op](a, b))
        return vals[-1]

    def evaluate_mod(self, spec):
        _check_spec(self, spec)
        p, q = spec.p, spec.q
        return self._run(
            lambda j: CyclicPoly.monomial(spec.alpha_powers[j], spec.d_powers[j], p, q),
            lambda c: CyclicPoly.constant(c, p, q),
            lambda a, b: a + b,
            lambda a, b: a - b,
            cyclic_mul,
        )


def evaluate_mod(bb, spec):
    return bb.evaluate_mod(spec)


# --- ground-truth expansion (test oracle) -----------------------------------

MAX_ORACLE_TERMS = 1 << 20


def _dict_mul(a, b, limit):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
        if len(out) > limit:
            raise OversizeError(f"expansion exceeds {limit} terms")
    return {e: c for e, c in out.items() if c}


def _dict_add(a, b, sign=1):
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0) + sign * c
    return {e: c for e, c in out.items() if c}


def _finish(acc, n, D):
    return canonicalize([(c, e) for e, c in acc.items()], n, D)


def expand_oracle(bb, limit=MAX_ORACLE_TERMS):
    """Exact big-integer expansion of the box, canonical form."""
    if isinstance(bb, Explicit):
        return bb.poly
    n = bb.n
    if isinstance(bb, Product):
        acc = {e: c for c, e in bb.factors[0].terms}
        for f in bb.factors[1:]:
            acc = _dict_mul(acc, {e: c for c, e in f.terms}, limit)
        return _finish(acc, n, bb.D)
    if isinstance(bb, Circuit):
        zero = (0,) * n

        def load(j):
            return {tuple(int(i == j) for i in range(n)): 1}

        acc = bb._run(
            load,
            lambda c: {zero: c} if c else {},
            lambda a, b: _dict_add(a, b),
            lambda a, b: _dict_add(a, b, -1),
            lambda a, b: _dict_mul(a, b, limit),
        )
        return _finish(acc, n, bb.D)
    raise TypeError(f"unknown black box {type(bb).__name__}")


def parse_circuit(text, n, D):
    ins = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        op, *args = line.split()
        if op not in _ARITY or len(args) != _ARITY[op]:
            raise ParseError(f"malformed instruction {line!r}", lineno)
        try:
            ins.append((op, *map(int, args)))
        except ValueError:
            raise ParseError(f"non-integer operand in {line!r}", lineno) from None
    try:
        return Circuit(tuple(ins), n, D)
    except CircuitError as exc:
        raise ParseError(str(exc)) from None


def serialize_circuit(circuit):
    return "".join(" ".join(map(str, i)) + "\n" for i in circuit.instructions)
