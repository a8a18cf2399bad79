"""Sparse multivariate integer polynomials, Kronecker packing and text I/O."""
from dataclasses import dataclass


class ParseError(ValueError):
    def __init__(self, msg, line=None):
        super().__init__(f"line {line}: {msg}" if line is not None else msg)
        self.line = line


class InfeasibleError(ValueError):
    pass


def kronecker_code(exps, D, n=None):
    n = len(exps) if n is None else n
    if len(exps) != n:
        raise ValueError(f"expected {n} exponents, got {len(exps)}")
    E = 0
    for e in reversed(exps):
        if not 0 <= e < D:
            raise ValueError(f"exponent {e} outside [0, {D})")
        E = E * D + e
    return E


def d_adic_expand(E, D, n):
    if E < 0 or E >= D ** n:
        raise ValueError(f"code {E} outside [0, D^n)")
    digits = []
    for _ in range(n):
        E, r = divmod(E, D)
        digits.append(r)
    return tuple(digits)


@dataclass(frozen=True)
class SparsePoly:
    """Canonical sparse polynomial; build through :func:`canonicalize`.

    ``terms`` holds ``(coeff, exps)`` pairs with nonzero integer coefficients,
    exponent tuples in ``[0, D)^n``, sorted by Kronecker code.
    """
    n: int
    D: int
    terms: tuple = ()

    def __len__(self):
        return len(self.terms)

    @property
    def height(self):
        return max((abs(c) for c, _ in self.terms), default=0)

    def kronecker_terms(self):
        return [(c, kronecker_code(e, self.D, self.n)) for c, e in self.terms]

    def is_zero(self):
        return not self.terms

    def __str__(self):
        if not self.terms:
            return "0"
        names = ([chr(ord("x") + i) for i in range(self.n)] if self.n <= 3
                 else [f"x{i + 1}" for i in range(self.n)])
        parts = []
        for c, exps in self.terms:
            mono = "*".join(v if e == 1 else f"{v}^{e}"
                            for v, e in zip(names, exps) if e)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def canonicalize(terms, n, D):
    acc = {}
    for c, exps in terms:
        exps = tuple(int(e) for e in exps)
        if len(exps) != n:
            raise ValueError(f"expected {n} exponents, got {len(exps)}")
        acc[exps] = acc.get(exps, 0) + int(c)
    keyed = sorted((kronecker_code(e, D, n), c, e)
                   for e, c in acc.items() if c != 0)
    return SparsePoly(n, D, tuple((c, e) for _, c, e in keyed))


def random_instance(n, T, D, H, rng):
    """T distinct uniform exponent vectors, coefficients uniform in [-H, H] \\ {0}."""
    if H < 1:
        raise ValueError("height must be at least 1")
    space = D ** n
    if T > space:
        raise InfeasibleError(f"{T} terms requested but only {space} monomials exist")
    if T > space // 2:
        codes = rng.sample(range(space), T)
    else:
        codes, seen = [], set()
        while len(codes) < T:
            E = rng.randrange(space)
            if E not in seen:
                seen.add(E)
                codes.append(E)
    terms = []
    for E in codes:
        c = rng.randint(1, H) * rng.choice((-1, 1))
        terms.append((c, d_adic_expand(E, D, n)))
    return canonicalize(terms, n, D)


def _int(tok, lineno, what):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"bad {what} {tok!r}", lineno) from None


def _parse_lines(lines):
    n = D = None
    terms, seen = [], set()
    for lineno, raw in lines:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        key = tok[0]
        if key == "nvars":
            if n is not None or len(tok) != 2:
                raise ParseError("malformed or repeated nvars", lineno)
            n = _int(tok[1], lineno, "nvars")
            if n < 1:
                raise ParseError("nvars must be positive", lineno)
        elif key == "degree":
            if n is None or D is not None or len(tok) != 2:
                raise ParseError("degree must follow nvars exactly once", lineno)
            D = _int(tok[1], lineno, "degree")
            if D < 1:
                raise ParseError("degree must be positive", lineno)
        elif key == "term":
            if D is None:
                raise ParseError("term before header", lineno)
            if len(tok) != n + 2:
                raise ParseError(f"term needs 1 coefficient and {n} exponents", lineno)
            c = _int(tok[1], lineno, "coefficient")
            exps = tuple(_int(t, lineno, "exponent") for t in tok[2:])
            if any(not 0 <= e < D for e in exps):
                raise ParseError(f"exponent outside [0, {D})", lineno)
            if c == 0:
                raise ParseError("zero coefficient", lineno)
            if exps in seen:
                raise ParseError("duplicate exponent vector", lineno)
            seen.add(exps)
            terms.append((c, exps))
        else:
            raise ParseError(f"unknown directive {key!r}", lineno)
    if D is None:
        raise ParseError("missing nvars/degree header")
    return canonicalize(terms, n, D)


def parse(text):
    return _parse_lines(enumerate(text.splitlines(), 1))


def serialize(f):
    out = [f"nvars {f.n}", f"degree {f.D}"]
    out += ["term " + " ".join(map(str, (c,) + e)) for c, e in f.terms]
    return "\n".join(out) + "\n"


def parse_blocks(text):
    """Product file: SparsePoly blocks separated by ``---`` lines."""
    blocks, cur = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        if raw.strip() == "---":
            blocks.append(cur)
            cur = []
        else:
            cur.append((lineno, raw))
    blocks.append(cur)
    polys = [_parse_lines(b) for b in blocks
             if any(l.strip() and not l.strip().startswith("#") for _, l in b)]
    if not polys:
        raise ParseError("no polynomial blocks")
    if len({f.n for f in polys}) != 1:
        raise ParseError("factors disagree on nvars")
    return polys


def serialize_blocks(polys):
    return "---\n".join(serialize(f) for f in polys)


def load(path):
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def save(f, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize(f))
