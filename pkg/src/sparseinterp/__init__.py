"""Parallel small-primes interpolation of supersparse integer polynomials."""
from .blackbox import Circuit, Explicit, Product, SubstitutionSpec, evaluate_mod, expand_oracle
from .engine import InterpParams, RunStats, derive_run, select_params, sparse_interp, verify_candidate
from .sparse import SparsePoly, canonicalize, parse, random_instance, serialize

__all__ = [
    "Circuit", "Explicit", "InterpParams", "Product", "RunStats", "SparsePoly",
    "SubstitutionSpec", "canonicalize", "derive_run", "evaluate_mod",
    "expand_oracle", "parse", "random_instance", "select_params", "serialize",
    "sparse_interp", "verify_candidate",
]
