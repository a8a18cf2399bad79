"""End-to-end small-primes sparse interpolation with a process worker pool."""
import logging
import math
import multiprocessing
import time
from collections import Counter
from dataclasses import asdict, dataclass, field

from .blackbox import Explicit, SubstitutionSpec
from .cyclic import nonzero_terms
from .primes import InsufficientPrimesError, PrimeSampler, distinct_primes, random_prime
from .recovery import TermImage, group_images, recover_terms
from .sparse import canonicalize
from .zq import WORD_BOUND

log = logging.getLogger(__name__)

HEURISTIC_Q_FLOOR = 1 << 20


class UnsupportedHeightError(ValueError):
    pass


def lg(x):
    return math.log2(x)


def compute_mu(ell, n, D, lam):
    """ceil(ell*n*lg D / lg lam), decided with exact integer powers."""
    if D <= 1:
        return 1
    target = D ** (ell * n)
    mu = max(1, math.ceil(ell * n * lg(D) / lg(lam)))
    while mu > 1 and lam ** (mu - 1) >= target:
        mu -= 1
    while lam ** mu < target:
        mu += 1
    return mu


def heuristic_k(T):
    if T >= 1000:
        return 38
    if T >= 100:
        return 50
    return max(50, -(-10000 // T))


def select_params(mode, n, T, D, H):
    """Return (k, ell, Q) for ``mode`` in {"provable", "heuristic"}."""
    if min(n, T, D, H) < 1:
        raise ValueError("n, T, D, H must all be positive")
    ell = 2
    if mode == "provable":
        k = max(21, math.ceil(20 * n * math.log(D)))
        # (ell n T lg D)^2 D / 4, rounded up
        Q = max(2 * H, math.ceil((ell * n * T * lg(D)) ** 2 * D / 4)) if D > 1 else 2 * H
    elif mode == "heuristic":
        k = heuristic_k(T)
        mu = compute_mu(ell, n, D, max(2, k * T))
        # a collision-free coefficient pool needs q well above (mu T)^2
        Q = max(2 * H, HEURISTIC_Q_FLOOR, (mu * T) ** 2)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if 2 * Q >= WORD_BOUND:
        raise UnsupportedHeightError(
            f"Q = {Q} needs a modulus beyond 2^62 (height {H} too large)")
    return k, ell, Q


@dataclass
class InterpParams:
    n: int
    T: int
    D: int
    H: int
    mode: str = "heuristic"
    k: int = None
    ell: int = None
    Q: int = None
    seed: int = 0
    workers: int = 1
    retries: int = 2
    force_q: int = None
    force_alpha: int = None
    force_primes: tuple = None

    def resolved(self):
        """(k, ell, Q) with explicit values taking precedence over defaults."""
        k, ell, Q = select_params(self.mode, self.n, max(self.T, 1), self.D, self.H)
        k = self.k or k
        ell = self.ell or ell
        Q = self.Q or Q
        if 2 * Q >= WORD_BOUND:
            raise UnsupportedHeightError(f"Q = {Q} needs a modulus beyond 2^62")
        return k, ell, Q


@dataclass
class RunPlan:
    lam: int
    mu: int
    q: int
    alpha: int
    alpha_powers: tuple
    primes: tuple
    escalations: int = 0


@dataclass
class RunStats:
    lam: int = 0
    mu: int = 0
    k: int = 0
    ell: int = 0
    Q: int = 0
    q: int = 0
    alpha: int = 0
    primes: tuple = ()
    escalations: int = 0
    queries: int = 0
    triples: int = 0
    groups: int = 0
    groups_accepted: int = 0
    rejections: dict = field(default_factory=dict)
    terms_out: int = 0
    retries_used: int = 0
    verified: bool = None
    failed: bool = False
    t_pool: float = 0.0
    t_eval: float = 0.0
    t_sort: float = 0.0
    t_recovery: float = 0.0
    t_verify: float = 0.0

    def randomness(self):
        return (self.q, self.alpha, tuple(self.primes), self.lam, self.mu)

    def as_dict(self):
        d = asdict(self)
        d["primes"] = list(self.primes)
        return d

    def report(self):
        lines = []
        for key, val in self.as_dict().items():
            if isinstance(val, float):
                val = f"{val:.6f}"
            elif isinstance(val, list):
                val = ",".join(map(str, val))
            elif isinstance(val, dict):
                val = ",".join(f"{k}={v}" for k, v in sorted(val.items())) or "-"
            lines.append(f"{key}\t{val}")
        return "\n".join(lines)


def derive_run(params, sampler, use_overrides=True, ell_scale=1):
    k, ell, Q = params.resolved()
    ell *= ell_scale
    n, D, T = params.n, params.D, max(params.T, 1)
    lam = max(2, k * T)
    if use_overrides and params.force_q is not None:
        q = params.force_q
    else:
        q = random_prime(Q, 2 * Q, sampler)
    if use_overrides and params.force_alpha is not None:
        alpha = params.force_alpha % q
    else:
        alpha = sampler.randint(1, q - 1)
    alpha_powers = tuple(pow(alpha, D ** j, q) for j in range(n))
    escalations = 0
    if use_overrides and params.force_primes:
        primes = tuple(params.force_primes)
        mu = len(primes)
    else:
        while True:
            mu = compute_mu(ell, n, D, lam)
            try:
                primes = tuple(distinct_primes(lam, 2 * lam, mu, sampler))
                break
            except InsufficientPrimesError as exc:
                log.info("escalating lambda %d -> %d: %s", lam, 2 * lam, exc)
                lam *= 2
                escalations += 1
    return RunPlan(lam, mu, q, alpha, alpha_powers, primes, escalations)


# --- per-prime task ----------------------------------------------------------

_BOX = None


def _init_worker(bb):
    global _BOX
    _BOX = bb


def _image_task(args, bb=None):
    q, p, alpha_powers = args
    bb = _BOX if bb is None else bb
    d_powers = tuple(pow(bb.D, j, p) for j in range(bb.n))
    spec = SubstitutionSpec(q, p, alpha_powers, d_powers)
    return [(c, j, p) for c, j in nonzero_terms(bb.evaluate_mod(spec))]


class _Evaluator:
    """Fans the per-prime queries out over ``workers`` processes."""

    def __init__(self, bb, workers):
        self.bb = bb
        self.pool = None
        if workers > 1:
            self.pool = multiprocessing.get_context().Pool(
                workers, initializer=_init_worker, initargs=(bb,))

    def images(self, plan):
        tasks = [(plan.q, p, plan.alpha_powers) for p in plan.primes]
        if self.pool is None:
            chunks = [_image_task(t, self.bb) for t in tasks]
        else:
            chunks = self.pool.map(_image_task, tasks, chunksize=1)
        return [TermImage(*t) for chunk in chunks for t in chunk]

    def close(self):
        if self.pool is not None:
            self.pool.close()
            self.pool.join()


def verify_candidate(bb, cand, sampler, lam, Q, exclude=()):
    """Compare box and candidate under a fresh prime, a fresh q and alpha = 1."""
    exclude = set(exclude)
    while True:
        p = random_prime(lam, 2 * lam, sampler)
        if p not in exclude:
            break
    q = random_prime(Q, 2 * Q, sampler)
    spec = SubstitutionSpec.build(q, p, 1, bb.n, bb.D)
    return bb.evaluate_mod(spec) == Explicit(cand).evaluate_mod(spec)


def sparse_interp(bb, params):
    """Interpolate the polynomial behind ``bb``; returns (SparsePoly, RunStats).

    All random draws come from one seeded sampler before any parallel work,
    so the result does not depend on ``params.workers``.
    """
    if bb.n != params.n or bb.D != params.D:
        raise ValueError("black box disagrees with params on n or D")
    k, ell, Q = params.resolved()
    sampler = PrimeSampler(params.seed)
    stats = RunStats(k=k, ell=ell, Q=Q)
    t0 = time.perf_counter()
    evaluator = _Evaluator(bb, params.workers)
    stats.t_pool = time.perf_counter() - t0
    try:
        for attempt in range(params.retries + 1):
            # each retry doubles ell: more primes, so a term must collide in
            # more of them before it drops below the threshold
            plan = derive_run(params, sampler, use_overrides=attempt == 0,
                              ell_scale=2 ** attempt)
            cand = _attempt(bb, params, plan, evaluator, stats)
            stats.retries_used = attempt
            if params.retries == 0:
                break
            t0 = time.perf_counter()
            ok = verify_candidate(bb, cand, sampler, plan.lam, Q, plan.primes)
            stats.t_verify += time.perf_counter() - t0
            stats.verified = ok
            if ok:
                break
            log.warning("verification failed on attempt %d", attempt)
        stats.failed = stats.verified is False
    finally:
        evaluator.close()
    return cand, stats


def _attempt(bb, params, plan, evaluator, stats):
    stats.lam, stats.mu = plan.lam, plan.mu
    stats.q, stats.alpha = plan.q, plan.alpha
    stats.primes = plan.primes
    stats.escalations = plan.escalations
    t0 = time.perf_counter()
    images = evaluator.images(plan)
    t1 = time.perf_counter()
    groups = group_images(images)
    t2 = time.perf_counter()
    counts = Counter()
    terms = recover_terms(groups, plan.mu, params.D, params.n, plan.q, plan.alpha, counts)
    cand = canonicalize(terms, params.n, params.D)
    t3 = time.perf_counter()
    stats.queries = len(plan.primes)
    stats.triples = len(images)
    stats.groups = len(groups)
    stats.groups_accepted = counts.pop("accepted", 0)
    stats.rejections = dict(counts)
    stats.terms_out = len(cand)
    stats.t_eval, stats.t_sort, stats.t_recovery = t1 - t0, t2 - t1, t3 - t2
    return cand
