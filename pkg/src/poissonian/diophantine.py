"""Continued fractions, Khintchine-type witnesses and the spike construction.

A witness for ``alpha`` at iterated-log depth ``d`` is an integer ``M`` with
``||M alpha|| < 1 / (M L(M))`` where ``L(M) = prod_{i=1..d} log_i M``.  Around
such an ``M`` every multiple ``n = kM`` with small ``k`` has ``||n alpha||``
tiny, so a window of size ``s/N`` captures ``r(M), r(2M), ...`` all at once
and ``F(N)`` spikes well above ``2s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import PreconditionError
from .paircorr import AlphaValue, fmt_number, pair_corr_direct
from .setcore import IntegerSet

BRUTE_CROSSCHECK_LIMIT = 10**5


class DomainError(PreconditionError):
    """An iterated logarithm is undefined or non-positive at this argument."""


# ---------------------------------------------------------------------------
# continued fractions


@dataclass(frozen=True)
class ContinuedFraction:
    partial_quotients: tuple
    convergents: tuple  # (p_k, q_k)
    exact: bool  # expansion of a rational that terminated
    truncated: bool  # float precision ran out before the requested depth

    @property
    def denominators(self) -> list[int]:
        return [q for _, q in self.convergents]


def _quotients(x: Fraction, depth):
    out = []
    while depth is None or len(out) < depth:
        a = math.floor(x)
        out.append(a)
        frac = x - a
        if frac == 0:
            break
        x = 1 / frac
    return out


def _convergents(quotients):
    p0, q0, p1, q1 = 1, 0, quotients[0], 1
    conv = [(p1, q1)]
    for a in quotients[1:]:
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        conv.append((p1, q1))
    return conv


def cf_expand(alpha, depth=None) -> ContinuedFraction:
    """Partial quotients and convergents of ``alpha``.

    Rationals expand exactly and terminate.  A float is treated as the open
    interval between its two neighbouring doubles: both endpoints are expanded
    exactly and only the quotients they share are kept, so every reported
    quotient is certified for the true value.
    """
    if depth is not None and depth < 1:
        raise PreconditionError("depth must be >= 1")
    alpha = AlphaValue(alpha)
    if alpha.is_rational:
        q = _quotients(alpha.value, depth)
        last = depth is None or len(q) < depth or _quotients(alpha.value, None) == q
        return ContinuedFraction(tuple(q), tuple(_convergents(q)), bool(last), False)
    x = float(alpha)
    lo = Fraction(np.nextafter(x, -np.inf))
    hi = Fraction(np.nextafter(x, np.inf))
    lim = None if depth is None else depth + 1
    qlo, qhi = _quotients(lo, lim), _quotients(hi, lim)
    shared = []
    for a, b in zip(qlo, qhi):
        if a != b:
            break
        shared.append(a)
    # the last shared quotient is only certified if the next one also exists
    if len(shared) == len(qlo) == len(qhi):
        q = shared if depth is None else shared[:depth]
    else:
        q = shared[:-1] if depth is None else shared[: min(depth, len(shared) - 1)]
    if not q:
        q = [math.floor(x)]
    truncated = depth is None or len(q) < depth
    return ContinuedFraction(tuple(q), tuple(_convergents(q)), False, truncated)


# ---------------------------------------------------------------------------
# iterated logarithms


def iterated_log(M, i) -> float:
    """``log_i M`` with ``log_0 M = M``; raises ``DomainError`` once a value is <= 0."""
    if i < 0:
        raise PreconditionError("i must be >= 0")
    v = float(M)
    if v <= 0:
        raise DomainError(f"log_0({M}) = {v} is not positive")
    for step in range(1, i + 1):
        v = math.log(v)
        if v <= 0:
            raise DomainError(f"log_{step}({M}) = {v:.4g} is not positive")
    return v


def L(M, depth) -> float:
    """``prod_{i=1..depth} log_i M``; ``depth = 0`` gives the empty product 1."""
    out = 1.0
    for i in range(1, depth + 1):
        out *= iterated_log(M, i)
    return out


# ---------------------------------------------------------------------------
# witnesses


def dist_exact(M, alpha) -> Fraction:
    """``||M alpha||`` for the exact value of alpha (a float is taken at face value)."""
    alpha = AlphaValue(alpha)
    x = (M * Fraction(alpha.value)) % 1
    return min(x, 1 - x)


@dataclass(frozen=True)
class KhintchineWitness:
    M: int
    dist: Fraction
    L_value: float

    def holds(self) -> bool:
        return self.dist * self.M * Fraction(self.L_value) < 1

    def to_json(self) -> dict:
        return {"M": self.M, "dist": fmt_number(self.dist), "L": self.L_value}


def _witness(M, alpha, depth):
    try:
        Lv = L(M, depth)
    except DomainError:
        return None
    d = dist_exact(M, alpha)
    w = KhintchineWitness(M, d, Lv)
    return w if w.holds() else None


def witness_candidates(alpha, M_max, depth=1) -> list[int]:
    """Every M that can be a witness: small M with ``L(M) < 2`` plus multiples of convergent denominators.

    Once ``L(M) >= 2`` a witness has ``||M alpha|| < 1/(2M)``, which forces
    ``M = j q_k`` for a convergent denominator ``q_k``.  For ``j ||q_k alpha|| <= 1/2``
    the distance of ``j q_k`` is exactly ``j ||q_k alpha||``, so the multiples
    stop at the first ``j`` with ``j^2 q_k ||q_k alpha|| L(j q_k) >= 1``.
    """
    alpha = AlphaValue(Fraction(AlphaValue(alpha).value))
    cand = set()
    M = 1
    while M <= M_max:
        try:
            if L(M, depth) >= 2:
                break
        except DomainError:
            pass
        cand.add(M)
        M += 1
    for q in cf_expand(alpha).denominators:
        if q > M_max:
            break
        d = dist_exact(q, alpha)
        j = 1
        while j * q <= M_max:
            if d > 0 and 2 * j * d > 1:
                break
            try:
                if d > 0 and j * j * q * d * Fraction(L(j * q, depth)) >= 1:
                    break
            except DomainError:
                pass
            cand.add(j * q)
            j += 1
    return sorted(cand)


def khintchine_witnesses(alpha, depth, M_max) -> list[KhintchineWitness]:
    """All witnesses ``M <= M_max``, found from the convergents of alpha."""
    out = []
    for M in witness_candidates(alpha, M_max, depth):
        w = _witness(M, alpha, depth)
        if w is not None:
            out.append(w)
    return out


def khintchine_witnesses_brute(alpha, depth, M_max) -> list[KhintchineWitness]:
    """Every witness ``M <= M_max`` by exhaustive scan; refuses beyond ``10**5``."""
    if M_max > BRUTE_CROSSCHECK_LIMIT:
        raise PreconditionError(f"exhaustive witness scan is capped at {BRUTE_CROSSCHECK_LIMIT}")
    alpha = AlphaValue(alpha)
    M = np.arange(1, M_max + 1, dtype=np.float64)
    x = (M * float(alpha)) % 1.0
    d = np.minimum(x, 1.0 - x)
    # vectorized L(M) in floats; undefined entries become nan and are dropped
    Lv = np.ones_like(M)
    v = M.copy()
    with np.errstate(divide="ignore", invalid="ignore"):
        for _ in range(depth):
            v = np.where(v > 0, np.log(v), np.nan)
            Lv *= np.where(v > 0, v, np.nan)
    # float slack covers rounding in d; the exact recheck decides
    keep = np.nonzero(d * M * Lv < 1.0 + 1e-6 + 1e-12 * M * M * np.nan_to_num(Lv))[0]
    out = []
    for idx in keep.tolist():
        w = _witness(idx + 1, alpha, depth)
        if w is not None:
            out.append(w)
    return out


# ---------------------------------------------------------------------------
# divergence demonstration


@dataclass(frozen=True)
class DemoResult:
    M: int
    N: int
    X: int
    K: int
    lower_count: int  # sum over n = kM, k <= K, ||n alpha|| <= s/N of 2 r(n)
    count: int  # full pair count, N F(N)
    s: Fraction
    paper_N: int | None
    paper_K: float | None

    @property
    def lower(self) -> Fraction:
        return Fraction(self.lower_count, self.N)

    @property
    def F(self) -> Fraction:
        return Fraction(self.count, self.N)

    @property
    def threshold(self) -> Fraction:
        return 3 * self.s

    @property
    def passed(self) -> bool:
        return self.F > self.threshold

    def to_json(self) -> dict:
        return {
            "M": self.M,
            "N": self.N,
            "X": self.X,
            "K": self.K,
            "lower": fmt_number(self.lower),
            "F": fmt_number(self.F),
            "threshold": fmt_number(self.threshold),
            "passed": self.passed,
            "paper_N": self.paper_N,
            "paper_K": self.paper_K,
        }


@dataclass(frozen=True)
class DivergenceReport:
    alpha: AlphaValue
    depth: int
    s: Fraction
    witnesses: tuple
    demo: DemoResult | None
    notes: tuple = field(default=())

    def to_json(self) -> dict:
        return {
            "alpha": str(self.alpha),
            "depth": self.depth,
            "witnesses": [w.to_json() for w in self.witnesses],
            "demo": None if self.demo is None else self.demo.to_json(),
            "notes": list(self.notes),
        }


def _paper_form(M, C, depth):
    """``N = floor(M log_3 M)`` and ``K = log M (log log M)^C prod_{4<=i<=depth} log_i M``."""
    try:
        pN = math.floor(M * iterated_log(M, 3))
    except DomainError:
        pN = None
    try:
        pK = iterated_log(M, 1) * iterated_log(M, 2) ** C
        for i in range(4, depth + 1):
            pK *= iterated_log(M, i)
    except DomainError:
        pK = None
    return pN, pK


def _N_candidates(d, s, N_max, M):
    """N values putting ``K = floor(s/(N d))`` at 1..64, plus a geometric grid."""
    out = set()
    if d > 0:
        for K in range(1, 65):
            N = math.floor(s / (K * d))
            if 2 <= N <= N_max:
                out.add(N)
    N = max(2, M)
    while N <= N_max:
        out.add(N)
        N = int(N * 1.25) + 1
    return sorted(out)


def _demo_at(A_big, alpha, s, M, d, N, C, depth):
    X = int(A_big.elements[N - 1])
    A = A_big.prefix(N)
    K = X // (3 * M)
    if d > 0:
        K = min(K, math.floor(s / (N * d)))
    if K < 1:
        return None
    al = AlphaValue(alpha)
    elems = A.elements
    lower = 0
    for k in range(1, K + 1):
        n = k * M
        if dist_exact(n, al) * N <= s:
            # r(n) by membership of a + n
            lower += 2 * int(np.count_nonzero(np.isin(elems[elems <= X - n] + n, elems, assume_unique=True)))
    count = pair_corr_direct(A, al, s).count
    pN, pK = _paper_form(M, C, depth)
    return DemoResult(M, N, X, K, lower, count, s, pN, pK)


def divergence_demo(A_big: IntegerSet, alpha, s=1, C=1.0, depth=1, N_max=10**5, M_max=None) -> DivergenceReport:
    """Search for ``N <= N_max`` with ``F(N) > 3s`` driven by witnesses of ``alpha``.

    ``A_big`` must hold at least ``N_max`` elements; ``A ∩ [X]`` is the prefix
    of length N.  For each witness ``M`` (smallest first) the candidate N are
    those putting ``K = floor(s/(N ||M alpha||))`` at small integers.  K is
    also capped so that ``KM <= X/3``; when that leaves ``K < 1`` the candidate
    is skipped as out of range.  Witnesses are tried from the largest down and
    the first passing ``(M, N)`` is returned; if none passes, the candidate
    with the largest F is kept.
    """
    s = Fraction(s)
    if s <= 0:
        raise PreconditionError("s must be positive")
    N_max = min(N_max, A_big.N)
    if N_max < 2:
        raise PreconditionError("need at least two elements")
    M_max = N_max if M_max is None else M_max
    alpha = AlphaValue(alpha)
    wits = khintchine_witnesses(alpha, depth, M_max)
    notes = []
    if not wits:
        notes.append("no witness found")
        return DivergenceReport(alpha, depth, s, (), None, tuple(notes))
    best = None
    skipped = 0
    # large witnesses first: the spike is most telling far from trivial N
    for w in sorted(wits, key=lambda w: -w.M):
        for N in _N_candidates(w.dist, s, N_max, w.M):
            res = _demo_at(A_big, alpha, s, w.M, w.dist, N, C, depth)
            if res is None:
                skipped += 1
                continue
            if res.passed:
                if skipped:
                    notes.append(f"{skipped} candidates out of range (K < 1)")
                return DivergenceReport(alpha, depth, s, tuple(wits), res, tuple(notes))
            if best is None or res.F > best.F:
                best = res
    if skipped:
        notes.append(f"{skipped} candidates out of range (K < 1)")
    if best is None:
        notes.append("construction out of range")
    else:
        notes.append("no spike found")
    return DivergenceReport(alpha, depth, s, tuple(wits), best, tuple(notes))
