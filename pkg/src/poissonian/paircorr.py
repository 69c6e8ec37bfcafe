"""Pair correlation of dilates ``alpha * A`` modulo one.

``F(alpha, s, X) = N^-1 #{(a, b) in A^2 : a != b, ||alpha (a - b)|| <= s/N}``.

Rational ``alpha = p/q`` is the ground-truth path: the test
``||alpha n|| <= s/N`` reduces to an integer comparison of ``p n mod q``
against a window width, so boundary ties are resolved exactly.  The float
path is for fast scans only; ties there follow IEEE comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._parallel import ordered_map
from .setcore import IntegerSet, DiffRep, diff_rep, gallery, gallery_nth

# p*n products below this bound are formed in int64 without overflow
_INT64_SAFE = 2**62


class AlphaValue:
    """A dilation ``alpha`` in ``[0, 1)``: exact rational or float."""

    __slots__ = ("value",)

    def __init__(self, value):
        if isinstance(value, AlphaValue):
            value = value.value
        if isinstance(value, (int, Fraction)):
            value = Fraction(value) % 1
        elif isinstance(value, float):
            if not math.isfinite(value):
                raise ValueError("alpha must be finite")
            value = value - math.floor(value)
            if value >= 1.0:
                value = 0.0
        else:
            raise TypeError(f"alpha must be int, Fraction or float, not {type(value).__name__}")
        self.value = value

    @classmethod
    def parse(cls, text: str) -> "AlphaValue":
        """``'p/q'`` gives the exact path, a decimal string the float path."""
        text = text.strip()
        if "/" in text:
            p, q = text.split("/", 1)
            return cls(Fraction(int(p), int(q)))
        if text.lstrip("-").isdigit():
            return cls(Fraction(int(text)))
        return cls(float(text))

    @property
    def is_rational(self) -> bool:
        return isinstance(self.value, Fraction)

    @property
    def p(self) -> int:
        return self.value.numerator

    @property
    def q(self) -> int:
        return self.value.denominator

    def __float__(self):
        return float(self.value)

    def __eq__(self, other):
        if isinstance(other, AlphaValue):
            return type(self.value) is type(other.value) and self.value == other.value
        return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __str__(self):
        return fmt_number(self.value)

    def __repr__(self):
        return f"AlphaValue({self})"


def fmt_number(x) -> str:
    """Rationals as ``p/q``, integers bare, floats via ``repr``."""
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def norm_dist(x):
    """Distance from ``x`` to the nearest integer; exact for ints and Fractions."""
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        frac = x - math.floor(x)
        return min(frac, 1 - frac)
    frac = x - math.floor(x)
    return min(frac, 1.0 - frac)


@dataclass(frozen=True)
class CorrelationParams:
    alpha: AlphaValue
    s: Fraction
    X: int

    def __post_init__(self):
        object.__setattr__(self, "alpha", AlphaValue(self.alpha))
        s = self.s if isinstance(self.s, float) else Fraction(self.s)
        if s <= 0:
            raise ValueError("s must be positive")
        if self.X < 1:
            raise ValueError("X must be >= 1")
        object.__setattr__(self, "s", s)


@dataclass(frozen=True)
class CorrelationValue:
    count: int
    N: int

    @property
    def F(self) -> Fraction:
        return Fraction(self.count, self.N)


def _as_fraction_s(s):
    if isinstance(s, float):
        return Fraction(s)
    return Fraction(s)


def window_width(q: int, s, N: int) -> int:
    """Largest integer ``W`` with ``W/q <= s/N``.

    For ``alpha = p/q`` and an integer ``n``, ``||n alpha|| <= s/N`` holds
    iff the circular distance from ``p n mod q`` to 0 is at most ``W``.
    """
    s = _as_fraction_s(s)
    return (s.numerator * q) // (N * s.denominator)


def _residues(values, p, q):
    """``p * v mod q`` elementwise, exact for any size of ``p`` and ``q``."""
    values = np.asarray(values, dtype=np.int64)
    top = int(values.max()) if values.size else 0
    if q * max(top, 1) < _INT64_SAFE and q < _INT64_SAFE:
        return (values * p) % q
    res = [(p * v) % q for v in values.tolist()]
    if q < _INT64_SAFE:
        return np.array(res, dtype=np.int64)
    return np.array(res, dtype=object)


def _circ_dist(res, q):
    return np.minimum(res, q - res)


def _check_N(A):
    if A.N < 2:
        raise ValueError(f"pair correlation needs N >= 2, got N={A.N}")


def pair_corr_direct(A: IntegerSet, alpha, s) -> CorrelationValue:
    """Count ordered pairs ``a != b`` with ``||alpha (a - b)|| <= s/N``.

    Sorts the points ``alpha * a mod 1`` and counts, for every point, how many
    others fall in the closed window of half-width ``s/N`` around it.
    """
    _check_N(A)
    alpha = AlphaValue(alpha)
    N = A.N
    if alpha.is_rational:
        p, q = alpha.p, alpha.q
        W = window_width(q, s, N)
        if 2 * W + 1 >= q:
            return CorrelationValue(N * (N - 1), N)
        pts = np.sort(_residues(A.elements, p, q))
        lo_val, hi_val = pts - W, pts + W
    else:
        a = float(alpha)
        pts = np.sort(np.asarray(A.elements, dtype=np.float64) * a % 1.0)
        q = 1.0
        W = float(s) / N
        if 2 * W >= 1.0:
            return CorrelationValue(N * (N - 1), N)
        lo_val, hi_val = pts - W, pts + W
    # unrolled circle: a window never covers a point twice since 2W < q
    ext = np.concatenate([pts - q, pts, pts + q])
    hi = np.searchsorted(ext, hi_val, side="right")
    lo = np.searchsorted(ext, lo_val, side="left")
    count = int((hi - lo).sum()) - N
    return CorrelationValue(count, N)


def _hits_mask(n_values, alpha, s, N):
    """Boolean mask of ``||n alpha|| <= s/N`` over an array of n."""
    alpha = AlphaValue(alpha)
    if alpha.is_rational:
        q = alpha.q
        W = window_width(q, s, N)
        if 2 * W + 1 >= q:
            return np.ones(len(n_values), dtype=bool)
        res = _residues(n_values, alpha.p, q)
        return _circ_dist(res, q) <= W
    x = np.asarray(n_values, dtype=np.float64) * float(alpha) % 1.0
    return np.minimum(x, 1.0 - x) <= float(s) / N


def pair_corr_via_r(rep: DiffRep, alpha, s, N=None) -> CorrelationValue:
    """``F = (2/N) sum_{n <= X, ||n alpha|| <= s/N} r(n)``."""
    N = rep.N if N is None else N
    if N < 2:
        raise ValueError(f"pair correlation needs N >= 2, got N={N}")
    n, r = rep.nonzero()
    mask = _hits_mask(n, alpha, s, N)
    return CorrelationValue(2 * int(r[mask].sum(dtype=np.int64)), N)


def pair_corr(A: IntegerSet, alpha, s) -> CorrelationValue:
    return pair_corr_direct(A, alpha, s)


def mean_F_exact(N, s) -> Fraction:
    """``integral_0^1 F(alpha) d alpha = 2s(1 - 1/N)`` (valid for ``2s <= N``)."""
    return 2 * _as_fraction_s(s) * (1 - Fraction(1, N))


# ---------------------------------------------------------------------------
# convergence scans


@dataclass(frozen=True)
class ScanRow:
    X: int
    N: int
    count: int
    F: object
    deviation: object

    def csv(self) -> str:
        return ",".join(
            [str(self.X), str(self.N), str(self.count), fmt_number(self.F), fmt_number(self.deviation)]
        )


SCAN_HEADER = "X,N,count,F,deviation"


def corr_scan(source, alpha, s, X_grid, **gallery_kw) -> list[ScanRow]:
    """Evaluate F at every truncation in ``X_grid``.

    ``source`` is a gallery kind name or an ``IntegerSet`` known at least up
    to ``max(X_grid)``.  Rational alpha gives rational F and deviation.
    """
    X_grid = [int(x) for x in X_grid]
    if any(b <= a for a, b in zip(X_grid, X_grid[1:])):
        raise ValueError("X_grid must be strictly increasing")
    alpha = AlphaValue(alpha)
    s_val = s if isinstance(s, float) else Fraction(s)

    def one(X):
        A = gallery(source, X, **gallery_kw) if isinstance(source, str) else source.truncate(X)
        cv = pair_corr_direct(A, alpha, s_val)
        F = cv.F if alpha.is_rational else cv.count / cv.N
        target = 2 * s_val if alpha.is_rational else 2 * float(s_val)
        return ScanRow(X, A.N, cv.count, F, abs(F - target))

    return ordered_map(one, X_grid)


# ---------------------------------------------------------------------------
# sandwiching along the subsequence N_j = floor(2^(j^(1 - eta)))


def sandwich_N(j, eta) -> int:
    return math.floor(2.0 ** (j ** (1.0 - eta)))


@dataclass(frozen=True)
class SandwichSchedule:
    eta: float
    rows: tuple  # (j, N_j, X_j)

    def bracket(self, X):
        """Index ``i`` into ``rows`` with ``X_j <= X < X_{j+1}``, or None."""
        for i in range(len(self.rows) - 1):
            if self.rows[i][2] <= X < self.rows[i + 1][2]:
                return i
        return None


def sandwich_schedule(source, eta, j_max, **gallery_kw) -> SandwichSchedule:
    """Rows ``(j, N_j, X_j)`` with ``X_j`` minimal such that ``|A ∩ [X_j]| = N_j``.

    ``source`` is a gallery kind (closed-form n-th element where available)
    or an ``IntegerSet`` large enough to contain the ``N_{j_max}``-th element.
    """
    if not 0 < eta < 1:
        raise ValueError("eta must lie in (0, 1)")
    rows = []
    for j in range(1, j_max + 1):
        Nj = sandwich_N(j, eta)
        if isinstance(source, str):
            Xj = gallery_nth(source, Nj, **gallery_kw)
        else:
            if Nj > source.N:
                raise ValueError(f"source exhausted: needs {Nj} elements, has {source.N}")
            Xj = int(source.elements[Nj - 1])
        rows.append((j, Nj, Xj))
    return SandwichSchedule(float(eta), tuple(rows))


@dataclass(frozen=True)
class SandwichCheck:
    X: int
    j: int
    lower: int  # N_j F(alpha, s N_j/N_{j+1}, X_j), as a pair count
    middle: int  # N F(alpha, s, X)
    upper: int  # N_{j+1} F(alpha, s N_{j+1}/N_j, X_{j+1})

    @property
    def ok(self) -> bool:
        return self.lower <= self.middle <= self.upper


def check_sandwich(A_big: IntegerSet, schedule: SandwichSchedule, alpha, s, X) -> SandwichCheck:
    """Evaluate both sandwich inequalities exactly at one ``X``.

    ``N F(alpha, s', X')`` is the raw pair count at window ``s'/N'``, so each
    side is compared as an integer.
    """
    i = schedule.bracket(X)
    if i is None:
        raise ValueError(f"X={X} is not bracketed by the schedule")
    j, Nj, Xj = schedule.rows[i]
    _, Nj1, Xj1 = schedule.rows[i + 1]
    s = Fraction(s)
    A_lo, A_mid, A_hi = A_big.truncate(Xj), A_big.truncate(X), A_big.truncate(Xj1)
    lower = pair_corr_direct(A_lo, alpha, s * Nj / Nj1).count
    middle = pair_corr_direct(A_mid, alpha, s).count
    upper = pair_corr_direct(A_hi, alpha, s * Nj1 / Nj).count
    return SandwichCheck(X, j, lower, middle, upper)
