"""Finite integer sets, difference representation and additive energy.

A set is a truncation ``A = curlyA ∩ [1, X]`` of some infinite set of
naturals.  Elements are held in a read-only ``int64`` array; counts and
energies are always returned as Python ints so they never wrap.
"""

from __future__ import annotations

import itertools
import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from ._parallel import ordered_map
from .ntt import exact_autocorrelation

X_CAP = 2**32 - 1
DENSE_LIMIT = 2**24
BRUTE_LIMIT = 60
# float autocorrelation is accepted only if every coefficient sits this close to an integer
ROUND_MARGIN = 0.25

GALLERY_KINDS = ("interval", "squares", "kth-powers", "primes", "lacunary")
ENERGY_METHODS = ("quadruple-brute", "sum-histogram", "difference-identity", "fft")


class IntegerSet:
    """Sorted set of naturals in ``[1, X]`` with cached ``N`` and ``delta``."""

    __slots__ = ("_elements", "X")

    def __init__(self, elements, X):
        arr = np.asarray(elements, dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError("elements must be one-dimensional")
        if arr.size and (np.any(np.diff(arr) <= 0) or arr[0] < 1 or arr[-1] > X):
            raise ValueError("elements must be strictly increasing and lie in [1, X]")
        arr = arr.copy()
        arr.setflags(write=False)
        self._elements = arr
        self.X = int(X)

    @property
    def elements(self) -> np.ndarray:
        return self._elements

    @property
    def N(self) -> int:
        return int(self._elements.size)

    @property
    def delta(self) -> Fraction:
        return Fraction(self.N, self.X)

    def __len__(self):
        return self.N

    def __iter__(self):
        return iter(self._elements.tolist())

    def __eq__(self, other):
        if not isinstance(other, IntegerSet):
            return NotImplemented
        return self.X == other.X and np.array_equal(self._elements, other._elements)

    def __hash__(self):
        return hash((self.X, self._elements.tobytes()))

    def __repr__(self):
        head = ", ".join(str(v) for v in self._elements[:6].tolist())
        tail = ", ..." if self.N > 6 else ""
        return f"IntegerSet(X={self.X}, N={self.N}, {{{head}{tail}}})"

    def truncate(self, X) -> "IntegerSet":
        """Return ``A ∩ [1, X]``."""
        if X > self.X:
            raise ValueError(f"cannot extend a set known only up to {self.X} to X={X}")
        k = int(np.searchsorted(self._elements, X, side="right"))
        return IntegerSet(self._elements[:k], X)

    def prefix(self, n) -> "IntegerSet":
        """The first ``n`` elements, truncated at the n-th element (minimal X)."""
        if n < 1 or n > self.N:
            raise ValueError(f"set has {self.N} elements, cannot take {n}")
        return IntegerSet(self._elements[:n], int(self._elements[n - 1]))

    def indicator(self, length=None) -> np.ndarray:
        length = self.X + 1 if length is None else length
        ind = np.zeros(length, dtype=np.int64)
        ind[self._elements] = 1
        return ind


def _check_X(X):
    if X != int(X) or X < 1:
        raise ValueError(f"X must be a positive integer, got {X!r}")
    if X > X_CAP:
        raise ValueError(f"X={X} exceeds the supported cap 2**32 - 1")
    return int(X)


def make_set(values, X) -> IntegerSet:
    X = _check_X(X)
    arr = np.asarray(list(values), dtype=np.int64)
    if arr.size and arr.min() < 1:
        raise ValueError("all values must be >= 1")
    arr = np.unique(arr[arr <= X])
    return IntegerSet(arr, X)


def prime_sieve(X) -> np.ndarray:
    """Primes up to ``X`` by the sieve of Eratosthenes."""
    if X < 2:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(X + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, math.isqrt(X) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    return np.nonzero(is_p)[0].astype(np.int64)


def _validate_kind(kind, k, base):
    if kind not in GALLERY_KINDS:
        raise ValueError(f"unknown gallery kind {kind!r}; expected one of {GALLERY_KINDS}")
    if kind == "kth-powers" and (k is None or k < 2):
        raise ValueError("kth-powers needs k >= 2")
    if kind == "lacunary" and (base is None or base < 2):
        raise ValueError("lacunary needs base >= 2")


def gallery(kind, X, *, k=2, base=2) -> IntegerSet:
    """One of the standard example sets, truncated at ``X``.

    ``lacunary`` yields ``floor(base**j)`` for ``j >= 1``; ``base`` may be a
    non-integer real >= 2.
    """
    X = _check_X(X)
    _validate_kind(kind, k, base)
    if kind == "interval":
        return IntegerSet(np.arange(1, X + 1, dtype=np.int64), X)
    if kind == "squares":
        k = 2
    if kind in ("squares", "kth-powers"):
        top = _integer_root(X, k)
        return IntegerSet(np.arange(1, top + 1, dtype=np.int64) ** k, X)
    if kind == "primes":
        return IntegerSet(prime_sieve(X), X)
    return make_set(itertools.takewhile(lambda v: v <= X, lacunary_iter(base)), X)


def _integer_root(X, k):
    r = int(round(X ** (1.0 / k)))
    while r**k > X:
        r -= 1
    while (r + 1) ** k <= X:
        r += 1
    return r


def lacunary_iter(base):
    b = Fraction(base)
    j = 1
    while True:
        yield math.floor(b**j)
        j += 1


def gallery_iter(kind, *, k=2, base=2):
    """Infinite increasing iterator over the elements of a gallery set."""
    _validate_kind(kind, k, base)
    if kind == "interval":
        return itertools.count(1)
    if kind in ("squares", "kth-powers"):
        k = 2 if kind == "squares" else k
        return (i**k for i in itertools.count(1))
    if kind == "primes":
        return _primes_iter()
    return _dedupe(lacunary_iter(base))


def _dedupe(it):
    last = None
    for v in it:
        if v != last:
            yield v
        last = v


def _primes_iter():
    limit = 1024
    done = 0
    while True:
        ps = prime_sieve(limit)
        for p in ps[done:].tolist():
            yield p
        done = ps.size
        limit *= 4


def gallery_nth(kind, n, *, k=2, base=2):
    """The n-th element (1-based) of a gallery set, in closed form where one exists."""
    if n < 1:
        raise ValueError("n must be >= 1")
    _validate_kind(kind, k, base)
    if kind == "interval":
        return n
    if kind == "squares":
        return n * n
    if kind == "kth-powers":
        return n**k
    return next(itertools.islice(gallery_iter(kind, k=k, base=base), n - 1, None))


# ---------------------------------------------------------------------------
# difference representation


@dataclass(frozen=True)
class DiffRep:
    """``r(n) = #{(a, b) in A^2 : a - b = n}`` for ``1 <= n <= X``.

    Dense storage keeps ``counts[n]`` for ``0 <= n <= X`` (``counts[0] = 0``);
    sparse storage keeps sorted ``support`` and matching ``counts``.
    """

    X: int
    N: int
    counts: np.ndarray
    support: np.ndarray | None = None

    @property
    def dense(self) -> bool:
        return self.support is None

    def __call__(self, n) -> int:
        if n < 1 or n > self.X:
            return 0
        if self.dense:
            return int(self.counts[n])
        i = int(np.searchsorted(self.support, n))
        if i < self.support.size and self.support[i] == n:
            return int(self.counts[i])
        return 0

    def nonzero(self):
        """``(n_values, r_values)`` restricted to ``r(n) > 0``, both int64."""
        if self.dense:
            n = np.nonzero(self.counts)[0].astype(np.int64)
            return n, self.counts[n]
        keep = self.counts > 0
        return self.support[keep], self.counts[keep]

    def total(self) -> int:
        return int(self.counts.sum(dtype=np.int64))

    def sum_squares(self) -> int:
        return _sum_squares(self.counts)

    def as_dense(self) -> np.ndarray:
        if self.dense:
            return self.counts
        out = np.zeros(self.X + 1, dtype=np.int64)
        out[self.support] = self.counts
        return out


def _sum_squares(values) -> int:
    """Exact ``sum(v**2)`` via fixed-order int64 blocks accumulated in Python ints."""
    v = np.asarray(values, dtype=np.int64)
    if v.size == 0:
        return 0
    top = int(np.abs(v).max())
    if top == 0:
        return 0
    if top > 3_000_000_000:
        raise OverflowError("representation counts too large for int64 squaring")
    block = max(1, (2**62) // (top * top))
    total = 0
    for i in range(0, v.size, block):
        chunk = v[i : i + block]
        total += int(np.dot(chunk, chunk))
    return total


def _outer_diff_counts(elems, X, dense):
    """Exact r(n) from pairwise differences, in row blocks to bound memory."""
    n_el = elems.size
    block = max(1, 2_000_000 // max(n_el, 1))
    if dense:
        counts = np.zeros(X + 1, dtype=np.int64)
        for i in range(0, n_el, block):
            rows = elems[i : i + block]
            d = rows[:, None] - elems[None, :]
            counts += np.bincount(d[d > 0], minlength=X + 1)
        return counts, None
    parts = []
    for i in range(0, n_el, block):
        rows = elems[i : i + block]
        d = rows[:, None] - elems[None, :]
        parts.append(d[d > 0])
    alld = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
    support, cnt = np.unique(alld, return_counts=True)
    return cnt.astype(np.int64), support.astype(np.int64)


def autocorrelation(A: IntegerSet, exact=False) -> np.ndarray:
    """``c[n] = #{(a, b): a - b = n}`` for ``0 <= n <= X`` (so ``c[0] = N``).

    Uses a float FFT and accepts it only if every coefficient lies within
    ``ROUND_MARGIN`` of an integer; otherwise (or with ``exact=True``) falls
    back to an exact number-theoretic transform.
    """
    X = A.X
    if not exact:
        length = 1 << (2 * X + 1).bit_length()
        ind = np.zeros(length)
        ind[A.elements] = 1.0
        f = np.fft.rfft(ind)
        raw = np.fft.irfft(f * np.conj(f), length)[: X + 1]
        rounded = np.rint(raw)
        if np.abs(raw - rounded).max(initial=0.0) < ROUND_MARGIN:
            return rounded.astype(np.int64)
    return exact_autocorrelation(A.elements, X)


def diff_rep(A: IntegerSet, *, dense=None) -> DiffRep:
    dense = A.X <= DENSE_LIMIT if dense is None else dense
    if not dense:
        counts, support = _outer_diff_counts(A.elements, A.X, dense=False)
        return DiffRep(A.X, A.N, counts, support)
    # FFT cost ~ X log X, outer-difference cost ~ N^2
    if A.N * A.N <= 8 * (A.X + 1) * max(1, (A.X + 1).bit_length()):
        counts, _ = _outer_diff_counts(A.elements, A.X, dense=True)
    else:
        counts = autocorrelation(A).copy()
        counts[0] = 0
    counts.setflags(write=False)
    return DiffRep(A.X, A.N, counts)


# ---------------------------------------------------------------------------
# additive energy


@dataclass(frozen=True)
class EnergyReport:
    E: int
    N: int
    method: str

    @property
    def E_tilde(self) -> Fraction:
        return Fraction(self.E, self.N**3)

    def to_json(self) -> str:
        return json.dumps(
            {
                "E": str(self.E),
                "N": self.N,
                "E_tilde": f"{self.E_tilde.numerator}/{self.E_tilde.denominator}",
                "method": self.method,
            }
        )


def _energy_quadruple_brute(elems):
    if elems.size > BRUTE_LIMIT:
        raise ValueError(f"quadruple-brute is limited to N <= {BRUTE_LIMIT}")
    cd = elems[:, None] + elems[None, :]
    total = 0
    for a in elems.tolist():
        ab = a + elems
        total += int(np.count_nonzero(ab[:, None, None] == cd[None, :, :]))
    return total


def _energy_sum_histogram(elems):
    """``sum_m R(m)^2`` with ``R(m) = #{(a, b): a + b = m}``."""
    if elems.size == 0:
        return 0
    top = 2 * int(elems[-1])
    hist = np.zeros(top + 1, dtype=np.int64)
    block = max(1, 2_000_000 // elems.size)
    for i in range(0, elems.size, block):
        sums = elems[i : i + block, None] + elems[None, :]
        hist += np.bincount(sums.ravel(), minlength=top + 1)
    return _sum_squares(hist)


def _energy_difference_identity(A):
    rep = diff_rep(A)
    return A.N**2 + 2 * rep.sum_squares()


def _energy_fft(A, exact=False):
    c = autocorrelation(A, exact=exact)
    # c covers n >= 0; negative shifts mirror positive ones
    return 2 * _sum_squares(c) - A.N**2


def energy(A: IntegerSet, method="difference-identity", *, exact_transform=False) -> EnergyReport:
    """Additive energy ``#{(a, b, c, d) in A^4 : a + b = c + d}``."""
    if A.N < 1:
        raise ValueError("energy needs N >= 1")
    if method == "quadruple-brute":
        E = _energy_quadruple_brute(A.elements)
    elif method == "sum-histogram":
        E = _energy_sum_histogram(A.elements)
    elif method == "difference-identity":
        E = _energy_difference_identity(A)
    elif method == "fft":
        E = _energy_fft(A, exact=exact_transform)
    else:
        raise ValueError(f"unknown energy method {method!r}")
    return EnergyReport(E, A.N, method)


def energy_all(A: IntegerSet) -> dict:
    methods = [m for m in ENERGY_METHODS if m != "quadruple-brute" or A.N <= BRUTE_LIMIT]
    reports = ordered_map(lambda m: energy(A, m), methods)
    return dict(zip(methods, reports))


# ---------------------------------------------------------------------------
# serialization


def dumps_set(A: IntegerSet) -> str:
    lines = [f"# X={A.X} N={A.N}"]
    lines.extend(str(v) for v in A.elements.tolist())
    return "\n".join(lines) + "\n"


def loads_set(text: str) -> IntegerSet:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    # leading comment lines (e.g. a provenance block) may precede the header
    while lines and lines[0].startswith("#") and not re.match(r"#\s*X=\d+\s+N=\d+\s*$", lines[0]):
        lines.pop(0)
    if not lines or not lines[0].startswith("#"):
        raise ValueError("missing '# X=<X> N=<N>' header")
    fields = dict(tok.split("=", 1) for tok in lines[0][1:].split())
    try:
        X, N = int(fields["X"]), int(fields["N"])
    except (KeyError, ValueError) as exc:
        raise ValueError(f"malformed header {lines[0]!r}") from exc
    values = [int(v) for v in lines[1:]]
    if len(values) != N:
        raise ValueError(f"header says N={N} but file holds {len(values)} values")
    return IntegerSet(values, X)


def write_set(A: IntegerSet, path) -> None:
    Path(path).write_text(dumps_set(A), encoding="utf-8", newline="\n")


def read_set(path) -> IntegerSet:
    return loads_set(Path(path).read_text(encoding="utf-8"))
