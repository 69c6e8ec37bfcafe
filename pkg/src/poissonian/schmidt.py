"""Truncated totients, the arc systems E_n, overlap counts and the surrogate F*.

``E_n`` is the union over ``u <= n`` with ``gcd(u, n) <= T`` of the open arcs
``((u - s/N)/n, (u + s/N)/n) mod 1``.  ``F*`` counts ``r(n)`` only when
``alpha`` lies in ``E_n``; ``F - F*`` is what the gcd restriction throws away.

Every audited quantity is exact: arcs live on an integer grid of
``N * den(s) * L`` points per unit circle, and rational sums are accumulated
over a common denominator.  Where a square root enters (``S2``) the value is
an fsum of correctly rounded float terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._parallel import ordered_map
from .errors import PreconditionError, ResourceGuardError
from .paircorr import AlphaValue, CorrelationValue, window_width
from .setcore import IntegerSet, DiffRep, diff_rep, energy

QUADRATIC_LIMIT = 10_000
_INT64_SAFE = 2**62


def t_floor(T) -> int:
    """``gcd <= T`` for integer gcds is ``gcd <= floor(T)``; works for any real T."""
    if isinstance(T, (int, np.integer)):
        return int(T)
    if isinstance(T, Fraction):
        return math.floor(T)
    return math.floor(float(T))


@dataclass(frozen=True)
class SchmidtConfig:
    T: object
    s: Fraction
    N: int
    X: int

    def __post_init__(self):
        if self.T < 2:
            raise PreconditionError(f"threshold T must be >= 2, got {self.T}")
        s = Fraction(self.s)
        if s <= 0:
            raise PreconditionError("s must be positive")
        object.__setattr__(self, "s", s)

    @property
    def Tc(self) -> int:
        return t_floor(self.T)

    @classmethod
    def for_set(cls, A: IntegerSet, T, s=1):
        return cls(T=T, s=Fraction(s), N=A.N, X=A.X)


@dataclass(frozen=True)
class BoundAudit:
    name: str
    params: dict
    lhs: object
    rhs_shape: object

    @property
    def ratio(self) -> float:
        rhs = float(self.rhs_shape)
        if rhs == 0:
            return 0.0 if float(self.lhs) == 0 else math.inf
        return float(self.lhs) / rhs


# ---------------------------------------------------------------------------
# exact rational sums


def exact_sum(numerators, denominators) -> Fraction:
    """``sum(num_i / den_i)`` exactly.

    Terms are merged pairwise in a balanced tree over the lcm of each pair,
    which keeps operand sizes even and is far cheaper than one global lcm.
    """
    pairs = [(int(n), int(d)) for n, d in zip(numerators, denominators) if n]
    if not pairs:
        return Fraction(0)
    while len(pairs) > 1:
        merged = []
        for i in range(0, len(pairs) - 1, 2):
            (a, A), (b, B) = pairs[i], pairs[i + 1]
            g = math.gcd(A, B)
            merged.append((a * (B // g) + b * (A // g), A // g * B))
        if len(pairs) % 2:
            merged.append(pairs[-1])
        pairs = merged
    return Fraction(*pairs[0])


# ---------------------------------------------------------------------------
# truncated totient


def totients(X) -> np.ndarray:
    """Euler phi for ``0 <= n <= X`` by a linear-time style sieve."""
    phi = np.arange(X + 1, dtype=np.int64)
    for p in range(2, X + 1):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    return phi


def phi_T_brute(n, T) -> int:
    """``#{u in [n] : gcd(u, n) <= T}`` by scanning every u."""
    if n < 1:
        raise ValueError("n must be >= 1")
    u = np.arange(1, n + 1, dtype=np.int64)
    return int(np.count_nonzero(np.gcd(u, n) <= t_floor(T)))


def _divisors(n):
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def _phi_scalar(m):
    result, k, p = m, m, 2
    while p * p <= k:
        if k % p == 0:
            while k % p == 0:
                k //= p
            result -= result // p
        p += 1
    if k > 1:
        result -= result // k
    return result


def phi_T_divisor(n, T) -> int:
    """``n - sum_{d | n, d > T} phi(n/d)``: u with ``gcd(u, n) = d`` number phi(n/d)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    Tc = t_floor(T)
    return n - sum(_phi_scalar(n // d) for d in _divisors(n) if d > Tc)


def phi_T(n, T) -> int:
    return phi_T_divisor(n, T)


def phi_T_table(X, T) -> np.ndarray:
    """``Phi(n)`` for ``0 <= n <= X`` (entry 0 unused), summing ``phi(n/d)`` over ``d | n, d <= T``."""
    Tc = min(t_floor(T), X)
    phi = totients(X)
    out = np.zeros(X + 1, dtype=np.int64)
    for d in range(1, Tc + 1):
        out[d::d] += phi[1 : X // d + 1]
    return out


def truncated_totient_grid(X, cmax) -> np.ndarray:
    """``grid[c, g] = #{lam <= g : gcd(lam, g) <= c}`` for ``0 <= c <= cmax``, ``g <= X``."""
    cmax = min(cmax, X)
    phi = totients(X)
    grid = np.zeros((cmax + 1, X + 1), dtype=np.int64)
    for c in range(1, cmax + 1):
        grid[c] = grid[c - 1]
        grid[c, c::c] += phi[1 : X // c + 1]
    return grid


def phi_moment(X, T, order=1, exact=False):
    """``sum_{n <= X} (1 - Phi(n)/n)^order``; exact Fraction or fsum of rounded terms."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    n = np.arange(1, X + 1, dtype=np.int64)
    gap = n - phi_T_table(X, T)[1:]
    keep = gap > 0
    n, gap = n[keep], gap[keep]
    if exact:
        nums = gap if order == 1 else gap * gap
        dens = n if order == 1 else n * n
        return exact_sum(nums.tolist(), dens.tolist())
    terms = gap / n
    return math.fsum((terms if order == 1 else terms * terms).tolist())


def phi_moment_audit(X, T, order=1, exact=False) -> BoundAudit:
    if X < 1 or T < 2:
        raise PreconditionError("need X >= 1 and T >= 2")
    lhs = phi_moment(X, T, order, exact=exact)
    rhs = X / float(T) if order == 1 else X * math.log(T) / float(T) ** 2
    name = "phi-moment-1" if order == 1 else "phi-moment-2"
    return BoundAudit(name, {"X": X, "T": T, "order": order}, lhs, rhs)


# ---------------------------------------------------------------------------
# arc systems on an integer grid


class ArcSet:
    """Finite union of open arcs on ``R/Z``, stored on a grid of ``scale`` points.

    ``centers`` and ``half`` describe the generating arcs
    ``(c - half, c + half)``; pieces are the arcs cut at 0, in grid units.
    """

    def __init__(self, centers, half, scale):
        self.centers = np.asarray(centers, dtype=np.int64) % scale
        self.half = int(half)
        self.scale = int(scale)
        if self.scale >= _INT64_SAFE:
            raise OverflowError("arc grid too fine for int64")

    @property
    def full(self) -> bool:
        return 2 * self.half >= self.scale

    def pieces(self) -> np.ndarray:
        """``(k, 2)`` array of half-open grid intervals ``[start, end)`` inside ``[0, scale)``."""
        if self.centers.size == 0:
            return np.zeros((0, 2), dtype=np.int64)
        if self.full:
            return np.array([[0, self.scale]], dtype=np.int64)
        start = (self.centers - self.half) % self.scale
        end = start + 2 * self.half
        wraps = end > self.scale
        main = np.stack([start, np.minimum(end, self.scale)], axis=1)
        extra = np.stack([np.zeros(int(wraps.sum()), dtype=np.int64), end[wraps] - self.scale], axis=1)
        return np.concatenate([main, extra])

    def rescaled(self, factor) -> "ArcSet":
        return ArcSet(self.centers * factor, self.half * factor, self.scale * factor)

    def measure_units(self) -> int:
        return _union_length(self.pieces())

    @property
    def measure(self) -> Fraction:
        return Fraction(self.measure_units(), self.scale)

    @property
    def arcs(self) -> list:
        """Merged arcs as ``(start, length)`` Fractions (touching open arcs stay separate)."""
        out = []
        for a, b in _merge(self.pieces()):
            out.append((Fraction(a, self.scale), Fraction(b - a, self.scale)))
        return out

    def contains(self, x) -> bool:
        """Open-arc membership of a rational point; endpoints are not members."""
        x = Fraction(x) % 1
        pos = x * self.scale
        if self.centers.size == 0:
            return False
        d = [abs(pos - int(c)) % self.scale for c in self.centers.tolist()]
        return any(min(v, self.scale - v) < self.half for v in d)


def _merge(pieces):
    if len(pieces) == 0:
        return []
    order = np.argsort(pieces[:, 0], kind="stable")
    out = []
    for a, b in pieces[order].tolist():
        if out and a < out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return out


def _union_length(pieces) -> int:
    if len(pieces) == 0:
        return 0
    order = np.argsort(pieces[:, 0], kind="stable")
    start, end = pieces[order, 0], pieces[order, 1]
    reach = np.maximum.accumulate(end)
    prev = np.concatenate([[start[0]], reach[:-1]])
    return int(np.maximum(0, end - np.maximum(start, prev)).sum())


def _allowed_u(n, Tc):
    u = np.arange(1, n + 1, dtype=np.int64)
    return u[np.gcd(u, n) <= Tc]


def en_arcs(n, config: SchmidtConfig, scale_multiple=1) -> ArcSet:
    """The arc system ``E_n``, on a grid of ``N * den(s) * n * scale_multiple`` points."""
    if n < 1 or config.N < 1:
        raise PreconditionError("need n >= 1 and N >= 1")
    a, b = config.s.numerator, config.s.denominator
    k = scale_multiple
    u = _allowed_u(n, config.Tc)
    return ArcSet(u * (config.N * b * k), a * k, config.N * b * n * k)


def en_measure_formula(n, config: SchmidtConfig) -> Fraction:
    """``(2s/N) Phi(n)/n``; equals the arc measure whenever ``N >= 2s``."""
    return 2 * config.s / config.N * Fraction(phi_T(n, config.T), n)


def intersection_measure(E1: ArcSet, E2: ArcSet) -> Fraction:
    L = math.lcm(E1.scale, E2.scale)
    F1, F2 = E1.rescaled(L // E1.scale), E2.rescaled(L // E2.scale)
    p1, p2 = F1.pieces(), F2.pieces()
    both = _union_length(np.concatenate([p1, p2]))
    return Fraction(_union_length(p1) + _union_length(p2) - both, L)


# ---------------------------------------------------------------------------
# overlap counts A(n, m)


def overlap_count_brute(n, m, T) -> int:
    """``#{u <= n, v <= m : u/n = v/m, gcd(u, n), gcd(v, m) <= T}`` by scanning u."""
    if n < 1 or m < 1:
        raise ValueError("n, m must be >= 1")
    Tc = t_floor(T)
    u = np.arange(1, n + 1, dtype=np.int64)
    u = u[(u * m) % n == 0]
    v = u * m // n
    return int(np.count_nonzero((np.gcd(u, n) <= Tc) & (np.gcd(v, m) <= Tc)))


def overlap_count(n, m, T) -> int:
    """Same count through ``u = lam m/g, v = lam n/g``: ``lam <= g`` with ``gcd(lam, g) <= gT/max(m, n)``."""
    if n < 1 or m < 1:
        raise ValueError("n, m must be >= 1")
    g = math.gcd(n, m)
    c = t_floor(T) // (max(n, m) // g)
    if c >= g:
        return g
    if c == 0:
        return 0
    lam = np.arange(1, g + 1, dtype=np.int64)
    return int(np.count_nonzero(np.gcd(lam, g) <= c))


def _overlap_matrix(m_vals, n_vals, Tc, grid):
    """``A(m_i, n_j)`` for all pairs, read off the truncated-totient grid."""
    g = np.gcd(m_vals[:, None], n_vals[None, :])
    mx = np.maximum(m_vals[:, None], n_vals[None, :])
    c = np.minimum(Tc // (mx // g), grid.shape[0] - 1)
    return grid[c, g]


def overlap_measure_audit(n, m, config: SchmidtConfig) -> BoundAudit:
    """``mu(E_n ∩ E_m)`` against ``4s^2/N^2 + (2s/N) A(n, m)/n`` for ``n >= m``."""
    if not n >= m >= 1:
        raise PreconditionError("need n >= m >= 1")
    En, Em = en_arcs(n, config), en_arcs(m, config)
    lhs = intersection_measure(En, Em)
    s, N = config.s, config.N
    rhs = 4 * s * s / (N * N) + 2 * s / N * Fraction(overlap_count(n, m, config.T), n)
    return BoundAudit("overlap-measure", {"n": n, "m": m, "s": s, "N": N, "T": config.T}, lhs, rhs)


def overlap_sweep(n_max, s_values, N, T_values):
    """Every ``1 <= m <= n <= n_max``: yields ``(params, lhs, rhs)`` with exact values."""
    out = []
    for T in T_values:
        for s in s_values:
            cfg = SchmidtConfig(T=T, s=Fraction(s), N=N, X=n_max)
            arcs = [None] + [en_arcs(n, cfg) for n in range(1, n_max + 1)]
            units = [None] + [E.measure_units() for E in arcs[1:]]

            def row(n, cfg=cfg, arcs=arcs, units=units, s=cfg.s, T=T):
                res = []
                for m in range(1, n + 1):
                    L = math.lcm(arcs[n].scale, arcs[m].scale)
                    kn, km = L // arcs[n].scale, L // arcs[m].scale
                    both = _union_length(
                        np.concatenate([arcs[n].rescaled(kn).pieces(), arcs[m].rescaled(km).pieces()])
                    )
                    lhs = Fraction(units[n] * kn + units[m] * km - both, L)
                    rhs = 4 * s * s / (N * N) + 2 * s / N * Fraction(overlap_count(n, m, T), n)
                    res.append(((n, m, s, T), lhs, rhs))
                return res

            for rows in ordered_map(row, range(1, n_max + 1)):
                out.extend(rows)
    return out


def avg_overlap_sum(X, T, force=False) -> Fraction:
    """``sum_{n <= X} sum_{m <= n} A(m, n)/n`` exactly."""
    if X > QUADRATIC_LIMIT and not force:
        raise ResourceGuardError(f"X={X} exceeds {QUADRATIC_LIMIT}; pass force=True")
    Tc = t_floor(T)
    grid = truncated_totient_grid(X, Tc)
    inner = []
    for n in range(1, X + 1):
        m = np.arange(1, n + 1, dtype=np.int64)
        inner.append(int(_overlap_matrix(m, np.array([n]), Tc, grid).sum()))
    return exact_sum(inner, range(1, X + 1))


def avg_overlap_audit(X, T, force=False) -> BoundAudit:
    if X < 2 or T < 2:
        raise PreconditionError("need X >= 2 and T >= 2")
    lhs = avg_overlap_sum(X, T, force=force)
    return BoundAudit("avg-overlap", {"X": X, "T": T}, lhs, X * math.log(T))


def harmonic(k) -> Fraction:
    return sum((Fraction(1, y) for y in range(1, k + 1)), Fraction(0))


# ---------------------------------------------------------------------------
# the surrogate F* and its L1 distance to F


def _member_masks(n, p, q, s, N, Tc):
    """Masks ``(||n p/q|| <= s/N, p/q in E_n)`` broadcast over ``n`` and ``p`` (int64 inputs).

    ``alpha in E_n`` implies the F window is hit, so gcd witnesses are only
    searched at the (sparse) F hits.
    """
    a, b = s.numerator, s.denominator
    n, p = np.broadcast_arrays(n, p)
    W = window_width(q, s, N)
    prod = n * p
    res = prod & (q - 1) if q & (q - 1) == 0 else prod % q
    if 2 * W + 1 < q:
        hit_F = np.minimum(res, q - res) <= W
    else:
        hit_F = np.ones(n.shape, dtype=bool)
    hit_E = np.zeros(n.shape, dtype=bool)
    idx = np.nonzero(hit_F)
    nn, pp = n[idx], prod[idx]
    # integers v with |n p/q - v| < s/N all lie within base - K .. base + K + 1
    K = min(a // (N * b) + 1, int(nn.max(initial=0)) + 1)
    base = pp // q
    found = np.zeros(nn.shape, dtype=bool)
    for off in range(-K, K + 2):
        v = base + off
        close = np.abs(pp - v * q) * (N * b) < a * q
        found |= close & (np.gcd(v % nn, nn) <= Tc)
    hit_E[idx] = found
    return hit_F, hit_E


def _member_masks_py(n_vals, p, q, s, N, Tc):
    a, b = s.numerator, s.denominator
    W = window_width(q, s, N)
    hit_F, hit_E = [], []
    for n in n_vals:
        res = (n * p) % q
        hit_F.append(min(res, q - res) <= W)
        K = min(a // (N * b) + 1, n + 1)
        base = (n * p) // q
        ok = False
        for v in range(base - K, base + K + 2):
            if abs(n * p - v * q) * N * b < a * q and math.gcd(v % n, n) <= Tc:
                ok = True
                break
        hit_E.append(ok)
    return np.array(hit_F, dtype=bool), np.array(hit_E, dtype=bool)


def _masks_for_alpha(n_vals, alpha, s, N, Tc):
    alpha = AlphaValue(alpha)
    if not alpha.is_rational:
        alpha = AlphaValue(Fraction(float(alpha)))
    p, q = alpha.p, alpha.q
    top = int(n_vals.max()) if n_vals.size else 1
    a, b = s.numerator, s.denominator
    if top * max(p, 1) < _INT64_SAFE and (top + 2) * q * N * b < _INT64_SAFE and a * q < _INT64_SAFE:
        return _member_masks(n_vals, p, q, s, N, Tc)
    return _member_masks_py(n_vals.tolist(), p, q, s, N, Tc)


def f_star(A: IntegerSet, alpha, config: SchmidtConfig, rep: DiffRep | None = None):
    """``F*(alpha) = (2/N) sum_{n <= X, alpha in E_n} r(n)``, as a CorrelationValue."""
    rep = diff_rep(A) if rep is None else rep
    n, r = rep.nonzero()
    if n.size == 0:
        return CorrelationValue(0, A.N)
    _, hit_E = _masks_for_alpha(n, alpha, config.s, A.N, config.Tc)
    return CorrelationValue(2 * int(r[hit_E].sum()), A.N)


def l1_distance_exact(A: IntegerSet, config: SchmidtConfig, rep=None) -> Fraction:
    """``integral |F - F*| = (4s/N^2) sum_n r(n) (1 - Phi(n)/n)``; requires ``N >= 2s``."""
    if A.N < 2 * config.s:
        raise PreconditionError(f"closed form needs N >= 2s (N={A.N}, s={config.s})")
    rep = diff_rep(A) if rep is None else rep
    n, r = rep.nonzero()
    if n.size == 0:
        return Fraction(0)
    Phi = phi_T_table(int(n.max()), config.T)[n]
    gap = n - Phi
    return 4 * config.s / A.N**2 * exact_sum((r * gap).tolist(), n.tolist())


def fstar_mean_exact(A: IntegerSet, config: SchmidtConfig, rep=None) -> Fraction:
    """``integral F* = (2/N) sum_n r(n) mu(E_n)`` with ``mu(E_n) = (2s/N) Phi(n)/n``."""
    if A.N < 2 * config.s:
        raise PreconditionError(f"closed form needs N >= 2s (N={A.N}, s={config.s})")
    rep = diff_rep(A) if rep is None else rep
    n, r = rep.nonzero()
    if n.size == 0:
        return Fraction(0)
    Phi = phi_T_table(int(n.max()), config.T)[n]
    return 4 * config.s / A.N**2 * exact_sum((r * Phi).tolist(), n.tolist())


def l1_bound_shape(A: IntegerSet, T, E=None) -> float:
    """``(sqrt(log T)/T) (E~/delta)^(1/2)``."""
    E = energy(A, "fft").E if E is None else E
    e_tilde = E / A.N**3
    return math.sqrt(math.log(T)) / float(T) * math.sqrt(e_tilde / (A.N / A.X))


def l1_audit(A: IntegerSet, config: SchmidtConfig) -> BoundAudit:
    lhs = l1_distance_exact(A, config)
    return BoundAudit(
        "l1-distance", {"X": A.X, "N": A.N, "T": config.T, "s": config.s}, lhs, l1_bound_shape(A, config.T)
    )


# ---------------------------------------------------------------------------
# variance components


@dataclass(frozen=True)
class VarianceComponents:
    S1: Fraction
    S2: float
    S3: Fraction
    chain: tuple = field(default=())


def _support(A, rep, force):
    n, r = rep.nonzero()
    if n.size > QUADRATIC_LIMIT and not force:
        raise ResourceGuardError(f"support of r has {n.size} points (> {QUADRATIC_LIMIT}); pass force=True")
    return n, r


def variance_components(A: IntegerSet, config: SchmidtConfig, rep=None, force=False) -> VarianceComponents:
    """``S1``, ``S2``, ``S3`` and the Cauchy-Schwarz chain bounding ``S2``.

    ``chain`` holds, in order: the gcd-bound sum restricted to
    ``m/g, n/g <= T``, the sum over ``g`` of squared weighted sums, and the
    divisor-weighted closed form ``H_T sum r(n)^2 #{y | n, y <= T}``; each
    is at least the previous one.
    """
    rep = diff_rep(A) if rep is None else rep
    n, r = _support(A, rep, force)
    N = A.N
    Tc = config.Tc
    if n.size == 0:
        return VarianceComponents(Fraction(0), 0.0, Fraction(0), (0.0, 0.0, 0.0))
    top = int(n.max())
    Phi = phi_T_table(top, config.T)[n]
    S1 = Fraction(1, N * N) * exact_sum((r * (n - Phi)).tolist(), n.tolist())

    grid = truncated_totient_grid(top, Tc)
    sqrt_n = np.sqrt(n.astype(np.float64))
    rf = r.astype(np.float64)
    s2_rows, s3_num, step1_rows = [], [], []
    block = max(1, 4_000_000 // n.size)
    for i in range(0, n.size, block):
        rows = n[i : i + block]
        Am = _overlap_matrix(rows, n, Tc, grid)
        rr = rf[i : i + block, None] * rf[None, :]
        s2_rows.extend((rr * Am / (sqrt_n[i : i + block, None] * sqrt_n[None, :])).sum(axis=1).tolist())
        g = np.gcd(rows[:, None], n[None, :])
        ok = (rows[:, None] // g <= Tc) & (n[None, :] // g <= Tc)
        step1_rows.extend(
            (np.where(ok, rr * g / (sqrt_n[i : i + block, None] * sqrt_n[None, :]), 0.0)).sum(axis=1).tolist()
        )
        # S3 keeps m <= n: entry (row m, column n) contributes r(m) r(n) A / n
        lower = rows[:, None] <= n[None, :]
        contrib = np.where(lower, r[i : i + block, None] * Am, 0)
        s3_num.append(contrib.sum(axis=0))
    col = np.sum(s3_num, axis=0)
    S3 = Fraction(1, N**3) * exact_sum((col * r).tolist(), n.tolist())
    S2 = math.fsum(s2_rows) / N**3
    step1 = math.fsum(step1_rows) / N**3

    dense = rep.as_dense().astype(np.float64)
    X = rep.X
    ys = np.arange(1, Tc + 1)
    step2_terms = []
    for g_ in range(1, X + 1):
        yy = ys[ys * g_ <= X]
        if yy.size == 0:
            break
        step2_terms.append(float(np.sum(dense[g_ * yy] / np.sqrt(yy))) ** 2)
    step2 = math.fsum(step2_terms) / N**3
    HT = float(harmonic(Tc))
    dcount = np.zeros(X + 1, dtype=np.int64)
    for y in range(1, min(Tc, X) + 1):
        dcount[y::y] += 1
    step3 = HT * math.fsum((dense**2 * dcount).tolist()) / N**3
    return VarianceComponents(S1, S2, S3, (step1, step2, step3))


# ---------------------------------------------------------------------------
# Monte Carlo over alpha

MC_DENOMINATOR = 2**31


@dataclass(frozen=True)
class VarianceReport:
    samples: int
    seed: int
    N: int
    mean_F: float
    var_F: float
    se_F: float
    mean_Fstar: float
    var_Fstar: float
    se_Fstar: float
    mean_gap: float
    se_gap: float
    expected_mean_F: Fraction
    expected_mean_Fstar: Fraction | None
    l1_exact: Fraction | None
    prop41_shape: float
    prop54_shape: float | None

    @property
    def prop41_ratio(self) -> float:
        return self.var_Fstar / self.prop41_shape if self.prop41_shape else math.inf

    @property
    def prop54_ratio(self) -> float | None:
        if self.prop54_shape is None:
            return None
        return self.var_Fstar / self.prop54_shape


def sample_alphas(samples, seed) -> np.ndarray:
    """Numerators ``k`` of ``alpha = k / 2^31``; sample ``i`` is a pure function of (seed, i)."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    return rng.integers(0, MC_DENOMINATOR, size=samples, dtype=np.int64)


def _stats(counts, N):
    """Mean, unbiased variance and standard error of ``counts / N`` from exact integer sums."""
    S = len(counts)
    tot = sum(counts)
    sq = sum(c * c for c in counts)
    mean = Fraction(tot, S * N)
    var = Fraction(S * sq - tot * tot, S * (S - 1) * N * N)
    return float(mean), float(var), math.sqrt(float(var) / S)


def mc_counts(A: IntegerSet, config: SchmidtConfig, samples, seed, rep=None):
    """Per-sample integer counts ``N F`` and ``N F*`` at seeded uniform alpha."""
    rep = diff_rep(A) if rep is None else rep
    n, r = rep.nonzero()
    ks = sample_alphas(samples, seed)
    q = MC_DENOMINATOR
    block = max(1, 2_000_000 // max(n.size, 1))
    starts = list(range(0, samples, block))

    def run(start):
        p = ks[start : start + block, None]
        hit_F, hit_E = _member_masks(n[None, :], p, q, config.s, A.N, config.Tc)
        return (2 * (hit_F @ r)).tolist(), (2 * (hit_E @ r)).tolist()

    cF, cS = [], []
    for f, fs in ordered_map(run, starts):
        cF.extend(f)
        cS.extend(fs)
    return cF, cS


def prop41_shape(A, T, E=None) -> float:
    """``(sqrt(log T)/T) (E~/delta)^(1/2) + E~ T log T``."""
    E = energy(A, "fft").E if E is None else E
    e_tilde = E / A.N**3
    return l1_bound_shape(A, T, E) + e_tilde * float(T) * math.log(T)


def prop54_shape(X, T, C) -> float:
    """``1/T + (log X)^-1 (log log X)^-C log T``."""
    lx = math.log(X)
    return 1.0 / float(T) + math.log(T) / (lx * math.log(lx) ** C)


def variance_mc(A: IntegerSet, config: SchmidtConfig, samples, seed, C=None) -> VarianceReport:
    """Seeded Monte Carlo over uniform alpha of F, F* and F - F*."""
    if samples < 1000:
        raise PreconditionError("variance_mc needs at least 1000 samples")
    rep = diff_rep(A)
    cF, cS = mc_counts(A, config, samples, seed, rep)
    N = A.N
    mF, vF, seF = _stats(cF, N)
    mS, vS, seS = _stats(cS, N)
    mG, _, seG = _stats([a - b for a, b in zip(cF, cS)], N)
    exact_ok = N >= 2 * config.s
    E = energy(A, "fft").E
    return VarianceReport(
        samples=samples,
        seed=seed,
        N=N,
        mean_F=mF,
        var_F=vF,
        se_F=seF,
        mean_Fstar=mS,
        var_Fstar=vS,
        se_Fstar=seS,
        mean_gap=mG,
        se_gap=seG,
        expected_mean_F=2 * config.s * (1 - Fraction(1, N)),
        expected_mean_Fstar=fstar_mean_exact(A, config, rep) if exact_ok else None,
        l1_exact=l1_distance_exact(A, config, rep) if exact_ok else None,
        prop41_shape=prop41_shape(A, config.T, E),
        prop54_shape=prop54_shape(A.X, config.T, C) if C is not None and A.X > 15 else None,
    )
