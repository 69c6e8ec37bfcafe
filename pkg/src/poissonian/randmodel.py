"""Random sets where ``x`` is kept independently with probability ``psi(x)``.

``psi(x) = 1`` for ``x <= 20`` and ``(log x)^-1 (log log x)^-C`` beyond.
Inclusion of ``x`` depends only on ``(seed, x)``: the uniform for ``x`` is the
``(x-1)``-th word of a Philox stream keyed by the seed, so sets sampled at
different ``X`` with one seed are nested.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass

import numpy as np

from ._parallel import ordered_map
from .errors import PreconditionError, ResourceGuardError
from .setcore import IntegerSet, autocorrelation, energy

CUTOFF = 20
MEMORY_GUARD_X = 2**26


@dataclass(frozen=True)
class RandomModelParams:
    C: float
    seed: int = 0
    cutoff: int = CUTOFF

    def __post_init__(self):
        if self.C < 0:
            raise PreconditionError("C must be >= 0")
        if self.cutoff != CUTOFF:
            raise PreconditionError(f"cutoff is fixed at {CUTOFF}")


def psi(x, C):
    """Inclusion probability; accepts a scalar or an array of ``x >= 1``."""
    if np.ndim(x) == 0:
        if x < 1:
            raise ValueError("psi is defined for x >= 1")
        if x <= CUTOFF:
            return 1.0
        lx = math.log(x)
        return 1.0 / (lx * math.log(lx) ** C)
    x = np.asarray(x, dtype=np.float64)
    out = np.ones_like(x)
    big = x > CUTOFF
    lx = np.log(x[big])
    out[big] = 1.0 / (lx * np.log(lx) ** C)
    return out


def psi_table(X, C) -> np.ndarray:
    """``psi(x)`` for ``x = 1..X`` (index ``x - 1``)."""
    return psi(np.arange(1, X + 1, dtype=np.float64), C)


def expected_size(X, C) -> tuple[float, float]:
    """``(sum psi, sum psi (1 - psi))``: mean and variance of N."""
    p = psi_table(X, C)
    return math.fsum(p.tolist()), math.fsum((p * (1 - p)).tolist())


def uniforms(X, seed) -> np.ndarray:
    """Uniforms in ``[0, 1)`` for ``x = 1..X``; prefix-stable in ``X``."""
    raw = np.random.Philox(key=seed).random_raw(X)
    return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53


def sample_set(X, params: RandomModelParams) -> IntegerSet:
    if X < CUTOFF + 1:
        raise PreconditionError(f"sample_set needs X >= {CUTOFF + 1}")
    if X > MEMORY_GUARD_X:
        raise ResourceGuardError(f"X={X} exceeds the memory guard 2**26")
    keep = uniforms(X, params.seed) < psi_table(X, params.C)
    return IntegerSet(np.nonzero(keep)[0].astype(np.int64) + 1, X)


# ---------------------------------------------------------------------------
# concentration


@dataclass(frozen=True)
class ConcentrationReport:
    X: int
    C: float
    epsilon: float
    N: int
    expected_N: float
    literal_N: float
    max_r: int
    argmax_r: int
    expected_r_bound: float
    literal_r_bound: float
    min_r_low: int
    lower_r_bound: float

    @property
    def ratio1(self) -> float:
        return self.N / self.expected_N

    @property
    def ratio1_literal(self) -> float:
        return self.N / self.literal_N

    @property
    def property1_ok(self) -> bool:
        return abs(self.ratio1 - 1) <= self.epsilon

    @property
    def property1_literal_ok(self) -> bool:
        return abs(self.ratio1_literal - 1) <= self.epsilon

    @property
    def ratio2(self) -> float:
        return self.max_r / self.expected_r_bound

    @property
    def ratio2_literal(self) -> float:
        return self.max_r / self.literal_r_bound

    @property
    def property2_ok(self) -> bool:
        return self.max_r <= (1 + self.epsilon) * self.expected_r_bound

    @property
    def property2_literal_ok(self) -> bool:
        return self.max_r <= (1 + self.epsilon) * self.literal_r_bound

    @property
    def lower_ok(self) -> bool:
        return self.min_r_low >= self.lower_r_bound


def concentration_check(A: IntegerSet, X, C, epsilon) -> ConcentrationReport:
    """Evaluate both size properties of a sampled set.

    Property (1) compares ``N`` with ``sum_{x <= X} psi(x)``; property (2)
    compares ``max_n r(n)`` with ``(1 + eps) sum_{x <= X} psi(x)^2``.  The
    asymptotic forms ``X (log X)^-1 (log log X)^-C`` and
    ``X (log X)^-2 (log log X)^-2C`` are reported alongside.  Also reports
    ``min_{n <= X/3} r(n)`` against ``delta N / 8``.
    """
    if A.X != X:
        A = A.truncate(X)
    p = psi_table(X, C)
    lx = math.log(X)
    llx = math.log(lx)
    c = autocorrelation(A)
    r = c[1:X] if X > 1 else np.zeros(0, dtype=np.int64)
    third = X // 3
    low = r[:third]
    return ConcentrationReport(
        X=X,
        C=C,
        epsilon=epsilon,
        N=A.N,
        expected_N=math.fsum(p.tolist()),
        literal_N=X / (lx * llx**C),
        max_r=int(r.max(initial=0)),
        argmax_r=int(np.argmax(r)) + 1 if r.size else 0,
        expected_r_bound=math.fsum((p * p).tolist()),
        literal_r_bound=X / (lx**2 * llx ** (2 * C)),
        min_r_low=int(low.min()) if low.size else 0,
        lower_r_bound=A.N * A.N / X / 8,
    )


def expected_r(X, C, n_values) -> np.ndarray:
    """``E r(n) = sum_{x <= X - n} psi(x) psi(x + n)`` for each requested n."""
    p = psi_table(X, C)
    return np.array([math.fsum((p[: X - n] * p[n:]).tolist()) for n in n_values])


# ---------------------------------------------------------------------------
# energy scaling


@dataclass(frozen=True)
class ScalingRow:
    X: int
    trial: int
    N: int
    E: int
    ratio: float

    def csv(self) -> str:
        return f"{self.X},{self.trial},{self.N},{self.E},{self.ratio!r}"


SCALING_HEADER = "X,trial,N,E,ratio"


def energy_ratio(E, N, C) -> float:
    """``E (log N)(log log N)^C / N^3``."""
    lN = math.log(N)
    return E * lN * math.log(lN) ** C / N**3


def trial_seed(seed, trial) -> int:
    """Seed of one trial; trials are independent streams of the base seed."""
    return int(np.random.SeedSequence([seed, trial]).generate_state(1, dtype=np.uint64)[0])


def energy_scaling(C, X_grid, trials, seed) -> list[ScalingRow]:
    """Sample, compute the FFT energy and its normalized ratio for each ``(X, trial)``.

    Trial ``t`` uses one seed for every ``X``, so its sets are nested along the grid.
    """
    if trials < 1:
        raise PreconditionError("trials must be >= 1")
    for X in X_grid:
        if X > MEMORY_GUARD_X:
            raise ResourceGuardError(f"X={X} exceeds the memory guard 2**26")
    cells = [(X, t) for X in X_grid for t in range(trials)]

    def run(cell):
        X, t = cell
        A = sample_set(X, RandomModelParams(C=C, seed=trial_seed(seed, t)))
        E = energy(A, "fft").E
        return ScalingRow(X, t, A.N, E, energy_ratio(E, A.N, C))

    return ordered_map(run, cells)


def scaling_summary(rows) -> dict:
    ratios = [r.ratio for r in rows]
    by_X = {}
    for r in rows:
        by_X.setdefault(r.X, []).append(r.ratio)
    medians = {X: statistics.median(v) for X, v in by_X.items()}
    return {
        "min": min(ratios),
        "median": statistics.median(ratios),
        "max": max(ratios),
        "median_by_X": medians,
        "median_drift": max(medians.values()) / min(medians.values()),
    }
