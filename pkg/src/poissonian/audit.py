"""One-shot suite that re-checks every stated invariant at modest size.

Each check is a pure function of ``(X, T, seed)`` returning ``(ok, detail)``;
``detail`` is a short deterministic string so the suite output can be diffed
byte for byte across runs and thread counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import diophantine as dio
from . import paircorr as pc
from . import randmodel as rm
from . import schmidt as sc
from . import setcore as sc0
from .paircorr import fmt_number


@dataclass(frozen=True)
class Check:
    id: str
    module: str
    statement: str
    run: Callable


@dataclass(frozen=True)
class CheckResult:
    id: str
    module: str
    statement: str
    ok: bool
    detail: str

    def csv(self) -> str:
        return f"{self.id},{self.module},{'PASS' if self.ok else 'FAIL'},{self.detail}"


AUDIT_HEADER = "id,module,status,detail"


def _rng(seed, tag):
    return np.random.default_rng(np.random.SeedSequence([seed, tag]))


def _random_set(rng, X_max, X_min=10):
    X = int(rng.integers(X_min, X_max + 1))
    dens = rng.uniform(0.05, 0.9)
    vals = np.nonzero(rng.random(X) < dens)[0] + 1
    if vals.size < 2:
        vals = np.array([1, X])
    return sc0.make_set(vals.tolist(), X)


def _random_alpha(rng, qmax=10**6):
    q = int(rng.integers(2, qmax))
    return Fraction(int(rng.integers(0, q)), q)


def _random_s(rng):
    return Fraction(int(rng.integers(1, 13)), int(rng.integers(1, 5)))


# ---------------------------------------------------------------------------
# setcore


def _energy_methods(X, T, seed):
    rng = _rng(seed, 1)
    bad = 0
    for _ in range(20):
        A = _random_set(rng, min(X, 500))
        if A.N > sc0.BRUTE_LIMIT:
            A = A.prefix(sc0.BRUTE_LIMIT)
        vals = {r.E for r in sc0.energy_all(A).values()}
        vals.add(sc0.energy(A, "fft", exact_transform=True).E)
        bad += len(vals) != 1
    return bad == 0, f"disagreements={bad}/20"


def _energy_identity(X, T, seed):
    rng = _rng(seed, 2)
    sets = [_random_set(rng, X) for _ in range(10)] + [sc0.gallery(k, X) for k in sc0.GALLERY_KINDS]
    bad = sum(
        sc0.energy(A, "sum-histogram").E != A.N**2 + 2 * sc0.diff_rep(A).sum_squares() for A in sets
    )
    return bad == 0, f"violations={bad}/{len(sets)}"


def _r_total(X, T, seed):
    rng = _rng(seed, 3)
    sets = [_random_set(rng, X) for _ in range(10)] + [sc0.gallery(k, X) for k in sc0.GALLERY_KINDS]
    bad = sum(sc0.diff_rep(A).total() != A.N * (A.N - 1) // 2 for A in sets)
    return bad == 0, f"violations={bad}/{len(sets)}"


def _interval_closed_form(X, T, seed):
    A = sc0.gallery("interval", X)
    rep = sc0.diff_rep(A)
    n = np.arange(1, X + 1)
    r_ok = np.array_equal(rep.as_dense()[1:], X - n)
    E = sc0.energy(A, "sum-histogram").E
    return r_ok and E == (2 * X**3 + X) // 3, f"E={E}"


def _energy_normalised(X, T, seed):
    rng = _rng(seed, 4)
    sets = [_random_set(rng, X) for _ in range(10)] + [sc0.gallery(k, X) for k in sc0.GALLERY_KINDS]
    worst = max(sc0.energy(A, "fft").E_tilde for A in sets)
    return worst <= 1, f"max_E_tilde={fmt_number(worst)}"


# ---------------------------------------------------------------------------
# paircorr


def _direct_vs_r(X, T, seed):
    rng = _rng(seed, 5)
    bad = 0
    for _ in range(50):
        A = _random_set(rng, X)
        al, s = _random_alpha(rng), _random_s(rng)
        bad += pc.pair_corr_direct(A, al, s).count != pc.pair_corr_via_r(sc0.diff_rep(A), al, s).count
    return bad == 0, f"mismatches={bad}/50"


def _monotone_s(X, T, seed):
    rng = _rng(seed, 6)
    bad = 0
    for _ in range(20):
        A = _random_set(rng, X)
        al = _random_alpha(rng)
        counts = [pc.pair_corr_direct(A, al, Fraction(k, 4)).count for k in range(1, 25)]
        bad += any(b < a for a, b in zip(counts, counts[1:]))
    return bad == 0, f"violations={bad}/20"


def _mean_F(X, T, seed):
    A = sc0.gallery("squares", max(X, 1000))
    cfg = sc.SchmidtConfig.for_set(A, T)
    cF, _ = sc.mc_counts(A, cfg, 2000, seed)
    m, _, se = sc._stats(cF, A.N)
    target = float(pc.mean_F_exact(A.N, 1))
    z = (m - target) / se
    return abs(z) <= 3, f"z={z:.4f}"


def _sandwich(X, T, seed):
    rng = _rng(seed, 7)
    bad = total = 0
    for kind in ("interval", "squares"):
        big = sc0.gallery(kind, 4 * X if kind == "interval" else 400 * X)
        j_max = 1
        while pc.sandwich_N(j_max + 1, 0.1) <= big.N:
            j_max += 1
        sched = pc.sandwich_schedule(big, 0.1, j_max)
        rows = list(sched.rows)
        for _ in range(10):
            i = int(rng.integers(0, len(rows) - 1))
            lo, hi = rows[i][2], rows[i + 1][2]
            if hi <= lo:
                continue
            Xs = int(rng.integers(lo, hi))
            chk = pc.check_sandwich(big, sched, _random_alpha(rng), _random_s(rng), Xs)
            bad += not chk.ok
            total += 1
    return bad == 0 and total > 0, f"violations={bad}/{total}"


def _degenerate(X, T, seed):
    rng = _rng(seed, 8)
    bad = 0
    for _ in range(20):
        A = _random_set(rng, X)
        s = Fraction(A.N, 2) + Fraction(int(rng.integers(0, 5)), 3)
        bad += pc.pair_corr_direct(A, _random_alpha(rng), s).count != A.N * (A.N - 1)
    return bad == 0, f"violations={bad}/20"


# ---------------------------------------------------------------------------
# schmidt


def _fstar_le_F(X, T, seed):
    rng = _rng(seed, 9)
    bad = 0
    for _ in range(100):
        A = _random_set(rng, min(X, 400))
        al, s = _random_alpha(rng, 10**4), _random_s(rng)
        Tv = int(rng.integers(2, 20))
        cfg = sc.SchmidtConfig(T=Tv, s=s, N=A.N, X=A.X)
        F = pc.pair_corr_via_r(sc0.diff_rep(A), al, s).count
        Fs = sc.f_star(A, al, cfg).count
        bad += not 0 <= Fs <= F
    return bad == 0, f"violations={bad}/100"


def _en_measure(X, T, seed):
    bad = 0
    for s in (Fraction(1, 2), Fraction(1), Fraction(3)):
        cfg = sc.SchmidtConfig(T=T, s=s, N=50, X=60)
        bad += sum(sc.en_arcs(n, cfg).measure != sc.en_measure_formula(n, cfg) for n in range(1, 61))
    return bad == 0, f"violations={bad}/180"


def _overlap_props(X, T, seed):
    bad = 0
    for n in range(1, 61):
        for m in range(1, 61):
            a = sc.overlap_count(n, m, T)
            g = math.gcd(m, n)
            bad += a != sc.overlap_count(m, n, T) or a > g or (a and max(m, n) // g > T)
    return bad == 0, f"violations={bad}/3600"


def _phi_agree(X, T, seed):
    bad = 0
    for Tv in (2, 5, 50):
        table = sc.phi_T_table(X, Tv)
        for n in range(1, X + 1):
            bad += table[n] != sc.phi_T_divisor(n, Tv) or (n <= 300 and table[n] != sc.phi_T_brute(n, Tv))
    return bad == 0, f"violations={bad}/{3 * X}"


def _overlap_agree(X, T, seed):
    bad = 0
    for Tv in (2, 10, 100):
        for n in range(1, 61):
            for m in range(1, 61):
                bad += sc.overlap_count(n, m, Tv) != sc.overlap_count_brute(n, m, Tv)
    return bad == 0, f"violations={bad}/10800"


def _overlap_bound(X, T, seed):
    rows = sc.overlap_sweep(40, [Fraction(1, 2), 1, 3], 1000, [2, T])
    bad = sum(lhs > rhs for _, lhs, rhs in rows)
    return bad == 0, f"violations={bad}/{len(rows)}"


def _fstar_mean(X, T, seed):
    A = sc0.gallery("squares", max(X, 1000))
    cfg = sc.SchmidtConfig.for_set(A, T)
    _, cS = sc.mc_counts(A, cfg, 2000, seed)
    m, _, se = sc._stats(cS, A.N)
    z = (m - float(sc.fstar_mean_exact(A, cfg))) / se
    return abs(z) <= 3, f"z={z:.4f}"


def _l1_mc(X, T, seed):
    A = sc0.gallery("squares", max(X, 1000))
    cfg = sc.SchmidtConfig.for_set(A, T)
    cF, cS = sc.mc_counts(A, cfg, 2000, seed)
    m, _, se = sc._stats([a - b for a, b in zip(cF, cS)], A.N)
    z = (m - float(sc.l1_distance_exact(A, cfg))) / se
    return abs(z) <= 3, f"z={z:.4f}"


def _phi_moments(X, T, seed):
    r1 = sc.phi_moment_audit(X, T, 1, exact=True).ratio
    r2 = sc.phi_moment_audit(X, T, 2, exact=True).ratio
    return r1 <= 2 and r2 <= 4, f"ratio1={r1:.6f} ratio2={r2:.6f}"


def _avg_overlap(X, T, seed):
    Xs = min(X, 2000)
    r = sc.avg_overlap_audit(Xs, T).ratio
    return r <= 2, f"X={Xs} ratio={r:.6f}"


def _variance_chain(X, T, seed):
    A = sc0.gallery("squares", max(X, 1000))
    vc = sc.variance_components(A, sc.SchmidtConfig.for_set(A, T))
    s1, s2, s3 = vc.chain
    ok = vc.S2 <= s1 * (1 + 1e-12) and s1 <= s2 * (1 + 1e-12) and s2 <= s3 * (1 + 1e-12)
    return ok, f"S2={vc.S2:.6e} steps={s1:.6e},{s2:.6e},{s3:.6e}"


# ---------------------------------------------------------------------------
# randmodel


def _psi_decreasing(X, T, seed):
    ok = True
    for C in (0, 1, 3):
        p = rm.psi_table(max(X, 10**5), C)
        ok &= bool(np.all(np.diff(p) <= 0))
    return ok, "C=0,1,3"


def _sample_mean(X, T, seed):
    Xs = max(X, 10**4)
    mean, var = rm.expected_size(Xs, 3)
    sizes = [rm.sample_set(Xs, rm.RandomModelParams(3, rm.trial_seed(seed, t))).N for t in range(50)]
    z = (sum(sizes) / 50 - mean) / math.sqrt(var / 50)
    return abs(z) <= 3, f"z={z:.4f}"


def _sample_energy(X, T, seed):
    bad = 0
    for t in range(5):
        A = rm.sample_set(max(X, 10**4), rm.RandomModelParams(1, rm.trial_seed(seed, t)))
        E = {sc0.energy(A, m).E for m in ("sum-histogram", "difference-identity", "fft")}
        bad += len(E) != 1
    return bad == 0, f"violations={bad}/5"


def _sample_deterministic(X, T, seed):
    p = rm.RandomModelParams(3, seed)
    A, B = rm.sample_set(X, p), rm.sample_set(X, p)
    nested = rm.sample_set(2 * X, p).truncate(X) == A
    return A == B and nested, f"N={A.N}"


# ---------------------------------------------------------------------------
# diophantine


def _alpha_pool(seed):
    rng = _rng(seed, 10)
    pool = [Fraction(1, 233), Fraction(13, 29), Fraction(1, 1000) + Fraction(1, 10**9)]
    pool += [_random_alpha(rng, 10**9) for _ in range(7)]
    return pool


def _convergent_identity(X, T, seed):
    bad = total = 0
    for al in _alpha_pool(seed):
        cf = dio.cf_expand(al)
        conv = cf.convergents
        last = len(conv) - 2
        for k, ((p, q), (_, q1)) in enumerate(zip(conv, conv[1:])):
            total += 1
            err, bound = abs(al - Fraction(p, q)), Fraction(1, q * q1)
            # a terminating expansion meets the bound with equality at its penultimate step
            bad += not (err == bound if k == last else err < bound)
            bad += math.gcd(p, q) != 1
        bad += Fraction(*conv[-1]) != al
    return bad == 0, f"violations={bad}/{total}"


def _witness_recheck(X, T, seed):
    bad = total = 0
    for al in _alpha_pool(seed):
        for w in dio.khintchine_witnesses(al, 1, 10**5):
            total += 1
            d = min((w.M * al) % 1, 1 - (w.M * al) % 1)
            bad += not (d * w.M * Fraction(math.log(w.M)) < 1 and d == w.dist)
    return bad == 0, f"violations={bad}/{total}"


def _demo_checks(X, T, seed):
    A = sc0.gallery("interval", max(X, 10**4))
    bad = total = 0
    for al in _alpha_pool(seed)[:3]:
        rep = dio.divergence_demo(A, al, 1, 1, 1, N_max=A.N)
        if rep.demo is None:
            continue
        d = rep.demo
        total += 1
        bad += d.lower > d.F
        bad += d.count != pc.pair_corr_direct(A.prefix(d.N), al, 1).count
    return bad == 0 and total > 0, f"violations={bad}/{total}"


def _cli_determinism(X, T, seed):
    from .cli import run_capture

    argv = ["corr", "--gallery", "squares", "--X", str(max(X, 1000)), "--alpha", "239/169", "--s", "1"]
    a, b = run_capture(argv), run_capture(argv)
    return a == b and a[0] == 0, f"bytes={len(a[1])}"


CHECKS = (
    Check("energy-methods-agree", "setcore", "all energy methods agree exactly", _energy_methods),
    Check("energy-identity", "setcore", "E = N^2 + 2 sum r(n)^2", _energy_identity),
    Check("r-total", "setcore", "sum r(n) = N(N-1)/2", _r_total),
    Check("interval-closed-form", "setcore", "interval: r(n) = X - n, E = (2X^3 + X)/3", _interval_closed_form),
    Check("energy-normalised", "setcore", "E/N^3 <= 1", _energy_normalised),
    Check("direct-equals-via-r", "paircorr", "direct pair count equals r-sum count", _direct_vs_r),
    Check("monotone-in-s", "paircorr", "F nondecreasing in s", _monotone_s),
    Check("mean-F", "paircorr", "Monte Carlo mean of F within 3 SE of 2s(1-1/N)", _mean_F),
    Check("sandwich", "paircorr", "subsequence sandwich inequalities", _sandwich),
    Check("degenerate-window", "paircorr", "s/N >= 1/2 gives F = N - 1", _degenerate),
    Check("fstar-le-F", "schmidt", "0 <= F* <= F pointwise", _fstar_le_F),
    Check("en-measure", "schmidt", "mu(E_n) = (2s/N) Phi(n)/n when N >= 2s", _en_measure),
    Check("overlap-props", "schmidt", "A symmetric, A <= gcd, A > 0 forces max/gcd <= T", _overlap_props),
    Check("phi-agree", "schmidt", "table, divisor and brute Phi agree", _phi_agree),
    Check("overlap-agree", "schmidt", "closed-form and brute overlap counts agree", _overlap_agree),
    Check("overlap-bound", "schmidt", "arc intersection <= 4s^2/N^2 + (2s/N) A/n", _overlap_bound),
    Check("fstar-mean", "schmidt", "closed-form mean of F* within 3 SE of Monte Carlo", _fstar_mean),
    Check("l1-closed-form", "schmidt", "closed-form L1 distance within 3 SE of Monte Carlo", _l1_mc),
    Check("phi-moments", "schmidt", "truncated-totient moment ratios <= 2 and <= 4", _phi_moments),
    Check("avg-overlap", "schmidt", "averaged overlap sum / (X log T) <= 2", _avg_overlap),
    Check("variance-chain", "schmidt", "Cauchy-Schwarz chain bounds S2 step by step", _variance_chain),
    Check("psi-decreasing", "randmodel", "psi weakly decreasing", _psi_decreasing),
    Check("sample-size-mean", "randmodel", "mean sampled N within 3 SE of sum psi", _sample_mean),
    Check("sample-energy", "randmodel", "energy identity on sampled sets", _sample_energy),
    Check("sample-deterministic", "randmodel", "same (X, C, seed) gives same set; nested in X", _sample_deterministic),
    Check("convergent-identity", "diophantine", "|alpha - p/q| < 1/(q q')", _convergent_identity),
    Check("witness-recheck", "diophantine", "every witness re-satisfies its inequality", _witness_recheck),
    Check("demo-consistency", "diophantine", "lower sum <= F and F matches direct count", _demo_checks),
    Check("cli-determinism", "cli", "same flags give byte-identical output", _cli_determinism),
)


def traceability() -> list[str]:
    return [f"{c.id}: [{c.module}] {c.statement}" for c in CHECKS]


def run_all(X=1000, T=8, seed=7) -> list[CheckResult]:
    out = []
    for c in CHECKS:
        ok, detail = c.run(X, T, seed)
        out.append(CheckResult(c.id, c.module, c.statement, bool(ok), detail))
    return out
