"""Command-line front end.

Every subcommand writes one machine-readable result (CSV or JSON) preceded by
a provenance block holding the version, seed and the full flag set.  Exit
codes: 0 ok, 1 bad flags, 2 precondition violated, 3 resource guard tripped
(retry with ``--force``), 4 an audit assertion failed.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from contextlib import redirect_stderr, redirect_stdout
from fractions import Fraction
from pathlib import Path

from . import __version__
from . import diophantine as dio
from . import paircorr as pc
from . import randmodel as rm
from . import schmidt as sc
from . import setcore as sc0
from .errors import PreconditionError, ResourceGuardError
from .paircorr import AlphaValue, fmt_number

EXIT_OK, EXIT_FLAGS, EXIT_PRECONDITION, EXIT_GUARD, EXIT_AUDIT = 0, 1, 2, 3, 4


class FlagError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise FlagError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# flag value parsers


def _fraction(text) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _alpha(text) -> AlphaValue:
    try:
        return AlphaValue.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad alpha {text!r}; use p/q or a decimal") from exc


def _int_token(tok) -> int:
    if "^" in tok:
        b, e = tok.split("^", 1)
        return int(b) ** int(e)
    if "e" in tok.lower():
        return int(float(tok))
    return int(tok)


def _int_list(text) -> list[int]:
    """``1000,2000``, ``2^10,2^12`` or ``2^16..22`` (powers 2^16 through 2^22)."""
    out = []
    try:
        for tok in text.split(","):
            tok = tok.strip()
            if ".." in tok:
                head, hi = tok.split("..", 1)
                b, lo = head.split("^", 1)
                out.extend(int(b) ** e for e in range(int(lo), int(hi) + 1))
            else:
                out.append(_int_token(tok))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from exc
    return out


def _pos_int(text) -> int:
    try:
        v = _int_token(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return v


def _frac_list(text) -> list[Fraction]:
    return [_fraction(t) for t in text.split(",")]


# ---------------------------------------------------------------------------
# argument groups


def _add_source(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--gallery", choices=sc0.GALLERY_KINDS, help="standard example set")
    g.add_argument("--set-file", type=Path, help="set file with a '# X=<X> N=<N>' header")
    g.add_argument("--random-C", type=float, metavar="C", help="sample from the random model with exponent C")
    p.add_argument("--X", type=_pos_int, help="truncation point")
    p.add_argument("--k", type=int, default=2, help="exponent for kth-powers")
    p.add_argument("--base", type=float, default=2.0, help="base for lacunary")


def _add_common(p, seed=True):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", type=Path, help="output file (default stdout)")
    if seed:
        p.add_argument("--seed", type=int, default=0)


def _load_source(args) -> sc0.IntegerSet:
    if args.set_file is not None:
        A = sc0.read_set(args.set_file)
        return A if args.X is None else A.truncate(args.X)
    if args.X is None:
        raise PreconditionError("--X is required with --gallery and --random-C")
    if args.gallery is not None:
        return sc0.gallery(args.gallery, args.X, k=args.k, base=args.base)
    return rm.sample_set(args.X, rm.RandomModelParams(C=args.random_C, seed=args.seed))


def _require_rational(alpha: AlphaValue, what):
    if not alpha.is_rational:
        raise PreconditionError(f"{what} needs an exact alpha (p/q); float alpha refused")


# ---------------------------------------------------------------------------
# output


def _flag_repr(v):
    if isinstance(v, (list, tuple)):
        return ",".join(_flag_repr(x) for x in v)
    if isinstance(v, (Fraction, AlphaValue)):
        return str(v) if isinstance(v, AlphaValue) else fmt_number(v)
    if isinstance(v, Path):
        return str(v)
    return str(v)


def _provenance(args) -> dict:
    flags = {
        k.replace("_", "-"): _flag_repr(v)
        for k, v in sorted(vars(args).items())
        if k not in ("handler", "out", "command") and v is not None
    }
    return {"tool": "poissonian", "version": __version__, "command": args.command,
            "seed": getattr(args, "seed", None), "flags": flags}


def _jsonable(v):
    if isinstance(v, Fraction):
        return fmt_number(v)
    if isinstance(v, AlphaValue):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if hasattr(v, "item"):
        return v.item()
    return v


def _emit(args, header, rows, payload=None):
    """Write CSV (``header`` + ``rows``) or JSON (``payload`` or the rows as dicts)."""
    prov = _provenance(args)
    if args.format == "json":
        if payload is None:
            cols = header.split(",")
            payload = [dict(zip(cols, r.split(","))) for r in rows]
        text = json.dumps({"provenance": prov, "result": _jsonable(payload)}, indent=2, sort_keys=True) + "\n"
    else:
        lines = [f"# tool=poissonian version={__version__} command={prov['command']} seed={prov['seed']}"]
        lines.append("# flags " + " ".join(f"--{k}={v}" for k, v in prov["flags"].items()))
        lines.append(header)
        lines.extend(rows)
        text = "\n".join(lines) + "\n"
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text, encoding="utf-8", newline="\n")


def _audit_row(a: sc.BoundAudit, limit) -> str:
    params = ";".join(f"{k}={_flag_repr(v)}" for k, v in a.params.items())
    ok = a.ratio <= limit
    return f"{a.name},{params},{fmt_number(a.lhs)},{fmt_number(a.rhs_shape)},{a.ratio!r},{limit},{'PASS' if ok else 'FAIL'}"


AUDIT_HEADER = "name,params,lhs,rhs_shape,ratio,limit,status"


# ---------------------------------------------------------------------------
# subcommands


def cmd_energy(args):
    A = _load_source(args)
    if args.method == "all":
        reports = list(sc0.energy_all(A).values())
    else:
        reports = [sc0.energy(A, args.method, exact_transform=args.exact_transform)]
    rows = [f"{r.method},{A.X},{A.N},{r.E},{fmt_number(r.E_tilde)}" for r in reports]
    if len({r.E for r in reports}) != 1:
        raise AssertionError("energy methods disagree")
    _emit(args, "method,X,N,E,E_tilde", rows)


def cmd_corr(args):
    A = _load_source(args)
    cv = pc.pair_corr_direct(A, args.alpha, args.s)
    if args.alpha.is_rational:
        check = pc.pair_corr_via_r(sc0.diff_rep(A), args.alpha, args.s)
        if check.count != cv.count:
            raise AssertionError("direct and r-sum pair counts disagree")
        F = cv.F
    else:
        F = cv.count / cv.N
    target = 2 * args.s if args.alpha.is_rational else 2 * float(args.s)
    row = pc.ScanRow(A.X, A.N, cv.count, F, abs(F - target))
    _emit(args, pc.SCAN_HEADER, [row.csv()])


def cmd_scan(args):
    if args.gallery is not None:
        source = args.gallery
        kw = {"k": args.k, "base": args.base}
    else:
        args.X = args.X or max(args.X_grid)
        source = _load_source(args)
        kw = {}
    rows = pc.corr_scan(source, args.alpha, args.s, args.X_grid, **kw)
    _emit(args, pc.SCAN_HEADER, [r.csv() for r in rows])


def cmd_fstar(args):
    A = _load_source(args)
    cfg = sc.SchmidtConfig.for_set(A, args.T, args.s)
    rep = sc0.diff_rep(A)
    F = pc.pair_corr_via_r(rep, args.alpha, args.s)
    Fs = sc.f_star(A, args.alpha, cfg, rep)
    fmt = (lambda c: fmt_number(c.F)) if args.alpha.is_rational else (lambda c: repr(c.count / c.N))
    _emit(args, "X,N,T,s,alpha,F,Fstar", [f"{A.X},{A.N},{fmt_number(args.T)},{fmt_number(args.s)},{args.alpha},{fmt(F)},{fmt(Fs)}"])


def cmd_audit_phi(args):
    rows, ok = [], True
    for X in args.X_grid:
        for T in args.T_grid:
            for order, limit in ((1, 2), (2, 4)):
                a = sc.phi_moment_audit(X, T, order, exact=args.exact)
                ok &= a.ratio <= limit
                rows.append(_audit_row(a, limit))
    _emit(args, AUDIT_HEADER, rows)
    return EXIT_OK if ok else EXIT_AUDIT


def cmd_audit_overlap(args):
    rows = sc.overlap_sweep(args.n_max, args.s_values, args.N, args.T_values)
    groups = {}
    for (n, m, s, T), lhs, rhs in rows:
        g = groups.setdefault((s, T), [0, 0, 0.0])
        g[0] += 1
        g[1] += lhs > rhs
        g[2] = max(g[2], float(lhs / rhs))
    out = [
        f"{args.n_max},{fmt_number(s)},{fmt_number(T)},{args.N},{c},{v},{r!r},{'PASS' if v == 0 else 'FAIL'}"
        for (s, T), (c, v, r) in groups.items()
    ]
    _emit(args, "n_max,s,T,N,pairs,violations,max_ratio,status", out)
    return EXIT_OK if all(v == 0 for _, v, _ in groups.values()) else EXIT_AUDIT


def _slope(xs, ys):
    mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
    return sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sum((x - mx) ** 2 for x in xs)


def cmd_audit_avg_overlap(args):
    rows, ok = [], True
    for T in args.T_values:
        sums = []
        for X in args.X_grid:
            a = sc.avg_overlap_audit(X, T, force=args.force)
            sums.append(float(a.lhs))
            ok &= a.ratio <= 2
            rows.append(f"{T},{X},{fmt_number(a.lhs)},{float(a.lhs) / X!r},{a.ratio!r},,,{'PASS' if a.ratio <= 2 else 'FAIL'}")
        if len(args.X_grid) >= 2:
            k = _slope(args.X_grid, sums)
            lo, hi = 0.5 * math.log(T), 2 * float(sc.harmonic(int(T)))
            good = lo <= k <= hi
            ok &= good
            rows.append(f"{T},slope,,,,{k!r},{lo!r}..{hi!r},{'PASS' if good else 'FAIL'}")
    _emit(args, "T,X,sum,sum_over_X,ratio,slope,band,status", rows)
    return EXIT_OK if ok else EXIT_AUDIT


def cmd_audit_l1(args):
    A = _load_source(args)
    cfg = sc.SchmidtConfig.for_set(A, args.T, args.s)
    a = sc.l1_audit(A, cfg)
    row = f"{A.X},{A.N},{fmt_number(args.T)},{fmt_number(args.s)},{fmt_number(a.lhs)},{a.rhs_shape!r},{a.ratio!r}"
    _emit(args, "X,N,T,s,l1_exact,bound_shape,ratio", [row])


def cmd_audit_variance(args):
    A = _load_source(args)
    cfg = sc.SchmidtConfig.for_set(A, args.T, args.s)
    rep = sc.variance_mc(A, cfg, args.samples, args.seed, C=args.C)
    comps = sc.variance_components(A, cfg, force=args.force)
    zF = (rep.mean_F - float(rep.expected_mean_F)) / rep.se_F
    zS = None if rep.expected_mean_Fstar is None else (rep.mean_Fstar - float(rep.expected_mean_Fstar)) / rep.se_Fstar
    zG = None if rep.l1_exact is None else (rep.mean_gap - float(rep.l1_exact)) / rep.se_gap
    payload = {
        "X": A.X, "N": A.N, "T": args.T, "s": args.s, "samples": rep.samples,
        "mean_F": rep.mean_F, "se_F": rep.se_F, "expected_mean_F": rep.expected_mean_F, "z_F": zF,
        "mean_Fstar": rep.mean_Fstar, "var_Fstar": rep.var_Fstar, "se_Fstar": rep.se_Fstar,
        "expected_mean_Fstar": rep.expected_mean_Fstar, "z_Fstar": zS,
        "mean_gap": rep.mean_gap, "se_gap": rep.se_gap, "l1_exact": rep.l1_exact, "z_gap": zG,
        "var_F": rep.var_F,
        "variance_shape": rep.prop41_shape, "variance_ratio": rep.prop41_ratio,
        "random_model_shape": rep.prop54_shape, "random_model_ratio": rep.prop54_ratio,
        "S1": comps.S1, "S2": comps.S2, "S3": comps.S3, "S2_chain": list(comps.chain),
    }
    cols = sorted(payload)
    row = ",".join(_flag_repr(_jsonable(payload[c])) if payload[c] is not None else "" for c in cols)
    _emit(args, ",".join(cols), [row], payload)
    zs = [z for z in (zF, zS, zG) if z is not None]
    return EXIT_OK if all(abs(z) <= 3 for z in zs) else EXIT_AUDIT


def cmd_random_sim(args):
    A = rm.sample_set(args.X, rm.RandomModelParams(C=args.C, seed=args.seed))
    if args.format == "json":
        E = sc0.energy(A, "fft").E
        _emit(args, "", [], {"X": A.X, "N": A.N, "C": args.C, "E": str(E), "elements": A.elements.tolist()})
        return
    prov = _provenance(args)
    text = f"# tool=poissonian version={__version__} command=random-sim seed={args.seed}\n" + \
        "# flags " + " ".join(f"--{k}={v}" for k, v in prov["flags"].items()) + "\n" + sc0.dumps_set(A)
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text, encoding="utf-8", newline="\n")


def cmd_concentration(args):
    rows = []
    ok1 = ok2 = 0
    for i in range(args.seeds):
        seed = args.seed + i
        A = rm.sample_set(args.X, rm.RandomModelParams(C=args.C, seed=seed))
        r = rm.concentration_check(A, args.X, args.C, args.eps)
        ok1 += r.property1_ok
        ok2 += r.property2_ok
        rows.append(
            f"{seed},{r.N},{r.expected_N!r},{r.ratio1!r},{int(r.property1_ok)},{r.ratio1_literal!r},"
            f"{r.max_r},{r.expected_r_bound!r},{r.ratio2!r},{int(r.property2_ok)},{r.ratio2_literal!r},"
            f"{r.min_r_low},{r.lower_r_bound!r},{int(r.lower_ok)}"
        )
    _emit(
        args,
        "seed,N,sum_psi,ratio1,prop1,ratio1_asymptotic,max_r,sum_psi_sq,ratio2,prop2,ratio2_asymptotic,min_r_low,delta_N_over_8,lower_ok",
        rows,
    )
    need = math.ceil(0.9 * args.seeds)
    return EXIT_OK if ok1 >= need and ok2 >= need else EXIT_AUDIT


def cmd_energy_scaling(args):
    rows = rm.energy_scaling(args.C, args.X_grid, args.trials, args.seed)
    _emit(args, rm.SCALING_HEADER, [r.csv() for r in rows])


def cmd_cf(args):
    cf = dio.cf_expand(args.alpha, args.depth)
    payload = {
        "alpha": args.alpha,
        "partial_quotients": list(cf.partial_quotients),
        "convergents": [f"{p}/{q}" for p, q in cf.convergents],
        "exact": cf.exact,
        "truncated": cf.truncated,
    }
    rows = [f"{k},{a},{p}/{q}" for k, (a, (p, q)) in enumerate(zip(cf.partial_quotients, cf.convergents))]
    _emit(args, "k,a_k,p_k/q_k", rows, payload)


def cmd_witnesses(args):
    ws = dio.khintchine_witnesses(args.alpha, args.depth, args.M_max)
    rows = [f"{w.M},{fmt_number(w.dist)},{w.L_value!r}" for w in ws]
    _emit(args, "M,dist,L", rows, {"alpha": args.alpha, "depth": args.depth, "witnesses": [w.to_json() for w in ws]})


def cmd_divergence(args):
    if args.X is None:
        args.X = args.N_max
    A = _load_source(args)
    rep = dio.divergence_demo(A, args.alpha, args.s, args.C, args.depth, N_max=args.N_max)
    payload = rep.to_json()
    d = payload["demo"]
    if d is None:
        rows = [f"{payload['alpha']},{args.depth},,,,,,,,{'|'.join(payload['notes'])}"]
    else:
        rows = [
            f"{payload['alpha']},{args.depth},{d['M']},{d['N']},{d['K']},{d['lower']},{d['F']},{d['threshold']},"
            f"{int(d['passed'])},{'|'.join(payload['notes'])}"
        ]
    _emit(args, "alpha,depth,M,N,K,lower,F,threshold,passed,notes", rows, payload)


def cmd_audit_all(args):
    from .audit import AUDIT_HEADER as HEAD, run_all, traceability

    results = run_all(args.X, args.T, args.seed)
    rows = [r.csv() for r in results]
    payload = {"traceability": traceability(), "checks": [
        {"id": r.id, "module": r.module, "statement": r.statement, "status": "PASS" if r.ok else "FAIL", "detail": r.detail}
        for r in results
    ]}
    if args.format == "csv":
        rows = [f"# covers {t}" for t in traceability()] + [HEAD] + rows
        _emit(args, "# traceability", rows)
    else:
        _emit(args, HEAD, rows, payload)
    return EXIT_OK if all(r.ok for r in results) else EXIT_AUDIT


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="poissonian", description="Pair correlations, additive energy and gcd-restricted arc systems.")
    p.add_argument("--version", action="version", version=f"poissonian {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, handler, help_):
        sp = sub.add_parser(name, help=help_, description=help_)
        sp.set_defaults(handler=handler)
        return sp

    sp = add("energy", cmd_energy, "additive energy of a set")
    _add_source(sp)
    sp.add_argument("--method", choices=sc0.ENERGY_METHODS + ("all",), default="all")
    sp.add_argument("--exact-transform", action="store_true", help="use the number-theoretic transform")
    _add_common(sp)

    sp = add("corr", cmd_corr, "pair correlation F at one X")
    _add_source(sp)
    sp.add_argument("--alpha", type=_alpha, required=True)
    sp.add_argument("--s", type=_fraction, default=Fraction(1))
    _add_common(sp)

    sp = add("scan", cmd_scan, "F along an X grid")
    _add_source(sp)
    sp.add_argument("--alpha", type=_alpha, required=True)
    sp.add_argument("--s", type=_fraction, default=Fraction(1))
    sp.add_argument("--X-grid", type=_int_list, required=True)
    _add_common(sp)

    sp = add("fstar", cmd_fstar, "F and the gcd-restricted F*")
    _add_source(sp)
    sp.add_argument("--alpha", type=_alpha, required=True)
    sp.add_argument("--s", type=_fraction, default=Fraction(1))
    sp.add_argument("--T", type=_fraction, required=True)
    _add_common(sp)

    sp = add("audit-phi", cmd_audit_phi, "truncated-totient moment bounds")
    sp.add_argument("--X-grid", type=_int_list, default=[10**3, 10**4, 10**5])
    sp.add_argument("--T-grid", type=_int_list, default=[2, 8, 32])
    sp.add_argument("--exact", action="store_true", help="exact rational sums instead of fsum")
    _add_common(sp)

    sp = add("audit-overlap", cmd_audit_overlap, "arc-intersection bound over all m <= n <= n_max")
    sp.add_argument("--n-max", type=_pos_int, default=200)
    sp.add_argument("--s-values", type=_frac_list, default=[Fraction(1, 2), Fraction(1), Fraction(3)])
    sp.add_argument("--N", type=_pos_int, default=1000)
    sp.add_argument("--T-values", type=_int_list, default=[2, 10])
    _add_common(sp)

    sp = add("audit-avg-overlap", cmd_audit_avg_overlap, "averaged overlap sum against X log T")
    sp.add_argument("--X-grid", type=_int_list, default=[500, 1000, 2000, 4000])
    sp.add_argument("--T-values", type=_int_list, default=[2, 8])
    sp.add_argument("--force", action="store_true")
    _add_common(sp)

    sp = add("audit-l1", cmd_audit_l1, "exact L1 distance between F and F*")
    _add_source(sp)
    sp.add_argument("--T", type=_fraction, required=True)
    sp.add_argument("--s", type=_fraction, default=Fraction(1))
    _add_common(sp)

    sp = add("audit-variance", cmd_audit_variance, "Monte Carlo moments of F and F* with variance components")
    _add_source(sp)
    sp.add_argument("--T", type=_fraction, required=True)
    sp.add_argument("--s", type=_fraction, default=Fraction(1))
    sp.add_argument("--samples", type=_pos_int, default=10**4)
    sp.add_argument("--C", type=float, help="random-model exponent for the second variance shape")
    sp.add_argument("--force", action="store_true")
    _add_common(sp)

    sp = add("random-sim", cmd_random_sim, "sample a set from the random model")
    sp.add_argument("--C", type=float, required=True)
    sp.add_argument("--X", type=_pos_int, required=True)
    _add_common(sp)

    sp = add("concentration", cmd_concentration, "size properties of sampled sets over many seeds")
    sp.add_argument("--C", type=float, default=3.0)
    sp.add_argument("--X", type=_pos_int, default=10**6)
    sp.add_argument("--eps", type=float, default=0.5)
    sp.add_argument("--seeds", type=_pos_int, default=50)
    _add_common(sp)

    sp = add("energy-scaling", cmd_energy_scaling, "normalised energy of sampled sets along an X grid")
    sp.add_argument("--C", type=float, default=3.0)
    sp.add_argument("--X-grid", type=_int_list, default=[2**k for k in range(16, 23)])
    sp.add_argument("--trials", type=_pos_int, default=5)
    _add_common(sp)

    sp = add("cf", cmd_cf, "continued fraction expansion")
    sp.add_argument("--alpha", type=_alpha, required=True)
    sp.add_argument("--depth", type=_pos_int)
    _add_common(sp, seed=False)

    sp = add("witnesses", cmd_witnesses, "integers M with ||M alpha|| < 1/(M L(M))")
    sp.add_argument("--alpha", type=_alpha, required=True)
    sp.add_argument("--depth", type=int, default=1)
    sp.add_argument("--M-max", type=_pos_int, default=10**5)
    _add_common(sp, seed=False)

    sp = add("divergence", cmd_divergence, "search for a spike F(N) > 3s driven by witnesses")
    _add_source(sp, required=False)
    sp.add_argument("--alpha", type=_alpha, required=True)
    sp.add_argument("--s", type=_fraction, default=Fraction(1))
    sp.add_argument("--C", type=float, default=1.0)
    sp.add_argument("--depth", type=int, default=1)
    sp.add_argument("--N-max", type=_pos_int, default=10**5)
    _add_common(sp)
    sp.set_defaults(format="json")

    sp = add("audit-all", cmd_audit_all, "run every invariant check and print a traceability list")
    sp.add_argument("--X", type=_pos_int, default=1000)
    sp.add_argument("--T", type=_pos_int, default=8)
    _add_common(sp)
    sp.set_defaults(seed=7)
    return p


def _post_validate(args):
    audit_alpha = {"fstar"}
    if args.command in audit_alpha:
        _require_rational(args.alpha, args.command)
    if args.command == "divergence" and args.gallery is None and args.set_file is None and args.random_C is None:
        args.gallery = "interval"
    if args.command == "audit-all" and args.T < 2:
        raise PreconditionError("T must be >= 2")


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except FlagError as exc:
        print(exc, file=sys.stderr)
        return EXIT_FLAGS
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        _post_validate(args)
        code = args.handler(args)
    except (PreconditionError, ValueError, ZeroDivisionError, OverflowError) as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ResourceGuardError as exc:
        print(f"resource guard: {exc} (rerun with --force)", file=sys.stderr)
        return EXIT_GUARD
    except AssertionError as exc:
        print(f"audit failed: {exc}", file=sys.stderr)
        return EXIT_AUDIT
    return EXIT_OK if code is None else code


def run_capture(argv) -> tuple[int, str, str]:
    """Run ``main`` with stdout and stderr captured; for tests and self-checks."""
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


if __name__ == "__main__":
    sys.exit(main())
