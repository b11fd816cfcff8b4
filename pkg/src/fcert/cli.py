"""Command-line entry point ``fcert``.

Exit codes: 0 certified or success, 1 failed, 2 not reached, 64 usage error.
Reports go to ``--out`` (default ``fc-reports``); the ``FC_OUT`` environment
variable takes precedence.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import math
import os
import random
import sys
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Callable, Optional, Sequence

from . import __version__, rint
from .certify import (
    CERTIFIED_VERDICT,
    FAILED,
    GAMMA_BOX,
    GAMMA_HI,
    GAMMA_LO,
    GAMMA_SWEEP,
    NOT_REACHED,
    ClaimReport,
    assemble_assumption_report,
    certify_gamma_bounds,
    certify_hessian,
    certify_initial_interval,
    certify_sweep,
    parse_gamma,
)
from .functional import ManifestError, bundled_manifest, read_manifest
from .gaussfn import CERTIFIED, FAST

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_NOT_REACHED = 2
EXIT_USAGE = 64

_EXIT = {CERTIFIED_VERDICT: EXIT_OK, FAILED: EXIT_FAILED, NOT_REACHED: EXIT_NOT_REACHED}


class UsageError(Exception):
    """Bad command-line input."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with status 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    """Resolved options shared by every subcommand."""

    command: str
    gamma: Optional[str]
    mode: str
    manifest_path: Optional[str]
    parallelism: int
    seed: Optional[int]
    output_dir: str
    refine: int = 0


def _config(ns: argparse.Namespace) -> RunConfig:
    out = os.environ.get("FC_OUT") or ns.out
    par = getattr(ns, "parallelism", 1)
    if par < 1:
        raise UsageError("--parallelism must be at least 1")
    refine = getattr(ns, "refine", 0)
    if not 0 <= refine <= 4:
        raise UsageError("--refine must lie in 0..4")
    gamma = getattr(ns, "gamma", None)
    if gamma is not None:
        try:
            parse_gamma(gamma)
        except (ValueError, ArithmeticError) as exc:
            raise UsageError(f"bad --gamma {gamma!r}: {exc}") from None
    return RunConfig(
        ns.command,
        gamma,
        getattr(ns, "mode", CERTIFIED),
        getattr(ns, "manifest", None),
        par,
        getattr(ns, "seed", None),
        out,
        refine,
    )


def _emit(rep: ClaimReport, cfg: RunConfig) -> int:
    path = rep.write(cfg.output_dir)
    extra = f", worst {rep.worst_segment}" if rep.worst_segment else ""
    seg = f", {rep.segments_checked} segments" if rep.claim_id in ("claim-b2", "claim-b3") else ""
    print(f"{rep.claim_id}: {rep.verdict}{seg}{extra} ({rep.wall_seconds:.1f} s) -> {path}")
    return _EXIT[rep.verdict]


def _plans(cfg: RunConfig, default: str):
    spec = cfg.manifest_path or "bundled"
    try:
        if spec == "bundled":
            return bundled_manifest(default)
        if spec == "smoke":
            return bundled_manifest(f"{default}-smoke")
        return read_manifest(spec)
    except (OSError, ManifestError, KeyError) as exc:
        raise UsageError(f"cannot load manifest {spec!r}: {exc}") from None


# ---------------------------------------------------------------------------
# claim commands


def cmd_gamma_bounds(cfg: RunConfig) -> int:
    lo, hi = GAMMA_LO, GAMMA_HI
    if cfg.gamma:
        if "," not in cfg.gamma:
            raise UsageError("gamma-bounds takes --gamma LO,HI")
        lo, hi = (s.strip() for s in cfg.gamma.split(",", 1))
    return _emit(certify_gamma_bounds(lo, hi, cfg.mode), cfg)


def cmd_claim_b1(cfg: RunConfig) -> int:
    return _emit(certify_initial_interval(cfg.gamma or GAMMA_BOX, cfg.mode), cfg)


def _sweep(cfg: RunConfig, name: str, claim_id: str) -> int:
    plans = _plans(cfg, name)
    rep = certify_sweep(plans, cfg.gamma or GAMMA_SWEEP, cfg.parallelism, cfg.mode, cfg.refine, claim_id)
    return _emit(rep, cfg)


def cmd_claim_b2(cfg: RunConfig) -> int:
    return _sweep(cfg, "b2", "claim-b2")


def cmd_claim_b3(cfg: RunConfig) -> int:
    return _sweep(cfg, "b3", "claim-b3")


def cmd_claim_b4(cfg: RunConfig) -> int:
    return _emit(certify_hessian(cfg.gamma or GAMMA_BOX, mode=cfg.mode), cfg)


def cmd_assumption(cfg: RunConfig) -> int:
    box = cfg.gamma or GAMMA_BOX
    sweep_gamma = box.split(",")[0].strip()
    reports = [
        certify_gamma_bounds(mode=cfg.mode),
        certify_initial_interval(box, cfg.mode),
        certify_sweep(_plans(cfg, "b2"), sweep_gamma, cfg.parallelism, cfg.mode, cfg.refine, "claim-b2"),
        certify_sweep(_plans(cfg, "b3"), sweep_gamma, cfg.parallelism, cfg.mode, cfg.refine, "claim-b3"),
        certify_hessian(box, mode=cfg.mode),
    ]
    for r in reports:
        _emit(r, cfg)
    av = assemble_assumption_report(reports)
    rep = av.to_claim_report()
    rep.mode = cfg.mode
    rep.wall_seconds = sum(r.wall_seconds for r in reports)
    return _emit(rep, cfg)


# ---------------------------------------------------------------------------
# oracle and simulation commands


def _stamp() -> str:
    return _dt.datetime.now(_dt.timezone.utc).strftime("%Y%m%dT%H%M%S%fZ")


def cmd_oracle_binomial(cfg: RunConfig, ns: argparse.Namespace) -> int:
    from .binom_oracle import first_moment_tail_check, second_moment_joint_check, write_rows

    rng = random.Random(cfg.seed if cfg.seed is not None else 0)
    ns_list = [int(x) for x in ns.n.split(",")]
    if any(n % 100 for n in ns_list) or any(math.isqrt(n) ** 2 != n for n in ns_list):
        raise UsageError("--n values must be perfect squares divisible by 100")
    rows = []
    ok = True
    for _ in range(ns.sets):
        if ns.check == "first-moment":
            a1, a2 = rng.uniform(-1, 1), rng.uniform(-1, 1)
            kap = rng.randint(-5, 5)
            errs = []
            for n in ns_list:
                k = kap * math.isqrt(n) // 10
                ex, ap, err = first_moment_tail_check(n, a1, a2, k)
                errs.append(err)
                rows.append({"n": n, "params": f"a1={a1:.6f};a2={a2:.6f};k={k}", "exact": f"{ex:.25e}", "approx": repr(ap), "err": repr(err)})
            ratios = [errs[i] / errs[i + 1] for i in range(len(errs) - 1) if errs[i + 1] > 0]
            ok &= all(2.5 <= r <= 6 for r in ratios) and len(ratios) == len(errs) - 1
        else:
            a = [rng.uniform(-0.5, 0.5) for _ in range(4)]
            beta = Fraction(rng.choice([1, 2, 3]), 4)
            gam = rng.choice([0, 1, 2])
            errs = []
            for n in ns_list:
                G = gam * math.isqrt(n) // 10
                ex, gv, err = second_moment_joint_check(n, beta, a, G)
                errs.append(err)
                rows.append({"n": n, "params": f"beta={beta};a={','.join(f'{x:.6f}' for x in a)};Gamma={G}", "exact": f"{ex:.25e}", "approx": repr(gv), "err": repr(err)})
            ok &= errs[-1] <= errs[0]
    os.makedirs(cfg.output_dir, exist_ok=True)
    path = write_rows(os.path.join(cfg.output_dir, f"binomial-{ns.check}-{_stamp()}.csv"), rows)
    print(f"oracle-binomial {ns.check}: {'success' if ok else 'failed'} ({ns.sets} parameter sets) -> {path}")
    return EXIT_OK if ok else EXIT_FAILED


def cmd_simulate(cfg: RunConfig, ns: argparse.Namespace) -> int:
    from .graphsim import (
        GAMMA_CRIT_OVER_SQRT2,
        count_friendly_exhaustive,
        empirical_first_moment,
        local_search_max_margin,
        sample_gnp_half,
        write_graphs,
        write_results_csv,
    )

    seed = cfg.seed if cfg.seed is not None else 0
    os.makedirs(cfg.output_dir, exist_ok=True)
    base = os.path.join(cfg.output_dir, f"simulate-{ns.sim_mode}-{_stamp()}")
    if ns.sim_mode == "exhaustive":
        mean, _ = empirical_first_moment(ns.n2, ns.H, "exhaustive")
        path = write_results_csv(base + ".csv", [{"seed": "", "n2": ns.n2, "H": ns.H, "X_H": str(mean)}])
        print(f"simulate exhaustive: E X_{ns.H} = {mean} = {float(mean):.12g} -> {path}")
    elif ns.sim_mode == "monte-carlo":
        mean, se = empirical_first_moment(ns.n2, ns.H, "monte_carlo", ns.samples, seed)
        path = write_results_csv(base + ".csv", [{"seed": seed, "n2": ns.n2, "H": ns.H, "X_H": repr(mean)}])
        print(f"simulate monte-carlo: E X_{ns.H} ~ {mean:.6g} +- {se:.2g} ({ns.samples} samples) -> {path}")
    elif ns.sim_mode == "count":
        rows, graphs = [], []
        for k in range(ns.graphs):
            g = sample_gnp_half(ns.n2, seed + k)
            graphs.append(g)
            rows.append({"seed": seed + k, "n2": ns.n2, "H": ns.H, "X_H": count_friendly_exhaustive(g, ns.H)})
        write_graphs(base + ".graphs", graphs)
        path = write_results_csv(base + ".csv", rows)
        print(f"simulate count: {ns.graphs} graphs -> {path}")
    else:
        rows, graphs = [], []
        for k in range(ns.graphs):
            g = sample_gnp_half(ns.n2, seed + k)
            graphs.append(g)
            h, _ = local_search_max_margin(g, ns.restarts, seed + k)
            scale = h / math.sqrt(ns.n2 / 2)
            rows.append({"seed": seed + k, "n2": ns.n2, "H": h, "best_H": h})
            print(f"seed {seed + k}: best_H = {h}, best_H/sqrt(n2/2) = {scale:.4f} (context: {GAMMA_CRIT_OVER_SQRT2})")
        write_graphs(base + ".graphs", graphs)
        path = write_results_csv(base + ".csv", rows, value_name="best_H")
        print(f"simulate local-search: {ns.graphs} graphs -> {path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# selftest


def _fuzz_arith(rng: random.Random, samples: int) -> list[str]:
    from .rint import Interval

    bad = []
    exact_op = {"add": Fraction.__add__, "sub": Fraction.__sub__, "mul": Fraction.__mul__, "div": Fraction.__truediv__}
    for kind, op in exact_op.items():
        viol = 0
        for _ in range(samples):
            a = rng.uniform(-10, 10) * 10 ** rng.randint(-3, 3)
            b = rng.uniform(-10, 10) * 10 ** rng.randint(-3, 3)
            if kind == "div" and b == 0:
                continue
            exact = op(Fraction(a), Fraction(b))
            try:
                r = rint.arith(Interval(a), Interval(b), kind)
            except rint.EmptyConstruction:  # bounds crossed: cannot contain
                viol += 1
                continue
            if not (Fraction(r.lo) <= exact <= Fraction(r.hi)):
                viol += 1
        if viol:
            bad.append(f"containment of {kind} violated in {viol} of {samples} samples")
    return bad


def _fuzz_elem(rng: random.Random, samples: int) -> list[str]:
    from .rint import Interval

    bad = []
    with localcontext() as ctx:
        ctx.prec = 40
        for kind in ("exp", "log", "sqrt"):
            viol = 0
            for _ in range(samples):
                x = rng.uniform(0.01, 20) if kind != "exp" else rng.uniform(-20, 20)
                d = Decimal(x)
                exact = {"exp": d.exp, "log": d.ln, "sqrt": d.sqrt}[kind]()
                r = rint.elem(Interval(x), kind)
                if not (Decimal(r.lo) <= exact <= Decimal(r.hi)):
                    viol += 1
            if viol:
                bad.append(f"containment of {kind} violated in {viol} of {samples} samples")
    return bad


def _selftest_checks(seed: int) -> list[tuple[str, Callable[[], list[str]]]]:
    from fractions import Fraction as Fr

    import numpy as np

    from .binom_oracle import BinDiffSpec, diff_pmf_exact
    from .functional import F1_eval, F2_fast, F2Point, F2_eval, SegmentPlan, segment_envelope_sup
    from .gaussfn import OrthantParams, f_eval
    from .graphsim import BisectionState, count_friendly_exhaustive, empirical_first_moment
    from .quad import integrate_finite, pointwise
    from .rint import Interval, normal_tail

    def arith():
        return _fuzz_arith(random.Random(seed), 2000)

    def elem():
        return _fuzz_elem(random.Random(seed + 1), 300)

    def tail():
        from scipy.special import ndtr

        out = []
        for x in (-3.0, -0.5, 0.0, 0.7, 2.5, 8.0):
            r = normal_tail(Interval(x))
            ref = float(ndtr(-x))
            if not abs(ref - r.mid()) <= 1e-14 * ref:
                out.append(f"normal tail at {x}: {r!r} vs {ref!r}")
        return out

    def quad():
        import math as m

        f = pointwise(lambda t: rint.exp(rint.neg_square(t)))
        enc = integrate_finite(f, 0.0, 1.0, 1e-9).value
        ref = m.sqrt(m.pi) / 2 * m.erf(1.0)
        return [] if enc.lo - 1e-15 <= ref <= enc.hi + 1e-15 else [f"quadrature enclosure {enc!r} misses {ref!r}"]

    def orthant():
        out = []
        for beta, a in ((0.3, -0.4), (0.5, -0.445), (0.8, 0.1)):
            p = OrthantParams(0.2484195, beta, a)
            c = f_eval(p, CERTIFIED)
            fz = f_eval(p, FAST).lo
            if not abs(fz - c.mid()) <= 1e-12 + (c.hi - c.lo):
                out.append(f"f({beta}, {a}) certified {c!r} vs fast {fz!r}")
        return out

    def identities():
        out = []
        r = random.Random(seed + 2)
        for _ in range(20):
            g, a = r.uniform(0.2, 0.3), r.uniform(-1, 0)
            f1 = F1_eval(g, a, FAST).lo
            if abs(F2_fast(0.5, a, a, g) - 4 * f1) > 1e-12 or abs(F2_fast(0.0, 0.0, a, g) - 2 * f1) > 1e-12:
                out.append(f"moment identities fail at gamma={g}, alpha={a}")
        e = F2_eval(F2Point(0.5, -0.445, -0.445, "0.2484195"), CERTIFIED)
        if not e.contains(4 * F1_eval("0.2484195", -0.445, FAST).lo):
            out.append(f"certified symmetric-point value {e!r} misses four times F1")
        return out

    def segment():
        b = segment_envelope_sup(SegmentPlan("B2-case6", Fr(197999, 400000), Fr(198000, 400000), "-0.00001"), "0.2484195")
        return [] if b.hi <= -1e-5 else [f"segment bound {b.hi!r} above -1e-5"]

    def binomial():
        out = []
        v = diff_pmf_exact(BinDiffSpec(2, 0, 0.0, 0.0, 0))
        if v != Decimal(3) / 8:
            out.append(f"P[Bin(2,1/2) - Bin(2,1/2) = 0] = {v}")
        tot = sum(diff_pmf_exact(BinDiffSpec(30, 1, 0.4, -0.3, t)) for t in range(-30, 31))
        if abs(tot - 1) > Decimal("1e-40"):
            out.append(f"difference pmf sums to {tot}")
        return out

    def graphs():
        out = []
        k4 = BisectionState(4, np.ones((4, 4), dtype=np.int8) - np.eye(4, dtype=np.int8))
        if count_friendly_exhaustive(k4, 0) != 0:
            out.append("K4 has friendly bisections")
        if count_friendly_exhaustive(BisectionState(4, np.zeros((4, 4), dtype=np.int8)), 0) != 6:
            out.append("empty graph on 4 vertices should have 6")
        if empirical_first_moment(2, 0)[0] != 1:
            out.append("E X_0 at n2=2 should be 1")
        return out

    return [
        ("interval arithmetic containment", arith),
        ("elementary function containment", elem),
        ("normal tail accuracy", tail),
        ("quadrature enclosure", quad),
        ("orthant probability modes agree", orthant),
        ("moment identities", identities),
        ("segment majorant", segment),
        ("binomial oracle", binomial),
        ("graph counting", graphs),
    ]


def cmd_selftest(cfg: RunConfig, ns: argparse.Namespace) -> int:
    seed = cfg.seed if cfg.seed is not None else 0
    if ns.inject_fault:
        rint.inject_rounding_fault(True)
    failures = 0
    try:
        for name, fn in _selftest_checks(seed):
            try:
                problems = fn()
            except Exception as exc:  # any crash is a failure of that check
                problems = [f"{type(exc).__name__}: {exc}"]
            if problems:
                failures += 1
                for p in problems:
                    print(f"FAIL {name}: {p}")
            else:
                print(f"ok   {name}")
    finally:
        rint.inject_rounding_fault(False)
    print(f"selftest: {'failed' if failures else 'success'} ({failures} failing checks)")
    return EXIT_FAILED if failures else EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fcert", description="Certified numerics for friendly bisections.")
    p.add_argument("--version", action="version", version=f"fcert {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, claim: bool = True):
        sp.add_argument("--out", default="fc-reports", help="report directory (FC_OUT overrides)")
        sp.add_argument("--seed", type=int, default=None)
        if claim:
            sp.add_argument("--gamma", default=None, help="decimal value or LO,HI range")
            sp.add_argument("--mode", choices=(FAST, CERTIFIED), default=CERTIFIED)

    for name, helptext in (
        ("gamma-bounds", "bracket the critical gamma"),
        ("claim-b1", "initial beta interval"),
        ("claim-b4", "Hessian near the symmetric point"),
    ):
        common(sub.add_parser(name, help=helptext))
    for name, helptext in (
        ("claim-b2", "segment sweep on [.001, .495]"),
        ("claim-b3", "local sweep on [.495, .5]"),
        ("assumption", "run every claim and combine"),
    ):
        sp = sub.add_parser(name, help=helptext)
        common(sp)
        sp.add_argument("--manifest", default="bundled", help="'bundled', 'smoke' or a manifest path")
        sp.add_argument("--parallelism", type=int, default=1)
        sp.add_argument("--refine", type=int, default=0, help="bisection depth for failing segments (0..4)")

    sp = sub.add_parser("oracle-binomial", help="exact binomial checks of Gaussian approximations")
    common(sp, claim=False)
    sp.add_argument("--check", choices=("first-moment", "second-moment"), default="first-moment")
    sp.add_argument("--n", default="100,400,1600", help="comma-separated sizes")
    sp.add_argument("--sets", type=int, default=10)

    sp = sub.add_parser("simulate", help="random graph experiments")
    common(sp, claim=False)
    sp.add_argument("--n2", type=int, required=True)
    sp.add_argument("--H", type=int, default=0)
    sp.add_argument("--mode", dest="sim_mode", choices=("exhaustive", "monte-carlo", "count", "local-search"), default="exhaustive")
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--graphs", type=int, default=1)
    sp.add_argument("--restarts", type=int, default=20)

    sp = sub.add_parser("selftest", help="fast invariant checks")
    common(sp, claim=False)
    sp.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return p


_COMMANDS = {
    "gamma-bounds": cmd_gamma_bounds,
    "claim-b1": cmd_claim_b1,
    "claim-b2": cmd_claim_b2,
    "claim-b3": cmd_claim_b3,
    "claim-b4": cmd_claim_b4,
    "assumption": cmd_assumption,
}
_WITH_NS = {
    "oracle-binomial": cmd_oracle_binomial,
    "simulate": cmd_simulate,
    "selftest": cmd_selftest,
}


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv`` and run the subcommand; returns the exit code."""
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        cfg = _config(ns)
        if ns.command in _COMMANDS:
            return _COMMANDS[ns.command](cfg)
        return _WITH_NS[ns.command](cfg, ns)
    except UsageError as exc:
        print(f"fcert: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
