"""Command-line front end.

    rigidchern c1 --space P2 --twist 3
    rigidchern chern --base P2 --twists 1,2
    rigidchern verify --suite closure --p 3 --seed 1 --cases 100

Reports are JSON with sorted keys.  Exit status is 0 on success, 1 when a
verification fails and 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

from . import __version__
from .bundle import chern_classes, cohomology_ranks, frobenius_bundle_check, whitney_check
from .cech import class_coeff, total_diff
from .charts import ChartedSpace, SpaceDescriptor, build_space, parse_space_name
from .chern import (
    apply_gauge,
    c1_cocycle,
    frobenius_check,
    line_bundle_cocycle,
    perturb,
    random_gauge,
    zeta_witness,
)
from .errors import RigidChernError, UnsupportedSpace
from .mpd import MpdContext, factorial_valuation_ok, level_rescale_check, psi_m
from .padic import MAX_PRECISION, PAdicContext, log_one_unit

SUITES = ("closure", "gauge", "whitney", "frobenius", "mpd", "ranks")


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    p: int
    N: int
    window: int
    seed: int
    cases: int
    space: str
    twists: tuple[int, ...] | None
    twist: int
    level: int
    perturb: bool
    suite: str | None
    out: str | None

    @property
    def ctx(self) -> PAdicContext:
        return PAdicContext(self.p, self.N)

    def header(self) -> dict:
        return {"command": self.command, "p": self.p, "N": self.N, "D": self.window, "seed": self.seed}


def _twists(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"twists must be comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=5, help="prime (default 5)")
    common.add_argument("--precision", type=int, default=8, help="p-adic digits N (default 8)")
    common.add_argument("--window", type=int, default=12, help="exponent window D (default 12)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cases", type=int, default=10)
    common.add_argument("--space", default="P2", help="P1 or P2; with --twists, the base of a bundle")
    common.add_argument("--twists", type=_twists, default=None, help="bundle twists, e.g. --twists=1,2")
    common.add_argument("--twist", type=int, default=1, help="line bundle degree")
    common.add_argument("--level", type=int, default=3, help="highest level m for the mpd suite")
    common.add_argument("--perturb", action="store_true", help="perturb the lifts randomly")
    common.add_argument("--out", default=None, help="write the report to this path as well")

    parser = argparse.ArgumentParser(prog="rigidchern", description="Chern classes via Cech-de Rham cocycles")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("c1", parents=[common], help="first Chern class of O(d) on P^n")
    chern = sub.add_parser("chern", parents=[common], help="Chern classes of a split bundle")
    chern.add_argument("--base", default=None, help="base P1 or P2 (alias of --space)")
    verify = sub.add_parser("verify", parents=[common], help="run a verification suite")
    verify.add_argument("--suite", choices=SUITES + ("all",), default="all")
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    if args.precision < 1 or args.precision > MAX_PRECISION:
        raise InputError(f"precision must lie in [1, {MAX_PRECISION}]")
    if args.window < 1:
        raise InputError("window must be positive")
    if args.cases < 0:
        raise InputError("cases must be non-negative")
    space = getattr(args, "base", None) or args.space
    try:
        PAdicContext(args.p, args.precision)
        parse_space_name(space)
    except (ValueError, UnsupportedSpace) as exc:
        raise InputError(str(exc))
    return RunConfig(
        command=args.command,
        p=args.p,
        N=args.precision,
        window=args.window,
        seed=args.seed,
        cases=args.cases,
        space=space.upper(),
        twists=args.twists,
        twist=args.twist,
        level=args.level,
        perturb=args.perturb,
        suite=getattr(args, "suite", None),
        out=args.out,
    )


def _space(cfg: RunConfig, twists: tuple[int, ...] | None = None) -> ChartedSpace:
    n = parse_space_name(cfg.space).n
    desc = SpaceDescriptor.projective(n) if not twists else SpaceDescriptor.bundle(n, twists)
    return build_space(desc, cfg.ctx, cfg.window)


def _rng(cfg: RunConfig, *tags) -> random.Random:
    return random.Random(":".join(str(t) for t in (cfg.seed,) + tags))


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("RIGIDCHERN_THREADS", "1")))
    except ValueError:
        return 1


def _run_cases(fn: Callable[[int], dict], count: int) -> list[dict]:
    """Evaluate cases, possibly in parallel; results stay in case order."""
    workers = min(_workers(), max(1, count))
    if workers == 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))


# ---------------------------------------------------------------------------
# commands


def cmd_c1(cfg: RunConfig) -> tuple[dict, bool]:
    space = _space(cfg)
    U = line_bundle_cocycle(space, cfg.twist)
    if cfg.perturb:
        U = perturb(U, _rng(cfg, "c1"))
    z = c1_cocycle(U)
    closed = total_diff(z).is_zero()
    cls = class_coeff(z, space)
    report = cfg.header() | {
        "space": cfg.space,
        "twist": cfg.twist,
        "perturb": cfg.perturb,
        "class": cls.symmetric(),
        "precision": cls.prec,
        "precision_floor": cls.prec,
        "closed": closed,
    }
    return report, closed and cls == cfg.twist


def cmd_chern(cfg: RunConfig) -> tuple[dict, bool]:
    if not cfg.twists:
        raise InputError("chern needs --twists")
    try:
        SpaceDescriptor.bundle(parse_space_name(cfg.space).n, cfg.twists)
    except UnsupportedSpace as exc:
        raise InputError(str(exc))
    cv = chern_classes(parse_space_name(cfg.space).n, cfg.twists, cfg.ctx, cfg.window)
    report = cfg.header() | cv.to_json() | {"precision_floor": cv.precision}
    return report, True


def _suite_closure(cfg: RunConfig) -> list[dict]:
    space = _space(cfg)

    def case(i):
        U = perturb(line_bundle_cocycle(space, cfg.twist), _rng(cfg, "closure", i))
        z = c1_cocycle(U)
        closed = total_diff(z).is_zero()
        cls = class_coeff(z, space)
        return {"case": i, "closed": closed, "class": cls.symmetric(), "precision": cls.prec,
                "pass": closed and cls == cfg.twist}

    return _run_cases(case, cfg.cases)


def _suite_gauge(cfg: RunConfig) -> list[dict]:
    space = _space(cfg)

    def case(i):
        rng = _rng(cfg, "gauge", i)
        U = perturb(line_bundle_cocycle(space, cfg.twist), rng)
        theta = random_gauge(space, rng, monomial_only=False)
        U2 = perturb(apply_gauge(U, theta), rng)
        zeta = zeta_witness(U, theta, U2)
        identity = total_diff(zeta) == c1_cocycle(U2) - c1_cocycle(U)
        a, b = class_coeff(c1_cocycle(U), space), class_coeff(c1_cocycle(U2), space)
        return {"case": i, "identity": identity, "class": a.symmetric(), "class_after": b.symmetric(),
                "precision": min(a.prec, b.prec, zeta.prec), "pass": identity and a == b}

    return _run_cases(case, cfg.cases)


def _suite_whitney(cfg: RunConfig) -> list[dict]:
    n = parse_space_name(cfg.space).n

    def case(i):
        rng = _rng(cfg, "whitney", i)
        a, b = rng.randint(-3, 3), rng.randint(-3, 3)
        rep = whitney_check(n, (a,), (b,), cfg.ctx)
        return {"case": i} | rep

    return _run_cases(case, cfg.cases)


def _suite_frobenius(cfg: RunConfig) -> list[dict]:
    space = _space(cfg)
    n = space.descriptor.n
    out = []
    for i, d in enumerate((1, 3)):
        U = line_bundle_cocycle(space, d)
        if cfg.perturb:
            U = perturb(U, _rng(cfg, "frobenius", i))
        out.append({"case": i, "twist": d} | frobenius_check(space, U))
    bundle_twists = (0, 1)
    if all(abs(cfg.p * a) <= 9 for a in bundle_twists):
        out.append({"case": len(out)} | frobenius_bundle_check(n, bundle_twists, cfg.ctx))
    return out


def _suite_mpd(cfg: RunConfig) -> list[dict]:
    ctx = cfg.ctx
    if not 0 <= cfg.level <= 6:
        raise InputError("level must lie in [0, 6]")
    out = []
    for m in range(cfg.level + 1):
        mctx = MpdContext(ctx, m)
        ok = all(factorial_valuation_ok(mctx, k) for k in range(201))
        out.append({"case": len(out), "check": "reduction", "m": m, "pass": ok})
    rng = _rng(cfg, "mpd")
    for m in range(cfg.level + 1):
        mctx = MpdContext(ctx, m)
        good = True
        floor = ctx.N
        for _ in range(max(1, cfg.cases)):
            u = ctx(1 + ctx.p * rng.randrange(ctx.modulus))
            lhs = psi_m(mctx, u)
            rhs = log_one_unit(ctx, u) * ctx.p**m
            floor = min(floor, lhs.prec, rhs.prec)
            good &= lhs == rhs
        out.append({"case": len(out), "check": "psi", "m": m, "precision": floor, "pass": bool(good)})
    space = build_space(SpaceDescriptor.projective(2), ctx, cfg.window)
    U = perturb(line_bundle_cocycle(space, 1), _rng(cfg, "mpd", "lifts"))
    for m in range(cfg.level):
        rep = level_rescale_check(U, m, m + 1)
        out.append({"case": len(out), "check": "rescale", "m": m, "m_prime": m + 1,
                    "ratio": rep["ratio"], "precision": rep["precision"], "pass": rep["pass"]})
    return out


def _suite_ranks(cfg: RunConfig) -> list[dict]:
    space = _space(cfg, cfg.twists)
    return [{"case": 0} | cohomology_ranks(space)]


SUITE_RUNNERS = {
    "closure": _suite_closure,
    "gauge": _suite_gauge,
    "whitney": _suite_whitney,
    "frobenius": _suite_frobenius,
    "mpd": _suite_mpd,
    "ranks": _suite_ranks,
}


def _floor(cases: list[dict], default: int) -> int:
    return min((c["precision"] for c in cases if isinstance(c.get("precision"), int)), default=default)


def cmd_verify(cfg: RunConfig) -> tuple[dict, bool]:
    names = SUITES if cfg.suite == "all" else (cfg.suite,)
    suites = {}
    for name in names:
        cases = SUITE_RUNNERS[name](cfg)
        suites[name] = {"cases": cases, "passed": sum(bool(c["pass"]) for c in cases), "total": len(cases)}
    ok = all(s["passed"] == s["total"] for s in suites.values())
    floor = min((_floor(s["cases"], cfg.N) for s in suites.values()), default=cfg.N)
    report = cfg.header() | {"suite": cfg.suite, "space": cfg.space, "suites": suites,
                             "precision_floor": floor, "pass": ok}
    if cfg.suite == "ranks":
        report["ranks"] = suites["ranks"]["cases"][0]["ranks"]
    return report, ok


COMMANDS = {"c1": cmd_c1, "chern": cmd_chern, "verify": cmd_verify}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        report, ok = COMMANDS[cfg.command](cfg)
    except InputError as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 2
    except UnsupportedSpace as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 2
    except RigidChernError as exc:
        print(json.dumps({"error": f"{type(exc).__name__}: {exc}"}), file=sys.stderr)
        return 1
    text = json.dumps(report, sort_keys=True, indent=2)
    print(text)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
