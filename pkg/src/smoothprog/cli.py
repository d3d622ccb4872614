"""Command line entry point: ``smoothprog <subcommand> [options]``.

Exit codes: 0 success, 2 configuration or domain error, 3 numerical failure,
4 capacity exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .errors import CapacityError, ConfigError, DomainError, NumericalError, RangeError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_CAPACITY = 0, 2, 3, 4


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True, default=_default))


def _default(v):
    import numpy as np

    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, complex):
        return [v.real, v.imag]
    raise TypeError(type(v))


def cmd_sieve(a) -> int:
    from .sieve import SmoothTable, build_table, psi, psi_coprime, psi_progression

    table = SmoothTable.load(a.load) if a.load else build_table(a.x_max or int(a.x))
    if a.save:
        table.save(a.save)
    if a.x is not None:
        out = {"x": a.x, "y": a.y, "psi": psi(table, a.x, a.y)}
        if a.q:
            out["q"] = a.q
            out["psi_q"] = psi_coprime(table, a.x, a.y, a.q)
            if a.a:
                out["a"] = a.a
                out["psi_q_a"] = psi_progression(table, a.x, a.y, a.q, a.a)
        _emit(out)
    return EXIT_OK


def cmd_alpha(a) -> int:
    from .saddle import solve_alpha

    r = solve_alpha(a.x, a.y, a.q)
    _emit({"x": a.x, "y": a.y, "q": a.q, "alpha": r.alpha, "u": r.u, "residual": r.residual,
           "log_L_alpha": r.log_L_alpha, "log_L_alpha_q": r.log_L_alpha_q, "log_E": r.log_E})
    return EXIT_OK


def cmd_rho(a) -> int:
    from .saddle import rho

    for u in a.u:
        _emit({"u": u, "rho": float(rho(u))})
    return EXIT_OK


def cmd_chars(a) -> int:
    from .characters import character_group

    for chi in character_group(a.q).characters():
        _emit({"label": chi.label, "order": chi.order, "conductor": chi.conductor().conductor,
               "real": chi.is_real, "primitive": chi.is_primitive()})
    return EXIT_OK


def cmd_lzeros(a) -> int:
    from .characters import character_from_label, character_group
    from .lfunction.zeros import Rect, scan_zeros, zeros_csv

    chars = [character_from_label(a.label)] if a.label else character_group(a.q).characters()
    recs = []
    for chi in chars:
        recs.extend(scan_zeros(chi, Rect(a.sigma0, a.sigma1, a.t0, a.t1)).zeros)
    sys.stdout.write(zeros_csv(recs))
    return EXIT_OK


def cmd_classify(a) -> int:
    from .lfunction.checks import _jsonable, classify

    c = classify(a.q, a.A, a.D, a.T_max, a.tau_A)
    print(json.dumps(c.to_dict(), sort_keys=True, default=_jsonable))
    return EXIT_OK


def cmd_checkers(a) -> int:
    from .characters import character_group
    from .lfunction import checks

    reps = [checks.zero_free_region_check(a.q, a.c1, a.T_max)]
    if a.q > 1:
        reps.append(checks.deuring_heilbronn_check(a.q, a.eps, a.c2, a.T_max))
    for chi in character_group(a.q).characters():
        if chi.is_primitive() and not chi.is_principal:
            reps.append(checks.gulp_region_check(chi, a.scale, a.T_max))
    for r in reps:
        print(r.to_json())
    return EXIT_OK


def cmd_charsum(a) -> int:
    from .characters import character_from_label, character_group
    from .charsum import chang_ratio, compute_thresholds, ratio_csv

    params = compute_thresholds(a.q, a.nu, a.tau, a.c3, a.e0)
    chars = ([character_from_label(a.label)] if a.label else
             [c for c in character_group(a.q).characters() if c.is_primitive() and not c.is_principal])
    reps = [chang_ratio(chi, N, params, t=a.t) for chi in chars for N in a.N]
    sys.stdout.write(ratio_csv(reps))
    return EXIT_OK


def cmd_equidist(a) -> int:
    from .harness import DISCREPANCY_COLUMNS, fmt, trend
    from .sieve import build_table

    table = build_table(int(max(a.x)))
    tr = trend(table, a.x, a.y, a.q)
    print(",".join(DISCREPANCY_COLUMNS))
    for r in tr.reports:
        print(",".join(fmt(v) for v in r.row()))
    print(f"# kendall_tau={fmt(tr.tau)}")
    return EXIT_OK


def cmd_constants(a) -> int:
    from .lfunction.checks import theorem1_constants

    c = theorem1_constants(a.A, a.D)
    _emit({"A": c.A, "D": c.D, "k0": c.k0, "Q_A": c.Q_A})
    return EXIT_OK


def cmd_run(a) -> int:
    from .harness import ExperimentConfig, run

    cfg = ExperimentConfig.load(a.config, a.set)
    if a.output_dir:
        cfg.output_dir = a.output_dir
    res = run(cfg)
    for e in res.errors:
        print(e, file=sys.stderr)
    print(res.digest())
    return res.exit_code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="smoothprog", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sieve", help="build/save/load a largest-prime-factor table and count")
    s.add_argument("--x-max", type=int)
    s.add_argument("--x", type=float)
    s.add_argument("--y", type=float, default=float("inf"))
    s.add_argument("--q", type=int)
    s.add_argument("--a", type=int)
    s.add_argument("--save")
    s.add_argument("--load")
    s.set_defaults(func=cmd_sieve)

    s = sub.add_parser("alpha", help="saddle point and main-term scale")
    s.add_argument("--x", type=float, required=True)
    s.add_argument("--y", type=float, required=True)
    s.add_argument("--q", type=int, default=1)
    s.set_defaults(func=cmd_alpha)

    s = sub.add_parser("rho", help="Dickman's function")
    s.add_argument("u", type=float, nargs="+")
    s.set_defaults(func=cmd_rho)

    s = sub.add_parser("chars", help="list characters mod q")
    s.add_argument("--q", type=int, required=True)
    s.set_defaults(func=cmd_chars)

    s = sub.add_parser("lzeros", help="zeros of L(s, chi) in a rectangle (CSV)")
    s.add_argument("--q", type=int)
    s.add_argument("--label")
    s.add_argument("--sigma0", type=float, default=0.25)
    s.add_argument("--sigma1", type=float, default=1.5)
    s.add_argument("--t0", type=float, default=-20.0)
    s.add_argument("--t1", type=float, default=20.0)
    s.set_defaults(func=cmd_lzeros)

    s = sub.add_parser("classify", help="Xi-indices and problem set for modulus q")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--A", type=float, default=4 * 1.6487212707001282)
    s.add_argument("--D", type=float, default=10.0)
    s.add_argument("--T-max", dest="T_max", type=float, default=100.0)
    s.add_argument("--tau-A", dest="tau_A", type=float, default=2.0)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("checkers", help="zero-region checker verdicts (JSON lines)")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--c1", type=float, default=0.1)
    s.add_argument("--c2", type=float, default=0.05)
    s.add_argument("--eps", type=float, default=1e-3)
    s.add_argument("--scale", type=float, default=40000.0)
    s.add_argument("--T-max", dest="T_max", type=float, default=50.0)
    s.set_defaults(func=cmd_checkers)

    s = sub.add_parser("charsum", help="character-sum ratio report (CSV)")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--label")
    s.add_argument("--N", type=int, nargs="+", default=[100, 1000])
    s.add_argument("--t", type=float, default=0.0)
    s.add_argument("--nu", type=float, default=0.5)
    s.add_argument("--tau", type=float, default=0.1)
    s.add_argument("--c3", type=float, default=1.0)
    s.add_argument("--e0", type=float, default=1000.0)
    s.set_defaults(func=cmd_charsum)

    s = sub.add_parser("equidist", help="discrepancy trend in x at fixed q, y")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--y", type=float, required=True)
    s.add_argument("--x", type=float, nargs="+", required=True)
    s.set_defaults(func=cmd_equidist)

    s = sub.add_parser("constants", help="k0 and Q_A")
    s.add_argument("--A", type=float, required=True)
    s.add_argument("--D", type=float, default=10.0)
    s.set_defaults(func=cmd_constants)

    s = sub.add_parser("run", help="run a config file; prints the SHA-256 of the bundle")
    s.add_argument("--config", required=True)
    s.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    s.add_argument("--output-dir")
    s.set_defaults(func=cmd_run)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, DomainError, RangeError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
