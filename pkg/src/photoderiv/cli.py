"""Command-line front door.

Commands:
    convert       parameter table for one squeeze parameterization
    distribution  analytic outcome distribution P_l
    herald        heralded-state amplitudes, oracle vs analytic, with fidelity
    estimate      sampled-shot function estimates
    sweep         target values over a y1 grid at fixed B (plot data)
    verify        oracle-equivalence and normalization suites on a standard grid

Exit codes: 0 success, 1 usage error, 2 domain error, 3 verification failure.
Identical invocations produce byte-identical output files.
"""

from __future__ import annotations

import argparse
import sys

from mpmath import mp, mpf

from . import __version__
from .distribution import analytic_distribution
from .errors import PhotoderivError, UsageError
from .estimator import (
    GENERATOR_ID,
    estimate_functions,
    sample_outcomes,
    sweep,
)
from .fock_oracle import (
    apply_beam_splitter,
    build_two_mode_input,
    fidelity,
    analytic_heralded_state,
    heralded_state,
    minimal_n_max,
    mode2_marginal,
)
from .formats import fmt_number, json_document, parse_grid, rows_to_csv
from .params import SplitterSpec, invert_scheme, make_squeeze, reduce_scheme, ReducedScheme
from .series import PrecisionPolicy

_SQUEEZE_FLAGS = (("--s", "amplitude"), ("--y", "series_parameter"),
                  ("--db", "decibels"), ("--mean-n", "mean_photons"))


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures through UsageError
        raise UsageError(message)


def _add_common(p, squeeze=True, splitter=True):
    if squeeze:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--s", type=float, help="squeezing amplitude s")
        g.add_argument("--y", type=float, help="series parameter y = tanh(s)/2")
        g.add_argument("--db", type=float, help="squeezing in dB")
        g.add_argument("--mean-n", type=float, help="mean photon number sinh(s)^2")
    if splitter:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--t2", type=float, help="intensity transmittance t^2")
        g.add_argument("--B", type=float, dest="bsp", help="beam-splitter parameter B")
    p.add_argument("--precision-bits", type=int, default=256)
    p.add_argument("--tail-eps", type=float, default=1e-30)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.add_argument("--config", help="flat key=value file; flags override it")


def _build_parser() -> _Parser:
    top = _Parser(prog="photoderiv", description=__doc__,
                  formatter_class=argparse.RawDescriptionHelpFormatter)
    top.add_argument("--version", action="version", version=f"photoderiv {__version__}")
    sub = top.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("convert", help="parameter conversion table")
    _add_common(p)

    p = sub.add_parser("distribution", help="analytic outcome distribution")
    _add_common(p)
    p.add_argument("--k", type=int, default=0, choices=(0, 1, 2))
    p.add_argument("--l-max", type=int, default=None, help="fixed L_max (else adaptive)")

    p = sub.add_parser("herald", help="heralded state, oracle vs analytic")
    _add_common(p)
    p.add_argument("--k", type=int, default=0, choices=(0, 1, 2))
    p.add_argument("--l", type=int, required=True, help="heralded outcome")
    p.add_argument("--nmax", type=int, default=None, help="oracle truncation")

    p = sub.add_parser("estimate", help="sampled-shot function estimates")
    _add_common(p)
    p.add_argument("--k", type=int, default=0, choices=(0, 1, 2))
    p.add_argument("--shots", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--l-max", type=int, default=None)

    p = sub.add_parser("sweep", help="target values over a y1 grid at fixed B")
    _add_common(p, squeeze=False, splitter=False)
    p.add_argument("--k", type=int, default=0, choices=(0, 1, 2))
    p.add_argument("--B", type=float, dest="bsp", required=False, default=0.0)
    p.add_argument("--grid", required=True, help="y1 grid as start:stop:step")
    p.add_argument("--l", type=int, action="append", default=None,
                   help="outcome order, repeatable")
    p.add_argument("--l-max", type=int, default=None, help="use l = 0..l_max instead")
    p.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("verify", help="oracle-equivalence and normalization checks")
    _add_common(p, squeeze=False, splitter=False)
    p.add_argument("--nmax", type=int, default=None,
                   help="oracle truncation (default: auto per grid point)")
    return top


def _apply_config(args) -> None:
    if not getattr(args, "config", None):
        return
    with open(args.config, encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"config line {line!r} is not key=value")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if key == "B":
                key = "bsp"
            value = value.strip()
            if not hasattr(args, key):
                raise UsageError(f"unknown config key {key!r}")
            if getattr(args, key) is None:
                current_type = {"format": str, "out": str, "mode": str, "grid": str}
                cast = current_type.get(key, float)
                if key in ("k", "shots", "seed", "l", "l_max", "nmax", "precision_bits"):
                    cast = int
                setattr(args, key, cast(value))


def _squeeze_from(args):
    chosen = [(flag, kind) for flag, kind in _SQUEEZE_FLAGS
              if getattr(args, flag.lstrip("-").replace("-", "_")) is not None]
    if not chosen:
        raise UsageError("one of --s/--y/--db/--mean-n is required")
    flag, kind = chosen[0]
    return make_squeeze(kind, getattr(args, flag.lstrip("-").replace("-", "_")))


def _splitter_from(args, required=True):
    if args.t2 is not None:
        return SplitterSpec.from_transmittance(args.t2)
    if args.bsp is not None:
        return SplitterSpec.from_bsp(args.bsp)
    if required:
        raise UsageError("one of --t2/--B is required")
    return None


def _policy_from(args) -> PrecisionPolicy:
    return PrecisionPolicy(mantissa_bits=args.precision_bits, tail_epsilon=args.tail_eps)


def _emit(args, text: str) -> None:
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def _base_meta(args) -> dict:
    meta = {"command": args.command, "version": __version__}
    for key in ("s", "y", "db", "mean_n", "t2", "bsp", "k", "shots", "seed",
                "l", "l_max", "nmax", "grid", "mode"):
        if hasattr(args, key) and getattr(args, key) is not None:
            meta[key.replace("bsp", "B")] = getattr(args, key)
    meta["precision_bits"] = args.precision_bits
    meta["tail_epsilon"] = args.tail_eps
    return meta


def _cmd_convert(args) -> int:
    sq = _squeeze_from(args)
    bs = _splitter_from(args, required=False)
    row = {"s": sq.s, "y": sq.y, "s_db": sq.s_db, "mean_n": sq.mean_n,
           "cosh_s": sq.cosh_s}
    if bs is not None:
        rs = reduce_scheme(sq, bs, 0)
        row.update({"t": bs.t, "r": bs.r, "t2": bs.transmittance, "B": bs.bsp,
                    "y1": rs.y1})
    meta = _base_meta(args)
    cols = list(row)
    text = (json_document([row], meta) if args.format == "json"
            else rows_to_csv([row], cols, meta))
    _emit(args, text)
    return 0


def _cmd_distribution(args) -> int:
    sq = _squeeze_from(args)
    bs = _splitter_from(args)
    rs = reduce_scheme(sq, bs, args.k)
    dist = analytic_distribution(args.k, rs, _policy_from(args), l_cap=args.l_max)
    meta = _base_meta(args)
    meta["generator"] = "analytic"
    text = dist.to_json(meta) if args.format == "json" else dist.to_csv(meta)
    _emit(args, text)
    return 0


def _cmd_herald(args) -> int:
    sq = _squeeze_from(args)
    bs = _splitter_from(args)
    rs = reduce_scheme(sq, bs, args.k)
    policy = _policy_from(args)
    nmax = args.nmax or minimal_n_max(sq, args.k, 1e-16, policy)
    state = apply_beam_splitter(build_two_mode_input(sq, args.k, nmax, policy), bs)
    oracle = heralded_state(state, args.l)
    analytic = analytic_heralded_state(args.k, args.l, rs, nmax, policy)
    fid = fidelity(oracle, analytic)
    rows = []
    for n in sorted(set(oracle.amps) | set(analytic.amps)):
        rows.append({"n": n,
                     "oracle_amplitude": float(oracle.amps.get(n, 0)),
                     "analytic_amplitude": float(analytic.amps.get(n, 0))})
    meta = _base_meta(args)
    meta.update({"fidelity": fmt_number(fid), "parity": oracle.parity,
                 "y1": rs.y1, "B": rs.b, "n_max": nmax})
    cols = ["n", "oracle_amplitude", "analytic_amplitude"]
    text = (json_document(rows, meta) if args.format == "json"
            else rows_to_csv(rows, cols, meta))
    _emit(args, text)
    return 0


def _cmd_estimate(args) -> int:
    sq = _squeeze_from(args)
    bs = _splitter_from(args)
    rs = reduce_scheme(sq, bs, args.k)
    policy = _policy_from(args)
    dist = analytic_distribution(args.k, rs, policy, l_cap=args.l_max)
    emp = sample_outcomes(dist, args.shots, args.seed)
    rows = []
    for e in estimate_functions(emp, rs, args.k, policy):
        rows.append({"k": e.k, "l": e.l, "y1": rs.y1, "B": rs.b,
                     "target": e.target_name, "estimate": e.estimate,
                     "std_error": e.std_error, "exact": e.exact,
                     "reliable": e.reliable, "shots": args.shots,
                     "seed": args.seed})
    meta = _base_meta(args)
    meta.update({"generator": GENERATOR_ID, "overflow_bucket": emp.overflow,
                 "tail_mass": dist.tail_mass})
    cols = ["k", "l", "y1", "B", "target", "estimate", "std_error", "exact",
            "reliable", "shots", "seed"]
    text = (json_document(rows, meta) if args.format == "json"
            else rows_to_csv(rows, cols, meta))
    _emit(args, text)
    return 0


def _cmd_sweep(args) -> int:
    if args.l is None and args.l_max is None:
        raise UsageError("sweep needs --l (repeatable) or --l-max")
    l_list = args.l if args.l is not None else list(range(args.l_max + 1))
    grid = parse_grid(args.grid)
    policy = _policy_from(args)
    rows = sweep(args.k, args.bsp, grid, l_list, mode=args.mode, policy=policy,
                 shots=args.shots, seed=args.seed)
    out_rows = [{"y1": r["y1"], "l": r["l"], "value": r["value"],
                 "std_error": r["std_error"], "log_value": r["log_value"],
                 "reliable": r["reliable"]} for r in rows]
    meta = _base_meta(args)
    meta["B"] = args.bsp
    if args.mode == "sampled":
        meta["generator"] = GENERATOR_ID
    cols = ["y1", "l", "value", "std_error", "log_value", "reliable"]
    text = (json_document(out_rows, meta) if args.format == "json"
            else rows_to_csv(out_rows, cols, meta))
    _emit(args, text)
    return 0


_VERIFY_GRID = [(0.0, 0.0), (0.0, 1.0), (0.1, 0.0), (0.1, 0.25), (0.1, 1.0),
                (0.2, 0.0), (0.2, 0.25)]


def _cmd_verify(args) -> int:
    policy = _policy_from(args)
    lines = []
    failures = 0
    for y1, b in _VERIFY_GRID:
        for k in (0, 1, 2):
            rs = ReducedScheme(y1, b, k)
            sq, bs = invert_scheme(rs)
            nmax = args.nmax or minimal_n_max(sq, k, 1e-26, policy)
            state = apply_beam_splitter(build_two_mode_input(sq, k, nmax, policy), bs)
            oracle = mode2_marginal(state)
            analytic = analytic_distribution(k, rs, policy)
            worst = mpf(0)
            with mp.workprec(policy.mantissa_bits):
                for l in range(min(oracle.l_max, analytic.l_max) + 1):
                    pa = analytic.probs_mp[l]
                    po = oracle.probs_mp[l]
                    band = mpf("1e-10") * pa if pa >= mpf("1e-15") else mpf("1e-18")
                    excess = abs(pa - po) / band
                    worst = max(worst, excess)
                mass_dev = abs(mp.fsum(analytic.probs_mp) + mpf(analytic.tail_mass) - 1)
            ok = worst <= 1 and mass_dev <= mpf("1e-12")
            failures += 0 if ok else 1
            lines.append({
                "y1": y1, "B": b, "k": k, "n_max": nmax,
                "worst_tolerance_fraction": float(worst),
                "normalization_deviation": float(mass_dev),
                "status": "pass" if ok else "FAIL",
            })
    meta = _base_meta(args)
    meta["checks"] = "oracle equivalence (rel 1e-10 / abs 1e-18), normalization (1e-12)"
    meta["failures"] = failures
    cols = ["y1", "B", "k", "n_max", "worst_tolerance_fraction",
            "normalization_deviation", "status"]
    text = (json_document(lines, meta) if args.format == "json"
            else rows_to_csv(lines, cols, meta))
    _emit(args, text)
    return 3 if failures else 0


_COMMANDS = {
    "convert": _cmd_convert,
    "distribution": _cmd_distribution,
    "herald": _cmd_herald,
    "estimate": _cmd_estimate,
    "sweep": _cmd_sweep,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required (convert, distribution, herald, "
                             "estimate, sweep, verify)")
        _apply_config(args)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except PhotoderivError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
