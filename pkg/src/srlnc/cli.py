"""Command-line front end.

Subcommands:

* ``rank``: innovation and full-rank probability tables for one (K, q, p).
* ``chain``: analytical intercept and delivery for one parameter point.
* ``simulate``: Monte Carlo estimates for one parameter point.
* ``optimize``: solve the constrained sparsity problem once.
* ``sweep``: reproduce a whole figure panel (grids of the above).

Output is CSV on stdout by default: ``#``-prefixed metadata lines (command,
seed, mode, version), then a header row, then one row per grid point.
``--format json`` emits the same content as ``{"meta": ..., "records": ...}``.
``--out FILE`` redirects to a file.  Numbers are rendered with repr so files
are byte-stable across runs; re-running the command recorded in the metadata
reproduces the file exactly.

Parameters can also come from an INI-style config file (``--config``): keys
in any section match the long flag names with underscores (``eps_b = 0.05``);
explicit flags win over file values.

Exit codes: 0 success, 2 invalid configuration or arguments, 3 numerical
integrity failure, 4 infeasible optimization (the row is still written, with
its status field set).
"""

from __future__ import annotations

import argparse
import configparser
import json
import shlex
import sys

from . import __version__
from .chain import (
    ChannelParams,
    DEFAULT_MODE,
    TRANSITION_MODES,
    build_chain,
    chain_delivery_probability,
    delivery_probability,
    intercept_probability,
)
from .coding import CodeParams
from .errors import ConfigError, NumericalIntegrityError
from .optimize import ImConfig, intercept_gain, solve_im
from .rank import (
    DEFAULT_PI_VARIANT,
    PI_VARIANTS,
    RankTables,
    exact_full_rank_prob,
    exact_innovation_prob,
)
from .sim import SimConfig, estimate

FIGURES = ("1a", "1b", "2a", "2b", "2c", "2d")

# Keys accepted from --config files, with the type used to parse them.
_CONFIG_KEYS = {
    "K": int, "q": int, "p": float, "Nhat": int,
    "eps_b": float, "eps_e": float, "eps_k": float,
    "trials": int, "seed": int, "mode": str, "threads": int,
    "format": str, "Dhat": float, "p_max": float, "tol": float,
    "pi_variant": str, "figure": str,
}

# Hard defaults applied after flags and config file both passed.  trials is
# absent on purpose: simulate and figure-1 sweeps default to 20000, the much
# heavier gain curves of figure 2 to 10000.
_DEFAULTS = {
    "q": 2, "eps_b": 0.0, "eps_e": 0.0, "eps_k": 1.0,
    "seed": 0, "mode": DEFAULT_MODE, "threads": 1,
    "format": "csv", "Dhat": 0.99, "p_max": 0.95, "tol": 1e-6,
    "pi_variant": DEFAULT_PI_VARIANT,
}


def _add_common(sub: argparse.ArgumentParser, *names: str) -> None:
    spec = {
        "K": dict(type=int, help="generation size (source packets)"),
        "q": dict(type=int, help="field order, a power of two up to 256"),
        "p": dict(type=float, help="coefficient zero-probability in [1/q, 1)"),
        "Nhat": dict(type=int, help="transmission budget in slots"),
        "eps_b": dict(type=float, help="legitimate receiver erasure probability"),
        "eps_e": dict(type=float, help="eavesdropper erasure probability"),
        "eps_k": dict(type=float, help="feedback (ACK) erasure probability"),
        "trials": dict(type=int, help="Monte Carlo trials per point"),
        "seed": dict(type=int, help="base RNG seed"),
        "mode": dict(choices=TRANSITION_MODES, help="transition-matrix variant"),
        "threads": dict(type=int, help="worker processes for simulation"),
        "out": dict(help="output path (default: stdout)"),
        "format": dict(choices=("csv", "json"), help="output format"),
        "pi_variant": dict(choices=PI_VARIANTS,
                           help="correction-term recursion variant"),
        "Dhat": dict(type=float, help="delivery floor for the optimizer"),
        "p_max": dict(type=float, help="upper end of the sparsity search"),
        "tol": dict(type=float, help="delivery tolerance of the bisection"),
    }
    flag = {"K": "--K", "q": "--q", "p": "--p", "Nhat": "--Nhat",
            "eps_b": "--eps-b", "eps_e": "--eps-e", "eps_k": "--eps-k",
            "trials": "--trials", "seed": "--seed", "mode": "--mode",
            "threads": "--threads", "out": "--out", "format": "--format",
            "pi_variant": "--pi-variant", "Dhat": "--Dhat",
            "p_max": "--p-max", "tol": "--tol"}
    for name in names:
        sub.add_argument(flag[name], dest=name, default=None, **spec[name])
    sub.add_argument("--config", default=None,
                     help="INI file with parameter defaults (flags win)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="srlnc",
        description="Sparse network-coded broadcast: interception analysis, "
                    "simulation, and sparsity optimization.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("rank", help="innovation/full-rank probability tables")
    _add_common(s, "K", "q", "p", "Nhat", "pi_variant", "out", "format",
                "seed", "mode")
    s.add_argument("--with-oracle", action="store_true",
                   help="add an exact enumeration column (small K only)")

    s = subs.add_parser("chain", help="analytical intercept and delivery")
    _add_common(s, "K", "q", "p", "Nhat", "eps_b", "eps_e", "eps_k",
                "mode", "pi_variant", "out", "format", "seed")
    s.add_argument("--dump-matrix", default=None, metavar="PATH",
                   help="also write the transition matrix as (row, col, prob)")

    s = subs.add_parser("simulate", help="Monte Carlo protocol simulation")
    _add_common(s, "K", "q", "p", "Nhat", "eps_b", "eps_e", "eps_k",
                "trials", "seed", "threads", "out", "format", "mode")

    s = subs.add_parser("optimize", help="solve the sparsity optimization")
    _add_common(s, "K", "q", "Nhat", "eps_b", "eps_e", "eps_k", "Dhat",
                "p_max", "tol", "mode", "pi_variant", "out", "format", "seed")

    s = subs.add_parser("sweep", help="reproduce one figure panel")
    s.add_argument("--figure", required=True, choices=FIGURES)
    _add_common(s, "K", "q", "eps_b", "eps_k", "Dhat", "p_max", "trials",
                "seed", "threads", "mode", "pi_variant", "out", "format")
    return parser


def _apply_config(args: argparse.Namespace) -> None:
    """Fill None-valued entries from the config file, then hard defaults."""
    from_file: dict[str, object] = {}
    if getattr(args, "config", None):
        ini = configparser.ConfigParser()
        ini.optionxform = str  # keys like K and Dhat are case-sensitive
        read = ini.read(args.config)
        if not read:
            raise ConfigError(f"config file not found: {args.config}")
        for section in ini.sections():
            for key, raw in ini.items(section):
                if key not in _CONFIG_KEYS:
                    raise ConfigError(
                        f"unknown key {key!r} in config file {args.config}"
                    )
                try:
                    from_file[key] = _CONFIG_KEYS[key](raw)
                except ValueError as exc:
                    raise ConfigError(
                        f"bad value for {key!r} in {args.config}: {raw!r}"
                    ) from exc
    # sweep reads None as "cover the whole preset family" for these, so the
    # hard defaults must not stand in for an absent flag there; explicit
    # config-file values still apply.
    skip_defaults = (
        {"K", "q", "eps_b", "eps_k"} if args.command == "sweep" else set()
    )
    for key in vars(args):
        if getattr(args, key) is None:
            if key in from_file:
                setattr(args, key, from_file[key])
            elif key in _DEFAULTS and key not in skip_defaults:
                setattr(args, key, _DEFAULTS[key])


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise ConfigError(
            "missing required parameter(s): "
            + ", ".join(f"--{n.replace('_', '-')}" for n in missing)
        )


def _fmt(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _emit(records: list[dict], columns: list[str], meta: dict,
          out: str | None, fmt: str) -> None:
    if fmt == "json":
        text = json.dumps({"meta": meta, "records": records}, indent=2) + "\n"
    else:
        lines = [f"# {k} = {v}" for k, v in meta.items()]
        lines.append(",".join(columns))
        for rec in records:
            lines.append(",".join(_fmt(rec.get(c)) for c in columns))
        text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _meta(args: argparse.Namespace, argv: list[str]) -> dict:
    return {
        "command": "srlnc " + " ".join(shlex.quote(a) for a in argv),
        "seed": getattr(args, "seed", 0),
        "mode": getattr(args, "mode", DEFAULT_MODE),
        "version": __version__,
    }


def _nhat_default(args: argparse.Namespace) -> int:
    return args.Nhat if args.Nhat is not None else 2 * args.K


# -- subcommands --------------------------------------------------------------


def _cmd_rank(args: argparse.Namespace, argv: list[str]) -> int:
    _require(args, "K", "p")
    n_hat = _nhat_default(args)
    tables = RankTables(args.K, args.q, args.p, args.pi_variant)
    records = []
    for t in range(args.K):
        rec = {"K": args.K, "q": args.q, "p": args.p, "kind": "innovation",
               "index": t, "value": tables.W[t], "oracle": None}
        if args.with_oracle:
            try:
                rec["oracle"] = exact_innovation_prob(t, args.K, args.p, args.q)
            except ConfigError:
                pass  # enumeration too large; leave the cell empty
        records.append(rec)
    for r in range(args.K, n_hat + 1):
        rec = {"K": args.K, "q": args.q, "p": args.p, "kind": "full_rank",
               "index": r, "value": tables.full_rank_prob(r, args.K),
               "oracle": None}
        if args.with_oracle:
            try:
                rec["oracle"] = exact_full_rank_prob(r, args.K, args.p, args.q)
            except ConfigError:
                pass
        records.append(rec)
    columns = ["K", "q", "p", "kind", "index", "value"]
    if args.with_oracle:
        columns.append("oracle")
    _emit(records, columns, _meta(args, argv), args.out, args.format)
    return 0


def _cmd_chain(args: argparse.Namespace, argv: list[str]) -> int:
    _require(args, "K", "p", "Nhat")
    code = CodeParams(K=args.K, q=args.q, p=args.p, n_hat=args.Nhat)
    chan = ChannelParams(args.eps_b, args.eps_e, args.eps_k)
    tables = RankTables(args.K, args.q, args.p, args.pi_variant)
    P = build_chain(code, chan, tables, args.mode)
    record = {
        "p": args.p, "N_hat": args.Nhat,
        "I": intercept_probability(P, args.Nhat),
        "D": delivery_probability(code, chan, tables),
        "I_chain_delivery": chain_delivery_probability(P, args.Nhat),
        "K": args.K, "q": args.q, "eps_B": args.eps_b, "eps_E": args.eps_e,
        "eps_K": args.eps_k, "mode": args.mode,
    }
    columns = ["p", "N_hat", "I", "D", "I_chain_delivery", "K", "q",
               "eps_B", "eps_E", "eps_K", "mode"]
    _emit([record], columns, _meta(args, argv), args.out, args.format)
    if args.dump_matrix:
        rows = [{"row": i, "col": j, "prob": v} for i, j, v in P.triplets()]
        _emit(rows, ["row", "col", "prob"], _meta(args, argv),
              args.dump_matrix, "csv")
    return 0


def _cmd_simulate(args: argparse.Namespace, argv: list[str]) -> int:
    _require(args, "K", "p", "Nhat")
    code = CodeParams(K=args.K, q=args.q, p=args.p, n_hat=args.Nhat)
    chan = ChannelParams(args.eps_b, args.eps_e, args.eps_k)
    trials = args.trials if args.trials is not None else 20000
    cfg = SimConfig(code=code, chan=chan, trials=trials,
                    base_seed=args.seed)
    stats = estimate(cfg, workers=args.threads)
    record = {
        "p": args.p, "N_hat": args.Nhat, "eps_B": args.eps_b,
        "eps_E": args.eps_e, "eps_K": args.eps_k, "K": args.K, "q": args.q,
        "trials": trials, "intercept_hat": stats.intercept_hat,
        "delivery_hat": stats.delivery_hat, "ci": stats.intercept_ci,
        "mean_slots": stats.mean_slots,
    }
    columns = ["p", "N_hat", "eps_B", "eps_E", "eps_K", "K", "q", "trials",
               "intercept_hat", "delivery_hat", "ci", "mean_slots"]
    _emit([record], columns, _meta(args, argv), args.out, args.format)
    return 0


def _cmd_optimize(args: argparse.Namespace, argv: list[str]) -> int:
    _require(args, "K", "Nhat")
    code = CodeParams(K=args.K, q=args.q, p=1.0 / args.q, n_hat=args.Nhat)
    chan = ChannelParams(args.eps_b, args.eps_e, args.eps_k)
    cfg = ImConfig(code=code, chan=chan, d_hat=args.Dhat, p_max=args.p_max,
                   tol=args.tol, pi_variant=args.pi_variant, mode=args.mode)
    sol = solve_im(cfg)
    record = {
        "K": args.K, "q": args.q, "N_hat": args.Nhat, "D_hat": args.Dhat,
        "p_star": sol.p_star, "status": sol.status, "delivery": sol.delivery,
        "intercept": sol.intercept,
        "intercept_classic": sol.intercept_classic,
        "iterations": sol.iterations, "mode": args.mode,
    }
    columns = ["K", "q", "N_hat", "D_hat", "p_star", "status", "delivery",
               "intercept", "intercept_classic", "iterations", "mode"]
    _emit([record], columns, _meta(args, argv), args.out, args.format)
    return 4 if sol.status == "infeasible" else 0


# Figure presets.  Channel families follow the reference parameter sets; the
# budget grids cover the ranges the corresponding plots display.
_FIG1_EPS_B = (0.01, 0.05, 0.1)
_FIG1_EPS_K = (0.0, 0.5, 0.85, 0.9, 0.95, 1.0)
_FIG2_CHANNELS = {"2a": (0.05, 0.2), "2b": (0.05, 0.3),
                  "2c": (0.1, 0.25), "2d": (0.1, 0.35)}
_FIG2_EPS_K = (0.85, 0.9, 0.95, 1.0)
_FIG2_K = (5, 20)
_FIG2_Q = (2, 16)


def _fig1_p_grid(q: int) -> list[float]:
    if q == 2:
        return [round(0.50 + 0.05 * i, 2) for i in range(9)]
    return [1.0 / q] + [round(0.10 + 0.05 * i, 2) for i in range(17)]


def _fig2_nhat_grid(K: int, q: int) -> list[int]:
    stop = 4 * K if q == 2 else min(16 * K, 100)
    return list(range(K + 1, stop + 1))


def _cmd_sweep(args: argparse.Namespace, argv: list[str]) -> int:
    if args.figure in ("1a", "1b"):
        q = 2 if args.figure == "1a" else 16
        if args.q is not None and args.q != q:
            raise ConfigError(
                f"figure {args.figure} is the q={q} panel; drop --q or "
                "pick the other panel"
            )
        K = args.K if args.K is not None else 20
        n_hat = 2 * K
        eps_bs = [args.eps_b] if args.eps_b is not None else list(_FIG1_EPS_B)
        eps_ks = [args.eps_k] if args.eps_k is not None else list(_FIG1_EPS_K)
        trials = args.trials if args.trials is not None else 20000
        records = []
        for eps_b in eps_bs:
            eps_e = round(eps_b + 0.25, 6)
            for p in _fig1_p_grid(q):
                code = CodeParams(K=K, q=q, p=p, n_hat=n_hat)
                tables = RankTables(K, q, p, args.pi_variant)
                for eps_k in eps_ks:
                    chan_k = ChannelParams(eps_b, eps_e, eps_k)
                    P = build_chain(code, chan_k, tables, args.mode)
                    stats = estimate(
                        SimConfig(code=code, chan=chan_k, trials=trials,
                                  base_seed=args.seed),
                        workers=args.threads,
                    )
                    records.append({
                        "figure": args.figure, "K": K, "q": q, "N_hat": n_hat,
                        "eps_B": eps_b, "eps_E": eps_e, "eps_K": eps_k, "p": p,
                        "trials": trials,
                        "intercept_theory": intercept_probability(P, n_hat),
                        "intercept_hat": stats.intercept_hat,
                        "ci": stats.intercept_ci,
                        "delivery_theory": delivery_probability(
                            code, chan_k, tables),
                        "delivery_hat": stats.delivery_hat,
                        "mean_slots": stats.mean_slots,
                    })
        columns = ["figure", "K", "q", "N_hat", "eps_B", "eps_E", "eps_K",
                   "p", "trials", "intercept_theory", "intercept_hat", "ci",
                   "delivery_theory", "delivery_hat", "mean_slots"]
        _emit(records, columns, _meta(args, argv), args.out, args.format)
        return 0

    eps_b_panel, eps_e_panel = _FIG2_CHANNELS[args.figure]
    if args.eps_b is not None and args.eps_b != eps_b_panel:
        raise ConfigError(
            f"figure {args.figure} is the eps_b={eps_b_panel} panel; "
            "drop --eps-b or pick the matching panel"
        )
    Ks = [args.K] if args.K is not None else list(_FIG2_K)
    qs = [args.q] if args.q is not None else list(_FIG2_Q)
    eps_ks = [args.eps_k] if args.eps_k is not None else list(_FIG2_EPS_K)
    trials = args.trials if args.trials is not None else 10000
    records = []
    for K in Ks:
        for q in qs:
            for eps_k in eps_ks:
                chan = ChannelParams(eps_b_panel, eps_e_panel, eps_k)
                code = CodeParams(K=K, q=q, p=1.0 / q, n_hat=2 * K)
                cfg = ImConfig(code=code, chan=chan, d_hat=args.Dhat,
                               p_max=args.p_max,
                               pi_variant=args.pi_variant, mode=args.mode)
                points = intercept_gain(
                    cfg, _fig2_nhat_grid(K, q), trials=trials,
                    base_seed=args.seed, workers=args.threads,
                )
                for pt in points:
                    records.append({
                        "N_hat": pt.n_hat, "p_star": pt.p_star,
                        "status": pt.status,
                        "I_classic": pt.intercept_classic,
                        "I_opt": pt.intercept_opt, "gain": pt.gain,
                        "ci_low": pt.ci_low, "ci_high": pt.ci_high,
                        "figure": args.figure, "K": K, "q": q,
                        "eps_B": eps_b_panel, "eps_E": eps_e_panel,
                        "eps_K": eps_k, "D_hat": args.Dhat, "trials": trials,
                    })
    columns = ["N_hat", "p_star", "status", "I_classic", "I_opt", "gain",
               "ci_low", "ci_high", "figure", "K", "q", "eps_B", "eps_E",
               "eps_K", "D_hat", "trials"]
    _emit(records, columns, _meta(args, argv), args.out, args.format)
    return 0


_COMMANDS = {
    "rank": _cmd_rank,
    "chain": _cmd_chain,
    "simulate": _cmd_simulate,
    "optimize": _cmd_optimize,
    "sweep": _cmd_sweep,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        return _COMMANDS[args.command](args, argv)
    except ConfigError as exc:
        print(f"srlnc: configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericalIntegrityError as exc:
        print(f"srlnc: numerical integrity failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"srlnc: i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
