"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 domain error (e.g. an unstable
battery chain), 3 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace

from ..aoi import MomentSource, aoi_both
from ..exceptions import EhmacError
from ..model import queue_analysis, success_probs
from ..params import SystemParams
from ..simulation import DEFAULT_SEED, ChannelMode, SimConfig, run
from . import sweep as sw
from .audit import audit
from .config import read_config
from .csvio import fmt, write_rows

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- argument types ----------------------------------------------------------------------

def _probability(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number in [0, 1], got {text!r}") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {text}")
    return value


def _attempt_probability(text):
    value = _probability(text)
    if value == 0.0:
        raise argparse.ArgumentTypeError("must lie in (0, 1], got 0")
    return value


def _db(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a value in dB, got {text!r}") from None
    if math.isnan(value) or value == math.inf:
        raise argparse.ArgumentTypeError(f"must be finite dB (or -inf for thresholds), got {text}")
    return value


def _int_at_least(minimum):
    def convert(text):
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected an integer >= {minimum}, got {text!r}") from None
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be an integer >= {minimum}, got {value}")
        return value
    return convert


def _seed(text):
    value = _int_at_least(0)(text)
    if value >= 2 ** 64:
        raise argparse.ArgumentTypeError("must fit in 64 bits")
    return value


def _csv_list(choices):
    def convert(text):
        items = tuple(t.strip() for t in text.split(",") if t.strip())
        bad = [t for t in items if t not in choices]
        if bad or not items:
            raise argparse.ArgumentTypeError(
                f"expected a comma-separated subset of {','.join(choices)}, got {text!r}")
        return items
    return convert


# -- parser ------------------------------------------------------------------------------

def _system_flags() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    g = p.add_argument_group("system parameters")
    g.add_argument("--snr1-db", type=_db, default=11.0, help="mean SNR of S1 in dB (default 11)")
    g.add_argument("--snr2-db", type=_db, default=13.0, help="mean SNR of S2 in dB (default 13)")
    g.add_argument("--theta-db", type=_db, default=None, help="SINR threshold of both nodes, dB")
    g.add_argument("--theta1-db", type=_db, default=0.0)
    g.add_argument("--theta2-db", type=_db, default=0.0)
    g.add_argument("--lambda", dest="lam", type=_probability, default=0.3,
                   help="data arrival probability at S1")
    g.add_argument("--q1", type=_attempt_probability, default=0.6)
    g.add_argument("--q2", type=_attempt_probability, default=0.8)
    g.add_argument("--delta", type=_probability, default=0.3, help="energy arrival probability")
    g.add_argument("--s2", choices=("eh", "grid"), default="eh", help="power supply of S2")
    return p


def _sim_flags(horizon=1_000_000, replications=20) -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    g = p.add_argument_group("simulation")
    g.add_argument("--horizon", type=_int_at_least(1), default=horizon, help="slots per replication")
    g.add_argument("--burn-in", type=_int_at_least(0), default=None,
                   help="slots discarded per replication (default 10%% of horizon)")
    g.add_argument("--replications", type=_int_at_least(1), default=replications)
    g.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    g.add_argument("--channel", choices=[m.value for m in ChannelMode], default="bernoulli")
    g.add_argument("--jobs", type=_int_at_least(1), default=1, help="parallel sweep points")
    return p


def _sweep_flags(engines) -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    g = p.add_argument_group("sweep")
    g.add_argument("--param", choices=sorted(sw.SWEPT), default="lambda")
    g.add_argument("--start", type=float, default=0.0)
    g.add_argument("--stop", type=float, default=0.4)
    g.add_argument("--step", type=float, default=0.05)
    g.add_argument("--outputs", type=_csv_list(("delay", "aoi", "throughput", "mu", "pbar2")),
                   default="delay,aoi")
    g.add_argument("--engines", type=_csv_list(sw.ENGINES), default=engines)
    return p


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = _Parser(prog="ehmac", description=(
        "Delay and age of information in a two-node slotted channel with an "
        "energy-harvesting sensor: closed forms, simulation and comparison."))
    parser.add_argument("--config", metavar="FILE",
                        help="key=value file with flag defaults; explicit flags win")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    system = _system_flags()
    out = _Parser(add_help=False)
    out.add_argument("--output", "-o", metavar="FILE", help="write to FILE instead of stdout")
    subs = {
        "analytic": sub.add_parser("analytic", parents=[system, out],
                                   help="closed-form metrics at one point"),
        "simulate": sub.add_parser("simulate", parents=[system, _sim_flags(), out],
                                   help="simulate one point"),
        "sweep": sub.add_parser("sweep", parents=[system, _sweep_flags("analytic_pmf,analytic_paper"),
                                                  _sim_flags(), out],
                                help="sweep one parameter, CSV output"),
        "compare": sub.add_parser("compare", parents=[system, _sweep_flags(
            "analytic_pmf,analytic_paper,simulation"), _sim_flags(), out],
            help="analytic vs simulation along a sweep, CSV output"),
        "audit": sub.add_parser("audit", parents=[system, _sim_flags(), out],
                                help="inter-attempt time formula audit (energy harvesting only)"),
        "figure": sub.add_parser("figure", parents=[_sim_flags(horizon=200_000, replications=10),
                                                    out],
                                 help="reproduce a figure sweep, CSV output"),
    }
    subs["figure"].add_argument("name", choices=sorted(sw.PRESETS))
    subs["figure"].add_argument("--engines", type=_csv_list(sw.ENGINES),
                                default="analytic_pmf,analytic_paper")
    return parser, subs


def _params(args) -> SystemParams:
    t1 = args.theta_db if args.theta_db is not None else args.theta1_db
    t2 = args.theta_db if args.theta_db is not None else args.theta2_db
    return SystemParams(snr1_db=args.snr1_db, snr2_db=args.snr2_db, theta1_db=t1, theta2_db=t2,
                        lam=args.lam, q1=args.q1, q2=args.q2, delta=args.delta, s2_power=args.s2)


def _sim_config(args, params) -> SimConfig:
    return SimConfig(params, horizon=args.horizon, burn_in=args.burn_in,
                     replications=args.replications, base_seed=args.seed,
                     channel_mode=ChannelMode(args.channel))


def _apply_config_file(argv, parser, subs) -> None:
    path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
    if path is None:
        return
    command = next((t for t in argv if t in subs), None)
    if command is None:
        return
    target = subs[command]
    dests = {a.option_strings[0].lstrip("-"): a.dest for a in target._actions if a.option_strings}
    defaults = {}
    for key, value in read_config(path):
        if key not in dests:
            raise UsageError(f"{path}: unknown key {key!r}; valid keys: {', '.join(sorted(dests))}")
        defaults[dests[key]] = value
    target.set_defaults(**defaults)


# -- commands ----------------------------------------------------------------------------

def _lines(pairs) -> str:
    return "".join(f"{k}={v}\n" for k, v in pairs)


def cmd_analytic(args) -> str:
    params = _params(args)
    probs = success_probs(params)
    queue = queue_analysis(params, probs)
    pairs = [("p1_solo", fmt(probs.p1_solo)), ("p1_joint", fmt(probs.p1_joint)),
             ("p2_solo", fmt(probs.p2_solo)), ("p2_joint", fmt(probs.p2_joint)),
             ("mu", fmt(queue.mu)), ("stable", str(queue.stable).lower()),
             ("q1_threshold", fmt(queue.q1_threshold)),
             ("prob_q_nonempty", fmt(queue.prob_q_nonempty)),
             ("delay", fmt(queue.delay)), ("throughput", fmt(queue.throughput))]
    for src, res in aoi_both(params, probs, queue).items():
        if src is MomentSource.PMF_DERIVED:
            pairs.append(("pbar2", fmt(res.pbar2)))
        pairs += [(f"mean_t_{src.value}", fmt(res.mean_t)),
                  (f"second_moment_t_{src.value}", fmt(res.second_moment_t)),
                  (f"aoi_{src.value}", fmt(res.aoi))]
    return _lines(pairs)


def cmd_simulate(args) -> str:
    result = run(_sim_config(args, _params(args)))
    pairs = []
    for name in ("mean_delay", "mean_aoi", "throughput", "prob_q_nonempty", "prob_b_nonempty",
                 "success_rate_s2", "service_rate", "mean_t", "second_moment_t"):
        est = getattr(result, name)
        pairs += [(name, fmt(est.value)), (f"{name}_ci_half_width", fmt(est.ci_half_width))]
    pairs.append(("diverged", str(result.diverged).lower()))
    return _lines(pairs)


def _sweep_csv(spec, args, stream) -> None:
    sim = _sim_config(args, spec.fixed) if "simulation" in spec.engines else None
    rows = sw.evaluate(spec, sim, n_jobs=args.jobs)
    write_rows(sw.csv_rows(rows, spec.engines), stream)


def _spec_from_args(args, engines) -> sw.SweepSpec:
    return sw.SweepSpec(args.param, args.start, args.stop, args.step, _params(args),
                        outputs=args.outputs, engines=engines)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    try:
        _apply_config_file(argv, parser, subs)
        args = parser.parse_args(argv)
        if args.output:
            stream = open(args.output, "w", encoding="utf-8", newline="")
        else:
            stream = sys.stdout
        try:
            _dispatch(args, stream)
        finally:
            if stream is not sys.stdout:
                stream.close()
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EhmacError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:  # cross-flag checks, e.g. burn-in >= horizon; config syntax
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def _dispatch(args, stream) -> None:
    if args.command == "analytic":
        stream.write(cmd_analytic(args))
    elif args.command == "simulate":
        stream.write(cmd_simulate(args))
    elif args.command == "sweep":
        spec = _spec_from_args(args, args.engines)
        _sweep_csv(spec, args, stream)
    elif args.command == "compare":
        engines = tuple(e for e in args.engines if e != "simulation") + ("simulation",)
        _sweep_csv(_spec_from_args(args, engines), args, stream)
    elif args.command == "audit":
        params = _params(args)
        stream.write(audit(params, _sim_config(args, params)).render())
    elif args.command == "figure":
        spec = replace(sw.figure_preset(args.name), engines=args.engines)
        _sweep_csv(spec, args, stream)


if __name__ == "__main__":
    sys.exit(main())
