"""Command-line entry point: ``heatwalk <subcommand> [flags]``.

Exit codes: 0 on success, 1 when a verification fails, 2 on usage or domain errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence, Union

from pydantic import BaseModel

from . import __version__
from .class_walk import brute_force_counts, class_graph_edges, path_count_table
from .config import settings
from .coverings import analytic_expectation, genus_estimator
from .errors import HeatwalkError, IdentityViolation, check_budget
from .expansion import evaluate, fourier_moment, moment_expansion, moment_value
from .export import build_manifest, render_csv, render_json, write_artifact
from .free_prob import (
    Word,
    free_cumulant,
    free_cumulant_by_geodesics,
    limit_moment,
    moment_from_cumulants,
    word_cumulant,
    word_moment,
)
from .mc_sim import (
    compare,
    conjugation_check,
    estimate_moment,
    exact_moment,
    martingale_check,
    weak_order_check,
)
from .models import Group, OutputFormat
from .noncross import NCPartition, enumerate_nc, kreweras, kreweras_by_interleaving, nc_to_perm
from .perm_core import CycleType, Permutation
from .schemas import EvaluationResult, SimConfig, TableResult, ValueResult
from .sym_char import c_np, char_sum_coefficient, s_ncycle_closed
from .tensor_rep import casimir_identity_check
from .verification import SUITES, run_all

LOGGER = logging.getLogger(__name__)

Result = Union[BaseModel, Sequence[BaseModel]]


class CommandError(Exception):
    def __init__(self, exit_code: int, detail: str) -> None:
        super().__init__(detail)
        self.exit_code = exit_code
        self.detail = detail


@dataclass
class Outcome:
    result: Result
    ok: bool = True


Handler = Callable[[argparse.Namespace], Outcome]

_HANDLERS: dict[str, Handler] = {}


def command(name: str) -> Callable[[Handler], Handler]:
    def register(handler: Handler) -> Handler:
        _HANDLERS[name] = handler
        return handler

    return register


def _cycle_type(args: argparse.Namespace, flag: str = "cycle_type") -> CycleType:
    lam = CycleType.parse(getattr(args, flag))
    n = getattr(args, "n", None)
    if n is not None and lam.n != n:
        raise CommandError(2, f"cycle type {lam} does not sum to n={n}")
    check_budget("degree", lam.n, settings.n_max)
    return lam


@command("s-table")
def s_table(args: argparse.Namespace) -> Outcome:
    lam = _cycle_type(args, "class_")
    if args.method == "brute":
        sigma = lam.representative()
        rows = []
        for k in range(args.kmax + 1):
            counts = brute_force_counts(sigma, k, budget=settings.enumeration_budget)
            rows.extend([k, d, s] for d, s in enumerate(counts) if s)
    elif args.method == "character":
        window = path_count_table(lam, 0).window
        rows = [[k, d, char_sum_coefficient(lam, k, d)] for k in range(args.kmax + 1) for d in window(k)]
    else:
        rows = [list(row) for row in path_count_table(lam, args.kmax).to_rows()]
    return Outcome(TableResult(name=f"S({lam}, k, d)", columns=["k", "d", "S"], rows=rows))


@command("s-closed")
def s_closed(args: argparse.Namespace) -> Outcome:
    check_budget("degree", args.n, settings.n_max)
    lam = CycleType((args.n,))
    window = path_count_table(lam, 0).window
    rows = [[k, d, s_ncycle_closed(args.n, k, d)] for k in range(args.kmax + 1) for d in window(k)]
    return Outcome(TableResult(name=f"S(({args.n}-cycle), k, d)", columns=["k", "d", "S"], rows=rows))


@command("cnp")
def cnp(args: argparse.Namespace) -> Outcome:
    return Outcome(ValueResult(name="c_np", value=c_np(args.n, args.p), parameters={"n": args.n, "p": args.p}))


@command("expand")
def expand(args: argparse.Namespace) -> Outcome:
    lam = _cycle_type(args)
    expansion = moment_expansion(lam, Group.parse(args.group), args.d_max)
    rows = [list(row) for row in expansion.rows()]
    name = f"{expansion.label}: prefactor · Σ (-1)^k t^k S / (k! N^(2d))"
    return Outcome(TableResult(name=name, columns=["d", "k", "S"], rows=rows))


@command("eval")
def eval_(args: argparse.Namespace) -> Outcome:
    lam = _cycle_type(args)
    group = Group.parse(args.group)
    if args.d_max is None:
        evaluation = moment_value(lam, args.N, args.t, group, args.digits)
    else:
        evaluation = evaluate(moment_expansion(lam, group, args.d_max), args.N, args.t, args.digits)
    result = EvaluationResult.model_validate(
        {
            "label": str(lam),
            "group": group,
            "N": args.N,
            "t": args.t,
            "value": evaluation.value,
            "error_bound": evaluation.error_bound,
            "d_max": evaluation.d_max,
            "extrapolated": evaluation.extrapolated,
        }
    )
    return Outcome(result)


@command("fourier")
def fourier(args: argparse.Namespace) -> Outcome:
    lam = _cycle_type(args)
    group = Group.parse(args.group)
    value = fourier_moment(lam, args.N, args.t, group)
    return Outcome(
        EvaluationResult(label=str(lam), group=group, N=args.N, t=args.t, value=value, method="fourier")
    )


def _partition_row(partition: NCPartition) -> list[Union[int, str]]:
    type_vector = ",".join(str(s) for s in partition.type_vector())
    return [str(partition), partition.rank, type_vector, str(nc_to_perm(partition))]


@command("nc")
def nc(args: argparse.Namespace) -> Outcome:
    columns = ["partition", "rank", "type", "permutation"]
    if args.blocks:
        partition = NCPartition.parse(args.blocks, args.n)
        return Outcome(TableResult(name="NC partition", columns=columns, rows=[_partition_row(partition)]))
    if args.n is None:
        raise CommandError(2, "nc needs --n or --blocks")
    partitions = enumerate_nc(args.n, n_max=settings.nc_n_max)
    return Outcome(TableResult(name=f"NC({args.n})", columns=columns, rows=[_partition_row(p) for p in partitions]))


@command("kreweras")
def kreweras_(args: argparse.Namespace) -> Outcome:
    partition = NCPartition.parse(args.blocks, args.n)
    engine = kreweras_by_interleaving if args.method == "interleaving" else kreweras
    return Outcome(
        ValueResult(
            name="kreweras",
            value=str(engine(partition)),
            parameters={"partition": str(partition), "method": args.method},
        )
    )


@command("moments")
def moments(args: argparse.Namespace) -> Outcome:
    rows = [[n, limit_moment(n, args.t), moment_from_cumulants(n, args.t)] for n in range(1, args.n + 1)]
    return Outcome(
        TableResult(name=f"phi(u_t^n) at t={args.t}", columns=["n", "moment", "from_cumulants"], rows=rows)
    )


@command("cumulants")
def cumulants(args: argparse.Namespace) -> Outcome:
    rows = [
        [m, free_cumulant(m, args.t), free_cumulant_by_geodesics(Permutation.long_cycle(m), args.t)]
        for m in range(1, args.n + 1)
    ]
    return Outcome(
        TableResult(name=f"k_m(u_t) at t={args.t}", columns=["m", "cumulant", "by_geodesics"], rows=rows)
    )


@command("word")
def word(args: argparse.Namespace) -> Outcome:
    parsed = Word.parse(args.word)
    if args.cumulant:
        return Outcome(ValueResult(name="free cumulant", value=word_cumulant(parsed), parameters={"word": str(parsed)}))
    return Outcome(ValueResult(name="limit moment", value=word_moment(parsed), parameters={"word": str(parsed)}))


@command("verify-casimir")
def verify_casimir(args: argparse.Namespace) -> Outcome:
    group = Group.parse(args.group)
    dimension = 2 * args.N if group == Group.SP else args.N
    check_budget("tensor dimension", dimension**args.n, settings.matrix_budget)
    report = casimir_identity_check(group, args.n, args.N)
    return Outcome(report, ok=report.holds)


@command("simulate")
def simulate(args: argparse.Namespace) -> Outcome:
    if args.mode == "martingale":
        if not args.sigma:
            raise CommandError(2, "martingale mode needs --sigma")
        sigma = Permutation.parse(args.sigma, args.n)
        check = martingale_check(sigma, args.N, args.t, args.samples, seed=args.seed, steps=args.steps)
        return Outcome(check, ok=check.within(3))
    lam = _cycle_type(args)
    cfg = SimConfig(
        N=args.N,
        t=args.t,
        steps=args.steps,
        samples=args.samples,
        seed=args.seed,
        raw_time=args.raw_time,
        trace_path=args.trace,
    )
    if args.mode == "conjugation":
        check = conjugation_check(lam, cfg)
    elif args.mode == "weak-order":
        check = weak_order_check(lam, cfg)
    elif args.exact:
        check = compare(estimate_moment(lam, cfg), exact_moment(lam, cfg))
    else:
        return Outcome(estimate_moment(lam, cfg))
    return Outcome(check, ok=check.within(3))


@command("cover")
def cover(args: argparse.Namespace) -> Outcome:
    lam = _cycle_type(args, "lambda_")
    n = args.n if args.n is not None else lam.n
    if args.analytic:
        value = analytic_expectation(n, lam, args.N, args.t)
        return Outcome(ValueResult(name="analytic expectation", value=value, parameters={"lambda": str(lam)}))
    check = genus_estimator(n, lam, args.N, args.t, args.samples, seed=args.seed)
    return Outcome(check, ok=check.within(3))


@command("class-graph")
def class_graph(args: argparse.Namespace) -> Outcome:
    check_budget("degree", args.n, settings.n_max)
    rows = [[str(lam), str(mu), count] for lam, mu, count in class_graph_edges(args.n)]
    return Outcome(TableResult(name=f"class graph of S_{args.n}", columns=["from", "to", "count"], rows=rows))


@command("verify-all")
def verify_all(args: argparse.Namespace) -> Outcome:
    results = run_all(quick=args.quick, names=args.suite)
    for result in results:
        LOGGER.info("%s: %s (%s checks)", result.name, "ok" if result.passed else "FAILED", result.checks)
    return Outcome(results, ok=all(r.passed for r in results))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heatwalk", description="Heat-kernel moments of unitary Brownian motion")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--format", choices=["json", "csv"], default="json")
    parser.add_argument("--output", help="write the artifact here instead of stdout")
    parser.add_argument("--verbose", action="store_true")
    parser.add_argument("--threads", type=int, help="worker threads for Monte Carlo runs")
    parser.add_argument("--n-max", type=int, dest="n_max")
    parser.add_argument("--matrix-budget", type=int, dest="matrix_budget")
    parser.add_argument("--enumeration-budget", type=int, dest="enumeration_budget")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("s-table", help="path counts S(σ, k, d)")
    p.add_argument("--n", type=int)
    p.add_argument("--class", dest="class_", required=True)
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--method", choices=["walk", "character", "brute"], default="walk")

    p = sub.add_parser("s-closed", help="S((1…n), k, d) from the Stirling-number formula")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kmax", type=int, required=True)

    p = sub.add_parser("cnp", help="c_{n,p}")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)

    for name in ("expand", "eval", "fourier"):
        p = sub.add_parser(name)
        p.add_argument("--n", type=int)
        p.add_argument("--cycle-type", dest="cycle_type", required=True)
        p.add_argument("--group", default="u")
        if name == "expand":
            p.add_argument("--d-max", dest="d_max", type=int, default=4)
            continue
        p.add_argument("--t", type=float, required=True)
        if name == "eval":
            p.add_argument("--N", type=float, required=True)
            p.add_argument("--digits", type=int, default=15)
            p.add_argument("--d-max", dest="d_max", type=int)
        else:
            p.add_argument("--N", type=int, required=True)

    p = sub.add_parser("nc", help="non-crossing partitions")
    p.add_argument("--n", type=int)
    p.add_argument("--blocks")

    p = sub.add_parser("kreweras", help="Kreweras complement")
    p.add_argument("--blocks", required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--method", choices=["permutation", "interleaving"], default="permutation")

    for name in ("moments", "cumulants"):
        p = sub.add_parser(name)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--t", type=float, required=True)

    p = sub.add_parser("word", help="limit moment of a word in free Brownian motions")
    p.add_argument("--word", required=True)
    p.add_argument("--cumulant", action="store_true")

    p = sub.add_parser("verify-casimir")
    p.add_argument("--group", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--N", type=int, required=True)

    p = sub.add_parser("simulate", help="Monte Carlo Brownian motion on U(N)")
    p.add_argument("--n", type=int)
    p.add_argument("--cycle-type", dest="cycle_type", default="1")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--raw-time", dest="raw_time", action="store_true")
    p.add_argument("--trace", help="CSV of per-sample values")
    p.add_argument("--mode", choices=["moment", "martingale", "conjugation", "weak-order"], default="moment")
    p.add_argument("--sigma", help="starting permutation for martingale mode")
    p.add_argument("--exact", action="store_true", help="compare with the exact value")

    p = sub.add_parser("cover", help="random ramified coverings")
    p.add_argument("--n", type=int)
    p.add_argument("--lambda", dest="lambda_", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--analytic", action="store_true")

    p = sub.add_parser("class-graph", help="Cayley graph of S_n modulo conjugation")
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("verify-all", help="run every verification suite")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--suite", action="append", choices=sorted(SUITES))
    return parser


@contextmanager
def _overrides(args: argparse.Namespace) -> Iterator[None]:
    updates = {
        key: getattr(args, key)
        for key in ("threads", "n_max", "matrix_budget", "enumeration_budget")
        if getattr(args, key) is not None
    }
    previous = {key: getattr(settings, key) for key in updates}
    for key, value in updates.items():
        setattr(settings, key, value)
    try:
        yield
    finally:
        for key, value in previous.items():
            setattr(settings, key, value)


def _configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else getattr(logging, settings.log_level.upper(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger().setLevel(level)


def _dispatch(args: argparse.Namespace) -> Outcome:
    handler = _HANDLERS[args.command]
    try:
        return handler(args)
    except CommandError:
        raise
    except IdentityViolation as exc:
        raise CommandError(1, str(exc)) from exc
    except (HeatwalkError, ValueError) as exc:
        raise CommandError(2, str(exc)) from exc


def _arguments(args: argparse.Namespace) -> dict[str, object]:
    return {key: value for key, value in vars(args).items() if key != "command"}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    _configure_logging(args.verbose)
    try:
        with _overrides(args):
            outcome = _dispatch(args)
        manifest = build_manifest(args.command, _arguments(args), getattr(args, "seed", None))
        if OutputFormat(args.format.upper()) == OutputFormat.CSV:
            text = render_csv(manifest, outcome.result)
        else:
            text = render_json(manifest, outcome.result)
        write_artifact(text, args.output)
    except CommandError as exc:
        LOGGER.error("%s failed: %s", args.command, exc.detail)
        sys.stderr.write(f"heatwalk {args.command}: {exc.detail}\n")
        return exc.exit_code
    except OSError as exc:
        sys.stderr.write(f"heatwalk {args.command}: {exc}\n")
        return 2
    return 0 if outcome.ok else 1


def main() -> None:
    sys.exit(run())
