"""Command-line entry point: region, simulate and benefit subcommands."""

from __future__ import annotations

import argparse
from dataclasses import replace
import sys
from typing import Sequence

from loguru import logger
import numpy as np

from ..core.errors import ExponentError, ModelValidationError, PreconditionError
from ..core.prob import X, HypothesisPair, marginal
from ..regions.frontier import COHERENT, CONCURRENT, MODES, ExponentRegion, from_bits
from ..regions.positive_rate import (
    RatePair,
    high_rate_region,
    region_achievable,
    region_test_against_independence,
    region_test_against_independence_no_cooperation,
    require_independence_structure,
)
from ..regions.search import SearchConfig
from ..regions.zero_rate import (
    MAPPINGS,
    NO_COOP_COHERENT,
    NO_COOP_EQUAL_MARGINALS,
    NO_COOP_W1GE3,
    SAME,
    cooperation_benefit_zero_rate,
    degenerate_structure,
    region_coherent,
    region_concurrent_equal_marginals,
    region_concurrent_W1eq2,
    region_concurrent_W1ge3,
    region_no_cooperation,
)
from ..simulator.random_coding import DEFAULT_MU, max_sensor_mu, monte_carlo_positive_rate
from ..simulator.sweep import DEFAULT_SWEEP_TRIALS, exponent_convergence_sweep
from ..simulator.zero_rate_scheme import (
    ZeroRateSchemeConfig,
    exact_budget_allows,
    exact_zero_rate_errors,
    monte_carlo_zero_rate,
)
from .model_io import load_aux, load_model
from .reports import (
    BITS,
    NATS,
    dumps_json,
    in_unit,
    region_csv,
    region_payload,
    region_svg,
    simulation_csv,
    write_json,
    write_text,
)

ZERO_RATE = "zero-rate"
POSITIVE_RATE = "positive-rate"
HIGH_RATE = "high-rate"
NO_COOP = "no-coop"
REGIMES = (ZERO_RATE, POSITIVE_RATE, HIGH_RATE, NO_COOP)
BENEFIT_REGIMES = (ZERO_RATE, HIGH_RATE)
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exponents",
        description="Error-exponent regions of a one-sensor, two-detector cooperative test.",
    )
    parser.add_argument("--log-level", choices=LOG_LEVELS, default="WARNING")
    commands = parser.add_subparsers(dest="command", required=True)

    region = commands.add_parser("region", help="compute an exponent region")
    _add_common(region)
    region.add_argument("--mode", choices=MODES, default=COHERENT)
    region.add_argument("--regime", choices=REGIMES, default=ZERO_RATE)
    region.add_argument("--w1", type=int, default=3, help="sensor alphabet size (3 means 3 or more)")
    region.add_argument("--r1", type=float, default=0.0, help="sensor rate in the output unit")
    region.add_argument("--r2", type=float, default=0.0, help="cooperation rate in the output unit")
    region.add_argument("--grid-step", type=float, default=0.01, help="P_X grid step for the W1=2 sweep")
    region.add_argument("--r-grid", type=_float_list, default=None, help="comma-separated thresholds (nats)")
    region.add_argument("--no-coop-link", action="store_true", help="drop the Detector-1 to Detector-2 link")
    region.add_argument("--epsilon", type=float, default=1e-3, help="rate margin of the high-rate corner")
    region.add_argument("--lambda-points", type=int, default=33)
    region.add_argument("--restarts", type=int, default=64)
    region.add_argument("--sweeps", type=int, default=25)
    region.add_argument("--u-size", type=int, default=None)
    region.add_argument("--v-size", type=int, default=None)
    region.add_argument("--svg", default=None, help="write an SVG plot of the frontier")
    region.add_argument("--json", default=None, help="write region, witnesses and metadata as JSON")
    region.set_defaults(handler=cmd_region)

    simulate = commands.add_parser("simulate", help="finite-n error probabilities of a scheme")
    _add_common(simulate)
    simulate.add_argument("--mode", choices=MODES, default=COHERENT)
    simulate.add_argument("--n", type=_int_list, required=True, help="blocklength or ascending list")
    simulate.add_argument("--mu", type=float, default=None, help="typicality radius")
    simulate.add_argument("--w1", type=int, choices=(2, 3), default=3)
    simulate.add_argument("--mapping", choices=MAPPINGS, default=SAME)
    simulate.add_argument("--r", type=float, default=0.0, help="partition threshold (nats)")
    simulate.add_argument("--no-coop-link", action="store_true")
    method = simulate.add_mutually_exclusive_group()
    method.add_argument("--exact", action="store_true", help="force exact type enumeration")
    method.add_argument("--mc", action="store_true", help="force Monte Carlo")
    simulate.add_argument("--trials", type=int, default=DEFAULT_SWEEP_TRIALS)
    simulate.add_argument("--grid-step", type=float, default=0.01)
    simulate.add_argument("--aux", default=None, help="auxiliary channel JSON: simulate the random-coding scheme")
    simulate.add_argument("--r1", type=float, default=0.0, help="sensor rate in the output unit")
    simulate.add_argument("--r2", type=float, default=0.0, help="cooperation rate in the output unit")
    simulate.add_argument("--test-u1-first", action="store_true", help="run the P̄ test before the P test")
    simulate.set_defaults(handler=cmd_simulate)

    benefit = commands.add_parser("benefit", help="gain in θ2 from the cooperation link")
    _add_common(benefit)
    benefit.add_argument("--regime", choices=BENEFIT_REGIMES, default=ZERO_RATE)
    benefit.set_defaults(handler=cmd_benefit)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _setup_logging(args.log_level)
    try:
        return args.handler(args)
    except ExponentError as exc:
        logger.error("Command failed | command={} | exit_code={} | reason={}", args.command, exc.exit_code, exc)
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


def cmd_region(args: argparse.Namespace) -> int:
    pair = load_model(args.model)
    unit = _unit(args)
    region = _compute_region(pair, args, unit)
    _emit(args.out, region_csv(region, unit))
    if args.svg:
        write_text(args.svg, region_svg(region, unit, title=pair.name))
    if args.json:
        payload = region_payload(region, unit)
        payload.update(model=pair.name, regime=args.regime)
        write_json(args.json, payload)
    logger.info(
        "Region written | model={} | regime={} | mode={} | points={}",
        pair.name,
        args.regime,
        args.mode,
        len(region.points),
    )
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    pair = load_model(args.model)
    unit = _unit(args)
    if args.aux:
        return _simulate_random_coding(pair, args, unit)
    mu = args.mu if args.mu is not None else _default_mu(pair, args.mode)
    template = ZeroRateSchemeConfig(
        n=args.n[0],
        mu=mu,
        w1=args.w1,
        mapping=args.mapping,
        r=args.r,
        mode=args.mode,
        cooperative=not args.no_coop_link,
    )
    limits = None
    if len(args.n) > 1 and not (args.exact or args.mc):
        rows = exponent_convergence_sweep(
            pair,
            template,
            args.n,
            trials=args.trials,
            seed=args.seed,
            px_grid_step=args.grid_step,
            workers=args.workers,
        )
        estimates = [row.estimate for row in rows]
        limits = rows[0].theoretical
    else:
        estimates = []
        for n in args.n:
            config = replace(template, n=n)
            use_exact = args.exact or (not args.mc and exact_budget_allows(pair, n))
            if use_exact:
                estimates.append(exact_zero_rate_errors(pair, config, workers=args.workers))
            else:
                estimates.append(
                    monte_carlo_zero_rate(pair, config, args.trials, seed=args.seed, workers=args.workers)
                )
    _emit(args.out, simulation_csv(estimates, unit, limits))
    return 0


def cmd_benefit(args: argparse.Namespace) -> int:
    pair = load_model(args.model)
    unit = _unit(args)
    if args.regime == ZERO_RATE:
        coop = region_coherent(pair).corner[1]
        nocoop = region_no_cooperation(pair, NO_COOP_COHERENT).corner[1]
        benefit = cooperation_benefit_zero_rate(pair)
    else:
        with_link = high_rate_region(pair, COHERENT, cooperative=True)
        coop = with_link.region.corner[1]
        nocoop = high_rate_region(pair, COHERENT, cooperative=False).region.corner[1]
        benefit = with_link.benefit
    structure = degenerate_structure(pair)
    payload = {
        "model": pair.name,
        "regime": args.regime,
        "theta2_coop": in_unit(coop, unit),
        "theta2_nocoop": in_unit(nocoop, unit),
        "benefit": in_unit(benefit, unit),
        "unit": unit,
        "degenerate_structure": {
            "cooperation_useless": structure.cooperation_useless,
            "centralized_equivalent": structure.centralized_equivalent,
        },
    }
    _emit(args.out, dumps_json(payload))
    return 0


def _compute_region(pair: HypothesisPair, args: argparse.Namespace, unit: str) -> ExponentRegion:
    cooperative = not args.no_coop_link
    if args.regime == ZERO_RATE:
        if args.mode == COHERENT:
            return region_coherent(pair)
        if pair.x_marginals_equal():
            return region_concurrent_equal_marginals(pair)
        if args.w1 >= 3:
            return region_concurrent_W1ge3(pair)
        if args.w1 != 2:
            raise ModelValidationError(f"w1 must be at least 2, got {args.w1}")
        return region_concurrent_W1eq2(
            pair, args.grid_step, args.r_grid, cooperative=cooperative, workers=args.workers
        ).region
    if args.regime == HIGH_RATE:
        return high_rate_region(pair, args.mode, cooperative=cooperative, epsilon=args.epsilon).region
    r1 = _rate_in_nats(args.r1, unit)
    search = SearchConfig(
        lambda_points=args.lambda_points,
        restarts=args.restarts,
        seed=args.seed,
        u_size=args.u_size,
        v_size=args.v_size,
        sweeps=args.sweeps,
        workers=args.workers,
    )
    if args.regime == NO_COOP:
        if r1 > 0.0:
            return region_test_against_independence_no_cooperation(pair, r1, search)
        if args.mode == COHERENT:
            return region_no_cooperation(pair, NO_COOP_COHERENT)
        if pair.x_marginals_equal():
            return region_no_cooperation(pair, NO_COOP_EQUAL_MARGINALS)
        return region_no_cooperation(pair, NO_COOP_W1GE3)
    rates = RatePair(r1, _rate_in_nats(args.r2, unit))
    if args.mode == COHERENT and rates.r2 == 0.0 and _has_independence_structure(pair):
        return region_test_against_independence(pair, rates.r1, search)
    return region_achievable(pair, rates, args.mode, search)


def _simulate_random_coding(pair: HypothesisPair, args: argparse.Namespace, unit: str) -> int:
    aux = load_aux(args.aux, pair)
    rates = RatePair(_rate_in_nats(args.r1, unit), _rate_in_nats(args.r2, unit))
    mu = args.mu
    if mu is None:
        mu = DEFAULT_MU
        if args.mode == CONCURRENT:
            mu = min(mu, 0.9 * max_sensor_mu(pair, aux))
    estimates = [
        monte_carlo_positive_rate(
            pair,
            aux,
            rates,
            n,
            args.trials,
            seed=args.seed,
            mode=args.mode,
            p_test_first=not args.test_u1_first,
            mu=mu,
            workers=args.workers,
        )
        for n in args.n
    ]
    _emit(args.out, simulation_csv(estimates, unit))
    return 0


def _has_independence_structure(pair: HypothesisPair) -> bool:
    try:
        require_independence_structure(pair)
    except PreconditionError:
        return False
    return True


def _default_mu(pair: HypothesisPair, mode: str) -> float:
    """0.1, shrunk below half the P_X / P̄_X gap for concurrent detection."""
    if mode == CONCURRENT and not pair.x_marginals_equal():
        gap = float(np.max(np.abs(marginal(pair.p, (X,)).probs - marginal(pair.p_bar, (X,)).probs)))
        return min(0.1, 0.45 * gap)
    return 0.1


def _rate_in_nats(value: float, unit: str) -> float:
    return from_bits(value) if unit == BITS else float(value)


def _unit(args: argparse.Namespace) -> str:
    return NATS if args.nats else BITS


def _emit(path: str | None, text: str) -> None:
    if path:
        write_text(path, text)
    else:
        sys.stdout.write(text)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("model", help="model JSON file")
    parser.add_argument("--out", default=None, help="output file (stdout when omitted)")
    parser.add_argument("--nats", action="store_true", help="report exponents and rates in nats")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=None)


def _setup_logging(level: str) -> None:
    logger.remove()
    logger.add(sys.stderr, level=level, format="{time:HH:mm:ss} | {level: <8} | {name} | {message}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("expected at least one blocklength")
    return values


if __name__ == "__main__":
    raise SystemExit(main())
