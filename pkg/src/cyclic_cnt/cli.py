"""``cyclic-cnt``: analyze, verify, generate and consistify cyclic systems.

Exit codes: 0 success, 2 input error (bad file or flags), 3 an identity that
must hold failed (proportionality, status agreement, consistification).
"""

from __future__ import annotations

import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import click

from .consistify import consistify, verify_consistification_relations
from .files import (
    SystemFileError,
    dumps_system,
    format_rational,
    loads_system,
    measure_to_data,
    system_to_data,
)
from .generators import FAMILIES, GeneratorSpec, preset, sweep_system
from .measures import cnt3_single_negative, l1_distance, lemma2_defective_coupling, verify_proportionality
from .properties import check_system
from .system import CyclicSystem, is_consistently_connected

EXIT_INPUT = 2
EXIT_VIOLATION = 3


def _read_system(stream) -> CyclicSystem:
    try:
        return loads_system(stream.read())
    except SystemFileError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)


def _emit(data) -> None:
    click.echo(json.dumps(data, indent=2))


@click.group()
@click.version_option(package_name="artifact")
def main() -> None:
    """Contextuality measures of cyclic systems of binary random variables."""


def analyze_system(system: CyclicSystem, witnesses: bool = False, with_consistify: bool = False) -> tuple[dict, bool]:
    """Report data and whether every identity checked along the way held."""
    start = time.perf_counter()
    report = verify_proportionality(system, witnesses=witnesses)
    n = system.rank
    ok = report.proportionality_holds and report.consistent
    data = {
        "input": system_to_data(system),
        "noncontextual": report.noncontextual,
        "cnt3": format_rational(report.cnt3),
        "cntf": format_rational(report.cntf),
        "proportionality": {
            "n_minus_1_times_cnt3": format_rational((n - 1) * report.cnt3),
            "cntf": format_rational(report.cntf),
            "holds": report.proportionality_holds,
        },
        "status_agreement": report.consistent,
    }
    if with_consistify:
        twin, _ = consistify(system)
        check = verify_consistification_relations(system)
        ratio = check.cnt3_ratio
        connected = is_consistently_connected(twin)
        data["consistification"] = {
            "rank": twin.rank,
            "cnt3": format_rational(check.cnt3_consistified),
            "cntf": format_rational(check.cntf_consistified),
            "cntf_invariant": check.cntf_invariant,
            "cnt3_ratio": None if ratio is None else format_rational(ratio),
            "cnt3_ratio_expected": format_rational(Fraction(n - 1, 2 * n - 1)),
            "cnt3_ratio_holds": check.cnt3_ratio_holds,
            "status_preserved": check.status_preserved,
            "consistently_connected": connected,
        }
        ok = ok and check.cntf_invariant and check.cnt3_ratio_holds and check.status_preserved and connected
    if witnesses:
        block = {
            "y_star": measure_to_data(report.y_star.weights),
            "z_star": measure_to_data(report.z_star.weights),
        }
        if report.cnt3 > 0:
            y = cnt3_single_negative(system, report.cnt3)
            z = lemma2_defective_coupling(system, y)
            block["single_negative"] = {
                "y": measure_to_data(y.weights),
                "z": measure_to_data(z.weights),
                "l1_distance": format_rational(l1_distance(y, z)),
            }
        data["witnesses"] = block
    data["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
    return data, ok


@main.command()
@click.argument("input_file", type=click.File("r"))
@click.option("--witnesses", is_flag=True, help="Include sparse witness measures.")
@click.option("--consistify", "with_consistify", is_flag=True, help="Also check the consistified twin.")
def analyze(input_file, witnesses: bool, with_consistify: bool) -> None:
    """Compute noncontextuality, CNT3 and CNTF of a system file ('-' for stdin)."""
    system = _read_system(input_file)
    data, ok = analyze_system(system, witnesses, with_consistify)
    _emit(data)
    if not ok:
        click.echo("error: an identity between the measures failed", err=True)
        sys.exit(EXIT_VIOLATION)


def _trial(args):
    rank, seed, family, deep, consistent = args
    system = sweep_system(GeneratorSpec(rank, seed), family)
    return check_system(system, deep=deep, consistent=consistent)


@main.command()
@click.option("--rank", type=click.IntRange(2, 6), required=True)
@click.option("--trials", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True)
@click.option("--consistent", is_flag=True, help="Check the consistification relations too.")
@click.option("--deep", is_flag=True, help="Check the single-negative and defective-coupling constructions.")
@click.option(
    "--family",
    type=click.Choice(["mixed", *FAMILIES]),
    default="mixed",
    show_default=True,
    help="Random family; 'mixed' rotates through all of them.",
)
@click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--verbose", "-v", is_flag=True, help="One line per trial.")
def verify(rank, trials, seed, consistent, deep, family, jobs, verbose) -> None:
    """Run the exact identities on seeded random systems; trial t uses seed + t."""
    tasks = [(rank, (seed + t) % 2**64, family, deep, consistent) for t in range(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            outcomes = list(pool.map(_trial, tasks))
    else:
        outcomes = [_trial(task) for task in tasks]
    passed = 0
    for (_, trial_seed, *_rest), outcome in zip(tasks, outcomes):
        passed += outcome.passed
        if verbose or not outcome.passed:
            status = "pass" if outcome.passed else "FAIL " + ",".join(outcome.failures)
            click.echo(
                f"seed {trial_seed}: cnt3={format_rational(outcome.cnt3)} "
                f"cntf={format_rational(outcome.cntf)} {status}"
            )
    contextual = sum(o.contextual for o in outcomes)
    click.echo(f"rank {rank}: {passed}/{trials} pass ({contextual} contextual)")
    if passed != trials:
        sys.exit(EXIT_VIOLATION)


@main.command()
@click.option("--preset", "preset_name", help="example1, example2, pr-box or uniform-independent-<n>.")
@click.option("--random", "use_random", is_flag=True, help="Draw a seeded random system.")
@click.option("--rank", type=click.IntRange(min=2), help="Rank of the random system.")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=0, show_default=True)
@click.option("--family", type=click.Choice(["mixed", *FAMILIES]), default="uniform", show_default=True)
@click.option("--denominator-bound", type=click.IntRange(min=2), default=16, show_default=True)
def generate(preset_name, use_random, rank, seed, family, denominator_bound) -> None:
    """Write a system file to standard output."""
    if bool(preset_name) == use_random:
        raise click.UsageError("give exactly one of --preset or --random")
    if use_random:
        if rank is None:
            raise click.UsageError("--random needs --rank")
        system = sweep_system(GeneratorSpec(rank, seed, denominator_bound), family)
    else:
        try:
            system = preset(preset_name)
        except (KeyError, ValueError) as exc:
            raise click.BadParameter(str(exc), param_hint="--preset") from None
    click.echo(dumps_system(system), nl=False)


@main.command("consistify")
@click.argument("input_file", type=click.File("r"))
def consistify_command(input_file) -> None:
    """Write the rank-2n consistified system of a system file."""
    system = _read_system(input_file)
    twin, _ = consistify(system)
    click.echo(dumps_system(twin), nl=False)


if __name__ == "__main__":  # pragma: no cover
    main()
