#!/usr/bin/env python3
"""
padic-polygon - CLI entry point.

This module provides the command-line interface: radii profiles,
controlling graphs, audits, point-level polygons, the radius oracle and the
Frobenius tools. Exit codes: 0 on success, 1 on error, 2 when an audit
finds violations.
"""

import logging
import sys
from pathlib import Path
from typing import Any, Callable, Optional

import click

from padic_polygon.arith.scalars import format_qlog
from padic_polygon.config import PolygonConfig, load_default_config
from padic_polygon.core.audit import audit_main_theorem
from padic_polygon.core.criterion import check_criterion, describe
from padic_polygon.core.radii_engine import (
    HEIGHT,
    RADIUS,
    RadiiEngine,
    profile_summary,
    prune_to_controlling_graph,
)
from padic_polygon.errors import PadicPolygonError
from padic_polygon.geometry.line import Point
from padic_polygon.manifest import RunManifest
from padic_polygon.parsers import ParsedInputs, ProfileParser, parse_inputs
from padic_polygon.polygons.frobenius import (
    descent_certify,
    frob_context,
    phi_point,
    pushforward_matrix,
    pushforward_radii,
)
from padic_polygon.polygons.polygon import slopes
from padic_polygon.polygons.spectral import (
    DifferentialOperator,
    companion_matrix,
    cyclic_operator,
    radius_oracle,
    small_radius_certify,
    spectral_polygon_at,
)
from padic_polygon.storage import FORMATS, JSONStorage, emit, json_payload
from padic_polygon.utils.logger import setup_logger

logger = logging.getLogger(__name__)

EXIT_ERROR = 1
EXIT_VIOLATIONS = 2


def parse_point(
    ctx: click.Context, param: click.Parameter, value: Optional[str]
) -> Optional[Point]:
    """Read --at c,L into a Point ("-inf" for a type-1 point)."""
    if value is None:
        return None
    try:
        center, log_radius = value.split(",")
        return Point.of(center.strip(), log_radius.strip())
    except (ValueError, PadicPolygonError) as e:
        raise click.BadParameter(f"expected c,L with rationals, got {value!r}") from e


def write_output(data: bytes, output: Optional[str]) -> None:
    """Write to a file, or to stdout when output is None or "-"."""
    if output is None or output == "-":
        click.echo(data.decode("utf-8"), nl=False)
        return
    path = Path(output)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)
    logger.info(f"Output saved to {path}")


def save_result(
    obj: Any,
    output: Optional[str],
    manifest: RunManifest,
    fmt: str = "json",
    approx: bool = False,
    index: int = 1,
) -> None:
    """JSON files go through JSONStorage; other formats and stdout through emit."""
    if fmt == "json" and output not in (None, "-"):
        JSONStorage(output).save(json_payload(obj), manifest)
        return
    write_output(emit(obj, fmt, manifest, approx, index), output)


def run_guarded(body: Callable[[], Any]) -> Any:
    """Run a command body; library errors are logged and exit with code 1."""
    try:
        return body()
    except PadicPolygonError as e:
        logger.error(f"{type(e).__name__}: {e}")
        click.echo(f"Error: {e}", err=True)
        sys.exit(EXIT_ERROR)


def _operator_of(inputs: ParsedInputs, config: PolygonConfig) -> DifferentialOperator:
    """The input operator, or the operator of a cyclic vector of the input matrix."""
    if inputs.is_operator:
        return inputs.system
    op, _ = cyclic_operator(inputs.system, config.max_cyclic_attempts, config.rank_cap)
    logger.info(f"Using the operator of a cyclic vector (rank {op.rank})")
    return op


input_option = click.option(
    "--input", "-i", "input_path", required=True, type=click.Path(), help="Input JSON"
)
output_option = click.option(
    "--output", "-o", type=click.Path(), help="Output file (stdout if omitted)"
)
at_option = click.option("--at", "point", required=True, callback=parse_point, help="Point as c,L")


@click.group()
@click.option("--config", "-c", type=click.Path(exists=True), help="Custom configuration file")
@click.option("-p", "prime", type=int, help="Residue characteristic (overrides the input file)")
@click.option("-N", "oracle_depth", type=int, help="Radius oracle depth (default 150)")
@click.option("--max-frobenius", type=int, help="Maximal Frobenius push-forwards (default 6)")
@click.option("--approx", is_flag=True, help="Add float echo columns to CSV output")
@click.option("--log-file", type=click.Path(), help="Also log to this file")
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose logging")
@click.pass_context
def cli(
    ctx: click.Context,
    config: Optional[str],
    prime: Optional[int],
    oracle_depth: Optional[int],
    max_frobenius: Optional[int],
    approx: bool,
    log_file: Optional[str],
    verbose: bool,
):
    """
    padic-polygon - Newton polygons and convergence radii of p-adic differential equations.
    """
    setup_logger(
        "padic_polygon",
        level=logging.INFO,
        log_file=Path(log_file) if log_file else None,
        verbose=verbose,
        stream=sys.stderr,
    )

    if config:
        polygon_config = PolygonConfig.from_yaml(Path(config)).from_env()
    else:
        polygon_config = load_default_config()
    polygon_config.override(
        prime=prime,
        oracle_depth=oracle_depth,
        max_frobenius=max_frobenius,
        approx=approx or None,
        verbose=verbose or None,
    )

    ctx.ensure_object(dict)
    ctx.obj["config"] = polygon_config


@cli.command()
@input_option
@click.option("--domain", "-d", "domain_path", type=click.Path(), help="Domain JSON")
@output_option
@click.option("--format", "-f", "fmt", type=click.Choice(FORMATS), help="Output format")
@click.option("--i-max", type=int, help="Largest index computed (defaults to the rank)")
@click.pass_context
def profile(
    ctx: click.Context,
    input_path: str,
    domain_path: Optional[str],
    output: Optional[str],
    fmt: Optional[str],
    i_max: Optional[int],
):
    """
    Compute the convergence radii profile of an operator on a domain.

    \b
    Examples:
        padic-polygon profile -i op.json -d domain.json -o profile.json
        padic-polygon -p 3 profile -i op.json -f csv -o profile.csv
    """
    config = ctx.obj["config"]

    def body():
        inputs = parse_inputs(input_path, domain_path, config)
        op = _operator_of(inputs, config)
        manifest = RunManifest.start("profile", inputs.paths, inputs.p, config)

        engine = RadiiEngine(config)
        result = engine.build_profile_with_stats(op, inputs.domain, inputs.p, i_max)
        rp = result["profile"]
        stats = result["stats"]

        save_result(rp, output, manifest.finish(), fmt or config.output_format, config.approx)

        summary = profile_summary(rp)
        logger.info(
            f"Profile: {summary['vertices']} vertices, {summary['edges']} edges, "
            f"classes {summary['classes']}, {stats['fallbacks']} fallbacks, "
            f"{stats['duration']:.2f}s"
        )

    run_guarded(body)


@cli.command()
@input_option
@output_option
@click.option("--index", "index", type=int, default=1, show_default=True, help="Index i")
@click.option(
    "--quantity",
    type=click.Choice([RADIUS, HEIGHT]),
    default=RADIUS,
    show_default=True,
    help="Prune R_i or H_i",
)
@click.option(
    "--format", "-f", "fmt", type=click.Choice(FORMATS), default="dot", show_default=True
)
@click.pass_context
def graph(
    ctx: click.Context, input_path: str, output: Optional[str], index: int, quantity: str, fmt: str
):
    """
    Prune a profile to the controlling graph of R_i (or H_i).

    \b
    Examples:
        padic-polygon graph -i profile.json --index 1 -o graph.dot
    """
    config = ctx.obj["config"]

    def body():
        rp = ProfileParser(config).load_and_parse(input_path)
        cg = prune_to_controlling_graph(rp, index, quantity)
        manifest = RunManifest.start("graph", {"input": input_path}, rp.p, config)
        save_result(cg, output, manifest.finish(), fmt, config.approx, index)
        logger.info(
            f"Controlling graph of index {index}: {len(cg.graph.vertices())} vertices, "
            f"{len(cg.removed)} branches removed"
        )

    run_guarded(body)


@cli.command()
@input_option
@output_option
@click.pass_context
def audit(ctx: click.Context, input_path: str, output: Optional[str]):
    """
    Audit a profile: integrality, concavity, super-harmonicity, sandwich bounds.

    Exits with code 2 when a violation is found.

    \b
    Examples:
        padic-polygon audit -i profile.json -o report.json
    """
    config = ctx.obj["config"]

    def body() -> bool:
        rp = ProfileParser(config).load_and_parse(input_path)
        report = audit_main_theorem(rp)
        criterion = {}
        for i in range(1, rp.rank + 1):
            result = check_criterion(rp, i, C=report.exceptional.get(i, []), quantity=HEIGHT)
            logger.info(f"Criterion for H_{i}: {describe(result)}")
            criterion[str(i)] = result.to_dict()
        manifest = RunManifest.start("audit", {"input": input_path}, rp.p, config)
        payload = {"audit": report.to_dict(), "criterion": criterion}
        save_result(payload, output, manifest.finish())
        return report.passed

    if not run_guarded(body):
        sys.exit(EXIT_VIOLATIONS)


@cli.command()
@input_option
@at_option
@output_option
@click.pass_context
def polygon(ctx: click.Context, input_path: str, point: Point, output: Optional[str]):
    """
    Spectral polygon and Young-certified radii at one point.

    \b
    Examples:
        padic-polygon polygon -i op.json --at 0,0
    """
    config = ctx.obj["config"]

    def body():
        inputs = parse_inputs(input_path, config=config)
        op = _operator_of(inputs, config)
        np_ = spectral_polygon_at(op, point, inputs.p)
        certified = small_radius_certify(np_, point, inputs.p)
        manifest = RunManifest.start("polygon", inputs.paths, inputs.p, config)
        payload = {
            "at": point.to_dict(),
            "polygon": np_.to_dict(),
            "slopes": [format_qlog(s) for s in slopes(np_)],
            "radii": certified.to_dict(),
        }
        save_result(payload, output, manifest.finish())

    run_guarded(body)


@cli.command()
@input_option
@at_option
@output_option
@click.pass_context
def oracle(ctx: click.Context, input_path: str, point: Point, output: Optional[str]):
    """
    Estimate log R_1 at a point from the Taylor matrices G_n (cross-check only).

    \b
    Examples:
        padic-polygon -N 150 oracle -i matrix.json --at 0,0
    """
    config = ctx.obj["config"]

    def body():
        inputs = parse_inputs(input_path, config=config)
        G = inputs.system if not inputs.is_operator else companion_matrix(inputs.system)
        estimate = radius_oracle(G, point, config.oracle_depth, inputs.p)
        manifest = RunManifest.start("oracle", inputs.paths, inputs.p, config)
        payload = {"at": point.to_dict(), "N": config.oracle_depth, "estimate": format_qlog(estimate)}
        save_result(payload, output, manifest.finish())

    run_guarded(body)


@cli.group()
def frobenius():
    """Frobenius push-forward tools."""
    pass


@frobenius.command()
@input_option
@output_option
@click.pass_context
def push(ctx: click.Context, input_path: str, output: Optional[str]):
    """
    Push a connection matrix forward along T -> T^p.

    \b
    Examples:
        padic-polygon frobenius push -i matrix.json -o pushed.json
    """
    config = ctx.obj["config"]

    def body():
        inputs = parse_inputs(input_path, config=config)
        G = inputs.system if not inputs.is_operator else companion_matrix(inputs.system)
        pushed = pushforward_matrix(G, inputs.p, config.max_rank)
        manifest = RunManifest.start("frobenius push", inputs.paths, inputs.p, config)
        save_result({"p": inputs.p, **pushed.to_dict()}, output, manifest.finish())

    run_guarded(body)


@frobenius.command()
@input_option
@at_option
@output_option
@click.pass_context
def radii(ctx: click.Context, input_path: str, point: Point, output: Optional[str]):
    """
    Spectral radii at x and the radii of the push-forward at φ(x).

    \b
    Examples:
        padic-polygon frobenius radii -i op.json --at 0,-1
    """
    config = ctx.obj["config"]

    def body():
        inputs = parse_inputs(input_path, config=config)
        op = _operator_of(inputs, config)
        certified = small_radius_certify(spectral_polygon_at(op, point, inputs.p), point, inputs.p)
        fc = frob_context(point, certified.values, inputs.p)
        pushed = pushforward_radii(certified, fc)
        manifest = RunManifest.start("frobenius radii", inputs.paths, inputs.p, config)
        payload = {
            "at": point.to_dict(),
            "phi_point": phi_point(point, inputs.p).to_dict(),
            "small_indices": fc.i_1,
            "radii": certified.to_dict(),
            "pushed": pushed.to_dict(),
        }
        save_result(payload, output, manifest.finish())

    run_guarded(body)


@frobenius.command()
@input_option
@at_option
@output_option
@click.pass_context
def descend(ctx: click.Context, input_path: str, point: Point, output: Optional[str]):
    """
    Certify the spectral radii at x by Frobenius push-forward and descent.

    \b
    Examples:
        padic-polygon --max-frobenius 3 frobenius descend -i op.json --at 0,0
    """
    config = ctx.obj["config"]

    def body():
        inputs = parse_inputs(input_path, config=config)
        report = descent_certify(inputs.system, point, inputs.p, **config.frobenius_options())
        manifest = RunManifest.start("frobenius descend", inputs.paths, inputs.p, config)
        save_result(report, output, manifest.finish())
        logger.info(f"Descent at {point.label}: {report.statuses} after {report.iterations} iterations")

    run_guarded(body)


def main():
    """Main entry point."""
    cli(obj={})


if __name__ == "__main__":
    main()
