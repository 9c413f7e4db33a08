"""
Command Line Interface for qwdirac

Exit codes: 0 success, 2 usage or domain error, 3 non-convergence under --strict.
"""

import sys
from functools import wraps
from pathlib import Path
from typing import Any, Dict, Optional, Type

import click
import numpy as np
import pandas as pd
from click.core import ParameterSource
from loguru import logger
from pydantic import ValidationError

from . import __version__
from .algebra import qubit
from .config import (
    LOG_LEVELS,
    DensityConfig,
    FiguresConfig,
    MomentsConfig,
    RunConfig,
    SqwConfig,
    all_multi_indices,
    default_log_level,
)
from .core import CrossCheck, DiracProblem, WalkProblem, default_threads
from .dirac import GridSpec
from .exceptions import ConvergenceError, DomainError
from .export import distribution_frame, grid_frame, histogram_frame, report_text, table_text, write_text
from .figures import figure_panels
from .laws import (
    KonnoLaw,
    dirac_mu,
    dirac_mu_norm,
    dirac_mu_raw,
    dirac_nu,
    konno_mu,
    konno_nu,
    law_moment,
    mu2,
)
from .monitoring import monitor
from .quadrature import IntegrationSpec, Method, integrate_1d, integrate_ellipse
from .walk import coin1, coin2, distribution, evolve, excess_mass_ellipse, excess_mass_interval, moment, pseudovelocity_histogram

EXIT_USAGE = 2
EXIT_CONVERGENCE = 3


def configure_logging(level: str):
    """Single stderr sink at the requested level"""
    logger.remove()
    logger.add(sys.stderr, level=level.upper(), format="{time:HH:mm:ss} | {level: <8} | {message}")


def common_options(func):
    """--config, --out, --format, --threads, --strict and --seed"""
    options = [
        click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False), help="Key-value config file"),
        click.option("--out", help="Output file (directory for figures)"),
        click.option("--format", "format", type=click.Choice(["csv", "json"]), help="Output format"),
        click.option("--threads", type=click.IntRange(min=1), help="Worker threads (default: QWDIRAC_THREADS or CPU count, max 8)"),
        click.option("--strict", is_flag=True, help="Exit 3 when a quadrature does not converge"),
        click.option("--seed", type=click.IntRange(0, 2 ** 64 - 1), help="Monte-Carlo seed"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def guarded(func):
    """Map library errors onto exit codes"""
    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ValidationError as e:
            logger.error(f"invalid configuration: {e}")
            click.echo(f"❌ Invalid configuration: {e}", err=True)
            sys.exit(EXIT_USAGE)
        except DomainError as e:
            logger.error(str(e))
            click.echo(f"❌ {e}", err=True)
            sys.exit(EXIT_USAGE)
        except ConvergenceError as e:
            logger.error(str(e))
            click.echo(f"❌ Not converged: {e}", err=True)
            sys.exit(EXIT_CONVERGENCE)
        except OSError as e:
            logger.error(str(e))
            click.echo(f"❌ {e}", err=True)
            sys.exit(EXIT_USAGE)
    return wrapper


def build_config(model: Type[RunConfig], config_file: Optional[str], **flags: Any) -> RunConfig:
    """Config file values, overridden by flags given on the command line"""
    ctx = click.get_current_context()
    overrides: Dict[str, Any] = {}
    for name, value in flags.items():
        if ctx.get_parameter_source(name) in (ParameterSource.COMMANDLINE, ParameterSource.ENVIRONMENT):
            overrides[name] = value
    if config_file:
        return model.from_file(config_file, overrides)
    return model.model_validate(overrides)


def emit(config: RunConfig, text: str):
    if config.out:
        write_text(config.out, text)
        click.echo(f"✅ Wrote {config.out}")
    else:
        click.echo(text, nl=False)


@click.group()
@click.version_option(version=__version__)
@click.option("--log-level", type=click.Choice(LOG_LEVELS, case_sensitive=False), help="Log level (default: QWDIRAC_LOG_LEVEL or WARNING)")
def main(log_level: Optional[str]):
    """Quantum walks and cutoff Dirac pseudovelocity laws"""
    configure_logging(log_level or default_log_level())


@main.command()
@click.option("--d", type=click.IntRange(1, 2), help="Walk dimension")
@click.option("--a", help="Coin entry a (d=1), e.g. 0.70710678 or sqrt(0.7)i")
@click.option("--b", help="Coin entry b (d=1)")
@click.option("--p", type=float, help="Coin parameter p (d=2)")
@click.option("--qubit", help="Initial qubit, comma-separated complex components")
@click.option("--t", type=click.IntRange(min=0), help="Number of steps")
@click.option("--bins", type=click.IntRange(min=1), help="Histogram bins per axis")
@click.option("--margin", type=float, help="Support margin for excess-mass checks")
@click.option("--output", type=click.Choice(["distribution", "histogram"]), help="Table to write")
@click.option("--check-kspace", is_flag=True, help="Cross-check moments against the k-space integral")
@common_options
@guarded
def sqw(config_file, **flags):
    """Simulate a simple quantum walk"""
    config = build_config(SqwConfig, config_file, **flags)
    q = qubit(config.qubit)
    coin = coin1(config.a, config.b) if config.d == 1 else coin2(config.p)
    click.echo(f"🚶 {config.d}D walk, t={config.t}", err=not config.out)

    state = evolve(q, coin, config.t)
    summary = walk_summary(config, coin, q, state)

    if config.output == "histogram":
        frame = histogram_frame(pseudovelocity_histogram(state, config.bins))
    else:
        frame = distribution_frame(distribution(state), config.d)

    for key, value in summary.items():
        click.echo(f"   {key}: {value}", err=not config.out)

    if config.format == "json":
        emit(config, report_text({"summary": summary, "rows": frame.to_dict(orient="list")}, config))
    else:
        emit(config, table_text(frame, config))


def walk_summary(config: SqwConfig, coin, q, state) -> Dict[str, Any]:
    """Moments, Konno/ellipse comparisons and the optional k-space cross-check"""
    d = config.d
    summary: Dict[str, Any] = {"total_probability": state.total_probability()}
    for alpha in all_multi_indices(d, 2)[1:]:
        key = "".join(str(a) for a in alpha)
        summary[f"moment_{key}"] = moment(state, alpha)
        if config.t > 0:
            summary[f"velocity_moment_{key}"] = moment(state, alpha) / config.t ** sum(alpha)

    if config.t > 0 and coin.supports_limit_law:
        if d == 1:
            law = KonnoLaw(a=coin.a, b=coin.b, q=q)
            summary["konno_slope"] = law.slope
            for power in (1, 2):
                result = law_moment(law, (power,), strict=config.strict)
                summary[f"konno_moment_{power}"] = result.value
            summary["excess_mass"] = excess_mass_interval(state, law.a_abs + config.margin)
        else:
            summary["excess_mass"] = excess_mass_ellipse(state, config.p, config.margin)

    if config.check_kspace:
        problem = WalkProblem(coin=coin, q=q, t=config.t)
        check = CrossCheck(problem, {"strict": config.strict, "threads": config.threads})
        entries = check.run(all_multi_indices(d, 3)[1:])
        summary["kspace_max_deviation"] = max(max(e.deviations.values(), default=0.0) for e in entries)
        summary["kspace_converged"] = all(e.converged for e in entries)
    return summary


@main.command()
@click.option("--law", type=click.Choice(["konno", "sqw2", "dirac"]), help="Density to tabulate")
@click.option("--d", type=click.IntRange(1, 4), help="Dirac dimension")
@click.option("--lambda", "cutoff", type=float, help="Cutoff ratio Lambda = lambda/(mc)")
@click.option("--a", help="Konno coin entry a")
@click.option("--b", help="Konno coin entry b (weight only)")
@click.option("--p", type=float, help="2D walk parameter p")
@click.option("--qubit", help="Qubit for the weighted law nu")
@click.option("--grid", type=click.IntRange(min=2), help="Points per axis")
@click.option("--check-norm", is_flag=True, help="Append the quadrature of the tabulated density")
@click.option("--m", type=float, help="Rest mass")
@click.option("--c", type=float, help="Speed of light")
@click.option("--hbar", type=float, help="Reduced Planck constant")
@common_options
@guarded
def density(config_file, **flags):
    """Tabulate a limit density"""
    config = build_config(DensityConfig, config_file, **flags)
    frame = density_frame(config)
    norm = density_norm(config) if config.check_norm else None

    if config.format == "json":
        report: Dict[str, Any] = {"rows": frame.to_dict(orient="list")}
        if norm is not None:
            report["norm"] = {"value": norm.value, "error": norm.error, "converged": norm.converged}
        emit(config, report_text(report, config))
    else:
        text = table_text(frame, config)
        if norm is not None:
            converged = "true" if norm.converged else "false"
            text += f"# norm = {norm.value!r}; error = {norm.error!r}; converged = {converged}\n"
        emit(config, text)

    if norm is not None:
        click.echo(f"norm: {norm.value:.9f} ± {norm.error:.1e}", err=not config.out)
        if config.strict and not norm.converged:
            raise ConvergenceError("density normalisation did not converge", estimate=norm.value, error=norm.error)


def density_frame(config: DensityConfig) -> pd.DataFrame:
    params = config.params
    axis = np.linspace(-1.0, 1.0, config.grid)
    if config.law == "konno":
        columns = {"v": axis, "mu": konno_mu(axis, abs(config.a))}
        if config.qubit is not None:
            columns["nu"] = konno_nu(axis, KonnoLaw(a=config.a, b=config.coin_b, q=qubit(config.qubit)))
        return pd.DataFrame(columns)
    if config.law == "sqw2":
        v1, v2 = np.meshgrid(axis, axis, indexing="ij")
        return grid_frame([axis, axis], {"mu": mu2(v1, v2, config.p)})

    if config.qubit is None:
        v = np.linspace(0.0, params.c, config.grid)
        return pd.DataFrame({
            "v": v,
            "mu": dirac_mu(config.d, v, config.cutoff, params),
            "mu_raw": dirac_mu_raw(config.d, v, config.cutoff, params),
        })
    if config.d > 2:
        raise DomainError(f"nu tabulation on a velocity grid supports d <= 2, got d={config.d}")
    axes = [params.c * axis] * config.d
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    nu = dirac_nu(config.d, mesh, config.cutoff, qubit(config.qubit), params)
    return grid_frame(axes, {"nu": nu, "nu_raw": nu / params.c ** config.d})


def density_norm(config: DensityConfig):
    """Quadrature of the tabulated radial/one-dimensional density"""
    if config.law == "konno":
        a_abs = abs(config.a)
        spec = IntegrationSpec(tolerance=1e-10, method=Method.DOUBLE_EXPONENTIAL)
        return integrate_1d(lambda v: konno_mu(v, a_abs), -a_abs, a_abs, spec)
    if config.law == "sqw2":
        return integrate_ellipse(lambda v: mu2(v[:, 0], v[:, 1], config.p), config.p, IntegrationSpec(tolerance=1e-7))
    return dirac_mu_norm(config.d, config.cutoff, config.params)


@main.command()
@click.option("--d", type=click.IntRange(1, 4), help="Momentum dimension")
@click.option("--lambda", "cutoff", type=float, help="Cutoff ratio Lambda = lambda/(mc)")
@click.option("--qubit", help="Initial 4-component qubit")
@click.option("--alpha", "alphas", multiple=True, help="Multi-index such as 2,0,0 (repeatable)")
@click.option("--max-order", type=click.IntRange(0, 8), help="Use every multi-index up to this degree when no --alpha is given")
@click.option("--times", help="Finite-time schedule, e.g. 25,50,100")
@click.option("--tolerance", type=float, help="Absolute quadrature tolerance")
@click.option("--method", type=click.Choice([m.value for m in Method]), help="Quadrature method hint")
@click.option("--samples", type=click.IntRange(min=2), help="Monte-Carlo batch size")
@click.option("--grid", type=click.IntRange(min=8), help="Finite-time momentum grid points per axis")
@click.option("--paths", help="Comma-separated subset of asymptotic,law,finitetime")
@click.option("--m", type=float, help="Rest mass")
@click.option("--c", type=float, help="Speed of light")
@click.option("--hbar", type=float, help="Reduced Planck constant")
@common_options
@guarded
def moments(config_file, alphas, **flags):
    """Cross-check Dirac moments: momentum space, velocity space and finite t"""
    ctx = click.get_current_context()
    if ctx.get_parameter_source("alphas") is ParameterSource.COMMANDLINE:
        flags["alphas"] = ";".join(alphas)
    config = build_config(MomentsConfig, config_file, **flags)

    problem = DiracProblem(
        d=config.d,
        cutoff_ratio=config.cutoff,
        q=qubit(config.qubit),
        params=config.params,
        times=config.times,
        spec=IntegrationSpec(
            tolerance=config.tolerance,
            method=config.method,
            seed=config.seed,
            samples=config.samples,
        ),
        grid=GridSpec(points_per_axis=config.grid),
    )
    settings = {
        "strict": config.strict,
        "threads": config.threads or default_threads(),
        "paths": {name: {"enabled": name in config.paths} for name in ("asymptotic", "law", "finitetime")},
    }
    monitor.reset()
    report = CrossCheck(problem, settings).report(config.multi_indices)

    if config.format == "csv":
        rows = [
            {"alpha": ",".join(str(a) for a in entry["alpha"]), **result}
            for entry in report["entries"]
            for result in entry["results"]
        ]
        emit(config, table_text(pd.DataFrame(rows), config))
    else:
        emit(config, report_text(report, config))

    status = "✅" if report["converged"] else "⚠️"
    click.echo(f"{status} {len(report['entries'])} multi-indices, converged={report['converged']}", err=not config.out)


@main.command()
@click.option("--id", "figure", type=click.IntRange(1, 7), help="Figure number 1..7")
@click.option("--t", type=click.IntRange(min=1), help="Walk steps for simulated panels")
@click.option("--grid", type=click.IntRange(min=2), help="Points per axis")
@click.option("--bins", type=click.IntRange(min=1), help="Histogram bins per axis")
@common_options
@guarded
def figures(config_file, **flags):
    """Emit the data behind a figure, one file per panel"""
    config = build_config(FiguresConfig, config_file, **flags)
    directory = Path(config.out or ".")
    for panel in figure_panels(config):
        if config.format == "json":
            text = report_text({"panel": panel.name, "parameters": panel.parameters, "rows": panel.frame.to_dict(orient="list")}, config)
        else:
            text = table_text(panel.frame, config)
        path = write_text(directory / f"{panel.name}.{config.format}", text)
        click.echo(f"✅ {panel.name}: {path}")


if __name__ == "__main__":
    main()
