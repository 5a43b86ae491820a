"""Command-line surface: every benchmark number and figure dataset as CSV/JSON.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 numeric/domain
error.  Identical invocations (including --seed) produce byte-identical
output; emitted files carry a metadata header with parameter values and the
engine's conventions.  Set CVCAT_THREADS to evaluate sweep points in a thread
pool (output order stays deterministic).
"""

from __future__ import annotations

import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Sequence

import click
import numpy as np

from . import __version__, fock, oracle, protocols, states
from .errors import CapacityError, DomainError, UsageError
from .gausspoly import hermite_gauss
from .tableio import render_table
from .validate import BENCHMARK_R, REFERENCES, SIGNAL_ALPHA, run_validation

CONVENTIONS = {
    "quadrature": "x = (a + a^dag)/sqrt(2); vacuum x-variance 1/2",
    "squeezing": "g = exp(-2r); x quadrature squeezed",
    "projection_kernel": "(2 pi)^-1/2 integral exp(+i beta x) psi(x) dx",
}


def _pmap(fn: Callable, items: Sequence):
    workers = int(os.environ.get("CVCAT_THREADS", "1") or "1")
    items = list(items)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _load_config(path: str | None) -> dict[str, str]:
    if not path:
        return {}
    cfg: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise click.UsageError(f"config line {raw!r} is not key=value")
        key, val = (part.strip() for part in line.split("=", 1))
        cfg[key.replace("-", "_")] = val
    return cfg


def _pick(flag, cfg: dict[str, str], key: str, cast, default):
    if flag is not None:
        return flag
    name = key.replace("-", "_")
    if name in cfg:
        raw = cfg[name]
        if cast is bool:
            return raw.lower() in ("1", "true", "yes", "on")
        return cast(raw)
    return default


def _parse_range(text: str) -> np.ndarray:
    try:
        start, stop, count = text.split(",")
        return np.linspace(float(start), float(stop), int(count))
    except ValueError as exc:
        raise click.UsageError(f"range {text!r} must be start,stop,count") from exc


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError as exc:
        raise click.UsageError(f"grid {text!r} must be NxM") from exc


def _emit(text: str, out: str | None):
    if out and out != "-":
        Path(out).write_text(text)
    else:
        click.get_text_stream("stdout").write(text)


def _meta(command: str, params: dict, extra: dict | None = None) -> dict:
    meta = {
        "command": command,
        "engine_version": __version__,
        "oracle_version": __version__,
        "params": params,
        "conventions": dict(CONVENTIONS),
    }
    if extra:
        meta.update(extra)
    return meta


def _guard(fn: Callable) -> Callable:
    """Map engine errors onto the documented exit codes."""
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except UsageError as exc:
            raise click.UsageError(str(exc)) from exc
        except (DomainError, CapacityError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(3)
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _resource_from_flags(resource: str, n: int, parity: str) -> protocols.Resource:
    if resource == "ideal":
        return protocols.IdealResource(parity)  # type: ignore[arg-type]
    if resource == "approx":
        return protocols.ApproxResource(n)
    if resource == "identity":
        return protocols.IdentityResource()
    raise click.UsageError(f"unknown resource {resource!r}")


def _oracle_teleport_fidelity(params: states.SignalParams, n: int, beta: float) -> float:
    """Fidelity of the teleported state computed purely from grid quadrature."""
    grid = oracle.GridSpec()
    xs = grid.axis()
    out_vals = oracle.quad_teleport(params, n, beta, grid)
    sig_vals = states.make_signal(params).evaluate(xs)
    w = np.full(xs.size, grid.step)
    w[0] = w[-1] = grid.step / 2.0
    overlap = np.sum(np.conjugate(sig_vals) * out_vals * w)
    norm = np.sum(np.abs(out_vals) ** 2 * w)
    return float(abs(overlap) ** 2 / norm)


@click.group()
@click.version_option(version=__version__, prog_name="cvcat")
def main():
    """Squeezed cat-state protocol simulator: truncation fidelities,
    post-selected teleportation, homodyne-heralded amplification."""


# ---------------------------------------------------------------------------
# truncation
# ---------------------------------------------------------------------------

@main.command()
@click.option("--alpha-range", default=None, help="start,stop,count [0,2.5,26]")
@click.option("--r", type=float, default=None, help="squeezing parameter [0]")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None)
@click.option("--oracle", "use_oracle", is_flag=True, default=None,
              help="add a quadrature cross-check column")
@click.option("--out", default=None, help="output path [stdout]")
@click.option("--config", default=None, help="key=value config file")
@_guard
def truncation(alpha_range, r, fmt, use_oracle, out, config):
    """Fidelity of two-level truncations of the even cat, against amplitude."""
    cfg = _load_config(config)
    alphas = _parse_range(_pick(alpha_range, cfg, "alpha-range", str, "0,2.5,26"))
    r = _pick(r, cfg, "r", float, 0.0)
    fmt = _pick(fmt, cfg, "format", str, "csv")
    use_oracle = bool(_pick(use_oracle, cfg, "oracle", bool, False))
    out = _pick(out, cfg, "out", str, None)
    g = math.exp(-2.0 * r)

    def build_row(alpha: float) -> dict:
        vec = fock.even_cat_fock(alpha, fock.DEFAULT_DIM)
        row = {
            "alpha": float(alpha),
            "F_formula": fock.cat_trunc02_formula(alpha),
            "F_fock": fock.truncation_fidelity(vec, {0, 2}),
            "F_squeezed": fock.squeezed_cat_trunc02_fidelity(alpha, r),
            "F_squeezed_alt": fock.squeezed_trunc02_closed_form_alt(alpha, g),
        }
        if use_oracle:
            grid = oracle.GridSpec()
            xs = grid.axis()
            cat = states.make_ideal_squeezed_cat(alpha, r, "even") if alpha > 0 \
                else states.make_squeezed_vacuum(g)
            cat_vals = cat.evaluate(xs)
            w = np.full(xs.size, grid.step)
            w[0] = w[-1] = grid.step / 2.0
            amp0 = np.sum(hermite_gauss(0).evaluate(xs).real * cat_vals * w)
            amp2 = np.sum(hermite_gauss(2).evaluate(xs).real * cat_vals * w)
            row["F_squeezed_oracle"] = float(abs(amp0) ** 2 + abs(amp2) ** 2)
        return row

    rows = _pmap(build_row, list(alphas))
    columns = list(rows[0].keys())
    meta = _meta("truncation", {
        "alpha_range": f"{alphas[0]:.17g},{alphas[-1]:.17g},{len(alphas)}",
        "r": r, "kept_levels": "0,2", "dim": fock.DEFAULT_DIM,
    }, {"notes": "F_squeezed_alt carries a sqrt(2)-inflated prefactor; "
                 "see `cvcat validate` reference notes"})
    _emit(render_table(meta, columns, rows, fmt), out)


# ---------------------------------------------------------------------------
# fidelity map
# ---------------------------------------------------------------------------

@main.command("fidelity-map")
@click.option("--resource", type=click.Choice(["ideal", "approx", "identity"]), default=None)
@click.option("--parity", type=click.Choice(["even", "odd"]), default=None)
@click.option("--n", type=int, default=None, help="resource excitation number [2]")
@click.option("--alpha", type=float, default=None, help="signal amplitude [sqrt(1.3)]")
@click.option("--r", type=float, default=None, help="signal squeezing [0.4029]")
@click.option("--beta", type=float, default=None, help="projection value [auto]")
@click.option("--grid", default=None, help="theta x phi points [33x65]")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None)
@click.option("--oracle", "use_oracle", is_flag=True, default=None)
@click.option("--out", default=None)
@click.option("--config", default=None)
@_guard
def fidelity_map(resource, parity, n, alpha, r, beta, grid, fmt, use_oracle, out, config):
    """Teleport fidelity over signals a = cos(theta), b = e^{i phi} sin(theta)."""
    cfg = _load_config(config)
    resource = _pick(resource, cfg, "resource", str, "approx")
    parity = _pick(parity, cfg, "parity", str, "even")
    n = _pick(n, cfg, "n", int, 2)
    alpha = _pick(alpha, cfg, "alpha", float, SIGNAL_ALPHA)
    r = _pick(r, cfg, "r", float, BENCHMARK_R)
    beta = _pick(beta, cfg, "beta", float, None)
    nt, nph = _parse_grid(_pick(grid, cfg, "grid", str, "33x65"))
    fmt = _pick(fmt, cfg, "format", str, "csv")
    use_oracle = bool(_pick(use_oracle, cfg, "oracle", bool, False))
    out = _pick(out, cfg, "out", str, None)

    res = _resource_from_flags(resource, n, parity)
    sweep = protocols.SweepGrid(nt, nph)
    rows = [{"theta": t, "phi": p, "fidelity": f}
            for t, p, f in protocols.fidelity_map(res, alpha, r, sweep, beta)]
    extra = {"bloch_parametrization": "a = cos(theta), b = exp(i phi) sin(theta)"}
    if use_oracle and resource == "approx":
        used_beta = beta if beta is not None else protocols.default_beta(
            states.SignalParams(1.0, 0.0, alpha, r), res)
        p = states.SignalParams(math.cos(math.pi / 4), math.sin(math.pi / 4), alpha, r)
        engine = protocols.teleport(p, res, beta=used_beta).fidelity_vs_signal
        direct = _oracle_teleport_fidelity(p, n, used_beta)
        extra["oracle_spot_check"] = {
            "theta": math.pi / 4, "phi": 0.0,
            "engine": engine, "quadrature": direct, "difference": abs(engine - direct),
        }
    elif use_oracle:
        extra["oracle_spot_check"] = "only available for the approx resource"
    meta = _meta("fidelity-map", {
        "resource": resource, "parity": parity, "n": n, "alpha": alpha, "r": r,
        "beta": "auto" if beta is None else beta, "grid": f"{nt}x{nph}",
    }, extra)
    _emit(render_table(meta, ["theta", "phi", "fidelity"], rows, fmt), out)


# ---------------------------------------------------------------------------
# average fidelity
# ---------------------------------------------------------------------------

@main.command("avg-fidelity")
@click.option("--resource", type=click.Choice(["ideal", "approx", "identity"]), default=None)
@click.option("--parity", type=click.Choice(["even", "odd"]), default=None)
@click.option("--n", type=int, default=None)
@click.option("--alpha", type=float, default=None)
@click.option("--r", type=float, default=None)
@click.option("--grid", default=None, help="starting theta x phi quadrature [32x64]")
@click.option("--tol", type=float, default=None, help="convergence tolerance [1e-5]")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None)
@click.option("--out", default=None)
@click.option("--config", default=None)
@_guard
def avg_fidelity(resource, parity, n, alpha, r, grid, tol, fmt, out, config):
    """Signal-sphere average of the teleport fidelity, both parametrizations."""
    cfg = _load_config(config)
    resource = _pick(resource, cfg, "resource", str, "approx")
    parity = _pick(parity, cfg, "parity", str, "even")
    n = _pick(n, cfg, "n", int, 2)
    alpha = _pick(alpha, cfg, "alpha", float, SIGNAL_ALPHA)
    r = _pick(r, cfg, "r", float, BENCHMARK_R)
    nt, nph = _parse_grid(_pick(grid, cfg, "grid", str, "32x64"))
    tol = _pick(tol, cfg, "tol", float, 1e-5)
    fmt = _pick(fmt, cfg, "format", str, "json")
    out = _pick(out, cfg, "out", str, None)

    res = _resource_from_flags(resource, n, parity)
    quadrature = protocols.BlochQuadrature(nt, nph, tol)
    results = protocols.average_fidelity_both(res, alpha, r, quadrature)
    ref, band = REFERENCES["average_fidelity"]
    rows = [{"parametrization": p, "value": a.value, "n_theta": a.n_theta,
             "n_phi": a.n_phi, "converged": a.converged}
            for p, a in results.items()]
    selected = min(results, key=lambda p: abs(results[p].value - ref))
    meta = _meta("avg-fidelity", {
        "resource": resource, "parity": parity, "n": n, "alpha": alpha, "r": r,
        "grid": f"{nt}x{nph}", "tol": tol,
    }, {
        "selected_parametrization": selected,
        "reference_value": ref,
        "reference_band": band,
        "within_band": bool(abs(results[selected].value - ref) <= band),
    })
    _emit(render_table(meta, ["parametrization", "value", "n_theta", "n_phi",
                              "converged"], rows, fmt), out)


# ---------------------------------------------------------------------------
# amplification
# ---------------------------------------------------------------------------

@main.command()
@click.option("--kind", type=click.Choice(["ideal", "approx"]), default=None)
@click.option("--alpha-range", default=None, help="ideal sweep: start,stop,count [0,2.5,26]")
@click.option("--r", type=float, default=None)
@click.option("--n", type=int, default=None, help="approx input excitation [1]")
@click.option("--steps", type=int, default=None, help="iterations per input [1]")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None)
@click.option("--oracle", "use_oracle", is_flag=True, default=None)
@click.option("--out", default=None)
@click.option("--config", default=None)
@_guard
def amplify(kind, alpha_range, r, n, steps, fmt, use_oracle, out, config):
    """Heralded amplification: fidelity against the sqrt(2)-amplified target."""
    cfg = _load_config(config)
    kind = _pick(kind, cfg, "kind", str, "ideal")
    r = _pick(r, cfg, "r", float, BENCHMARK_R)
    n = _pick(n, cfg, "n", int, 1)
    steps = _pick(steps, cfg, "steps", int, 1)
    fmt = _pick(fmt, cfg, "format", str, "csv")
    use_oracle = bool(_pick(use_oracle, cfg, "oracle", bool, False))
    out = _pick(out, cfg, "out", str, None)
    extra: dict = {}

    if kind == "ideal":
        alphas = _parse_range(_pick(alpha_range, cfg, "alpha-range", str, "0,2.5,26"))

        def sweep_row(alpha: float) -> list[dict]:
            seq = protocols.amplify_iterate(protocols.IdealCat(float(alpha), r), steps)
            return [{"alpha": float(alpha), "step": k + 1,
                     "fidelity": o.fidelity_vs_target,
                     "spurious": protocols.amplification_spurious(
                         float(alpha) * 2.0 ** (k / 2.0), r)}
                    for k, o in enumerate(seq)]

        rows = [row for group in _pmap(sweep_row, list(alphas)) for row in group]
        columns = ["alpha", "step", "fidelity", "spurious"]
        params = {"kind": kind, "alpha_range":
                  f"{alphas[0]:.17g},{alphas[-1]:.17g},{len(alphas)}",
                  "r": r, "steps": steps}
        if use_oracle:
            mid = float(alphas[len(alphas) // 2])
            outcome = protocols.amplify(protocols.IdealCat(mid, r))
            grid = oracle.GridSpec()
            target = states.make_ideal_squeezed_cat(math.sqrt(2) * mid, r, "even", "1") \
                if mid > 0 else states.make_squeezed_vacuum(math.exp(-2 * r), "1")
            sv = oracle.sample(outcome.output, grid)
            tv = oracle.sample(target, grid)
            q = oracle.quad_inner(tv, sv, grid)
            direct = abs(q.value) ** 2 / (
                oracle.quad_inner(sv, sv, grid).value.real
                * oracle.quad_inner(tv, tv, grid).value.real)
            extra["oracle_spot_check"] = {
                "alpha": mid, "engine": outcome.fidelity_vs_target,
                "quadrature": float(direct),
                "difference": abs(outcome.fidelity_vs_target - direct),
            }
    else:
        seq = protocols.amplify_iterate(protocols.ApproxResource(n), steps)
        rows = []
        exc = n
        for k, o in enumerate(seq):
            ladder = states.make_approx(2 * exc, "1")
            rows.append({"step": k + 1, "excitation_in": exc, "excitation_out": 2 * exc,
                         "fidelity_vs_fitted_cat": o.fidelity_vs_target,
                         "ladder_match": protocols.fidelity(o.output, ladder)})
            exc *= 2
        columns = ["step", "excitation_in", "excitation_out",
                   "fidelity_vs_fitted_cat", "ladder_match"]
        params = {"kind": kind, "n": n, "r": r, "steps": steps}
        if use_oracle:
            extra["oracle_spot_check"] = "only available for the ideal sweep"

    meta = _meta("amplify", params, extra or None)
    _emit(render_table(meta, columns, rows, fmt), out)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@main.command()
@click.option("--seed", type=int, default=None, help="corpus seed [20260808]")
@click.option("--trials", type=int, default=None, help="random corpus size [30]")
@click.option("--perturb", type=float, default=None,
              help="negative control: mis-scale first moments by (1+eps)")
@click.option("--out", default=None)
@click.option("--config", default=None)
@_guard
def validate(seed, trials, perturb, out, config):
    """Run the oracle-vs-engine regression corpus and benchmark suite."""
    cfg = _load_config(config)
    seed = _pick(seed, cfg, "seed", int, 20260808)
    trials = _pick(trials, cfg, "trials", int, 30)
    perturb = _pick(perturb, cfg, "perturb", float, 0.0)
    out = _pick(out, cfg, "out", str, None)

    report = run_validation(seed=seed, trials=trials, perturbation=perturb)
    payload = _meta("validate", {"seed": seed, "trials": trials, "perturb": perturb})
    payload.update(report.to_dict())
    import json

    _emit(json.dumps(payload, indent=2) + "\n", out)
    for check in report.checks:
        status = "pass" if check.passed else "FAIL"
        click.echo(f"{status} {check.name} (margin {check.margin:.3e} "
                   f"<= {check.tolerance:.1e})", err=True)
    if not report.ok:
        sys.exit(1)


if __name__ == "__main__":
    main()
