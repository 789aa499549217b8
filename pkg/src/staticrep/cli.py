"""Command-line interface.

Each subcommand validates the run config locally, posts it to the HTTP
service (in-process by default, remote with ``--server``), renders a
4-decimal table on stdout, and optionally writes full-precision CSV
(``--out``) and JSON (``--json``) files.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 warnings present under ``--strict``.
"""

from __future__ import annotations

import asyncio
import csv
import json
import sys

import click
import httpx

from . import __version__
from .config import load_config
from .errors import ConfigError
from .spline import ReplicatingPortfolio


class ServiceClient:
    """POST JSON to the service, in-process unless a server URL is given."""

    def __init__(self, server=None):
        self.server = server

    def post(self, path, payload):
        if self.server:
            response = httpx.post(self.server.rstrip("/") + path, json=payload,
                                  timeout=600.0)
            return response.status_code, response.json()

        async def go():
            from .service import create_app

            transport = httpx.ASGITransport(app=create_app())
            async with httpx.AsyncClient(transport=transport,
                                         base_url="http://service",
                                         timeout=600.0) as client:
                return await client.post(path, json=payload)

        response = asyncio.run(go())
        return response.status_code, response.json()


def _common_options(fn):
    for option in reversed([
        click.option("--config", "config_path", required=True,
                     type=click.Path(), help="Path to the JSON run config."),
        click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE",
                     help="Override a config entry by dotted path; repeatable."),
        click.option("--server", default=None, metavar="URL",
                     help="Use a remote service instead of running in-process."),
        click.option("--out", "out_path", type=click.Path(), default=None,
                     help="Write the result table as CSV."),
        click.option("--json", "json_path", type=click.Path(), default=None,
                     help="Write the full response as JSON."),
        click.option("--strict", is_flag=True,
                     help="Exit 4 if the run produced warnings."),
        click.option("--dry-run", is_flag=True,
                     help="Validate the config, print it, and exit."),
    ]):
        fn = option(fn)
    return fn


def _load(config_path, overrides):
    try:
        return load_config(config_path, overrides)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)


def _config_payload(cfg):
    return cfg.model_dump(by_alias=True, mode="json")


def _dry_run(cfg):
    click.echo(json.dumps(_config_payload(cfg), indent=2, sort_keys=True))
    sys.exit(0)


def _post(server, path, payload):
    status, body = ServiceClient(server).post(path, payload)
    if status == 200:
        return body
    if status == 422:
        click.echo(f"config error: {body.get('detail', body)}", err=True)
        sys.exit(2)
    if status == 400 and isinstance(body, dict) and body.get("kind") == "numeric":
        click.echo(f"numeric error: {body.get('detail', body)}", err=True)
        sys.exit(3)
    click.echo(f"request failed with status {status}: {body}", err=True)
    sys.exit(1)


def _write_json(json_path, body):
    if json_path:
        with open(json_path, "w") as fh:
            json.dump(body, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _write_csv(out_path, header, rows):
    """Full-precision CSV: floats via repr, None as empty field."""
    if not out_path:
        return
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if v is None else
                             (repr(v) if isinstance(v, float) else v)
                             for v in row])


def _emit_warnings(body, strict):
    messages = body.get("warnings") or []
    for message in messages:
        click.echo(f"warning: {message}", err=True)
    if strict and messages:
        sys.exit(4)


def _fmt(value, places=4):
    if value is None:
        return ""
    return f"{value:.{places}f}"


@click.group()
@click.version_option(__version__, prog_name="staticrep")
def main():
    """Optimal static replication of nonlinear payoffs."""


@main.command("replicate")
@_common_options
@click.option("--emit-grid", is_flag=True,
              help="Include the strike grid of every iteration in the JSON output.")
def cmd_replicate(config_path, overrides, server, out_path, json_path, strict,
                  dry_run, emit_grid):
    """Select strikes, build the portfolio, and price it against truth."""
    cfg = _load(config_path, overrides)
    if dry_run:
        _dry_run(cfg)
    body = _post(server, "/replicate",
                 {"config": _config_payload(cfg), "emit_grid": emit_grid})
    click.echo(f"n: {body['n']}  form: {body['form']}  "
               f"iterations: {body['iterations_used']}  "
               f"converged: {'yes' if body['converged'] else 'no'}")
    click.echo(f"replication value: {_fmt(body['replication_value'])}")
    click.echo(f"true value:        {_fmt(body['true_value'])}")
    click.echo(f"abs error:         {_fmt(body['abs_error'])}")
    click.echo()
    click.echo(f"{'instrument':<14}{'strike':>12}{'weight':>14}")
    for row in body["portfolio"]:
        strike = "" if row["strike"] is None else _fmt(row["strike"])
        click.echo(f"{row['instrument_type']:<14}{strike:>12}"
                   f"{_fmt(row['weight']):>14}")
    _write_csv(out_path, ["instrument_type", "strike", "weight"],
               [(r["instrument_type"], r["strike"], r["weight"])
                for r in body["portfolio"]])
    _write_json(json_path, body)
    _emit_warnings(body, strict)


@main.command("converge")
@_common_options
@click.option("--n-list", default="20,40,80,160,320,640", show_default=True,
              metavar="N1,N2,...", help="Interval counts to test, ascending.")
def cmd_converge(config_path, overrides, server, out_path, json_path, strict,
                 dry_run, n_list):
    """Tabulate the replication error as the strike grid is refined."""
    cfg = _load(config_path, overrides)
    if dry_run:
        _dry_run(cfg)
    try:
        n_values = [int(part) for part in n_list.split(",") if part.strip()]
    except ValueError:
        click.echo(f"config error: --n-list {n_list!r} is not a comma-separated "
                   f"list of integers", err=True)
        sys.exit(2)
    if not n_values:
        click.echo("config error: --n-list is empty", err=True)
        sys.exit(2)
    body = _post(server, "/converge",
                 {"config": _config_payload(cfg), "n_values": n_values})
    click.echo(f"true value: {_fmt(body['true_value'])}")
    click.echo(f"{'n':>6}{'value':>14}{'error':>14}{'rate':>8}")
    for row in body["rows"]:
        rate = "" if row["rate"] is None else f"{row['rate']:.2f}"
        click.echo(f"{row['n']:>6}{_fmt(row['value']):>14}"
                   f"{row['error']:>14.3e}{rate:>8}")
    _write_csv(out_path, ["n", "value", "error", "rate"],
               [(r["n"], r["value"], r["error"], r["rate"]) for r in body["rows"]])
    _write_json(json_path, body)
    _emit_warnings(body, strict)


@main.command("quad-hedge")
@_common_options
@click.option("--strikes", "strikes_csv", default=None, metavar="K1,K2,...",
              help="Fixed strikes; overrides the config's strikes list.")
def cmd_quad_hedge(config_path, overrides, server, out_path, json_path, strict,
                   dry_run, strikes_csv):
    """Best quadratic hedge with a fixed set of call strikes."""
    if strikes_csv is not None:
        overrides = list(overrides) + [f"strikes=[{strikes_csv}]"]
    cfg = _load(config_path, overrides)
    if dry_run:
        _dry_run(cfg)
    body = _post(server, "/quad-hedge", {"config": _config_payload(cfg)})
    click.echo(f"{'strike':>10}{'weight':>12}{'price':>12}{'cost':>12}")
    for row in body["rows"]:
        click.echo(f"{_fmt(row['strike']):>10}{_fmt(row['weight']):>12}"
                   f"{_fmt(row['value_per_option']):>12}"
                   f"{_fmt(row['cost_today']):>12}")
    click.echo(f"total cost:     {_fmt(body['total_cost'])}")
    click.echo(f"residual error: {_fmt(body['residual_error'])}")
    click.echo(f"condition:      {body['condition_estimate']:.3e}")
    _write_csv(out_path, ["strike", "weight", "value_per_option", "cost_today"],
               [(r["strike"], r["weight"], r["value_per_option"], r["cost_today"])
                for r in body["rows"]]
               + [("total", None, None, body["total_cost"])])
    _write_json(json_path, body)
    _emit_warnings(body, strict)


@main.command("price")
@_common_options
@click.option("--portfolio", "portfolio_path", type=click.Path(), default=None,
              help="Price a saved portfolio (CSV or JSON) under the model.")
def cmd_price(config_path, overrides, server, out_path, json_path, strict,
              dry_run, portfolio_path):
    """Price a payoff by quadrature and/or a saved portfolio."""
    cfg = _load(config_path, overrides)
    if dry_run:
        _dry_run(cfg)
    payload = {"config": _config_payload(cfg)}
    if portfolio_path is not None:
        try:
            if portfolio_path.endswith(".json"):
                portfolio = ReplicatingPortfolio.from_json(portfolio_path)
            else:
                portfolio = ReplicatingPortfolio.from_csv(portfolio_path)
        except (OSError, KeyError, ValueError) as exc:
            click.echo(f"config error: cannot read portfolio "
                       f"{portfolio_path}: {exc}", err=True)
            sys.exit(2)
        payload["portfolio"] = portfolio.to_rows()
    body = _post(server, "/price", payload)
    pairs = [("payoff_value", body["payoff_value"]),
             ("portfolio_value", body["portfolio_value"]),
             ("abs_error", body["abs_error"]),
             ("discount", body["discount"])]
    for key, value in pairs:
        if value is not None:
            click.echo(f"{key}: {_fmt(value)}")
    _write_csv(out_path, ["quantity", "value"],
               [(k, v) for k, v in pairs if v is not None])
    _write_json(json_path, body)
    _emit_warnings(body, strict)


@main.command("mc")
@_common_options
@click.option("--paths", type=int, default=None, help="Override mc.paths.")
@click.option("--seed", type=int, default=None, help="Override mc.seed.")
@click.option("--antithetic/--no-antithetic", "antithetic", default=None,
              help="Override mc.antithetic.")
@click.option("--compare", is_flag=True,
              help="Also compute the quadrature value for comparison.")
def cmd_mc(config_path, overrides, server, out_path, json_path, strict,
           dry_run, paths, seed, antithetic, compare):
    """Monte-Carlo value of the configured payoff."""
    overrides = list(overrides)
    if paths is not None:
        overrides.append(f"mc.paths={paths}")
    if seed is not None:
        overrides.append(f"mc.seed={seed}")
    if antithetic is not None:
        overrides.append(f"mc.antithetic={'true' if antithetic else 'false'}")
    cfg = _load(config_path, overrides)
    if dry_run:
        _dry_run(cfg)
    body = _post(server, "/mc",
                 {"config": _config_payload(cfg), "compare": compare})
    click.echo(f"mean:      {_fmt(body['mean'])}")
    click.echo(f"std error: {_fmt(body['std_error'], 6)}")
    click.echo(f"paths:     {body['paths']}")
    rows = [("mean", body["mean"]), ("std_error", body["std_error"]),
            ("paths", body["paths"])]
    if body["comparison_value"] is not None:
        click.echo(f"quadrature value: {_fmt(body['comparison_value'])}")
        rows.append(("comparison_value", body["comparison_value"]))
    _write_csv(out_path, ["quantity", "value"], rows)
    _write_json(json_path, body)
    _emit_warnings(body, strict)


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def cmd_serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
