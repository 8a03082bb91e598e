"""Command-line entry point: ``chaos-bounds <command> [options]``.

Exit codes: 0 success, 2 configuration or input error, 3 budget exceeded,
4 selfcheck failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from itertools import combinations

import numpy as np

from . import bounds as B
from .diagram import (
    DEFAULT_MAX_DIAGRAMS,
    RowLayout,
    chaos_moment_via_diagrams,
    count_diagrams,
    embed_form,
    kernel_from_document,
)
from .distributions import gaussian_moments, get_input, limit_comparison
from .errors import BudgetError, FormatError
from .form_core import SymmetricMultilinearForm, load_form, v_squared
from .moment_engine import (
    DEFAULT_MAX_TERMS,
    MAX_ENUMERATION_N,
    exact_moment_by_expansion,
    rademacher_distribution,
)
from .montecarlo import SE_MARGIN, estimate_moment, estimate_tail
from .report import to_csv, to_json

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_SELFCHECK = 4

COMMANDS = ("bounds", "exact", "diagrams", "simulate", "compare", "sharpness", "selfcheck")
SEED_ENV = "CHAOS_BOUNDS_SEED"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    form_path: str | None = None
    parameters: dict = field(default_factory=dict)
    output: str | None = None  # None means stdout
    format: str = "json"


def parse_int_list(values):
    """Expand ``["1..3", "5", "7,8"]`` into ``[1, 2, 3, 5, 7, 8]``."""
    out = []
    for item in values or []:
        for part in str(item).split(","):
            part = part.strip()
            if not part:
                continue
            try:
                if ".." in part:
                    lo, hi = (int(x) for x in part.split(".."))
                    if hi < lo:
                        raise ConfigError(f"empty range {part!r}")
                    out.extend(range(lo, hi + 1))
                else:
                    out.append(int(part))
            except ValueError:
                raise ConfigError(f"cannot parse integer list item {part!r}") from None
    return out


def resolve_seed(seed):
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise ConfigError(f"{SEED_ENV}={env!r} is not an integer") from None


def _require(params, *names):
    for name in names:
        if params.get(name) in (None, []):
            raise ConfigError(f"--{name.replace('_', '-')} is required for this command")


def _positive(params, name):
    value = params.get(name)
    if value is not None and value <= 0:
        raise ConfigError(f"--{name} must be positive")


def _load(config):
    if not config.form_path:
        raise ConfigError("--form is required for this command")
    try:
        return load_form(config.form_path)
    except OSError as exc:
        raise ConfigError(f"cannot read form document: {exc}") from None


def _inputs_for(names, n):
    names = names or ["rademacher"]
    if len(names) == 1:
        return get_input(names[0])
    if len(names) != n:
        raise ConfigError(f"--dist given {len(names)} times; need 1 or n={n}")
    return [get_input(name) for name in names]


def _form_echo(form):
    return {"k": form.k, "n": form.n, "v2": v_squared(form)}


def _bound_row(command, echo, report: B.BoundReport):
    row = {"command": command, **echo}
    row.update(asdict(report))
    return row


def _default_orders(params):
    if not params.get("M") and not params.get("u"):
        return [1, 2, 3]
    return params.get("M") or []


def cmd_bounds(config):
    form = _load(config)
    p = config.parameters
    echo = _form_echo(form)
    v2, k = echo["v2"], form.k
    if v2 <= 0:
        raise ConfigError("form has no nonzero coefficients")
    dist = rademacher_distribution(form) if form.n <= MAX_ENUMERATION_N else None
    oracle = "enumeration" if dist is not None else None
    rows = []
    for u in p.get("u") or []:
        if u < 0:
            raise ConfigError("--u values must be nonnegative")
        if k == 1 and u > 0:
            upper = None
            if dist is not None:
                upper = float(dist.counts[dist.values > u].sum()) / dist.total
            rows.append(_bound_row("bounds", echo, B.BoundReport.checked(
                "hoeffding_one_sided", u, B.hoeffding_tail_bound(u, v2), upper, oracle)))
        tail = dist.tail(u) if dist is not None else None
        rows.append(_bound_row("bounds", echo, B.BoundReport.checked(
            "theorem1_tail", u, B.theorem1_tail_bound(u, k, v2), tail, oracle)))
    for M in _default_orders(p):
        moment, log_moment = _moment_oracle(dist, 2 * M)
        rows.append(_bound_row("bounds", echo, _theorem2_report(k, M, v2, moment, oracle, log_moment)))
        rows.append(_bound_row("bounds", echo, _borell_report(k, M, v2, moment, oracle, log_moment)))
    return rows, EXIT_OK


def _moment_oracle(dist, order):
    """Exact Rademacher moment as ``(value, log value)``; value is inf on overflow."""
    if dist is None:
        return None, None
    try:
        value = dist.moment(order)
    except OverflowError:
        value = math.inf
    return value, dist.log_moment(order)


def _log_of(value, log_value):
    if log_value is not None or value is None:
        return log_value
    return math.log(value) if value > 0 else -math.inf


def _report(name, order, linear, log_bound, oracle_value, oracle, log_oracle):
    """Linear report when everything fits in a double, log-scale otherwise."""
    if oracle_value is None or math.isfinite(oracle_value):
        try:
            value = linear()
            if math.isfinite(value):
                return B.BoundReport.checked(name, order, value, oracle_value, oracle)
        except OverflowError:
            pass
    return B.BoundReport.checked(
        name, order, log_bound(), _log_of(oracle_value, log_oracle), oracle, scale="log")


def _theorem2_report(k, M, v2, oracle_value, oracle, log_oracle=None):
    return _report(
        "theorem2_moment", 2 * M,
        lambda: B.theorem2_moment_bound(k, M, v2),
        lambda: B.log_theorem2_moment_bound(k, M, v2),
        oracle_value, oracle, log_oracle)


def _borell_report(k, M, v2, oracle_value, oracle, log_oracle=None):
    return _report(
        "borell_moment_q2", 2 * M,
        lambda: B.borell_moment_bound(k, M, v2),
        lambda: B.log_borell_moment_bound(k, M, v2),
        oracle_value, oracle, log_oracle)


def cmd_exact(config):
    form = _load(config)
    p = config.parameters
    echo = _form_echo(form)
    v2, k = echo["v2"], form.k
    if v2 <= 0:
        raise ConfigError("form has no nonzero coefficients")
    dist = rademacher_distribution(form)
    gauss = gaussian_moments(max(12, max(_default_orders(p), default=1)))
    rows = []
    for M in _default_orders(p):
        rad, log_rad = _moment_oracle(dist, 2 * M)
        gss = exact_moment_by_expansion(form.abs(), gauss, 2 * M, p["budget_terms"])
        rows.append(_bound_row("exact", echo, _report(
            "lemma1_gaussian_abs_moment", 2 * M, lambda: gss, lambda: _log_of(gss, None),
            rad, "enumeration", log_rad)))
        rows.append(_bound_row("exact", echo, _theorem2_report(k, M, v2, rad, "enumeration", log_rad)))
        rows.append(_bound_row("exact", echo, _theorem2_report(
            k, M, v2, gss, "expansion_gaussian_abs")))
    for u in p.get("u") or []:
        if u < 0:
            raise ConfigError("--u values must be nonnegative")
        rows.append(_bound_row("exact", echo, B.BoundReport.checked(
            "theorem1_tail", u, B.theorem1_tail_bound(u, k, v2), dist.tail(u), "enumeration")))
    return rows, EXIT_OK


def cmd_diagrams(config):
    p = config.parameters
    form = None
    if config.form_path:
        form = _load(config)
        kernel = embed_form(form, use_absolute_values=True)
    elif p.get("kernel"):
        try:
            with open(p["kernel"], encoding="utf-8") as fh:
                kernel = kernel_from_document(json.load(fh))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read kernel document: {exc}") from None
    else:
        raise ConfigError("diagrams needs --form or --kernel")
    k = kernel.arity
    sigma2 = kernel.squared_norm()
    rows = []
    for M in p.get("M") or [1, 2]:
        layout = RowLayout.equal_rows(k, 2 * M)
        df = B.double_factorial_odd(2 * k * M - 1)
        moment = chaos_moment_via_diagrams(kernel, M, p["budget_diagrams"])
        row = {
            "command": "diagrams",
            "k": k,
            "ground_size": kernel.ground_size,
            "sigma2": sigma2,
            "M": M,
            "count_same_row": count_diagrams(layout, True),
            "count_cross_row": count_diagrams(layout, False),
            "double_factorial": df,
            "chaos_moment": moment,
            "bound_value": df * sigma2**M,
            "dominates": B.dominates(df * sigma2**M, moment),
        }
        if form is not None:
            gauss = gaussian_moments(max(12, 2 * M))
            row["oracle"] = "expansion_gaussian_abs"
            row["oracle_value"] = exact_moment_by_expansion(
                form.abs(), gauss, 2 * M, p["budget_terms"])
        rows.append(row)
    return rows, EXIT_OK


def cmd_simulate(config):
    form = _load(config)
    p = config.parameters
    _require(p, "u")
    echo = _form_echo(form)
    v2, k = echo["v2"], form.k
    if v2 <= 0:
        raise ConfigError("form has no nonzero coefficients")
    inputs = _inputs_for(p.get("dist"), form.n)
    dist_names = p.get("dist") or ["rademacher"]
    rows = []
    for i, u in enumerate(p["u"]):
        est = estimate_tail(form, inputs, u, p["samples"], p["seed"])
        bound = B.theorem1_tail_bound(max(u, 0.0), k, v2)
        rows.append({
            "command": "simulate", **echo, "dist": dist_names,
            "bound_name": "theorem1_tail", "u": est.u, "point": est.point,
            "std_error": est.std_error, "samples": est.samples, "seed": est.seed,
            "bound_value": bound, "oracle": "montecarlo",
            "dominates": bound >= est.point - SE_MARGIN * est.std_error,
        })
    for M in p.get("M") or []:
        est = estimate_moment(form, inputs, 2 * M, p["samples"], p["seed"])
        rep = _theorem2_report(k, M, v2, None, None)
        bound = rep.bound_value if rep.scale == "linear" else math.inf
        rows.append({
            "command": "simulate", **echo, "dist": dist_names,
            "bound_name": "theorem2_moment", "order": 2 * M, "point": est.point,
            "std_error": est.std_error, "samples": est.samples, "seed": est.seed,
            "bound_value": rep.bound_value, "scale": rep.scale, "oracle": "montecarlo",
            "dominates": bound >= est.point - SE_MARGIN * est.std_error,
        })
    return rows, EXIT_OK


def cmd_compare(config):
    p = config.parameters
    ks = p.get("k") or [2]
    Ms = p.get("M") or list(range(1, 26))
    v2 = p.get("v2") or 1.0
    rows = []
    for k in ks:
        for M in Ms:
            c = B.compare_theorem2_vs_borell(k, M, v2)
            rows.append({"command": "compare", "v2": v2, **asdict(c),
                         "theorem2_sharper": c.log_ratio < 0})
    return rows, EXIT_OK


def cmd_sharpness(config):
    p = config.parameters
    ks = p.get("k") or [2]
    if len(ks) != 1:
        raise ConfigError("sharpness takes a single --k")
    n_list = p.get("n") or [10, 40, 160]
    V = p.get("V") or 1.0
    table = limit_comparison(ks[0], n_list, V, p["samples"], p["seed"])
    rows = [{"command": "sharpness", "k": ks[0], "V": V, "n": r.n,
             "ks_distance": r.ks_distance, "samples": r.samples, "seed": p["seed"]}
            for r in table]
    return rows, EXIT_OK


def _fixture_forms(seed, count, k_values, n_max, coeff=3):
    rng = np.random.default_rng(seed)
    forms = []
    while len(forms) < count:
        k = int(rng.choice(k_values))
        n = int(rng.integers(k, n_max + 1))
        coeffs = {key: int(rng.integers(-coeff, coeff + 1))
                  for key in combinations(range(1, n + 1), k)}
        form = SymmetricMultilinearForm(k, n, coeffs)
        if form.coeffs:
            forms.append(form)
    return forms


def cmd_selfcheck(config):
    p = config.parameters
    rows = []

    def check(name, passed, **details):
        rows.append({"command": "selfcheck", "check": name, "passed": bool(passed), **details})

    ratios = B.stirling_step_ratios(200)
    check("stirling_step", B.stirling_step_holds(200), N_max=200,
          ratio_first=ratios[0], ratio_last=ratios[-1])
    for k in range(1, 7):
        for M in range(1, 7):
            if k * M > 6:
                continue
            layout = RowLayout.equal_rows(k, 2 * M)
            same = count_diagrams(layout, True)
            cross = count_diagrams(layout, False)
            df = B.double_factorial_odd(2 * k * M - 1)
            check("diagram_count", same == df and cross <= same, k=k, M=M,
                  count_same_row=same, count_cross_row=cross, double_factorial=df)
    gauss = gaussian_moments()
    for i, form in enumerate(_fixture_forms(p["seed"], 8, [1, 2], 5)):
        v2 = v_squared(form)
        dist = rademacher_distribution(form)
        for M in (1, 2):
            diag = chaos_moment_via_diagrams(embed_form(form, True), M, p["budget_diagrams"])
            expn = exact_moment_by_expansion(form.abs(), gauss, 2 * M, p["budget_terms"])
            rad = dist.moment(2 * M)
            bound = B.theorem2_moment_bound(form.k, M, v2)
            agree = abs(diag - expn) <= 1e-9 * max(1.0, abs(expn))
            check("oracle_triangle", agree and B.dominates(bound, expn) and B.dominates(expn, rad),
                  instance=i, k=form.k, n=form.n, M=M, diagrams=diag, expansion=expn,
                  enumeration=rad, theorem2=bound)
        grid = np.linspace(0.0, dist.max_abs, 20)
        worst = min(B.theorem1_tail_bound(float(u), form.k, v2) - dist.tail(float(u)) for u in grid)
        check("tail_domination", worst >= 0, instance=i, k=form.k, n=form.n, min_margin=worst)
    failed = sum(not r["passed"] for r in rows)
    return rows, (EXIT_SELFCHECK if failed else EXIT_OK)


HANDLERS = {
    "bounds": cmd_bounds,
    "exact": cmd_exact,
    "diagrams": cmd_diagrams,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "sharpness": cmd_sharpness,
    "selfcheck": cmd_selfcheck,
}


def run(config: RunConfig):
    """Execute a command; returns ``(exit_status, report_document)``."""
    if config.command not in HANDLERS:
        raise ConfigError(f"unknown command {config.command!r}")
    if config.format not in ("json", "csv"):
        raise ConfigError(f"unknown format {config.format!r}")
    p = config.parameters
    p.setdefault("samples", 100_000)
    p.setdefault("budget_terms", DEFAULT_MAX_TERMS)
    p.setdefault("budget_diagrams", DEFAULT_MAX_DIAGRAMS)
    p["seed"] = resolve_seed(p.get("seed"))
    for name in ("samples", "budget_terms", "budget_diagrams", "V", "v2"):
        _positive(p, name)
    for name in ("k", "M", "n"):
        if any(v < 1 for v in p.get(name) or []):
            raise ConfigError(f"--{name} values must be positive")
    rows, status = HANDLERS[config.command](config)
    doc = {
        "command": config.command,
        "form": config.form_path,
        "parameters": {key: p[key] for key in sorted(p)},
        "status": status,
        "rows": rows,
    }
    return status, doc


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--form", help="JSON form document")
    common.add_argument("--kernel", help="JSON kernel document (diagrams only)")
    common.add_argument("--k", action="append", help="degree(s); ranges like 1..4 allowed")
    common.add_argument("--M", action="append", help="moment half-orders; ranges like 1..25 allowed")
    common.add_argument("--n", action="append", help="dimensions for sharpness")
    common.add_argument("--u", action="append", type=float, help="tail threshold (repeatable)")
    common.add_argument("--V", type=float, help="scale for sharpness forms")
    common.add_argument("--v2", type=float, help="variance constant for compare")
    common.add_argument("--samples", type=int, help="Monte Carlo sample count")
    common.add_argument("--seed", type=int, help=f"seed (falls back to ${SEED_ENV}, then 0)")
    common.add_argument("--dist", action="append", help="input distribution, once or per coordinate")
    common.add_argument("--format", default="json", choices=["json", "csv"])
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--budget-terms", type=int, help="cap on live expansion terms")
    common.add_argument("--budget-diagrams", type=int, help="cap on enumerated diagrams")
    parser = argparse.ArgumentParser(
        prog="chaos-bounds",
        description="Moment and tail bounds for Rademacher and sub-Gaussian chaoses.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def config_from_args(args) -> RunConfig:
    params = {}
    for name in ("k", "M", "n"):
        values = parse_int_list(getattr(args, name))
        if values:
            params[name] = values
    for name in ("u", "V", "v2", "samples", "seed", "dist", "kernel", "budget_terms", "budget_diagrams"):
        value = getattr(args, name)
        if value is not None:
            params[name] = value
    return RunConfig(args.command, args.form, params, args.out, args.format)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        status, doc = run(config)
    except BudgetError as exc:
        print(f"chaos-bounds: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ConfigError, FormatError, ValueError) as exc:
        print(f"chaos-bounds: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = to_json(doc) if config.format == "json" else to_csv(doc["rows"])
    if config.output:
        with open(config.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
