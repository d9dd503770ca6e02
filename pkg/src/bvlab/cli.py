"""Command-line harness: named experiments over the library, CSV/JSON out.

Every command is a thin dispatcher onto one library operation; outputs are
byte-deterministic given (config, seed), independent of --threads. A run
manifest (config echo, library version, sieve limit, wall time, output
checksums) is printed to stdout as JSON.

Exit codes: 0 success; 2 config error; 3 precondition violation;
4 invariant violation detected (a bug, not bad input).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import re
import sys
import time

import numpy as np

from . import __version__
from .characters import CharacterSet, enumerate_characters
from .core_arith import build_prime_table, load_prime_table, save_prime_table
from .counterexample import (
    identity_validity_bound,
    lower_bound_report,
    plan_counterexample,
    pointwise_identity_check,
    range_extension_check,
)
from .decomposition import (
    bilinear_ls_eval,
    dyadic_cells,
    smooth_factor_split,
    split_sum_assemble,
    truncation_difference_check,
)
from .discrepancy import (
    bv_sum,
    delta,
    delta_xi,
    large_sieve_check,
    partial_summation_check,
    sw_profile,
    twisted_sum,
)
from .errors import InvariantViolationError, ParameterError
from .funcspec import parse_function_spec, save_pp_table
from .multfun import (
    ArithFn,
    MultFn,
    class_c_check,
    companion_split,
    delta_fn,
    dirichlet_convolve,
    inverse,
    lambda_seq,
    log_twist,
    to_arith,
)


class ConfigError(Exception):
    pass


# --- deterministic serialization -----------------------------------------


def _fmt_float(v: float) -> str:
    return format(float(v), ".17g")


def _jdump(obj) -> str:
    if isinstance(obj, dict):
        inner = ",".join(f"{json.dumps(str(k))}:{_jdump(v)}" for k, v in obj.items())
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_jdump(v) for v in obj) + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, complex):
        return _jdump([obj.real, obj.imag])
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(obj)
    if obj is None:
        return "null"
    return json.dumps(str(obj))


def _write_json(path: str, obj) -> None:
    with open(path, "w") as fh:
        fh.write(_jdump(obj) + "\n")


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            cells = []
            for v in row:
                if isinstance(v, (int, np.integer)):
                    cells.append(str(int(v)))
                elif isinstance(v, (float, np.floating)):
                    cells.append(_fmt_float(v))
                else:
                    cells.append(str(v))
            fh.write(",".join(cells) + "\n")


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


# --- shared argument handling ---------------------------------------------


_XI_RE = re.compile(r"chi:q=(\d+),label=(\d+)")


def _parse_xi(text: str, table) -> CharacterSet:
    members = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        m = _XI_RE.fullmatch(part)
        if not m:
            raise ConfigError(f'xi entry {part!r} is not of the form "chi:q=<q>,label=<k>"')
        q, label = int(m.group(1)), int(m.group(2))
        chars = enumerate_characters(q, table)
        if label >= len(chars):
            raise ConfigError(f"xi entry {part!r}: label out of range (phi(q)={len(chars)})")
        members.append(chars[label])
    if not members:
        raise ConfigError("xi description is empty")
    return CharacterSet(members=tuple(members))


def _merged_params(args: argparse.Namespace, keys: list[str]) -> dict:
    """Inline flags override values from --config; either source may supply."""
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}")
        if not isinstance(cfg, dict):
            raise ConfigError(f"config {args.config} must hold a JSON object")
    params = {}
    for key in keys:
        inline = getattr(args, key.replace("-", "_"), None)
        params[key] = inline if inline is not None else cfg.get(key)
    return params


def _require(params: dict, *keys: str) -> None:
    missing = [k for k in keys if params.get(k) is None]
    if missing:
        raise ConfigError(f"missing required parameter(s): {', '.join(missing)}")


def _get_table(args: argparse.Namespace, needed_limit: int):
    if args.cache:
        table = load_prime_table(args.cache)
        if table.limit < needed_limit:
            raise ParameterError(
                f"cached sieve limit {table.limit} below required {needed_limit}"
            )
        return table
    return build_prime_table(max(needed_limit, 2))


def _fn(params: dict, key: str, limit: int, table):
    spec = params[key]
    if isinstance(spec, str):
        return parse_function_spec(spec, limit, table)
    return parse_function_spec(json.dumps(spec), limit, table)


def _dense(f, limit, table) -> ArithFn:
    return to_arith(f, limit, table) if isinstance(f, MultFn) else f


def _report_obj(rep) -> dict:
    return {
        "f_id": rep.f_id,
        "x": rep.x,
        "q": rep.q,
        "a": rep.a,
        "progression_sum": rep.progression_sum,
        "coprime_sum": rep.coprime_sum,
        "xi_correction": rep.xi_correction,
        "delta": rep.delta,
        "abs_delta": abs(rep.delta),
        "mode": rep.mode,
    }


# --- command handlers ------------------------------------------------------


def _cmd_sieve_cache(args):
    params = _merged_params(args, ["limit"])
    _require(params, "limit")
    table = build_prime_table(int(params["limit"]))
    save_prime_table(table, args.out)
    return {"limit": table.limit}, table


def _cmd_delta(args):
    params = _merged_params(args, ["f", "x", "q", "a"])
    _require(params, "f", "x", "q", "a")
    x = float(params["x"])
    table = _get_table(args, int(x))
    fd = _dense(_fn(params, "f", int(x), table), int(x), table)
    rep = delta(fd, x, int(params["q"]), int(params["a"]), table)
    _write_json(args.out, _report_obj(rep))
    return {"abs_delta": abs(rep.delta)}, table


def _cmd_delta_xi(args):
    params = _merged_params(args, ["f", "x", "q", "a", "xi"])
    _require(params, "f", "x", "q", "a", "xi")
    x = float(params["x"])
    table = _get_table(args, int(x))
    xi = _parse_xi(params["xi"], table)
    fd = _dense(_fn(params, "f", int(x), table), int(x), table)
    rep = delta_xi(fd, x, int(params["q"]), int(params["a"]), xi, table)
    _write_json(args.out, _report_obj(rep))
    return {"abs_delta": abs(rep.delta)}, table


def _cmd_bv_sum(args):
    params = _merged_params(args, ["f", "x", "Q", "xi"])
    _require(params, "f", "x", "Q")
    x = float(params["x"])
    table = _get_table(args, int(x))
    xi = _parse_xi(params["xi"], table) if params["xi"] else None
    fd = _dense(_fn(params, "f", int(x), table), int(x), table)
    rep = bv_sum(fd, x, int(params["Q"]), xi, table, threads=args.threads)
    _write_csv(args.out, ["q", "a_max", "abs_delta"], rep.per_q)
    return {"Q": rep.Q, "total": rep.total}, table


def _cmd_sw_profile(args):
    params = _merged_params(args, ["f", "q", "a", "X-grid", "A"])
    _require(params, "f", "q", "a", "X-grid", "A")
    grid = [float(t) for t in str(params["X-grid"]).split(",") if t]
    limit = int(max(grid))
    table = _get_table(args, limit)
    fd = _dense(_fn(params, "f", limit, table), limit, table)
    rows = sw_profile(fd, int(params["q"]), int(params["a"]), grid, float(params["A"]), table)
    _write_csv(args.out, ["X", "abs_delta", "normalized"], rows)
    return {"points": len(rows)}, table


def _cmd_partial_summation(args):
    params = _merged_params(args, ["f", "x", "X", "q", "a", "xi"])
    _require(params, "f", "x", "X", "q", "a")
    x = float(params["x"])
    table = _get_table(args, int(x))
    xi = _parse_xi(params["xi"], table) if params["xi"] else CharacterSet(
        members=tuple(enumerate_characters(1))
    )
    fd = _dense(_fn(params, "f", int(x), table), int(x), table)
    resid = partial_summation_check(
        fd, x, float(params["X"]), int(params["q"]), int(params["a"]), xi, table
    )
    _write_json(args.out, {"residual": resid})
    return {"residual": resid}, table


def _cmd_large_sieve_fuzz(args):
    params = _merged_params(args, ["trials", "N-max", "Q-max"])
    _require(params, "trials", "N-max", "Q-max")
    if args.seed is None:
        raise ConfigError("large-sieve-fuzz requires --seed")
    table = _get_table(args, 2)
    rng = np.random.default_rng(args.seed)
    rows = []
    worst = 0.0
    for trial in range(int(params["trials"])):
        N = int(rng.integers(1, int(params["N-max"]) + 1))
        Q = int(rng.integers(1, int(params["Q-max"]) + 1))
        coeffs = rng.uniform(-1, 1, N) + 1j * rng.uniform(-1, 1, N)
        lhs, rhs, ratio = large_sieve_check(coeffs, Q, table)
        worst = max(worst, ratio)
        rows.append((trial, N, Q, lhs, rhs, ratio))
    _write_csv(args.out, ["trial", "N", "Q", "lhs", "rhs", "ratio"], rows)
    return {"trials": len(rows), "worst_ratio": worst}, table


def _cmd_smooth_split(args):
    params = _merged_params(args, ["n", "V0"])
    _require(params, "n", "V0")
    n = int(params["n"])
    table = _get_table(args, n)
    s = smooth_factor_split(n, float(params["V0"]), table)
    obj = {"n": s.n, "u": s.u, "v": s.v, "P_plus_u": s.P_plus_u, "P_minus_v": s.P_minus_v}
    _write_json(args.out, obj)
    return obj, table


def _cmd_assembly_check(args):
    params = _merged_params(args, ["f", "X", "y", "psi"])
    _require(params, "f", "X", "y")
    X = float(params["X"])
    y = float(params["y"])
    table = _get_table(args, int(X))
    if params["psi"]:
        xi = _parse_xi(params["psi"], table)
        psi = xi.members[0]
    else:
        psi = enumerate_characters(1)[0]
    f = _fn(params, "f", int(X), table)
    if not isinstance(f, MultFn):
        raise ParameterError("assembly-check needs a multiplicative function spec")
    V0 = math.sqrt(X / y)
    assembled = split_sum_assemble(f, X, y, V0, psi, table, threads=args.threads)
    twisted = twisted_sum(to_arith(f, int(X), table), X, psi)
    resid = abs(assembled - twisted)
    _write_json(
        args.out,
        {"assembled": assembled, "twisted_sum": twisted, "residual": resid, "V0": V0},
    )
    return {"residual": resid}, table


def _cmd_dyadic_cells(args):
    params = _merged_params(args, ["X", "y", "V0"])
    _require(params, "X", "y", "V0")
    table = _get_table(args, 2)
    cells = dyadic_cells(float(params["X"]), float(params["y"]), float(params["V0"]))
    rows = [(c.U, c.V, c.P_plus, c.P_minus) for c in cells]
    _write_csv(args.out, ["U", "V", "P_plus", "P_minus"], rows)
    return {"cells": len(rows)}, table


def _cmd_bilinear_fuzz(args):
    params = _merged_params(args, ["U", "V", "R", "trials"])
    _require(params, "U", "V", "R", "trials")
    if args.seed is None:
        raise ConfigError("bilinear-fuzz requires --seed")
    U, V, R = int(params["U"]), int(params["V"]), float(params["R"])
    table = _get_table(args, 2)
    rng = np.random.default_rng(args.seed)
    rows = []
    worst = 0.0
    for trial in range(int(params["trials"])):
        a = rng.uniform(-1, 1, U) + 1j * rng.uniform(-1, 1, U)
        a /= np.maximum(1, np.abs(a))
        b = rng.uniform(-1, 1, V) + 1j * rng.uniform(-1, 1, V)
        b /= np.maximum(1, np.abs(b))
        lhs, bound, ratio = bilinear_ls_eval(a, b, U, V, R, table)
        worst = max(worst, ratio)
        rows.append((trial, U, V, R, lhs, bound, ratio))
    _write_csv(args.out, ["trial", "U", "V", "R", "lhs", "bound", "ratio"], rows)
    return {"trials": len(rows), "worst_ratio": worst}, table


def _cmd_truncation_check(args):
    params = _merged_params(args, ["f", "g", "x", "C", "q", "a", "xi"])
    _require(params, "f", "g", "x", "C", "q", "a")
    x = float(params["x"])
    table = _get_table(args, int(x))
    xi = _parse_xi(params["xi"], table) if params["xi"] else CharacterSet(
        members=tuple(enumerate_characters(1))
    )
    f = _fn(params, "f", int(x), table)
    g = _fn(params, "g", int(x), table)
    if not isinstance(f, MultFn) or not isinstance(g, MultFn):
        raise ParameterError("truncation-check needs multiplicative function specs")
    resid = truncation_difference_check(
        f, g, x, float(params["C"]), xi, int(params["q"]), int(params["a"]), table
    )
    _write_json(args.out, {"residual": resid})
    return {"residual": resid}, table


def _cmd_counterexample(args):
    params = _merged_params(args, ["x", "gamma", "Q", "dump-f"])
    _require(params, "x", "gamma")
    x = int(params["x"])
    table = _get_table(args, x)
    Q = int(params["Q"]) if params["Q"] is not None else None
    spec = plan_counterexample(x, float(params["gamma"]), Q, table)
    bound = identity_validity_bound(spec)
    pointwise = pointwise_identity_check(spec, range(1, bound + 1), table)
    extension = range_extension_check(spec, table)
    rep = lower_bound_report(spec, table)
    summary = {
        "x": spec.x,
        "gamma": spec.gamma,
        "Q": spec.Q,
        "y": spec.y,
        "z": spec.z,
        "scriptP_size": len(spec.script_P),
        "pointwise_identity_max_residual": pointwise,
        "pointwise_identity_range": [1, bound],
        "range_extension_all_equal": all(extension.values()),
        "bv_partial_sum": rep.bv_partial_sum,
        "normalizer": rep.normalizer,
        "ratio": rep.ratio,
        "scriptP_density": rep.scriptP_density,
    }
    _write_json(args.out, summary)
    outputs = []
    if args.csv:
        _write_csv(
            args.csv,
            ["q", "delta_abs", "phi_q", "pi_diff", "scriptP_term"],
            rep.rows,
        )
        outputs.append(args.csv)
    if params["dump-f"]:
        from .counterexample import counterexample_multfn

        save_pp_table(counterexample_multfn(spec, table), x, table, params["dump-f"])
        outputs.append(params["dump-f"])
    return {"ratio": rep.ratio, "extra_outputs": outputs}, table


def _cmd_lambda_check(args):
    params = _merged_params(args, ["f", "limit"])
    _require(params, "f", "limit")
    limit = int(params["limit"])
    table = _get_table(args, limit)
    f = _fn(params, "f", limit, table)
    if not isinstance(f, MultFn):
        raise ParameterError("lambda-check needs a multiplicative function spec")
    lam = lambda_seq(f, limit, table)
    g = inverse(f, limit)
    fd = to_arith(f, limit, table)
    gd = to_arith(g, limit, table)
    rhs = dirichlet_convolve(gd, log_twist(fd, 1.0), limit)
    resid = float(np.max(np.abs(lam.values - rhs.values)))
    lam_g = lambda_seq(g, limit, table)
    neg = float(np.max(np.abs(lam.values + lam_g.values)))
    ok, witness = class_c_check(f, limit, table)
    obj = {
        "lambda_identity_max_residual": resid,
        "negation_max_residual": neg,
        "class_c": ok,
        "first_violation": witness,
    }
    _write_json(args.out, obj)
    return obj, table


def _cmd_inverse_check(args):
    params = _merged_params(args, ["f", "limit"])
    _require(params, "f", "limit")
    limit = int(params["limit"])
    table = _get_table(args, limit)
    f = _fn(params, "f", limit, table)
    if not isinstance(f, MultFn):
        raise ParameterError("inverse-check needs a multiplicative function spec")
    fd = to_arith(f, limit, table)
    gd = to_arith(inverse(f, limit), limit, table)
    conv = dirichlet_convolve(fd, gd, limit)
    resid = float(np.max(np.abs(conv.values - delta_fn(limit).values)))
    _write_json(args.out, {"max_residual": resid})
    return {"max_residual": resid}, table


def _cmd_companion_check(args):
    params = _merged_params(args, ["f", "limit"])
    _require(params, "f", "limit")
    limit = int(params["limit"])
    table = _get_table(args, limit)
    f = _fn(params, "f", limit, table)
    if not isinstance(f, MultFn):
        raise ParameterError("companion-check needs a multiplicative function spec")
    fstar, g = companion_split(f, limit)
    fd = to_arith(f, limit, table)
    conv = dirichlet_convolve(to_arith(g, limit, table), to_arith(fstar, limit, table), limit)
    resid = float(np.max(np.abs(conv.values - fd.values)))
    gd = to_arith(g, limit, table)
    spf = table.spf
    off_powerful = 0.0
    for n in range(2, limit + 1):
        if gd.values[n] != 0:
            m = n
            while m > 1:
                p = int(spf[m])
                e = 0
                while m % p == 0:
                    m //= p
                    e += 1
                if e < 2:
                    off_powerful = max(off_powerful, abs(gd.values[n]))
    worst_pk = 0.0
    for p in table.primes[table.primes <= limit]:
        p, pk, k = int(p), int(p), 1
        while pk <= limit:
            worst_pk = max(worst_pk, abs(g.pp_value(p, k)))
            pk *= p
            k += 1
    obj = {
        "max_residual": resid,
        "off_powerful_max": off_powerful,
        "max_prime_power_value": worst_pk,
    }
    _write_json(args.out, obj)
    return obj, table


_COMMANDS = {
    "sieve-cache": (_cmd_sieve_cache, ["limit"]),
    "delta": (_cmd_delta, ["f", "x", "q", "a"]),
    "delta-xi": (_cmd_delta_xi, ["f", "x", "q", "a", "xi"]),
    "bv-sum": (_cmd_bv_sum, ["f", "x", "Q", "xi"]),
    "sw-profile": (_cmd_sw_profile, ["f", "q", "a", "X-grid", "A"]),
    "partial-summation": (_cmd_partial_summation, ["f", "x", "X", "q", "a", "xi"]),
    "large-sieve-fuzz": (_cmd_large_sieve_fuzz, ["trials", "N-max", "Q-max"]),
    "smooth-split": (_cmd_smooth_split, ["n", "V0"]),
    "assembly-check": (_cmd_assembly_check, ["f", "X", "y", "psi"]),
    "dyadic-cells": (_cmd_dyadic_cells, ["X", "y", "V0"]),
    "bilinear-fuzz": (_cmd_bilinear_fuzz, ["U", "V", "R", "trials"]),
    "truncation-check": (_cmd_truncation_check, ["f", "g", "x", "C", "q", "a", "xi"]),
    "counterexample": (_cmd_counterexample, ["x", "gamma", "Q", "dump-f"]),
    "lambda-check": (_cmd_lambda_check, ["f", "limit"]),
    "inverse-check": (_cmd_inverse_check, ["f", "limit"]),
    "companion-check": (_cmd_companion_check, ["f", "limit"]),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bvlab",
        description="experiments on multiplicative functions in arithmetic progressions",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_handler, keys) in _COMMANDS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON file supplying parameters")
        p.add_argument("--cache", help="sieve cache file (from sieve-cache)")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", required=True, help="primary output path")
        if name == "counterexample":
            p.add_argument("--csv", default=None, help="per-q rows CSV path")
        for key in keys:
            # accepted as strings; handlers coerce, so --config and inline
            # flags go through the same validation
            p.add_argument("--" + key, default=None)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handler, _keys = _COMMANDS[args.command]
    start = time.perf_counter()
    try:
        extra, table = handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ParameterError as exc:
        print(f"precondition error: {exc}", file=sys.stderr)
        return 3
    except InvariantViolationError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 4
    wall = time.perf_counter() - start
    outputs = [args.out] + list(extra.pop("extra_outputs", []))
    manifest = {
        "command": args.command,
        "config": {
            k: v
            for k, v in vars(args).items()
            if k not in ("command",) and v is not None
        },
        "version": __version__,
        "sieve_limit": table.limit,
        "wall_time_s": wall,
        "results": extra,
        "outputs": [{"path": p, "sha256": _sha256(p)} for p in outputs],
    }
    print(_jdump(manifest))
    return 0


if __name__ == "__main__":
    sys.exit(main())
