"""Command-line front end: model presets in, CSV or JSON tables out.

Exit codes: 0 ok, 1 verification failure, 2 divergence, 3 usage, 4 support
or parameter-domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from scipy.special import gammaln

from . import fock, measure, states, statistics, thermal
from .errors import (
    DegenerateError,
    DivergenceError,
    DomainError,
    NonConvergenceError,
    TruncationError,
    UnsupportedClassError,
)
from .fock import ModelParams

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_DIVERGENCE = 2
EXIT_USAGE = 3
EXIT_DOMAIN = 4

PRESETS = ("ho1d", "su11", "geometric", "custom")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 by default, which is reserved for divergence here
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------- parsing


def parse_complex(text: str) -> complex:
    """``1.5-0.5i``, ``2``, ``-0.3i`` or Python's ``1+2j``."""
    s = text.strip().replace(" ", "")
    if not s:
        raise argparse.ArgumentTypeError("empty complex value")
    if s[-1] in "iI":
        s = s[:-1] + "j"
    try:
        return complex(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse complex value {text!r}") from None


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:steps`` (inclusive, linear); ``steps`` may be 0 for an empty grid."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("grid must be start:stop:steps")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from None
    if steps < 0 or start < 0 or stop < 0:
        raise argparse.ArgumentTypeError("grid needs nonnegative |z| values and steps")
    return np.linspace(start, stop, steps)


def parse_float_list(text: str) -> tuple[float, ...]:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(float(v) for v in re.split(r"[,\s]+", text) if v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None


def read_config(path: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment; keys use dashes or underscores."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc.strerror}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def model_from_args(args) -> ModelParams:
    if args.preset == "ho1d":
        return fock.HO1D
    if args.preset == "su11":
        return ModelParams((), (2.0 * args.k,))
    if args.preset == "geometric":
        return ModelParams((args.a,), ())
    return ModelParams(args.a_list, args.b_list)


def thread_count(args) -> int:
    n = args.threads
    if n is None:
        env = os.environ.get("DUALCS_THREADS", "").strip()
        n = int(env) if env.isdigit() else 1
    return max(1, n)


def grid_map(fn: Callable, items, threads: int) -> list:
    """Evaluate ``fn`` over ``items`` preserving order (output is identical for any thread count)."""
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [fn(v) for v in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- output


def fmt_float(v) -> str:
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return "%.17g" % v


@dataclass
class Table:
    columns: list[str]
    rows: list[list[Any]] = field(default_factory=list)
    meta: dict[str, Any] = field(default_factory=dict)
    footer: dict[str, Any] = field(default_factory=dict)


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    return str(v)


def _kv(d: dict) -> str:
    return " ".join(f"{k}={_cell(v)}" for k, v in d.items())


def render_csv(t: Table) -> str:
    buf = io.StringIO()
    buf.write("# " + _kv(t.meta) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(t.columns)
    writer.writerows([_cell(v) for v in row] for row in t.rows)
    if t.footer:
        buf.write("# " + _kv(t.footer) + "\n")
    return buf.getvalue()


def _json_value(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_float(v) if math.isfinite(v) else "null"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{_json_str(k)}: {_json_value(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    return _json_str(str(v))


def _json_str(s: str) -> str:
    return json.dumps(s, ensure_ascii=False)


def render_json(t: Table) -> str:
    # hand-rolled so floats keep 17 significant digits
    rows = [dict(zip(t.columns, r)) for r in t.rows]
    body = {"meta": t.meta, "columns": t.columns, "rows": rows, "footer": t.footer}
    return _json_value(body) + "\n"


def emit(t: Table, args, out) -> None:
    text = render_json(t) if args.format == "json" else render_csv(t)
    out.write(text)


def base_meta(args, **extra) -> dict:
    meta = {"command": args.command, "preset": args.preset}
    if args.preset == "su11":
        meta["k"] = args.k
    elif args.preset == "geometric":
        meta["a"] = args.a
    elif args.preset == "custom":
        meta["a_list"] = ";".join(fmt_float(v) for v in args.a_list) or "-"
        meta["b_list"] = ";".join(fmt_float(v) for v in args.b_list) or "-"
    meta["family"] = args.family
    meta.update(extra)
    return meta


# ---------------------------------------------------------------- commands


def cmd_state(args, out) -> int:
    model = model_from_args(args)
    st = states.coherent_state(model, args.family, args.z, args.N, near_boundary=args.near_boundary)
    n_rows = 1 if st.z == 0 else st.N
    rows = [[n, c.real, c.imag, abs(c) ** 2] for n, c in enumerate(st.coeffs[:n_rows])]
    meta = base_meta(args, z=f"{fmt_float(st.z.real)}{'+' if st.z.imag >= 0 else '-'}{fmt_float(abs(st.z.imag))}i",
                     N=st.N, tail_tol=states.TAIL_TOL)
    footer = {
        "norm": float(np.sum(st.probabilities)),
        "normalization_function": st.norm_value,
        "truncation_tail": st.tail,
    }
    emit(Table(["n", "re", "im", "prob"], rows, meta, footer), args, out)
    return EXIT_OK


def _mandel_row(model, family, near_boundary):
    def row(r):
        st = states.coherent_state(model, family, r, 2, near_boundary=near_boundary)
        if r == 0:
            return [r, 0.0, 0.0, math.nan, "undefined"]
        mean = statistics.expectation_n_power(st, 1).euler
        second = statistics.expectation_n_power(st, 2).euler
        q = statistics.mandel_q(st)
        return [r, mean, second, q, statistics.classify(q).value]

    return row


def cmd_mandel(args, out) -> int:
    model = model_from_args(args)
    grid = args.z_abs_grid if args.z_abs_grid is not None else parse_grid("0.1:1:10")
    rows = grid_map(_mandel_row(model, args.family, args.near_boundary), grid, thread_count(args))
    meta = base_meta(args, points=len(grid), poisson_tol=statistics.POISSONIAN_TOL)
    emit(Table(["abs_z", "mean_n", "mean_n2", "mandel_q", "classification"], rows, meta), args, out)
    return EXIT_OK


def cmd_thermal(args, out) -> int:
    model = model_from_args(args)
    ens = thermal.ThermalEnsemble(args.beta, args.hbar_omega, args.e0)
    z_part = thermal.partition_function(ens)
    n_bar = ens.n_bar
    try:
        q_th, degenerate = thermal.thermal_mandel(ens), False
    except DegenerateError:
        q_th, degenerate = math.nan, True
    summary = [args.beta, z_part, n_bar, q_th, degenerate]
    columns = ["beta", "Z", "n_bar", "Q_th", "degenerate"]
    meta = base_meta(args, hbar_omega=args.hbar_omega, e0=args.e0)
    if args.z_abs_grid is None:
        emit(Table(columns, [summary], meta), args, out)
        return EXIT_OK

    p_supported = True
    try:
        measure.weight_for(model, args.family)
    except UnsupportedClassError:
        p_supported = False
    meta["p_function"] = "closed-form" if p_supported else "unsupported-class"

    def row(r):
        if degenerate or n_bar == 0:
            hq = states.coherent_state(model, args.family, r, None, near_boundary=True).probabilities[0]
            return summary + [r, hq, hq, math.nan]
        h = thermal.husimi_q(model, args.family, r, ens)
        p = thermal.p_function(model, args.family, r * r, n_bar) if p_supported else math.nan
        return summary + [r, h.direct, h.kernel, p]

    rows = grid_map(row, args.z_abs_grid, thread_count(args))
    emit(Table(columns + ["abs_z", "husimi_q", "husimi_q_kernel", "p_function"], rows, meta), args, out)
    return EXIT_OK


def cmd_overlap(args, out) -> int:
    model = model_from_args(args)
    kw = {"near_boundary": args.near_boundary}
    N = args.N or max(states.choose_truncation(model, args.family, z) for z in (args.z1, args.z2))
    s1 = states.coherent_state(model, args.family, args.z1, N, **kw)
    s2 = states.coherent_state(model, args.family, args.z2, N, **kw)
    direct = states.overlap(s1, s2)
    kernel = states.overlap_kernel(s1, s2)
    row = [direct.real, direct.imag, kernel.real, kernel.imag, abs(direct - kernel)]
    meta = base_meta(args, N=N)
    emit(Table(["re", "im", "kernel_re", "kernel_im", "abs_diff"], [row], meta), args, out)
    return EXIT_OK


def cmd_radius(args, out) -> int:
    model = model_from_args(args)
    rows = []
    for fam in states.Family:
        dom = states.radius(model, fam)
        spec = model.series_spec(fam.value)
        rows.append([fam.value, spec.p, spec.q, dom.radius_value, dom.moment_problem or "none", spec.eta,
                     dom.boundary_note or ""])
    meta = base_meta(args)
    meta.pop("family")
    emit(Table(["family", "p", "q", "radius", "moment_problem", "eta", "note"], rows, meta), args, out)
    return EXIT_OK


# verification checks: (name, tolerance, fn(model, family, args) -> max error)


def _check_duality(model, family, args):
    n = np.arange(51)
    return float(np.max(np.abs(np.expm1(fock.log_rho(model, n) + fock.log_rho_tilde(model, n) - 2 * gammaln(n + 1)))))


def _check_commutators(model, family, args):
    ls = fock.ladder_set(model, 64)
    eye = np.eye(63)
    err1 = np.max(np.abs(fock.commutator(ls.at_minus, ls.a_plus)[:63, :63] - eye))
    err2 = np.max(np.abs(fock.commutator(ls.a_minus, ls.at_plus)[:63, :63] - eye))
    return float(max(err1, err2))


def _check_projectors(model, family, args):
    ls = fock.ladder_set(model, args.N)
    eye = np.eye(args.N)
    errs = [
        np.max(np.abs(fock.mixed_vacuum_expansion(ls) - eye)),
        np.max(np.abs(fock.completeness_sum(ls) - eye)),
        np.max(np.abs(fock.completeness_sum(ls, tilde=True) - eye)),
    ]
    return float(max(errs))


def _sample_z(model, family):
    dom = states.radius(model, family)
    return 0.4 * np.exp(0.7j) if dom.radius_value <= 1 else 0.9 * np.exp(0.7j)


def _check_definitions(model, family, args):
    z = _sample_z(model, family)
    direct = states.coherent_state(model, family, z)
    build = states.bg_via_displacement if states.as_family(family) is states.Family.BG else states.kp_via_displacement
    disp = build(model, z, direct.N)
    return float(np.max(np.abs(direct.coeffs - disp.coeffs)))


def _check_eigen(model, family, args):
    z = _sample_z(model, family)
    st = states.coherent_state(model, family, z)
    ls = fock.ladder_set(model, st.N + 1)
    low = ls.lowering(tilde=states.as_family(family) is states.Family.KP)
    c = np.zeros(st.N + 1, dtype=complex)
    c[: st.N] = st.coeffs
    return float(np.max(np.abs((low @ c)[: st.N - 1] - z * c[: st.N - 1])))


def _check_jump(model, family, args):
    fam = states.as_family(family)
    z = 0.4
    for f in states.Family:
        states.coherent_state(model, f, z)  # both families must exist at z
    d = states.Direction.BG_TO_KP if fam is states.Family.BG else states.Direction.KP_TO_BG
    mapped = states.jump_apply(model, z, direction=d)
    target = states.coherent_state(model, fam.other, z, mapped.N, near_boundary=True)
    j = states.jump_operator(model, z, mapped.N, d)
    jinv = states.jump_operator(model, z, mapped.N, d.KP_TO_BG if d is d.BG_TO_KP else d.BG_TO_KP)
    return float(max(np.linalg.norm(mapped.coeffs - target.coeffs), np.max(np.abs(j * jinv - 1.0))))


def _check_euler(model, family, args):
    z = _sample_z(model, family)
    st = states.coherent_state(model, family, z)
    return max(statistics.expectation_n_power(st, s).rel_diff() for s in range(5))


def _check_moments(model, family, args):
    w = measure.weight_for(model, family)
    return measure.verify_moments(w, model, family, 20)


def _check_identity(model, family, args):
    w = measure.weight_for(model, family)
    rule = measure.default_rule(w, args.nodes)
    return measure.resolve_identity(model, family, args.N, rule)


CHECKS = [
    ("duality rho*rho~=(n!)^2", 1e-12, _check_duality),
    ("commutators N=64", 1e-12, _check_commutators),
    ("vacuum projector sums", 1e-10, _check_projectors),
    ("eigenvalue equation", 1e-12, _check_eigen),
    ("definition equivalence", 1e-12, _check_definitions),
    ("jump operator", 1e-12, _check_jump),
    ("euler route s<=4", 1e-10, _check_euler),
    ("moment problem n<=20", 1e-8, _check_moments),
    ("resolution of identity", 1e-6, _check_identity),
]


def cmd_verify(args, out) -> int:
    model = model_from_args(args)
    families = list(states.Family) if args.family == "both" else [states.as_family(args.family)]
    rows = []
    failed = False
    for fam in families:
        for name, tol, fn in CHECKS:
            try:
                err = fn(model, fam, args)
            except UnsupportedClassError:
                rows.append([name, fam.value, math.nan, tol, "skipped"])
                continue
            except (DivergenceError, TruncationError):
                rows.append([name, fam.value, math.nan, tol, "skipped"])
                continue
            ok = err <= tol
            failed |= not ok
            rows.append([name, fam.value, err, tol, "pass" if ok else "FAIL"])
    meta = base_meta(args, N=args.N, nodes=args.nodes)
    footer = {"result": "FAIL" if failed else "pass"}
    emit(Table(["check", "family", "max_error", "tolerance", "status"], rows, meta, footer), args, out)
    return EXIT_VERIFY_FAILED if failed else EXIT_OK


# ---------------------------------------------------------------- entry point


def _common(p: argparse.ArgumentParser, family_choices=("bg", "kp")) -> None:
    p.add_argument("--preset", choices=PRESETS, default="ho1d")
    p.add_argument("--k", type=float, default=1.0, help="su11 Bargmann index (b = [2k])")
    p.add_argument("--a", type=float, default=3.0, help="geometric preset parameter")
    p.add_argument("--a-list", type=parse_float_list, default=(), help="custom numerator parameters")
    p.add_argument("--b-list", type=parse_float_list, default=(), help="custom denominator parameters")
    p.add_argument("--family", choices=family_choices, default=family_choices[0])
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--threads", type=int, default=None, help="grid worker threads (env DUALCS_THREADS)")
    p.add_argument("--near-boundary", action="store_true", help="allow |z| > 0.95 for unit-radius families")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = _Parser(prog="dualcs", description="Dual coherent states for hypergeometric oscillator models.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    subs = {}

    p = sub.add_parser("state", help="coefficients of a coherent state")
    _common(p)
    p.add_argument("--z", type=parse_complex, required=True)
    p.add_argument("--N", type=int, default=None, help="truncation (automatic by default)")
    subs["state"] = p

    p = sub.add_parser("mandel", help="photon statistics over a |z| grid")
    _common(p)
    p.add_argument("--z-abs-grid", type=parse_grid, default=None)
    subs["mandel"] = p

    p = sub.add_parser("thermal", help="thermal ensemble, Husimi and P functions")
    _common(p)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--hbar-omega", type=float, default=1.0)
    p.add_argument("--e0", type=float, default=0.0)
    p.add_argument("--z-abs-grid", type=parse_grid, default=None)
    subs["thermal"] = p

    p = sub.add_parser("verify", help="run the invariant checks")
    _common(p, ("both", "bg", "kp"))
    p.add_argument("--N", type=int, default=15)
    p.add_argument("--nodes", type=int, default=200)
    subs["verify"] = p

    p = sub.add_parser("overlap", help="overlap of two coherent states")
    _common(p)
    p.add_argument("--z1", type=parse_complex, required=True)
    p.add_argument("--z2", type=parse_complex, required=True)
    p.add_argument("--N", type=int, default=None)
    subs["overlap"] = p

    p = sub.add_parser("radius", help="convergence radii of both families")
    _common(p)
    subs["radius"] = p
    return parser, subs


COMMANDS = {
    "state": cmd_state,
    "mandel": cmd_mandel,
    "thermal": cmd_thermal,
    "verify": cmd_verify,
    "overlap": cmd_overlap,
    "radius": cmd_radius,
}


def _apply_config(cfg: dict[str, str], sp: argparse.ArgumentParser) -> None:
    values = {}
    for action in sp._actions:
        if action.dest in cfg:
            action.required = False
            v = cfg[action.dest]
            if isinstance(action, argparse._StoreTrueAction):
                v = v.lower() in ("1", "true", "yes", "on")
            values[action.dest] = v
    # string defaults go through each option's type converter; flags still win
    sp.set_defaults(**values)


def parse_args(argv: Sequence[str]):
    parser, subs = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    cfg_path = pre.parse_known_args(argv)[0].config
    cfg = read_config(cfg_path) if cfg_path else {}
    cfg.pop("config", None)
    for sp in subs.values():
        _apply_config(cfg, sp)
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
    # keys meant for another subcommand are ignored so one file can serve all of them
    unknown = sorted(set(cfg) - {a.dest for sp in subs.values() for a in sp._actions})
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    return args


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        err.write(f"dualcs: usage error: {exc}\n")
        return EXIT_USAGE
    except (DivergenceError, NonConvergenceError, TruncationError) as exc:
        err.write(f"dualcs: divergence: {exc}\n")
        return EXIT_DIVERGENCE
    except (DomainError, UnsupportedClassError) as exc:
        err.write(f"dualcs: domain error: {exc}\n")
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
