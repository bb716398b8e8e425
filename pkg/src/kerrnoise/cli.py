"""Command-line front end producing plot-ready flat files.

Every command reads an optional JSON config; each flag mirrors a config key
and wins over it.  ``--set section.key=value`` reaches keys that have no
dedicated flag.  Exit status is 0 on success, 2 for configuration errors and
3 for numerical failures; errors are reported on stderr as a single line
``kerrnoise: error code=<n> kind=<kind> msg=<json string>``.
"""
from __future__ import annotations

import argparse
import copy
import json
import math
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .correlators import g1, g2, g2_regime
from .curves import format_matrix, format_table, params_hash
from .decoherence import envelope_z, phase_variance_d
from .errors import ConvergenceError, DomainError, KerrNoiseError, QuadratureError
from .noise import (classify_regime, gamma_exponent, s_closed_form, s_therm,
                    s_zero_freq)
from .oracle import OracleConfig, convergence_report
from .params import (HierarchyWarning, SystemParams, current, derive, j_star,
                     kappa, mode_shift, params_at_current)
from .transport import spectral_weight, time_amplitude, transmission_spectrum

PARAM_KEYS = ("omega0", "epsilon", "gamma_l", "gamma_r", "delta", "f_occ")

DEFAULTS = {
    "params": {"omega0": 1000.0, "epsilon": 1.0, "gamma_l": 0.5, "gamma_r": 0.5,
               "delta": 100.0, "f_occ": 1.0},
    "format": "csv",
    "out": None,
    "threads": 1,
    "seed": 0,
    # occupations for the F-resolved families (derive, spectrum, g2)
    "family": {"f_values": None},
    # frequency window in omega - omega0; None means "cover every curve"
    "spectrum": {"n_points": 401, "x_min": None, "x_max": None, "rtol": 1e-8},
    "g2": {"t_max": 5.0, "n_points": 501},
    "noise_curve": {"eps_values": [0.1, 1.0, 10.0, 100.0, 500.0],
                    "j_min": 1e-7, "j_max": 1e4, "n_j": 111},
    "map": {"j_min": 1e-3, "j_max": 1e3, "n_j": 50,
            "eps_min": 0.1, "eps_max": 1e3, "n_eps": 50},
    "oracle": {"n_traj": 200_000, "dt": 5e-3, "t_max": 5.0, "record_stride": 10},
    "sum_rule": {"eps_values": [0.0, 1.0, 10.0], "f_values": [0.5, 2.0, 10.0],
                 "rtol": 1e-7},
}

COMMANDS = ("derive", "spectrum", "g2", "noise-curve", "phase-map", "fano-map",
            "oracle", "sum-rule")


class ConfigError(KerrNoiseError):
    """The configuration could not be parsed or is inconsistent."""


# --- configuration ------------------------------------------------------------

def _merge(base: dict, over: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, val in over.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigError(f"unknown config key {where!r}")
        if isinstance(base[key], dict):
            if not isinstance(val, dict):
                raise ConfigError(f"config key {where!r} must be a section")
            out[key] = _merge(base[key], val, where + ".")
        else:
            out[key] = val
    return out


def _parse_set(item: str) -> dict:
    key, sep, raw = item.partition("=")
    if not sep or not key:
        raise ConfigError(f"--set expects key=value, got {item!r}")
    try:
        val = json.loads(raw)
    except json.JSONDecodeError:
        val = raw
    nested = val
    for part in reversed(key.split(".")):
        nested = {part: nested}
    return nested


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = copy.deepcopy(DEFAULTS)
    if args.config:
        try:
            text = Path(args.config).read_text()
            user = json.loads(text)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config file must hold a JSON object")
        cfg = _merge(cfg, user)
    for item in args.set or ():
        cfg = _merge(cfg, _parse_set(item))
    for key in ("out", "format", "threads", "seed"):
        val = getattr(args, key)
        if val is not None:
            cfg[key] = val
    for key in PARAM_KEYS:
        val = getattr(args, key)
        if val is not None:
            cfg["params"][key] = val
    if cfg["format"] not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {cfg['format']!r}")
    if not isinstance(cfg["threads"], int) or cfg["threads"] < 1:
        raise ConfigError("threads must be a positive integer")
    if not isinstance(cfg["seed"], int) or not 0 <= cfg["seed"] < 2 ** 64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    return cfg


def config_hash(cfg: dict) -> str:
    # output location and worker count do not change the content
    return params_hash({k: v for k, v in cfg.items() if k not in ("out", "threads")})


def system_params(cfg: dict) -> SystemParams:
    try:
        vals = {k: float(cfg["params"][k]) for k in PARAM_KEYS}
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"parameters must be numbers: {exc}") from exc
    return SystemParams(**vals)


def _f_values(cfg: dict, p: SystemParams) -> list[float]:
    vals = cfg["family"]["f_values"]
    if vals is None:
        return [p.f_occ]
    if not isinstance(vals, list) or not vals:
        raise ConfigError("family.f_values must be a non-empty list")
    return [float(v) for v in vals]


def _log_axis(section: dict, name: str, lo_key: str, hi_key: str, n_key: str) -> np.ndarray:
    lo, hi, n = section[lo_key], section[hi_key], section[n_key]
    if not (isinstance(n, int) and n >= 2):
        raise ConfigError(f"{name}: point count must be an integer >= 2")
    if not (lo > 0 and hi > lo):
        raise ConfigError(f"{name}: log range needs 0 < min < max")
    return np.logspace(math.log10(lo), math.log10(hi), n)


def _header(command: str, cfg: dict, p: SystemParams, **extra) -> dict:
    head = {"command": command, "version": __version__, "params": p.as_dict(),
            "params_hash": params_hash(p.as_dict()), "config_hash": config_hash(cfg)}
    head.update(extra)
    return head


# --- output -------------------------------------------------------------------

def _jsonable(v):
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def _emit(text: str, path) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def write_table(cfg: dict, columns: dict, header: dict) -> None:
    if cfg["format"] == "json":
        text = json.dumps({"header": _jsonable(header), "columns": _jsonable(columns)},
                          indent=1) + "\n"
    else:
        text = format_table(columns, header)
    _emit(text, cfg["out"])


def write_map(cfg: dict, matrix: np.ndarray, j_axis: np.ndarray, eps_axis: np.ndarray,
              j_stars: np.ndarray, header: dict) -> None:
    """Row-major matrix (rows: eps, columns: J) plus two axis files."""
    if cfg["format"] == "json":
        text = json.dumps({"header": _jsonable(header), "j_over_gamma": _jsonable(j_axis),
                           "eps_over_gamma": _jsonable(eps_axis),
                           "j_star_over_gamma": _jsonable(j_stars),
                           "matrix": _jsonable(matrix)}, indent=1) + "\n"
        _emit(text, cfg["out"])
        return
    _emit(format_matrix(matrix, header), cfg["out"])
    if cfg["out"] is not None:
        out = Path(cfg["out"])
        stem = out.with_suffix("")
        Path(f"{stem}.j_axis.csv").write_text(
            format_table({"j_over_gamma": j_axis}, header))
        Path(f"{stem}.eps_axis.csv").write_text(
            format_table({"eps_over_gamma": eps_axis, "j_star_over_gamma": j_stars}, header))


# --- commands -----------------------------------------------------------------

def cmd_derive(cfg: dict) -> None:
    """Derived scales for the base parameters or an F family."""
    p = system_params(cfg)
    rows = []
    for f in _f_values(cfg, p):
        q = p.replace(f_occ=f)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", HierarchyWarning)
            bad = q.hierarchy_violations()
        for msg in bad:
            print(f"kerrnoise: warning kind=hierarchy f_occ={f:g} msg={json.dumps(msg)}",
                  file=sys.stderr)
        d = derive(q).as_dict()
        d["omega_ac_minus_omega0"] = mode_shift(q)
        rows.append({"f_occ": f, **d})
    columns = {k: np.array([r[k] for r in rows]) for k in rows[0]}
    write_table(cfg, columns, _header("derive", cfg, p))


def _spectrum_window(cfg: dict, p: SystemParams, f_values) -> np.ndarray:
    sec = cfg["spectrum"]
    n = sec["n_points"]
    if not (isinstance(n, int) and n >= 2):
        raise ConfigError("spectrum.n_points must be an integer >= 2")
    lo, hi = sec["x_min"], sec["x_max"]
    if lo is None or hi is None:
        edges = []
        for f in f_values:
            q = p.replace(f_occ=f)
            half = max(10.0 * q.gamma, 8.0 * kappa(q))
            edges += [mode_shift(q) - half, mode_shift(q) + half]
        lo = min(edges) if lo is None else lo
        hi = max(edges) if hi is None else hi
    if not hi > lo:
        raise ConfigError("spectrum window needs x_min < x_max")
    return np.linspace(lo, hi, n)


def cmd_spectrum(cfg: dict) -> None:
    """T_omega for every F of the family on one shared omega - omega0 grid."""
    p = system_params(cfg)
    fs = _f_values(cfg, p)
    x = _spectrum_window(cfg, p, fs)
    cols = {k: [] for k in ("f_occ", "omega_minus_omega0", "omega_minus_omega_ac",
                            "t_omega", "imag_residue")}
    for f in fs:
        q = p.replace(f_occ=f)
        det = x - mode_shift(q)
        curve = transmission_spectrum(q, det, rtol=cfg["spectrum"]["rtol"])
        cols["f_occ"].append(np.full(x.size, f))
        cols["omega_minus_omega0"].append(x)
        cols["omega_minus_omega_ac"].append(det)
        cols["t_omega"].append(curve.values)
        cols["imag_residue"].append(curve.imag_residue)
    columns = {k: np.concatenate(v) for k, v in cols.items()}
    write_table(cfg, columns, _header("spectrum", cfg, p, f_values=fs))


def cmd_g2(cfg: dict) -> None:
    """g2(t) and |g1(t)| with a regime label per F."""
    p = system_params(cfg)
    sec = cfg["g2"]
    if not (isinstance(sec["n_points"], int) and sec["n_points"] >= 2 and sec["t_max"] > 0):
        raise ConfigError("g2 needs n_points >= 2 and t_max > 0")
    t = np.linspace(0.0, sec["t_max"], sec["n_points"])
    cols = {k: [] for k in ("f_occ", "t", "g2", "abs_g1", "regime")}
    for f in _f_values(cfg, p):
        q = p.replace(f_occ=f)
        cols["f_occ"].append(np.full(t.size, f))
        cols["t"].append(t)
        cols["g2"].append(g2(q, t))
        cols["abs_g1"].append(np.abs(g1(q, t)))
        cols["regime"].append(np.full(t.size, g2_regime(q), dtype=object))
    columns = {k: np.concatenate(v) for k, v in cols.items()}
    write_table(cfg, columns, _header("g2", cfg, p))


def _noise_row(task):
    """Noise quantities along one eps row; top level so worker processes can pickle it."""
    base, eps, js = task
    out = []
    for j in js:
        q = params_at_current(j * base["gamma"], eps * base["gamma"], gamma_l=base["gamma_l"],
                              gamma_r=base["gamma_r"], omega0=base["omega0"],
                              delta=base["delta"])
        s = s_zero_freq(q)
        out.append((s, s / current(q), gamma_exponent(q), classify_regime(q),
                    s_therm(q), s_closed_form(q).value if eps != 0 else math.nan))
    return out


def _rows_parallel(base: dict, eps_values, js, threads: int):
    tasks = [(base, float(e), np.asarray(js, dtype=float)) for e in eps_values]
    if threads > 1:
        # map preserves task order, so the output does not depend on scheduling
        with ProcessPoolExecutor(threads) as pool:
            return list(pool.map(_noise_row, tasks))
    return [_noise_row(t) for t in tasks]


def _base(p: SystemParams) -> dict:
    return {"gamma": p.gamma, "gamma_l": p.gamma_l, "gamma_r": p.gamma_r,
            "omega0": p.omega0, "delta": p.delta}


def cmd_noise_curve(cfg: dict) -> None:
    """Zero-frequency noise, Fano factor and local exponent against J."""
    p = system_params(cfg)
    sec = cfg["noise_curve"]
    js = _log_axis(sec, "noise_curve", "j_min", "j_max", "n_j")
    eps_values = [float(e) for e in sec["eps_values"]]
    if not eps_values:
        raise ConfigError("noise_curve.eps_values must not be empty")
    rows = _rows_parallel(_base(p), eps_values, js, cfg["threads"])
    cols = {k: [] for k in ("j_over_gamma", "eps_over_gamma", "s", "fano", "gamma",
                            "regime", "s_therm", "s_closed_form", "j_star_over_gamma")}
    for e, row in zip(eps_values, rows):
        js_e = j_star(p.replace(epsilon=e * p.gamma)) / p.gamma
        for j, (s, fa, ga, reg, st, sc) in zip(js, row):
            for key, val in zip(cols, (j, e, s, fa, ga, reg, st, sc, js_e)):
                cols[key].append(val)
    columns = {k: np.array(v, dtype=object if k == "regime" else float) for k, v in cols.items()}
    write_table(cfg, columns, _header("noise-curve", cfg, p))


def _map(cfg: dict, which: str) -> None:
    p = system_params(cfg)
    sec = cfg["map"]
    js = _log_axis(sec, "map J axis", "j_min", "j_max", "n_j")
    es = _log_axis(sec, "map eps axis", "eps_min", "eps_max", "n_eps")
    rows = _rows_parallel(_base(p), es, js, cfg["threads"])
    k = 2 if which == "gamma" else 1
    matrix = np.array([[cell[k] for cell in row] for row in rows])
    stars = np.array([j_star(p.replace(epsilon=e * p.gamma)) / p.gamma for e in es])
    header = _header("phase-map" if which == "gamma" else "fano-map", cfg, p,
                     quantity=which, rows="eps_over_gamma", columns="j_over_gamma",
                     j_over_gamma=js, eps_over_gamma=es)
    write_map(cfg, matrix, js, es, stars, header)


def cmd_phase_map(cfg: dict) -> None:
    """Local exponent on the (J, eps) grid."""
    _map(cfg, "gamma")


def cmd_fano_map(cfg: dict) -> None:
    """Fano factor on the (J, eps) grid."""
    _map(cfg, "fano")


def cmd_oracle(cfg: dict) -> None:
    """Stochastic cross-check of z(t) and D(t) with step halving."""
    p = system_params(cfg)
    sec = cfg["oracle"]
    try:
        oc = OracleConfig(n_traj=int(sec["n_traj"]), dt=float(sec["dt"]),
                          t_max=float(sec["t_max"]), seed=cfg["seed"],
                          workers=cfg["threads"], record_stride=int(sec["record_stride"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad oracle section: {exc}") from exc
    oc.check(p, strict=True)
    report = convergence_report(p, oc)
    st = report.coarse
    columns = {"t": st.grid, "mean_z": st.mean_z, "stderr": st.stderr, "var_phi": st.var_phi,
               "analytic_z": envelope_z(p, st.grid),
               "analytic_2d": 2.0 * phase_variance_d(p, st.grid),
               "var_stderr": st.var_stderr, "mean_imag": st.mean_imag,
               "imag_stderr": st.imag_stderr}
    header = _header("oracle", cfg, p, oracle={**sec, "seed": cfg["seed"]},
                     step_halving_max_abs_diff=report.max_abs_diff,
                     step_halving_flag=report.flagged)
    print(f"kerrnoise: {report.summary()}", file=sys.stderr)
    write_table(cfg, columns, header)


def cmd_sum_rule(cfg: dict) -> None:
    """Spectral weight against 2 Gamma_L Gamma_R / Gamma."""
    p = system_params(cfg)
    sec = cfg["sum_rule"]
    cols = {k: [] for k in ("eps_over_gamma", "f_occ", "weight", "expected", "rel_err")}
    for e in sec["eps_values"]:
        for f in sec["f_values"]:
            q = p.replace(epsilon=float(e) * p.gamma, f_occ=float(f))
            w = spectral_weight(q, rtol=sec["rtol"])
            ref = time_amplitude(q)
            for key, val in zip(cols, (e, f, w, ref, w / ref - 1.0 if ref else 0.0)):
                cols[key].append(float(val))
    write_table(cfg, {k: np.array(v) for k, v in cols.items()}, _header("sum-rule", cfg, p))


HANDLERS = {"derive": cmd_derive, "spectrum": cmd_spectrum, "g2": cmd_g2,
            "noise-curve": cmd_noise_curve, "phase-map": cmd_phase_map,
            "fano-map": cmd_fano_map, "oracle": cmd_oracle, "sum-rule": cmd_sum_rule}


# --- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON config file")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--threads", type=int, metavar="N", help="worker count")
    common.add_argument("--seed", type=int, metavar="U64", help="oracle base seed")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override any config key, e.g. map.n_j=20 (repeatable)")
    for key in PARAM_KEYS:
        common.add_argument("--" + key.replace("_", "-"), dest=key, type=float)

    parser = argparse.ArgumentParser(prog="kerrnoise", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=HANDLERS[name].__doc__)
    return parser


def _fail(code: int, kind: str, msg: str) -> int:
    print(f"kerrnoise: error code={code} kind={kind} msg={json.dumps(msg)}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which matches our config-error code
        return int(exc.code or 0)
    try:
        cfg = resolve_config(args)
        HANDLERS[args.command](cfg)
    except (ConfigError, DomainError) as exc:
        return _fail(2, "config", str(exc))
    except (ConvergenceError, QuadratureError) as exc:
        return _fail(3, "numerical", str(exc))
    except (KeyError, TypeError) as exc:
        return _fail(2, "config", f"malformed config: {exc}")
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        return _fail(3, "numerical", str(exc))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
