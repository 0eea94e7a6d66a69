"""
Command-line scan runner.

Example config (flat ``key = value``, ``#`` starts a comment)::

    mode = lorentz-params
    epsilon = pi/8
    kappa = 0.1 gamma_eg
    grid_start = -6 gamma_eg
    grid_stop = 6 gamma_eg
    grid_count = 49

Rates are in units of gamma_r unless suffixed with ``gamma_r`` or
``gamma_eg``; angles are radians or multiples of ``pi`` (``pi/8``,
``3pi/16``). The run writes ``<out>/<mode>.csv`` and ``<out>/manifest.txt``.
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import math
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .doppler import DopplerParams, averaged_scan
from .errors import HanleError
from .lineshape import fit_resonance, lorentzian_from_coeffs, sign_reversal_gamma1
from .params import SystemParams
from .reduced import NormalizedParams, analytic_coeffs, pi_e0
from .scan import PATHS, fmt, signal_curve, write_csv
from .validation import run_all

log = logging.getLogger("hanle")

MODES = ("scan-omega", "scan-delta", "lorentz-params", "sign-reversal", "doppler-scan", "validate")

# key -> (kind, default); kinds: rate, angle, float, int, str, bool, vector
KEYS = {
    "mode": ("str", "scan-omega"),
    "path": ("str", "reduced"),
    "Fg": ("float", "1"),
    "Fe": ("float", "2"),
    "beta": ("float", "1"),
    "gamma_r": ("float", "1"),
    "gamma_eg": ("rate", "auto"),
    "gamma_1": ("rate", "0"),
    "Gamma": ("rate", "0"),
    "kappa": ("rate", "0"),
    "delta": ("rate", "0"),
    "omega_g": ("rate", "0"),
    "omega_e": ("rate", "auto"),
    "g_ratio": ("float", "1"),
    "b_direction": ("vector", "0,0,1"),
    "epsilon": ("angle", "0"),
    "k_vbar": ("rate", "0"),
    "quadrature_order": ("int", "96"),
    "normalize": ("bool", "false"),
    "grid_start": ("grid", "auto"),
    "grid_stop": ("grid", "auto"),
    "grid_count": ("int", "101"),
    "validate_draws": ("int", "200"),
}

_RATE = re.compile(r"^\s*([-+]?[0-9.]+(?:[eE][-+]?\d+)?)\s*\*?\s*(gamma_r|gamma_eg)?\s*$")
_ANGLE = re.compile(r"^\s*([-+]?)\s*([0-9.]*)\s*\*?\s*pi\s*(?:/\s*([0-9.]+))?\s*$")


class ConfigError(HanleError, ValueError):
    pass


def parse_angle(text: str) -> float:
    m = _ANGLE.match(text)
    if m:
        sign, mult, div = m.groups()
        val = (float(mult) if mult else 1.0) * math.pi / (float(div) if div else 1.0)
        return -val if sign == "-" else val
    return float(text)


def parse_rate(text: str):
    """Return (value, unit) with unit 'gamma_r' or 'gamma_eg'."""
    m = _RATE.match(text)
    if not m:
        raise ValueError(f"cannot parse rate {text!r}")
    return float(m.group(1)), m.group(2) or "gamma_r"


def parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"cannot parse boolean {text!r}")


def read_config(path) -> dict:
    """Parse a flat key-value file into raw strings, with line diagnostics."""
    raw = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        raw[key] = (value, f"{path}:{lineno}")
    return raw


def _convert(key, value, where):
    kind = KEYS[key][0]
    try:
        if kind in ("rate", "grid"):
            if value == "auto":
                return "auto"
            return parse_rate(value)
        if kind == "angle":
            return parse_angle(value)
        if kind == "float":
            return _ratio(value)
        if kind == "int":
            return int(value)
        if kind == "bool":
            return parse_bool(value)
        if kind == "vector":
            vec = tuple(float(x) for x in value.split(","))
            if len(vec) != 3:
                raise ValueError("need three components")
            return vec
        return value
    except ValueError as exc:
        raise ConfigError(f"{where}: field {key!r}: {exc}") from None


def _ratio(text: str) -> float:
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def resolve(raw: dict) -> dict:
    """Apply defaults and unit conversions; every resolved value is returned."""
    vals = {}
    for key, (kind, default) in KEYS.items():
        value, where = raw.get(key, (default, "default"))
        if kind == "grid" and value != "auto" and raw.get("mode", ("",))[0] == "sign-reversal":
            # the sign-reversal grid runs over ellipticity
            try:
                vals[key] = (parse_angle(value), "angle")
            except ValueError as exc:
                raise ConfigError(f"{where}: field {key!r}: {exc}") from None
            continue
        vals[key] = _convert(key, value, where)
    if vals["mode"] not in MODES:
        raise ConfigError(f"field 'mode': unknown mode {vals['mode']!r}; expected one of {MODES}")
    if vals["path"] not in PATHS:
        raise ConfigError(f"field 'path': unknown path {vals['path']!r}; expected one of {PATHS}")
    if vals["grid_count"] < 2:
        raise ConfigError("field 'grid_count': must be at least 2")

    gr = vals["gamma_r"]
    # gamma_eg: explicit, or collisionless value gamma_r/2 + Gamma
    if vals["gamma_eg"] == "auto":
        G, unit = vals["Gamma"]
        frac = G if unit == "gamma_eg" else 0.0
        if frac >= 1:
            raise ConfigError("field 'Gamma': must be below gamma_eg")
        geg = (gr / 2 + (0.0 if unit == "gamma_eg" else G * gr)) / (1 - frac)
    else:
        val, unit = vals["gamma_eg"]
        if unit == "gamma_eg":
            raise ConfigError("field 'gamma_eg': cannot be given in units of itself")
        geg = val * gr
    units = {"gamma_r": gr, "gamma_eg": geg}
    out = {k: v for k, v in vals.items()}
    out["gamma_eg"] = geg
    for key, (kind, _) in KEYS.items():
        if key == "gamma_eg":
            continue
        v = vals[key]
        if kind in ("rate", "grid") and isinstance(v, tuple):
            out[key] = v[0] if v[1] == "angle" else v[0] * units[v[1]]
    for key in ("omega_e", "grid_start", "grid_stop"):
        if out[key] == "auto":
            out[key] = None
    return out


def build_params(cfg: dict) -> SystemParams:
    return SystemParams(
        fg=cfg["Fg"], fe=cfg["Fe"], kappa=cfg["kappa"], delta=cfg["delta"],
        gamma_r=cfg["gamma_r"], gamma_1=cfg["gamma_1"], gamma_eg=cfg["gamma_eg"],
        Gamma=cfg["Gamma"], omega_g=cfg["omega_g"], omega_e=cfg["omega_e"],
        g_ratio=cfg["g_ratio"], beta=cfg["beta"], b_direction=cfg["b_direction"],
        pol=cfg["epsilon"])


def _grid(cfg, default_start, default_stop):
    start = cfg["grid_start"] if cfg["grid_start"] is not None else default_start
    stop = cfg["grid_stop"] if cfg["grid_stop"] is not None else default_stop
    return np.linspace(start, stop, cfg["grid_count"])


def _pmap(fn, items, threads):
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _default_omega_span(p: SystemParams) -> float:
    return 20 * (2 * p.gamma_eg * p.saturation + p.Gamma) or p.gamma_r


def run_mode(cfg: dict, threads: int = 1):
    """Execute one mode; returns (columns, exit_status, summary lines)."""
    mode = cfg["mode"]
    if mode == "validate":
        checks = run_all(draws=cfg["validate_draws"])
        cols = {"check": [c.name for c in checks],
                "max_deviation": [c.deviation for c in checks],
                "tolerance": [c.tolerance for c in checks],
                "passed": [int(c.passed) for c in checks]}
        lines = [f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.deviation:.3e} (tol {c.tolerance:.0e})"
                 for c in checks]
        return cols, 0 if all(c.passed for c in checks) else 1, lines

    p = build_params(cfg)
    path = cfg["path"]
    if mode == "scan-omega":
        span = _default_omega_span(p)
        grid = _grid(cfg, -span, span)
        sig = signal_curve(p, grid, path, threads)
        return {"omega_g": grid, "signal": sig, "signal_over_pi_e0": sig / pi_e0(p)}, 0, []
    if mode == "doppler-scan":
        span = _default_omega_span(p)
        grid = _grid(cfg, -span, span)
        dp = DopplerParams(cfg["k_vbar"], cfg["quadrature_order"])
        scan = averaged_scan(p, dp, grid, normalize=cfg["normalize"])
        lines = [f"background = {fmt(scan.meta['background'])}", f"center = {fmt(scan.meta['center'])}"]
        return {"omega_g": grid, "signal": scan.signal}, 0, lines
    if mode == "scan-delta":
        grid = _grid(cfg, -6 * p.gamma_eg, 6 * p.gamma_eg)
        sig = _pmap(lambda d: float(signal_curve(p.replace(delta=float(d)), [p.omega_g], path)[0]),
                    grid, threads)
        return {"delta": grid, "signal": np.array(sig)}, 0, []
    if mode == "lorentz-params":
        grid = _grid(cfg, -6 * p.gamma_eg, 6 * p.gamma_eg)

        def one(d):
            q = p.replace(delta=float(d))
            if path == "analytic":
                n = NormalizedParams.from_system(q)
                lp = lorentzian_from_coeffs(analytic_coeffs(n.gamma1_tilde, n.epsilon), n.Delta)
                lp = lp.rescaled(pi_e0(q), 2 * q.gamma_eg * q.saturation)
                return lp, 0.0
            fit, _ = fit_resonance(q, path=path)
            return fit.params, fit.goodness
        res = _pmap(one, grid, threads)
        cols = {"delta": grid}
        for name, attr in (("A", "a"), ("B", "b"), ("C", "c_bg"), ("omega0", "omega0"), ("w", "w")):
            cols[name] = [getattr(lp, attr) for lp, _ in res]
        cols["goodness"] = [g for _, g in res]
        return cols, 0, []
    if mode == "sign-reversal":
        grid = _grid(cfg, 0.0, math.pi / 4 * 0.999)
        Delta = p.delta / (2 * p.gamma_eg)
        vals = _pmap(lambda e: sign_reversal_gamma1(float(e), Delta), grid, threads)
        return {"epsilon": grid, "gamma1_reversal": vals}, 0, []
    raise ConfigError(f"unknown mode {mode!r}")


def manifest_text(cfg: dict) -> str:
    lines = [f"hanle_version = {__version__}"]
    for key in KEYS:
        v = cfg[key]
        if isinstance(v, tuple):
            v = ",".join(fmt(x) for x in v)
        elif v is None:
            v = "auto"
        lines.append(f"{key} = {fmt(v)}")
    if cfg["mode"] != "validate":
        p = build_params(cfg)
        lines.append(f"resolved_omega_e = {fmt(p.omega_e_eff)}")
        lines.append(f"resolved_saturation = {fmt(p.saturation)}")
    return "\n".join(lines) + "\n"


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hanle", description="Hanle EIA/EIT resonance scans.")
    ap.add_argument("--config", help="flat key = value config file")
    ap.add_argument("--mode", choices=MODES, help="overrides the config mode")
    ap.add_argument("--out", default=".", help="output directory")
    ap.add_argument("--threads", type=int, default=1, help="worker threads for grid points")
    ap.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                    help="override one config key (repeatable)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        raw = read_config(args.config) if args.config else {}
        for item in args.override:
            if "=" not in item:
                raise ConfigError(f"--override {item!r}: expected KEY=VALUE")
            key, value = (s.strip() for s in item.split("=", 1))
            if key not in KEYS:
                raise ConfigError(f"--override: unknown key {key!r}")
            raw[key] = (value, "--override")
        if args.mode:
            raw["mode"] = (args.mode, "--mode")
        cfg = resolve(raw)
        manifest = manifest_text(cfg)
        digest = hashlib.sha256(manifest.encode()).hexdigest()
        cols, status, lines = run_mode(cfg, max(1, args.threads))
    except HanleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.txt").write_text(manifest, encoding="utf-8")
    csv_path = out / f"{cfg['mode']}.csv"
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        write_csv(fh, cols, [f"manifest-sha256 = {digest}", f"mode = {cfg['mode']}"])
    for line in lines:
        print(line)
    log.info("wrote %s", csv_path)
    return status


if __name__ == "__main__":
    sys.exit(main())
