"""Command-line driver: gain sweeps, modes, convergence, equivalence, validation.

Every output file embeds the resolved run configuration and the package
version.  Curves are written as CSV (configuration in ``#`` comment lines),
modes and base flows as JSON with complex values stored as ``[re, im]``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 tolerance violation in ``validate``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys as _sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .baseflow import BaseFlow, default_base_flow
from .errors import ConfigurationError, NumericalError, ToleranceViolation, TsrError
from .floquet import FloquetPair, floquet_pair, slowest_decay_rate
from .harmonic import convergence_study, equivalence_check
from .io import dump_json, write_csv
from .resolvent import (assemble_tsr, reconstruct_time_signal,
                        sigma_min_L, solve_full_resolvent)
from .systems import SystemModel, build_system
from .transverse import (TransverseSolveConfig, build_projector, is_resonant,
                         reconstruct_response, resonant_full_forcing, transverse_svd)
from .validation import (measure_gains, simulate_linearized,
                         stroboscopic_series)


SYSTEMS = ("mathieu", "vdp", "cgl")
INPUT_MODES = ("harmonic", "quasi_periodic")
VARIANTS = ("full", "transverse", "reconstructed")

# per-system defaults mirroring the reference experiments
DEFAULTS = {
    "mathieu": dict(n_ts=5, omega_min=0.2, omega_max=3.0, count=120,
                    input_mode="harmonic", variant="full", tolerance=1e-3),
    "vdp": dict(n_ts=31, omega_min=0.2, omega_max=2.3, count=300,
                input_mode="quasi_periodic", variant="reconstructed", tolerance=1e-2),
    "cgl": dict(n_ts=21, omega_min=0.2, omega_max=1.5, count=35,
                input_mode="quasi_periodic", variant="reconstructed", tolerance=3e-2),
}
for _d in DEFAULTS.values():
    _d["include_resonances"] = False

# desk-scale frequency subsamples for ``validate`` and default mode frequencies
COMMAND_DEFAULTS = {
    "validate": {"vdp": dict(count=28, include_resonances=True), "cgl": dict(count=8)},
    "modes": {"mathieu": dict(omega_f=float(1 / np.sqrt(2.0))), "vdp": dict(omega_f=1.0),
              "cgl": dict(omega_f=0.7)},
}


@dataclass
class RunConfig:
    """Resolved configuration of one CLI run.

    ``frequencies`` (explicit ratios to the base frequency) overrides the
    ``omega_min``/``omega_max``/``count`` grid.  ``None`` fields take the
    per-system default.
    """

    system: str = "mathieu"
    params: dict = field(default_factory=dict)
    n_ts: Optional[int] = None
    omega_min: Optional[float] = None
    omega_max: Optional[float] = None
    count: Optional[int] = None
    frequencies: Optional[list] = None
    include_resonances: Optional[bool] = None
    input_mode: Optional[str] = None
    variant: Optional[str] = None
    validate: bool = False
    validate_rtol: float = 1e-10
    validate_atol: float = 1e-13
    window_periods: int = 20
    settle_periods: Optional[float] = None
    tolerance: Optional[float] = None
    resonance_offset: float = 1e-6
    omega_f: Optional[float] = None
    horizon_periods: float = 10.0
    samples_per_period: int = 64
    strobe_periods: int = 40
    nts_list: Optional[list] = None
    truth_nts: int = 501
    seed: int = 0
    workers: int = 1
    transverse: dict = field(default_factory=dict)
    out: Optional[str] = None

    def resolved(self) -> "RunConfig":
        """Fill per-system defaults and validate every field."""
        if self.system not in SYSTEMS:
            raise ConfigurationError(f"config.system: expected one of {SYSTEMS}, got {self.system!r}")
        d = DEFAULTS[self.system]
        cfg = replace(self, **{k: v for k, v in d.items() if getattr(self, k) is None})
        cfg.validate_fields()
        return cfg

    def validate_fields(self) -> None:
        n = self.n_ts
        if not isinstance(n, (int, np.integer)) or n < 3 or n % 2 == 0:
            raise ConfigurationError(f"config.n_ts: must be an odd integer >= 3, got {n!r}")
        if self.input_mode not in INPUT_MODES:
            raise ConfigurationError(f"config.input_mode: expected one of {INPUT_MODES}")
        if self.variant not in VARIANTS:
            raise ConfigurationError(f"config.variant: expected one of {VARIANTS}")
        if self.count is None or int(self.count) != self.count or self.count < 1:
            raise ConfigurationError(f"config.count: must be an integer >= 1, got {self.count!r}")
        for name in ("omega_min", "omega_max"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and np.isfinite(v) and v > 0):
                raise ConfigurationError(f"config.{name}: ratio must be positive, got {v!r}")
        if self.omega_max < self.omega_min:
            raise ConfigurationError("config.omega_max: must not be below omega_min")
        if self.frequencies is not None:
            for i, r in enumerate(self.frequencies):
                if not (isinstance(r, (int, float)) and np.isfinite(r) and r > 0):
                    raise ConfigurationError(f"config.frequencies[{i}]: ratio must be positive")
        if self.omega_f is not None and not self.omega_f > 0:
            raise ConfigurationError("config.omega_f: ratio must be positive")
        if self.workers < 1:
            raise ConfigurationError("config.workers: must be >= 1")
        if self.window_periods < 1:
            raise ConfigurationError("config.window_periods: must be >= 1")
        if not (self.validate_rtol > 0 and self.validate_atol > 0):
            raise ConfigurationError("config.validate_rtol/atol: must be positive")
        if self.tolerance is not None and not self.tolerance > 0:
            raise ConfigurationError("config.tolerance: must be positive")
        if not self.resonance_offset > 0:
            raise ConfigurationError("config.resonance_offset: must be positive")
        try:
            TransverseSolveConfig(seed=self.seed, **self.transverse)
        except TypeError as exc:
            raise ConfigurationError(f"config.transverse: {exc}") from None

    def to_dict(self) -> dict:
        return asdict(self)


def load_config_file(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"config file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigurationError(f"config file {path}: top level must be an object")
    known = {f.name for f in fields(RunConfig)}
    for k in data:
        if k not in known:
            raise ConfigurationError(f"config.{k}: unknown field")
    return data


class Context:
    """System, base flow and (for autonomous systems) the neutral pair."""

    def __init__(self, cfg: RunConfig, n_ts: Optional[int] = None):
        self.cfg = cfg
        self.sys: SystemModel = build_system(cfg.system, **cfg.params)
        self.base: BaseFlow = default_base_flow(self.sys, n_ts or cfg.n_ts)
        self.pair: Optional[FloquetPair] = floquet_pair(self.base, self.sys) if self.sys.autonomous else None
        self.tcfg = TransverseSolveConfig(seed=cfg.seed, **cfg.transverse)

    @property
    def omega0(self) -> float:
        return self.base.omega0

    def solve(self, omega_f: float, variant: str):
        """Return ``(solution, op, extras)`` for one forcing frequency."""
        op = assemble_tsr(self.base, self.sys, omega_f, self.cfg.input_mode)
        extras = {}
        if variant == "full":
            return solve_full_resolvent(op), op, extras
        if self.pair is None:
            raise ConfigurationError(
                f"config.variant: {variant!r} needs an autonomous system; "
                f"{self.sys.name} is forced periodically, use 'full'")
        P = build_projector(op, self.pair)
        sol_t = transverse_svd(op, P, self.tcfg)
        extras.update(transverse_gain=sol_t.gain, resonant=P.resonant, projector=P)
        if variant == "transverse":
            return sol_t, op, extras
        rec = reconstruct_response(op, self.pair, P, sol_t)
        extras["reconstruction"] = rec
        return rec.solution, op, extras


def frequency_ratios(cfg: RunConfig, autonomous: bool) -> np.ndarray:
    """Forcing ratios ``omega_f / omega0``; resonances shifted for the full variant."""
    if cfg.frequencies is not None:
        r = np.asarray(cfg.frequencies, dtype=float)
    else:
        r = np.linspace(cfg.omega_min, cfg.omega_max, int(cfg.count))
        if cfg.include_resonances:
            ints = np.arange(np.ceil(cfg.omega_min), np.floor(cfg.omega_max) + 1)
            r = np.union1d(r, ints)
    if autonomous and cfg.variant == "full":
        near = np.abs(r - np.round(r)) < cfg.resonance_offset
        r = np.where(near, np.round(r) + cfg.resonance_offset, r)
    return r


def _header(cfg: RunConfig, command: str, extra: Optional[dict] = None) -> list:
    lines = [f"tsresolvent {__version__} {command}",
             "config " + json.dumps(cfg.to_dict(), sort_keys=True)]
    if extra:
        lines.append("summary " + json.dumps(extra, sort_keys=True, default=float))
    return lines


def _meta(cfg: RunConfig, command: str) -> dict:
    return {"version": __version__, "command": command, "config": cfg.to_dict()}


def _out_path(cfg: RunConfig, default: str) -> Path:
    return Path(cfg.out or default)


def _map(cfg: RunConfig, fn, items):
    # results are returned in input order regardless of completion order
    if cfg.workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def _simulate(ctx: Context, envelopes, omegas, cfg: RunConfig):
    """Simulated gains; a failing batch is retried frequency by frequency."""
    decay = slowest_decay_rate(ctx.base, ctx.sys)
    kw = dict(settle_periods=cfg.settle_periods, window_periods=cfg.window_periods,
              decay_rate=decay, rtol=cfg.validate_rtol, atol=cfg.validate_atol)
    try:
        return [(m.simulated_gain, "") for m in measure_gains(ctx.sys, ctx.base, envelopes, omegas, **kw)]
    except NumericalError:
        out = []
        for e, w in zip(envelopes, omegas):
            try:
                out.append((measure_gains(ctx.sys, ctx.base, [e], [w], **kw)[0].simulated_gain, ""))
            except NumericalError as exc:
                out.append((float("nan"), f"{type(exc).__name__}: {exc}"))
        return out


def sweep_rows(ctx: Context, cfg: RunConfig, ratios, simulate: bool):
    w0 = ctx.omega0

    def one(r):
        sol, op, extras = ctx.solve(r * w0, cfg.variant)
        row = {"ratio": float(r), "omega_f": float(r * w0), "gain": sol.gain,
               "sigma_min_L": sigma_min_L(op)}
        if "transverse_gain" in extras:
            row["transverse_gain"] = extras["transverse_gain"]
        row["_envelope"] = op.input_map @ sol.forcing_mode
        return row

    rows = _map(cfg, one, list(ratios))
    if simulate:
        sims = _simulate(ctx, [r["_envelope"] for r in rows], [r["omega_f"] for r in rows], cfg)
        for row, (g, err) in zip(rows, sims):
            row["simulated_gain"] = g
            row["rel_error"] = abs(g - row["gain"]) / row["gain"] if row["gain"] > 0 else float("nan")
            row["error"] = err
    for row in rows:
        del row["_envelope"]
    return rows


def _write_rows(path: Path, rows, cfg: RunConfig, command: str, summary=None):
    header = list(rows[0].keys()) if rows else ["ratio"]
    write_csv(path, header, [[r[h] for h in header] for r in rows],
              comments=_header(cfg, command, summary))


def cmd_gain_sweep(cfg: RunConfig) -> int:
    ctx = Context(cfg)
    ratios = frequency_ratios(cfg, ctx.sys.autonomous)
    rows = sweep_rows(ctx, cfg, ratios, cfg.validate)
    path = _out_path(cfg, f"{cfg.system}_gain_sweep.csv")
    summary = {"omega0": ctx.omega0, "rows": len(rows)}
    _write_rows(path, rows, cfg, "gain-sweep", summary)
    print(f"wrote {len(rows)} rows to {path} (omega0 = {ctx.omega0:.10g})")
    return 0


def _time_series(signal_fn, t):
    return np.asarray(signal_fn(t)).real


def cmd_modes(cfg: RunConfig) -> int:
    ctx = Context(cfg)
    ratio = cfg.omega_f if cfg.omega_f is not None else 1.0
    if ctx.sys.autonomous and cfg.variant == "full" and is_resonant(ratio, cfg.resonance_offset):
        raise ConfigurationError(
            "config.variant: 'full' is singular at a resonant ratio; use 'reconstructed'")
    omega_f = ratio * ctx.omega0
    sol, op, extras = ctx.solve(omega_f, cfg.variant)
    grid = ctx.base.grid
    T0 = grid.period
    t = np.arange(int(cfg.horizon_periods * cfg.samples_per_period)) * T0 / cfg.samples_per_period
    forcing_env = op.input_map @ sol.forcing_mode
    response_env = sol.gain * sol.response_mode
    forcing_t = reconstruct_time_signal(forcing_env, grid, omega_f, t)
    response_t = reconstruct_time_signal(response_env, grid, omega_f, t)
    rec = extras.get("reconstruction")
    if rec is not None and not rec.resonant:
        # homogeneous neutral part at the base frequency
        response_env = rec.particular
        response_t = (reconstruct_time_signal(rec.particular, grid, omega_f, t)
                      + rec.neutral_amplitude * reconstruct_time_signal(ctx.pair.p0, grid, 0.0, t))
    out = {**_meta(cfg, "modes"), "omega0": ctx.omega0, "omega_f": omega_f, "ratio": ratio,
           "solution": sol.to_dict(), "forcing_envelope": forcing_env,
           "response_envelope": response_env, "times": t,
           "forcing_signal": forcing_t.real, "response_signal": response_t.real}
    if rec is not None:
        out["neutral_amplitude"] = complex(rec.neutral_amplitude)
        out["transverse_gain"] = extras["transverse_gain"]
    if ctx.sys.name == "cgl":
        nn = ctx.sys.params.n_node
        out["x"] = ctx.sys.params.nodes
        out["response_field_w1"] = response_t.real[:, :nn]
        out["response_field_w2"] = response_t.real[:, nn:]
        out["trace_mid"] = response_t.real[:, nn // 2]
    if cfg.validate:
        horizon = t[-1]
        settle = 30.0 / (slowest_decay_rate(ctx.base, ctx.sys) or 1.0 / T0)
        res = simulate_linearized(ctx.sys, ctx.base, forcing_env, omega_f, settle + horizon,
                                  rtol=cfg.validate_rtol, atol=cfg.validate_atol)
        sim = res.dense(settle + t).real
        pred = _prediction(ctx, sol, rec, omega_f, settle + t)
        err = float(np.linalg.norm(sim - pred) / np.linalg.norm(pred))
        out["validation"] = {"settle_time": settle, "relative_l2_error": err}
        print(f"time-series relative L2 error vs integration: {err:.3e}")
    path = _out_path(cfg, f"{cfg.system}_modes.json")
    dump_json(out, path)
    print(f"wrote modes at omega_f/omega0 = {ratio:.6g} (gain {sol.gain:.8g}) to {path}")
    return 0


def _prediction(ctx, sol, rec, omega_f, t):
    # long-time response to the solution's forcing, started from rest
    grid = ctx.base.grid
    if rec is None:
        env = sol.gain * sol.response_mode
        return reconstruct_time_signal(env, grid, omega_f, t).real
    if rec.resonant:
        return reconstruct_time_signal(rec.particular, grid, omega_f, t).real
    return (reconstruct_time_signal(rec.particular, grid, omega_f, t)
            + rec.neutral_amplitude * reconstruct_time_signal(ctx.pair.p0, grid, 0.0, t)).real


def cmd_convergence(cfg: RunConfig) -> int:
    sys_ = build_system(cfg.system, **cfg.params)
    nts_list = cfg.nts_list or list(range(5, 42, 2))
    probe = default_base_flow(sys_, 5)
    ratio = cfg.omega_f if cfg.omega_f is not None else float(np.sqrt(2.0))
    omega_f = ratio * probe.omega0
    table = convergence_study(lambda n: default_base_flow(sys_, n), sys_, omega_f, nts_list,
                              cfg.truth_nts, cfg.input_mode)
    path = _out_path(cfg, f"{cfg.system}_convergence.csv")
    summary = {"slope": table.slope, "ground_truth_gain": table.ground_truth,
               "omega_f": omega_f}
    write_csv(path, ["n_ts", "gain", "rel_error"], table.to_csv_rows(),
              comments=_header(cfg, "convergence", summary))
    print(f"log-linear slope {table.slope:.4g}; wrote {len(table.rows)} rows to {path}")
    return 0


def cmd_equivalence(cfg: RunConfig) -> int:
    ctx_sys = build_system(cfg.system, **cfg.params)
    base = default_base_flow(ctx_sys, cfg.n_ts)
    ratios = frequency_ratios(replace(cfg, variant="full"), ctx_sys.autonomous)

    def one(r):
        rep = equivalence_check(base, ctx_sys, r * base.omega0)
        return {"ratio": float(r), "gain_ts": rep.gain_ts, "gain_hr": rep.gain_hr,
                "rel_deviation": rep.rel_deviation, "alignment": rep.alignment}

    rows = _map(cfg, one, list(ratios))
    worst = max(r["rel_deviation"] for r in rows)
    path = _out_path(cfg, f"{cfg.system}_equivalence.csv")
    _write_rows(path, rows, cfg, "equivalence", {"max_rel_deviation": worst})
    print(f"max |G_TS - G_HR| / G_HR = {worst:.3e} over {len(rows)} frequencies; wrote {path}")
    return 0


def stroboscopic_report(ctx: Context, cfg: RunConfig, ratio: int) -> dict:
    """Drift slopes of ``c(t_k)`` for projected and unprojected resonant forcing."""
    omega_f = ratio * ctx.omega0
    op = assemble_tsr(ctx.base, ctx.sys, omega_f, cfg.input_mode)
    P = build_projector(op, ctx.pair)
    sol = transverse_svd(op, P, ctx.tcfg)
    t_end = cfg.strobe_periods * ctx.base.grid.period
    out = {"ratio": ratio}
    for tag, v in (("projected", sol.forcing_mode), ("unprojected", resonant_full_forcing(op, P))):
        res = simulate_linearized(ctx.sys, ctx.base, op.input_map @ v, omega_f, t_end,
                                  rtol=cfg.validate_rtol, atol=cfg.validate_atol)
        s = stroboscopic_series(res, ctx.pair)
        out[f"{tag}_slope"] = abs(s.slope())
        out[f"{tag}_max_v"] = float(s.v_norm.max())
    return out


def cmd_validate(cfg: RunConfig) -> int:
    ctx = Context(cfg)
    if ctx.sys.autonomous and cfg.variant != "reconstructed":
        raise ConfigurationError(
            "config.variant: simulated responses of autonomous systems include the neutral "
            "mode; validate the 'reconstructed' variant")
    ratios = frequency_ratios(cfg, ctx.sys.autonomous)
    rows = sweep_rows(ctx, cfg, ratios, simulate=True)
    failures = [r for r in rows if r["error"]]
    errs = [r["rel_error"] for r in rows if not r["error"]]
    worst = max(errs) if errs else float("nan")
    summary = {"max_rel_error": worst, "tolerance": cfg.tolerance, "failures": len(failures)}
    strobe = []
    if ctx.sys.autonomous:
        k_max = int(np.floor(max(ratios)))
        for k in range(1, k_max + 1):
            if np.any(np.isclose(ratios, k, rtol=0, atol=1e-12)):
                strobe.append(stroboscopic_report(ctx, cfg, k))
        summary["stroboscopic"] = strobe
    path = _out_path(cfg, f"{cfg.system}_validate.csv")
    _write_rows(path, rows, cfg, "validate", summary)
    print(f"max relative error {worst:.3e} (tolerance {cfg.tolerance:g}) over {len(rows)} "
          f"frequencies; wrote {path}")
    for s in strobe:
        print(f"  omega_f = {s['ratio']} omega0: drift slope projected {s['projected_slope']:.3e}, "
              f"unprojected {s['unprojected_slope']:.3e}")
    for r in failures:
        print(f"  integration failed at ratio {r['ratio']:.6g}: {r['error']}", file=_sys.stderr)
    if failures:
        raise NumericalError(f"{len(failures)} integrations failed")
    if not worst <= cfg.tolerance:
        raise ToleranceViolation(f"max relative error {worst:.3e} exceeds {cfg.tolerance:g}")
    return 0


def cmd_orbit(cfg: RunConfig) -> int:
    sys_ = build_system(cfg.system, **cfg.params)
    base = default_base_flow(sys_, cfg.n_ts)
    out = {**_meta(cfg, "orbit"), "base_flow": base.to_dict()}
    if sys_.autonomous:
        pair = floquet_pair(base, sys_)
        out["floquet_pair"] = pair.to_dict()
    path = _out_path(cfg, f"{cfg.system}_orbit.json")
    dump_json(out, path)
    print(f"T0 = {base.period:.10g}, collocation residual = {base.collocation_residual_norm:.3e}; "
          f"wrote {path}")
    return 0


COMMANDS = {"gain-sweep": cmd_gain_sweep, "modes": cmd_modes, "convergence": cmd_convergence,
            "equivalence": cmd_equivalence, "validate": cmd_validate, "orbit": cmd_orbit}


def _parse_param(text: str):
    if "=" not in text:
        raise ConfigurationError(f"config.params: expected key=value, got {text!r}")
    k, v = text.split("=", 1)
    try:
        return k, json.loads(v)
    except json.JSONDecodeError:
        return k, v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tsresolvent", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--system", choices=SYSTEMS)
        p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                       help="system parameter override (repeatable)")
        p.add_argument("--nts", type=int, dest="n_ts")
        p.add_argument("--omega-min", type=float, help="smallest omega_f / omega0")
        p.add_argument("--omega-max", type=float, help="largest omega_f / omega0")
        p.add_argument("--count", type=int)
        p.add_argument("--frequencies", type=float, nargs="+", help="explicit omega_f / omega0 list")
        p.add_argument("--include-resonances", action="store_true", default=None,
                       help="add integer ratios inside the range to the grid")
        p.add_argument("--input-mode", choices=INPUT_MODES)
        p.add_argument("--variant", choices=VARIANTS)
        p.add_argument("--omega-f", type=float, help="forcing ratio for modes/convergence")
        p.add_argument("--seed", type=int)
        p.add_argument("--out")
        p.add_argument("--config", help="JSON file; its values override the flags")
        p.add_argument("--workers", type=int)
        p.add_argument("--validate", action="store_true", default=None,
                       help="add time-integration checks (gain-sweep, modes)")
        p.add_argument("--validate-rtol", type=float)
        p.add_argument("--validate-atol", type=float)
        p.add_argument("--tolerance", type=float, help="validate: allowed relative gain error")
        p.add_argument("--truth-nts", type=int)
        p.add_argument("--nts-list", type=int, nargs="+")
        p.add_argument("-v", "--verbose", action="store_true")
    return ap


def config_from_args(args) -> RunConfig:
    values = {}
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None and f.name != "params":
            values[f.name] = v
    values["params"] = dict(_parse_param(s) for s in args.param)
    system = values.get("system", "mathieu")
    for k, v in COMMAND_DEFAULTS.get(args.command, {}).get(system, {}).items():
        values.setdefault(k, v)
    if args.config:
        data = load_config_file(args.config)
        params = {**values["params"], **data.pop("params", {})}
        values.update(data)
        values["params"] = params
    return RunConfig(**values).resolved()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        return COMMANDS[args.command](cfg)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=_sys.stderr)
        return 2
    except ToleranceViolation as exc:
        print(f"tolerance violation: {exc}", file=_sys.stderr)
        return 4
    except (NumericalError, TsrError) as exc:
        print(f"numerical failure: {exc}", file=_sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
