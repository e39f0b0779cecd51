"""Scenario files: strict YAML schema for SystemConfig, plus sweep plumbing.

Configs are human-edited, so unknown keys are hard errors (a misspelled
``alpha_nlos`` must not silently fall back to a default).  Decibel and degree
units appear only here; everything behind this boundary is linear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .analytic import (
    ArtificialNoiseConfig,
    SectoredLink,
    SystemConfig,
    UlaLink,
    UpaLink,
)
from .antenna import SectoredPattern, UlaConfig, upa_pattern
from .geometry import (
    ExponentialBlockage,
    LosBall,
    PathLossModel,
    beta_from_frequency,
)

__all__ = [
    "ConfigError",
    "SweepSpec",
    "SWEEP_VARIABLES",
    "TABLE_PATH_LOSS_EXPONENTS",
    "dbm_to_watts",
    "watts_to_dbm",
    "db_to_linear",
    "noise_power_watts",
    "load_config",
    "config_from_mapping",
    "config_to_mapping",
    "dump_config",
    "apply_sweep_value",
    "sweep_values",
]


class ConfigError(ValueError):
    """A scenario file failed to parse or violated an invariant."""


# measured LoS/NLoS exponents per carrier band (GHz)
TABLE_PATH_LOSS_EXPONENTS = {
    28.0: (2.0, 3.0),
    38.0: (2.0, 3.71),
    60.0: (2.25, 3.76),
    73.0: (2.0, 3.4),
}


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts) + 30.0


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def noise_power_watts(bandwidth_hz: float, noise_figure_db: float) -> float:
    """Thermal noise floor: -174 dBm/Hz plus bandwidth and noise figure."""
    dbm = -174.0 + 10.0 * math.log10(bandwidth_hz) + noise_figure_db
    return dbm_to_watts(dbm)


def _require_keys(mapping: dict, allowed: set[str], context: str,
                  required: set[str] = frozenset()):
    if not isinstance(mapping, dict):
        raise ConfigError(f"{context}: expected a mapping, got {type(mapping).__name__}")
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"{context}: unknown key(s) {sorted(unknown)}; "
                          f"allowed: {sorted(allowed)}")
    missing = required - set(mapping)
    if missing:
        raise ConfigError(f"{context}: missing required key(s) {sorted(missing)}")


def _number(mapping: dict, key: str, context: str) -> float:
    v = mapping.get(key)
    if not isinstance(v, (int, float)) or isinstance(v, bool) or not np.isfinite(v):
        raise ConfigError(f"{context}: '{key}' must be a finite number, got {v!r}")
    return float(v)


def _pattern_from(mapping: dict, context: str) -> SectoredPattern:
    _require_keys(mapping, {"main_lobe_db", "side_lobe_db", "beamwidth_deg"},
                  context, {"main_lobe_db", "side_lobe_db", "beamwidth_deg"})
    try:
        return SectoredPattern(
            g_main=db_to_linear(_number(mapping, "main_lobe_db", context)),
            g_side=db_to_linear(_number(mapping, "side_lobe_db", context)),
            beamwidth=math.radians(_number(mapping, "beamwidth_deg", context)))
    except ValueError as exc:
        raise ConfigError(f"{context}: {exc}") from exc


def _emit_exact(linear_value: float, human_value: float, parse) -> float:
    """Pick the emitted human-unit number whose parse recovers the value.

    Unit conversions are not exact float inverses, but configs originate in
    human units, so a representable preimage normally exists within an ulp
    or two; a 12-digit snap is tried first to keep emitted files readable.
    """
    candidates = [float(f"{human_value:.12g}"), human_value]
    step_up = step_down = human_value
    for _ in range(2):
        step_up = np.nextafter(step_up, math.inf)
        step_down = np.nextafter(step_down, -math.inf)
        candidates.extend((step_up, step_down))
    for c in candidates:
        if parse(c) == linear_value:
            return c
    return human_value


def _emit_dbm(watts: float) -> float:
    return _emit_exact(watts, watts_to_dbm(watts), dbm_to_watts)


def _emit_db(gain: float) -> float:
    return _emit_exact(gain, 10.0 * math.log10(gain), db_to_linear)


def _emit_deg(radians: float) -> float:
    return _emit_exact(radians, math.degrees(radians), math.radians)


def _pattern_to(p: SectoredPattern) -> dict:
    return {
        "main_lobe_db": _emit_db(p.g_main),
        "side_lobe_db": _emit_db(p.g_side),
        "beamwidth_deg": _emit_deg(p.beamwidth),
    }


_TOP_KEYS = {"comment", "carrier_frequency_ghz", "tx_power_dbm",
             "tx_density_per_km2", "eve_density_per_km2", "dipole_distance_m",
             "path_loss", "blockage", "noise", "antennas", "an"}
_TOP_REQUIRED = _TOP_KEYS - {"comment", "an"}


def config_from_mapping(doc: dict) -> SystemConfig:
    """Build and validate a SystemConfig from a parsed scenario mapping."""
    _require_keys(doc, _TOP_KEYS, "config", _TOP_REQUIRED)

    freq_hz = _number(doc, "carrier_frequency_ghz", "config") * 1e9

    pl_doc = doc["path_loss"]
    _require_keys(pl_doc, {"alpha_los", "alpha_nlos", "ref_distance_m", "beta"},
                  "path_loss", {"alpha_los", "alpha_nlos"})
    beta = _number(pl_doc, "beta", "path_loss") if "beta" in pl_doc \
        else beta_from_frequency(freq_hz)
    try:
        path_loss = PathLossModel(
            beta=beta,
            alpha_los=_number(pl_doc, "alpha_los", "path_loss"),
            alpha_nlos=_number(pl_doc, "alpha_nlos", "path_loss"),
            ref_distance=_number(pl_doc, "ref_distance_m", "path_loss")
            if "ref_distance_m" in pl_doc else 1.0)
    except ValueError as exc:
        raise ConfigError(f"path_loss: {exc}") from exc

    blk_doc = doc["blockage"]
    model = blk_doc.get("model") if isinstance(blk_doc, dict) else None
    try:
        if model == "exponential":
            _require_keys(blk_doc, {"model", "los_range_m"}, "blockage",
                          {"model", "los_range_m"})
            blockage = ExponentialBlockage(
                rho=1.0 / _number(blk_doc, "los_range_m", "blockage"))
        elif model == "los_ball":
            _require_keys(blk_doc, {"model", "d_los_m"}, "blockage",
                          {"model", "d_los_m"})
            blockage = LosBall(d_los=_number(blk_doc, "d_los_m", "blockage"))
        else:
            raise ConfigError("blockage: 'model' must be 'exponential' or "
                              "'los_ball'")
    except ValueError as exc:
        raise ConfigError(f"blockage: {exc}") from exc

    noise_doc = doc["noise"]
    if isinstance(noise_doc, dict) and "bandwidth_ghz" in noise_doc:
        _require_keys(noise_doc, {"bandwidth_ghz", "noise_figure_db"}, "noise",
                      {"bandwidth_ghz", "noise_figure_db"})
        watts = noise_power_watts(
            _number(noise_doc, "bandwidth_ghz", "noise") * 1e9,
            _number(noise_doc, "noise_figure_db", "noise"))
        noise_rx = noise_eve = watts
    else:
        _require_keys(noise_doc, {"rx_dbm", "eve_dbm"}, "noise",
                      {"rx_dbm", "eve_dbm"})
        noise_rx = dbm_to_watts(_number(noise_doc, "rx_dbm", "noise"))
        noise_eve = dbm_to_watts(_number(noise_doc, "eve_dbm", "noise"))

    ant = doc["antennas"]
    kind = ant.get("model") if isinstance(ant, dict) else None
    eve_pattern = None
    if kind == "upa":
        _require_keys(ant, {"model", "n", "n_eve"}, "antennas",
                      {"model", "n", "n_eve"})
        try:
            gain_model = UpaLink(int(_number(ant, "n", "antennas")))
            eve_pattern = upa_pattern(int(_number(ant, "n_eve", "antennas")))
        except ValueError as exc:
            raise ConfigError(f"antennas: {exc}") from exc
    elif kind == "sectored":
        _require_keys(ant, {"model", "tx", "rx", "eve"}, "antennas",
                      {"model", "tx", "rx", "eve"})
        gain_model = SectoredLink(tx=_pattern_from(ant["tx"], "antennas.tx"),
                                  rx=_pattern_from(ant["rx"], "antennas.rx"))
        eve_pattern = _pattern_from(ant["eve"], "antennas.eve")
    elif kind == "ula":
        _require_keys(ant, {"model", "n", "n_eve", "spacing_ratio",
                            "rx_boresight_deg", "tx_boresight_deg"},
                      "antennas", {"model", "n", "n_eve"})
        try:
            gain_model = UlaLink(UlaConfig(
                n_tx=int(_number(ant, "n", "antennas")),
                n_eve=int(_number(ant, "n_eve", "antennas")),
                spacing_ratio=_number(ant, "spacing_ratio", "antennas")
                if "spacing_ratio" in ant else 0.5,
                rx_boresight=math.radians(_number(ant, "rx_boresight_deg", "antennas"))
                if "rx_boresight_deg" in ant else 0.0,
                tx_boresight=math.radians(_number(ant, "tx_boresight_deg", "antennas"))
                if "tx_boresight_deg" in ant else 0.0))
        except ValueError as exc:
            raise ConfigError(f"antennas: {exc}") from exc
    else:
        raise ConfigError("antennas: 'model' must be 'upa', 'sectored' or 'ula'")

    an = None
    if doc.get("an") is not None:
        an_doc = doc["an"]
        _require_keys(an_doc, {"mu", "signal", "noise"}, "an",
                      {"mu", "signal", "noise"})
        try:
            an = ArtificialNoiseConfig(
                mu=_number(an_doc, "mu", "an"),
                signal=_pattern_from(an_doc["signal"], "an.signal"),
                noise=_pattern_from(an_doc["noise"], "an.noise"))
        except ValueError as exc:
            raise ConfigError(f"an: {exc}") from exc

    try:
        return SystemConfig(
            carrier_frequency=freq_hz,
            tx_power=dbm_to_watts(_number(doc, "tx_power_dbm", "config")),
            tx_density=_number(doc, "tx_density_per_km2", "config") * 1e-6,
            eve_density=_number(doc, "eve_density_per_km2", "config") * 1e-6,
            dipole_distance=_number(doc, "dipole_distance_m", "config"),
            path_loss=path_loss,
            blockage=blockage,
            noise_rx=noise_rx,
            noise_eve=noise_eve,
            gain_model=gain_model,
            eve_pattern=eve_pattern,
            an=an)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> SystemConfig:
    """Parse and validate a scenario file."""
    text = Path(path).read_text()
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: YAML parse error: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: expected a mapping at the top level")
    return config_from_mapping(doc)


def config_to_mapping(cfg: SystemConfig, comment: str | None = None) -> dict:
    """Serialize a SystemConfig back to the scenario schema."""
    doc: dict = {}
    if comment:
        doc["comment"] = comment
    doc["carrier_frequency_ghz"] = _emit_exact(
        cfg.carrier_frequency, cfg.carrier_frequency / 1e9, lambda v: v * 1e9)
    doc["tx_power_dbm"] = _emit_dbm(cfg.tx_power)
    doc["tx_density_per_km2"] = _emit_exact(
        cfg.tx_density, cfg.tx_density * 1e6, lambda v: v * 1e-6)
    doc["eve_density_per_km2"] = _emit_exact(
        cfg.eve_density, cfg.eve_density * 1e6, lambda v: v * 1e-6)
    doc["dipole_distance_m"] = cfg.dipole_distance
    doc["path_loss"] = {
        "alpha_los": cfg.path_loss.alpha_los,
        "alpha_nlos": cfg.path_loss.alpha_nlos,
        "ref_distance_m": cfg.path_loss.ref_distance,
        "beta": cfg.path_loss.beta,
    }
    if isinstance(cfg.blockage, ExponentialBlockage):
        doc["blockage"] = {
            "model": "exponential",
            "los_range_m": _emit_exact(cfg.blockage.rho, 1.0 / cfg.blockage.rho,
                                       lambda v: 1.0 / v)}
    else:
        doc["blockage"] = {"model": "los_ball", "d_los_m": cfg.blockage.d_los}
    doc["noise"] = {"rx_dbm": _emit_dbm(cfg.noise_rx),
                    "eve_dbm": _emit_dbm(cfg.noise_eve)}
    gm = cfg.gain_model
    if isinstance(gm, UpaLink):
        # recover the interceptor element count from its main-lobe gain
        doc["antennas"] = {"model": "upa", "n": gm.n,
                           "n_eve": int(round(cfg.eve_pattern.g_main))}
    elif isinstance(gm, SectoredLink):
        doc["antennas"] = {"model": "sectored",
                           "tx": _pattern_to(gm.tx),
                           "rx": _pattern_to(gm.rx),
                           "eve": _pattern_to(cfg.eve_pattern)}
    else:
        u = gm.ula
        doc["antennas"] = {"model": "ula", "n": u.n_tx, "n_eve": u.n_eve,
                           "spacing_ratio": u.spacing_ratio,
                           "rx_boresight_deg": _emit_deg(u.rx_boresight),
                           "tx_boresight_deg": _emit_deg(u.tx_boresight)}
    if cfg.an is not None:
        doc["an"] = {"mu": cfg.an.mu,
                     "signal": _pattern_to(cfg.an.signal),
                     "noise": _pattern_to(cfg.an.noise)}
    return doc


def dump_config(cfg: SystemConfig, comment: str | None = None) -> str:
    return yaml.safe_dump(config_to_mapping(cfg, comment), sort_keys=False)


# ---------------------------------------------------------------------------
# parameter sweeps


SWEEP_VARIABLES = ("tx_power_dbm", "tx_density", "eve_density",
                   "dipole_distance", "mu", "n_antennas", "n_eve_antennas",
                   "frequency")


@dataclass(frozen=True)
class SweepSpec:
    """One swept scenario variable.

    Units at this boundary: dBm for power, points per km^2 for densities,
    meters for distance, GHz for frequency; ``mu`` and antenna counts are
    bare numbers.  ``scale`` is 'linear' or 'log'.
    """

    variable: str
    start: float
    stop: float
    steps: int
    scale: str = "linear"

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(f"unknown sweep variable '{self.variable}'; "
                              f"choose from {SWEEP_VARIABLES}")
        if self.steps < 2:
            raise ConfigError("a sweep needs at least 2 steps")
        if self.start == self.stop:
            raise ConfigError("sweep endpoints must differ")
        if self.scale not in ("linear", "log"):
            raise ConfigError("scale must be 'linear' or 'log'")
        if self.scale == "log" and (self.start <= 0 or self.stop <= 0):
            raise ConfigError("log sweeps need positive endpoints")


def sweep_values(spec: SweepSpec) -> list[float]:
    if spec.scale == "log":
        vals = np.geomspace(spec.start, spec.stop, spec.steps)
    else:
        vals = np.linspace(spec.start, spec.stop, spec.steps)
    if spec.variable in ("n_antennas", "n_eve_antennas"):
        vals = np.unique(np.rint(vals)).astype(float)
    return [float(v) for v in vals]


def apply_sweep_value(cfg: SystemConfig, variable: str, value: float) -> SystemConfig:
    """Return a copy of ``cfg`` with one swept variable replaced.

    Sweeping ``frequency`` (GHz) recomputes the free-space intercept and, for
    the tabulated measurement bands, swaps in their path-loss exponents.
    """
    from dataclasses import replace

    if variable == "tx_power_dbm":
        return replace(cfg, tx_power=dbm_to_watts(value))
    if variable == "tx_density":
        return replace(cfg, tx_density=value * 1e-6)
    if variable == "eve_density":
        return replace(cfg, eve_density=value * 1e-6)
    if variable == "dipole_distance":
        return replace(cfg, dipole_distance=value)
    if variable == "mu":
        if cfg.an is None:
            raise ConfigError("cannot sweep mu: config has no 'an' section")
        return replace(cfg, an=replace(cfg.an, mu=value))
    if variable == "n_antennas":
        n = int(round(value))
        if isinstance(cfg.gain_model, UpaLink):
            return replace(cfg, gain_model=UpaLink(n))
        if isinstance(cfg.gain_model, UlaLink):
            return replace(cfg, gain_model=UlaLink(
                replace(cfg.gain_model.ula, n_tx=n)))
        raise ConfigError("cannot sweep n_antennas on a sectored config")
    if variable == "n_eve_antennas":
        n = int(round(value))
        if isinstance(cfg.gain_model, UpaLink):
            return replace(cfg, eve_pattern=upa_pattern(n))
        if isinstance(cfg.gain_model, UlaLink):
            return replace(cfg, gain_model=UlaLink(
                replace(cfg.gain_model.ula, n_eve=n)))
        raise ConfigError("cannot sweep n_eve_antennas on a sectored config")
    if variable == "frequency":
        freq_hz = value * 1e9
        pl = cfg.path_loss
        exps = TABLE_PATH_LOSS_EXPONENTS.get(round(value, 3))
        if exps is not None:
            pl = PathLossModel(beta=beta_from_frequency(freq_hz),
                               alpha_los=exps[0], alpha_nlos=exps[1],
                               ref_distance=pl.ref_distance)
        else:
            pl = PathLossModel(beta=beta_from_frequency(freq_hz),
                               alpha_los=pl.alpha_los, alpha_nlos=pl.alpha_nlos,
                               ref_distance=pl.ref_distance)
        return replace(cfg, carrier_frequency=freq_hz, path_loss=pl)
    raise ConfigError(f"unknown sweep variable '{variable}'")
