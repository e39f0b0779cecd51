"""First-principles Monte Carlo estimator of the average rates.

Each trial samples one world: interferer and interceptor Poisson scatters in
a disc, independent line-of-sight marks per link, independent beam draws per
node, then the SINR ratios are formed directly and log rates averaged.  No
Laplace transforms, no closed forms; this is the oracle every analytic
evaluator is validated against.

Under the hard LoS-ball blockage model a blocked link is an outage and
contributes no power at all; under exponential blockage it propagates with
the NLoS exponent.  Trials draw from per-trial generators spawned off the
master seed by trial index, so results are reproducible bit for bit no
matter how trials would be scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import RateReport, SystemConfig, UlaLink, secrecy_rate
from .antenna import SectoredPattern, ula_boresight_gain, ula_eavesdropper_gain, \
    ula_interferer_gain
from .geometry import LinkState, LosBall, los_probability, path_loss, sample_ppp

__all__ = [
    "NetworkRealization",
    "TrialEstimate",
    "default_window_radius",
    "sample_realization",
    "typical_sinr",
    "eve_sinr",
    "an_sinrs",
    "run_trials",
    "estimate_rates",
]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TrialEstimate:
    """Sample mean with its standard error, bits/s/Hz."""

    mean: float
    std_error: float
    n_trials: int

    def __post_init__(self):
        if self.std_error < 0 or self.n_trials < 1:
            raise ValueError("invalid estimate")


@dataclass
class NetworkRealization:
    """One sampled world, stored as parallel arrays per point."""

    typical_los: bool
    interferer_points: np.ndarray      # (n, 2) m
    interferer_los: np.ndarray         # (n,) bool
    interferer_gain: np.ndarray | None         # pair gains, plain transmission
    interferer_gain_signal: np.ndarray | None  # composite draws under jamming
    interferer_gain_noise: np.ndarray | None
    eve_points: np.ndarray             # (m, 2) m, relative to the transmitter
    eve_los: np.ndarray                # (m,) bool
    eve_gain: np.ndarray | None
    eve_gain_signal: np.ndarray | None
    eve_gain_noise: np.ndarray | None


def default_window_radius(cfg: SystemConfig) -> float:
    """Sampling disc radius: large enough that truncated far interference is
    negligible, and never larger than the LoS ball (beyond it nothing
    contributes)."""
    densities = [d for d in (cfg.tx_density, cfg.eve_density) if d > 0]
    if densities:
        radius = max(10.0 / math.sqrt(min(densities)), 2000.0)
    else:
        radius = 2000.0
    if isinstance(cfg.blockage, LosBall):
        radius = min(radius, cfg.blockage.d_los)
    return radius


def _lobe_draws(pattern: SectoredPattern, size: int,
                rng: np.random.Generator) -> np.ndarray:
    hit = rng.random(size) < pattern.prob_main
    return np.where(hit, pattern.g_main, pattern.g_side)


def sample_realization(cfg: SystemConfig, window_radius: float,
                       rng: np.random.Generator) -> NetworkRealization:
    """Draw one world: positions, blockage marks, and beam gains."""
    if window_radius <= 0:
        raise ValueError("window_radius must be positive")
    typical_los = rng.random() < los_probability(cfg.blockage,
                                                 cfg.dipole_distance)

    pts_i = sample_ppp(cfg.tx_density, window_radius, rng)
    dist_i = np.hypot(pts_i[:, 0], pts_i[:, 1])
    los_i = rng.random(len(pts_i)) < los_probability(cfg.blockage, dist_i)

    gain_i = gain_i_s = gain_i_a = None
    is_ula = isinstance(cfg.gain_model, UlaLink)
    if cfg.an is not None:
        _, rx = cfg.pair_patterns()
        receiver_lobe = _lobe_draws(rx, len(pts_i), rng)
        gain_i_s = _lobe_draws(cfg.an.signal, len(pts_i), rng) * receiver_lobe
        gain_i_a = _lobe_draws(cfg.an.noise, len(pts_i), rng) * receiver_lobe
    elif is_ula:
        ula = cfg.ula()
        arrivals = rng.uniform(0.0, _TWO_PI, len(pts_i))
        departures_to_rx = rng.uniform(0.0, _TWO_PI, len(pts_i))
        own_beams = rng.uniform(0.0, _TWO_PI, len(pts_i))
        gain_i = np.asarray(ula_interferer_gain(
            ula.rx_boresight, arrivals, departures_to_rx, own_beams,
            ula.n_tx, ula.spacing_ratio), dtype=float).reshape(len(pts_i))
    else:
        tx, rx = cfg.pair_patterns()
        gain_i = _lobe_draws(tx, len(pts_i), rng) * _lobe_draws(rx, len(pts_i), rng)

    # interceptor positions matter only through their distance to the typical
    # transmitter; by stationarity the disc is centered there directly
    pts_e = sample_ppp(cfg.eve_density, window_radius, rng)
    dist_e = np.hypot(pts_e[:, 0], pts_e[:, 1])
    los_e = rng.random(len(pts_e)) < los_probability(cfg.blockage, dist_e)

    gain_e = gain_e_s = gain_e_a = None
    if cfg.an is not None:
        eve_lobe = _lobe_draws(cfg.eve_pattern, len(pts_e), rng)
        gain_e_s = _lobe_draws(cfg.an.signal, len(pts_e), rng) * eve_lobe
        gain_e_a = _lobe_draws(cfg.an.noise, len(pts_e), rng) * eve_lobe
    elif is_ula:
        ula = cfg.ula()
        departures = rng.uniform(0.0, _TWO_PI, len(pts_e))
        gain_e = np.asarray(ula_eavesdropper_gain(
            departures, ula.tx_boresight, ula.n_tx, ula.n_eve,
            ula.spacing_ratio), dtype=float).reshape(len(pts_e))
    else:
        tx, _ = cfg.pair_patterns()
        gain_e = _lobe_draws(tx, len(pts_e), rng) * _lobe_draws(cfg.eve_pattern,
                                                                len(pts_e), rng)

    return NetworkRealization(
        typical_los=bool(typical_los),
        interferer_points=pts_i, interferer_los=los_i,
        interferer_gain=gain_i, interferer_gain_signal=gain_i_s,
        interferer_gain_noise=gain_i_a,
        eve_points=pts_e, eve_los=los_e,
        eve_gain=gain_e, eve_gain_signal=gain_e_s, eve_gain_noise=gain_e_a)


def _path_gains(cfg: SystemConfig, distances: np.ndarray,
                los_mask: np.ndarray) -> np.ndarray:
    """Propagation gains with the blockage semantics of the configured model."""
    g_los = path_loss(cfg.path_loss, distances, LinkState.LOS)
    if isinstance(cfg.blockage, LosBall):
        return np.where(los_mask, g_los, 0.0)
    g_nlos = path_loss(cfg.path_loss, distances, LinkState.NLOS)
    return np.where(los_mask, g_los, g_nlos)


def _typical_link_gain(cfg: SystemConfig, typical_los: bool) -> float:
    state = LinkState.LOS if typical_los else LinkState.NLOS
    if isinstance(cfg.blockage, LosBall) and not typical_los:
        return 0.0
    return float(path_loss(cfg.path_loss, cfg.dipole_distance, state))


def _interference_power(cfg: SystemConfig, real: NetworkRealization) -> float:
    dist = np.hypot(real.interferer_points[:, 0], real.interferer_points[:, 1])
    gains_path = _path_gains(cfg, dist, real.interferer_los)
    return float(np.sum(cfg.tx_power * real.interferer_gain * gains_path))


def typical_sinr(real: NetworkRealization, cfg: SystemConfig) -> float:
    """SINR of the typical link for one realization (plain transmission)."""
    if cfg.an is not None:
        raise ValueError("use an_sinrs for split-power configurations")
    if isinstance(cfg.gain_model, UlaLink):
        top_gain = ula_boresight_gain(cfg.ula().n_tx)
    else:
        tx, rx = cfg.pair_patterns()
        top_gain = tx.g_main * rx.g_main
    signal = cfg.tx_power * top_gain * _typical_link_gain(cfg, real.typical_los)
    return signal / (_interference_power(cfg, real) + cfg.noise_rx)


def eve_sinr(real: NetworkRealization, cfg: SystemConfig) -> float:
    """SNR of the strongest interceptor; zero when none is present.

    Interceptors are modeled as interference-cancelling, so only their own
    noise floor appears in the ratio.
    """
    if cfg.an is not None:
        raise ValueError("use an_sinrs for split-power configurations")
    if len(real.eve_points) == 0:
        return 0.0
    dist = np.hypot(real.eve_points[:, 0], real.eve_points[:, 1])
    gains_path = _path_gains(cfg, dist, real.eve_los)
    received = cfg.tx_power * real.eve_gain * gains_path
    return float(received.max()) / cfg.noise_eve


def an_sinrs(real: NetworkRealization, cfg: SystemConfig) -> tuple[float, float]:
    """(typical SINR, strongest interceptor SINR) under split-power jamming.

    The typical receiver never sees its own transmitter's jamming beam; every
    interceptor sees both the signal and the jamming beams of the typical
    transmitter through its own receive lobe.
    """
    if cfg.an is None:
        raise ValueError("config has no artificial-noise settings")
    _, rx = cfg.pair_patterns()
    mu = cfg.an.mu
    p_s, p_a = mu * cfg.tx_power, (1.0 - mu) * cfg.tx_power

    signal = p_s * cfg.an.signal.g_main * rx.g_main \
        * _typical_link_gain(cfg, real.typical_los)
    dist_i = np.hypot(real.interferer_points[:, 0], real.interferer_points[:, 1])
    path_i = _path_gains(cfg, dist_i, real.interferer_los)
    interference = float(np.sum((p_s * real.interferer_gain_signal
                                 + p_a * real.interferer_gain_noise) * path_i))
    gamma_typ = signal / (interference + cfg.noise_rx)

    if len(real.eve_points) == 0:
        return gamma_typ, 0.0
    dist_e = np.hypot(real.eve_points[:, 0], real.eve_points[:, 1])
    path_e = _path_gains(cfg, dist_e, real.eve_los)
    desired = p_s * real.eve_gain_signal * path_e
    jamming = p_a * real.eve_gain_noise * path_e
    gamma_eve = float(np.max(desired / (jamming + cfg.noise_eve)))
    return gamma_typ, gamma_eve


def run_trials(cfg: SystemConfig, n_trials: int, seed: int,
               window_radius: float | None = None
               ) -> tuple[TrialEstimate, TrialEstimate]:
    """Estimate the typical-link and strongest-interceptor average rates.

    Deterministic in (cfg, n_trials, seed, window_radius): trial i uses the
    generator spawned from the master seed with spawn key (i,).
    """
    if n_trials < 1:
        raise ValueError("need at least one trial")
    window = window_radius if window_radius is not None \
        else default_window_radius(cfg)
    rate_typ = np.empty(n_trials)
    rate_eve = np.empty(n_trials)
    for i in range(n_trials):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed,
                                                           spawn_key=(i,)))
        real = sample_realization(cfg, window, rng)
        if cfg.an is not None:
            g_typ, g_eve = an_sinrs(real, cfg)
        else:
            g_typ = typical_sinr(real, cfg)
            g_eve = eve_sinr(real, cfg)
        rate_typ[i] = math.log2(1.0 + g_typ)
        rate_eve[i] = math.log2(1.0 + g_eve)

    def estimate(samples: np.ndarray) -> TrialEstimate:
        mean = float(samples.mean())
        se = float(samples.std(ddof=1) / math.sqrt(n_trials)) if n_trials > 1 else 0.0
        return TrialEstimate(mean, se, n_trials)

    return estimate(rate_typ), estimate(rate_eve)


def estimate_rates(cfg: SystemConfig, n_trials: int, seed: int,
                   window_radius: float | None = None) -> RateReport:
    """Monte Carlo rate report with a 95% interval on the rate difference.

    The secrecy rate clamps the difference of the two sample means, matching
    the analytic convention, so the two are directly comparable.
    """
    typ, eve = run_trials(cfg, n_trials, seed, window_radius)
    diff = typ.mean - eve.mean
    se = math.hypot(typ.std_error, eve.std_error)
    return RateReport(
        rate_typical=typ.mean,
        rate_eve=eve.mean,
        rate_secrecy=max(diff, 0.0),
        method="monte_carlo",
        ci_low=diff - 1.96 * se,
        ci_high=diff + 1.96 * se,
        n_trials=n_trials,
    )
