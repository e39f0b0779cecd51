"""Analytic evaluators for the average achievable secrecy rate.

The network model: transmitter-receiver pairs at fixed separation, scattered
as a Poisson process with density ``tx_density``; passive interceptors as an
independent Poisson process with density ``eve_density``; blockage marks each
link line-of-sight or not; two-level sectored (or planar/linear array) beams
at every node.  The typical receiver's average spectral efficiency comes from
a Laplace-domain identity that turns E[log2(1 + SINR)] into a single integral
of the signal and interference Laplace transforms; the interceptor side comes
from integrating the complementary CDF of the strongest interceptor's SNR.
Both have companion closed-form reductions (Jensen-style lower bounds, a
hard LoS-ball simplification, linear-array variants, and a split-power
jamming mode) that are evaluated here and cross-checked against the
first-principles simulator in :mod:`mmwsec.montecarlo`.

All quantities are linear: watts, meters, points per square meter, linear
gains.  Rates are bits/s/Hz.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable, Sequence, Union

import numpy as np

from .antenna import (
    GainDistribution,
    SectoredPattern,
    UlaConfig,
    mean_gain,
    sectored_pair_distribution,
    ula_boresight_gain,
    ula_eavesdropper_gain,
    ula_mean_interferer_gain,
    upa_pattern,
)
from .geometry import (
    BlockageModel,
    ExponentialBlockage,
    LinkState,
    LosBall,
    PathLossModel,
    los_probability,
    path_loss,
)
from .numerics import (
    QuadratureSpec,
    integrate_finite,
    integrate_semi_infinite,
    upper_incomplete_gamma,
)

__all__ = [
    "SectoredLink",
    "UpaLink",
    "UlaLink",
    "ArtificialNoiseConfig",
    "SystemConfig",
    "RateReport",
    "secrecy_rate",
    "avg_rate_typical_exact",
    "avg_rate_typical_lower",
    "max_density_for_rate",
    "avg_rate_eve_exact",
    "avg_rate_typical_exact_losball",
    "avg_rate_eve_exact_losball",
    "avg_rate_typical_lower_ula",
    "avg_rate_eve_exact_ula",
    "secrecy_rate_ula_lower",
    "avg_rate_typical_exact_an",
    "avg_rate_typical_lower_an",
    "max_density_for_rate_an",
    "avg_rate_eve_exact_an",
    "interference_moment",
    "interference_moment_quadrature",
    "typical_signal_laplace",
    "typical_interference_laplace",
    "losball_interference_laplace",
    "eve_snr_cdf_parts",
    "eve_max_snr_cdf",
    "an_eve_max_sinr_cdf",
    "mixed_path_loss_exponent",
]

_LN2 = math.log(2.0)
_TWO_PI = 2.0 * math.pi

# Evaluator default: tighter than the generic quadrature default because the
# degenerate-limit identities are asserted to 1e-8 relative.
_DEFAULT_QUAD = QuadratureSpec(rel_tol=1e-9, abs_tol=1e-13, max_subdivisions=4000)


# ---------------------------------------------------------------------------
# configuration types


@dataclass(frozen=True)
class SectoredLink:
    """Sectored beams at the transmitting node and its receiver."""

    tx: SectoredPattern
    rx: SectoredPattern


@dataclass(frozen=True)
class UpaLink:
    """Square planar arrays with ``n`` elements at both ends of a link."""

    n: int

    def __post_init__(self):
        if self.n < 4:
            raise ValueError("planar-array link needs at least 4 elements")


@dataclass(frozen=True)
class UlaLink:
    """Uniform linear arrays at every node; interceptors use ``ula.n_eve``."""

    ula: UlaConfig


GainModel = Union[SectoredLink, UpaLink, UlaLink]


@dataclass(frozen=True)
class ArtificialNoiseConfig:
    """Split-power transmission: fraction ``mu`` of the power carries the
    information signal on ``signal``; the rest carries a jamming signal on
    ``noise``.  The jamming beam never points at the served receiver."""

    mu: float
    signal: SectoredPattern
    noise: SectoredPattern

    def __post_init__(self):
        if not (0.0 < self.mu <= 1.0):
            raise ValueError("mu must lie in (0, 1]")


@dataclass(frozen=True)
class SystemConfig:
    """Full scenario description, all in linear units."""

    carrier_frequency: float      # Hz
    tx_power: float               # W
    tx_density: float             # per m^2
    eve_density: float            # per m^2
    dipole_distance: float        # m, transmitter-receiver separation
    path_loss: PathLossModel
    blockage: BlockageModel
    noise_rx: float               # W
    noise_eve: float              # W
    gain_model: GainModel
    eve_pattern: SectoredPattern | None = None
    an: ArtificialNoiseConfig | None = None

    def __post_init__(self):
        if not (np.isfinite(self.carrier_frequency) and self.carrier_frequency > 0):
            raise ValueError("carrier_frequency must be positive")
        for name in ("tx_power", "tx_density", "eve_density"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and non-negative")
        if not (np.isfinite(self.dipole_distance) and self.dipole_distance > 0):
            raise ValueError("dipole_distance must be positive")
        for name in ("noise_rx", "noise_eve"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive (finite noise floor)")
        if isinstance(self.gain_model, UlaLink):
            if self.eve_pattern is not None:
                raise ValueError("ULA links derive the interceptor gain from the "
                                 "array geometry; eve_pattern must be None")
            if self.an is not None:
                raise ValueError("split-power jamming is modeled for sectored "
                                 "beams only")
        elif self.eve_pattern is None:
            raise ValueError("sectored and planar-array links need eve_pattern")

    # -- resolved patterns ---------------------------------------------------

    def pair_patterns(self) -> tuple[SectoredPattern, SectoredPattern]:
        """(transmit, receive) sectored patterns of a link."""
        if isinstance(self.gain_model, SectoredLink):
            return self.gain_model.tx, self.gain_model.rx
        if isinstance(self.gain_model, UpaLink):
            p = upa_pattern(self.gain_model.n)
            return p, p
        raise ValueError("ULA links have no sectored pair pattern")

    def ula(self) -> UlaConfig:
        if not isinstance(self.gain_model, UlaLink):
            raise ValueError("config does not use ULA beams")
        return self.gain_model.ula


@dataclass(frozen=True)
class RateReport:
    """Rates in bits/s/Hz plus estimator metadata."""

    rate_typical: float
    rate_eve: float
    rate_secrecy: float
    method: str
    ci_low: float | None = None
    ci_high: float | None = None
    n_trials: int | None = None

    def __post_init__(self):
        if self.rate_typical < 0 or self.rate_eve < 0 or self.rate_secrecy < 0:
            raise ValueError("rates must be non-negative")
        expected = max(self.rate_typical - self.rate_eve, 0.0)
        if not math.isclose(self.rate_secrecy, expected, rel_tol=1e-12, abs_tol=1e-12):
            raise ValueError("rate_secrecy must be the clamped difference of "
                             "the typical and interceptor rates")


def secrecy_rate(r_typ: float, r_eve: float) -> float:
    """Clamped difference of the average rates, bits/s/Hz."""
    if r_typ < 0 or r_eve < 0:
        raise ValueError("rates must be non-negative")
    return max(r_typ - r_eve, 0.0)


# ---------------------------------------------------------------------------
# shared pieces


def mixed_path_loss_exponent(cfg: SystemConfig) -> float:
    """Blockage-averaged exponent of the typical link."""
    p = los_probability(cfg.blockage, cfg.dipole_distance)
    pl = cfg.path_loss
    return (pl.alpha_los - pl.alpha_nlos) * p + pl.alpha_nlos


def _truncated_exp_radial_mass(rho: float, limit) -> np.ndarray:
    """Integral of r*exp(-rho*r) over [0, limit]: (1-(1+y)e^-y)/rho^2, y=rho*limit.

    Series below y=0.5 avoids the cancellation of 1 - (1+y)e^-y.
    """
    y = np.asarray(rho * np.asarray(limit, dtype=float), dtype=float)
    out = np.empty_like(y)
    small = y < 0.5
    if small.any():
        ys = y[small]
        # sum_k (-1)^k y^(k+2) / (k! (k+2)); 12 terms reach ~1e-13 at y=0.5
        acc = ys * ys / 2.0
        fact = 1.0
        for k in range(1, 12):
            fact *= k
            acc = acc + (-1.0) ** k * ys ** (k + 2) / (fact * (k + 2))
        out[small] = acc
    if (~small).any():
        # clamping is exact past y ~ 745 where exp(-y) underflows anyway
        yl = np.minimum(y[~small], 745.0)
        out[~small] = 1.0 - (1.0 + yl) * np.exp(-yl)
    return out / (rho * rho)


def _los_radial_mass(blockage: BlockageModel, limit):
    """Integral of r * P(LoS at r) dr over [0, limit]."""
    limit = np.asarray(limit, dtype=float)
    if isinstance(blockage, ExponentialBlockage):
        return _truncated_exp_radial_mass(blockage.rho, limit)
    if isinstance(blockage, LosBall):
        return np.minimum(limit, blockage.d_los) ** 2 / 2.0
    raise TypeError(f"unknown blockage model: {blockage!r}")


def _nlos_radial_mass(blockage: BlockageModel, limit):
    """Integral of r * P(blocked at r) dr over [0, limit]."""
    limit = np.asarray(limit, dtype=float)
    return limit ** 2 / 2.0 - _los_radial_mass(blockage, limit)


def _require_nlos_convergent(cfg: SystemConfig):
    if cfg.path_loss.alpha_nlos <= 2.0 and cfg.tx_density > 0:
        raise ValueError("alpha_nlos must exceed 2 for the aggregate "
                         "interference of an infinite network to be finite")


# ---------------------------------------------------------------------------
# gain-level terms: (weight, power-weighted gain coefficient)


def _pair_terms(cfg: SystemConfig) -> list[tuple[float, float]]:
    """Interferer terms for plain transmission: weight, P_t * pair gain."""
    tx, rx = cfg.pair_patterns()
    dist = sectored_pair_distribution(tx, rx)
    return [(p, cfg.tx_power * g) for g, p in dist.levels]


def _an_split(cfg: SystemConfig) -> tuple[float, float]:
    mu = cfg.an.mu
    return mu * cfg.tx_power, (1.0 - mu) * cfg.tx_power


def _an_pair_terms(cfg: SystemConfig) -> list[tuple[float, float]]:
    """Interferer terms under split-power jamming.

    Both emissions of one interferer reach the receiver through the same
    receiver lobe, so the lobe triples (signal, jamming, receiver) carry the
    product of the three lobe probabilities and a composite received power.
    """
    _, rx = cfg.pair_patterns()
    p_s, p_a = _an_split(cfg)
    terms = []
    for g_s, w_s in cfg.an.signal.lobe_levels():
        for g_a, w_a in cfg.an.noise.lobe_levels():
            for g_r, w_r in rx.lobe_levels():
                terms.append((w_s * w_a * w_r, p_s * g_s * g_r + p_a * g_a * g_r))
    return terms


# ---------------------------------------------------------------------------
# Laplace transforms of the typical receiver's signal and interference


def typical_signal_laplace(cfg: SystemConfig, z) -> np.ndarray:
    """E[exp(-z * received signal power)] of the typical link."""
    tx, rx = cfg.pair_patterns()
    return _signal_laplace(cfg, cfg.tx_power * tx.g_main * rx.g_main, z)


def _signal_laplace(cfg: SystemConfig, y_const: float, z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    r = cfg.dipole_distance
    p = los_probability(cfg.blockage, r)
    y_los = y_const * path_loss(cfg.path_loss, r, LinkState.LOS)
    y_nlos = y_const * path_loss(cfg.path_loss, r, LinkState.NLOS)
    return p * np.exp(-z * y_los) + (1.0 - p) * np.exp(-z * y_nlos)


def _interference_laplace_fn(cfg: SystemConfig, terms: Sequence[tuple[float, float]],
                             quad: QuadratureSpec) -> Callable[[float], float]:
    """Laplace transform of the aggregate interference power at the origin.

    Thinning splits the interferer process into LoS and blocked halves; each
    contributes one radial integral of the gain-averaged exponential deficit.
    The clamp region below the reference distance is handled in closed form.
    """
    lam = cfg.tx_density
    pl = cfg.path_loss
    blk = cfg.blockage
    d = pl.ref_distance
    w = np.array([t[0] for t in terms])
    c = np.array([t[1] for t in terms])
    c_max = float(c.max())
    m_los_d = float(_los_radial_mass(blk, d))
    m_nlos_d = float(_nlos_radial_mass(blk, d))
    ball = blk.d_los if isinstance(blk, LosBall) else None

    def deficit(z: float, u: np.ndarray, alpha: float) -> np.ndarray:
        """1 - sum_j w_j exp(-z c_j beta u^-alpha), vectorized over u >= d."""
        att = pl.beta * u ** (-alpha)
        return -(w[:, None] * np.expm1(-z * c[:, None] * att[None, :])).sum(axis=0)

    def exponent(z: float) -> float:
        total = (-(w * np.expm1(-z * c * pl.beta * d ** (-pl.alpha_los))).sum() * m_los_d
                 - (w * np.expm1(-z * c * pl.beta * d ** (-pl.alpha_nlos))).sum() * m_nlos_d)
        for alpha, los_side in ((pl.alpha_los, True), (pl.alpha_nlos, False)):
            # radius where z * c_max * beta * u^-alpha ~ 1, the kernel knee
            knee = (z * c_max * pl.beta) ** (1.0 / alpha)
            if ball is None:
                def tail(u, _a=alpha, _los=los_side):
                    u = np.asarray(u, dtype=float)
                    frac = los_probability(blk, u)
                    if not _los:
                        frac = 1.0 - frac
                    return frac * deficit(z, u, _a) * u
                res = integrate_semi_infinite(tail, d, quad,
                                              breakpoints=[x for x in (knee,)
                                                           if x > d])
                total += res.value
            elif los_side:
                if ball > d:
                    def los_tail(u, _a=alpha):
                        return deficit(z, np.asarray(u, dtype=float), _a) * u
                    res = integrate_finite(los_tail, d, ball, quad,
                                           breakpoints=[x for x in (knee,)
                                                        if d < x < ball])
                    total += res.value
            else:
                start = max(d, ball)
                def nlos_tail(u, _a=alpha):
                    return deficit(z, np.asarray(u, dtype=float), _a) * u
                res = integrate_semi_infinite(nlos_tail, start, quad,
                                              breakpoints=[x for x in (knee,)
                                                           if x > start])
                total += res.value
        return _TWO_PI * lam * total

    return lambda z: math.exp(-exponent(z))


def _laplace_over(cfg: SystemConfig, terms, z, quad: QuadratureSpec | None):
    zz = np.atleast_1d(np.asarray(z, dtype=float))
    if cfg.tx_density == 0:
        out = np.ones_like(zz)
    else:
        fn = _interference_laplace_fn(cfg, terms, quad or _DEFAULT_QUAD)
        out = np.array([fn(v) for v in zz])
    return float(out[0]) if np.ndim(z) == 0 else out


def typical_interference_laplace(cfg: SystemConfig, z,
                                 quad: QuadratureSpec | None = None):
    """Laplace transform of the aggregate interference, plain transmission."""
    _require_nlos_convergent(cfg)
    return _laplace_over(cfg, _pair_terms(cfg), z, quad)


def an_typical_interference_laplace(cfg: SystemConfig, z,
                                    quad: QuadratureSpec | None = None):
    """Laplace transform of the composite interference under split power."""
    _require_an(cfg)
    _require_nlos_convergent(cfg)
    return _laplace_over(cfg, _an_pair_terms(cfg), z, quad)


def _average_log_rate(levels: Sequence[tuple[float, float]],
                      interference: Callable[[float], float] | None,
                      noise: float, quad: QuadratureSpec) -> float:
    """E[log2(1 + S/(I + noise))] from the Laplace-domain identity.

    ``levels`` lists (probability, received signal power) pairs; the identity
    integrates (1/z)(1 - E[e^-zS]) E[e^-zI] e^(-z*noise) over z >= 0, which is
    evaluated on a log grid because the integrand forms a plateau between the
    reciprocal signal and noise scales.
    """
    levels = [(p, y) for p, y in levels if p > 0.0 and y > 0.0]
    if not levels:
        return 0.0
    probs = np.array([p for p, _ in levels])
    ys = np.array([y for _, y in levels])
    y_mean = float(np.dot(probs, ys))

    z_lo = 1e-16 / y_mean
    z_hi = 80.0 / noise
    v_lo, v_hi = math.log(z_lo), math.log(z_hi)
    hints = sorted({math.log(1.0 / y) for y in ys} | {math.log(1.0 / noise)})
    hints = [h for h in hints if v_lo < h < v_hi]

    def integrand(v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        z = np.exp(v)
        one_minus_sig = -(probs[:, None] * np.expm1(-np.outer(ys, z))).sum(axis=0)
        if interference is None:
            lap = 1.0
        else:
            lap = np.array([interference(val) for val in z])
        return one_minus_sig * lap * np.exp(-z * noise)

    res = integrate_finite(integrand, v_lo, v_hi, quad, breakpoints=hints)
    return res.value / _LN2


# ---------------------------------------------------------------------------
# exact typical-link rates


def avg_rate_typical_exact(cfg: SystemConfig,
                           quad: QuadratureSpec | None = None) -> float:
    """Average rate of the typical link, bits/s/Hz (sectored or planar beams)."""
    quad = quad or _DEFAULT_QUAD
    _require_nlos_convergent(cfg)
    tx, rx = cfg.pair_patterns()
    y_const = cfg.tx_power * tx.g_main * rx.g_main
    r = cfg.dipole_distance
    p = los_probability(cfg.blockage, r)
    levels = [(p, y_const * path_loss(cfg.path_loss, r, LinkState.LOS)),
              (1.0 - p, y_const * path_loss(cfg.path_loss, r, LinkState.NLOS))]
    interference = None
    if cfg.tx_density > 0:
        interference = _interference_laplace_fn(cfg, _pair_terms(cfg), quad)
    return _average_log_rate(levels, interference, cfg.noise_rx, quad)


def avg_rate_typical_exact_an(cfg: SystemConfig,
                              quad: QuadratureSpec | None = None) -> float:
    """Average rate of the typical link under split-power jamming."""
    _require_an(cfg)
    quad = quad or _DEFAULT_QUAD
    _require_nlos_convergent(cfg)
    _, rx = cfg.pair_patterns()
    p_s, _ = _an_split(cfg)
    y_const = p_s * cfg.an.signal.g_main * rx.g_main
    r = cfg.dipole_distance
    p = los_probability(cfg.blockage, r)
    levels = [(p, y_const * path_loss(cfg.path_loss, r, LinkState.LOS)),
              (1.0 - p, y_const * path_loss(cfg.path_loss, r, LinkState.NLOS))]
    interference = None
    if cfg.tx_density > 0:
        interference = _interference_laplace_fn(cfg, _an_pair_terms(cfg), quad)
    return _average_log_rate(levels, interference, cfg.noise_rx, quad)


# ---------------------------------------------------------------------------
# LoS-ball simplification


def _require_losball(cfg: SystemConfig) -> LosBall:
    if not isinstance(cfg.blockage, LosBall):
        raise ValueError("this evaluator requires the hard LoS-ball blockage "
                         "model")
    return cfg.blockage


def losball_interference_laplace(cfg: SystemConfig, z) -> np.ndarray:
    """Closed-form Laplace transform of LoS-ball interference.

    Only line-of-sight interferers inside the ball contribute (links beyond
    the ball are in outage).  The radial integral of the exponential deficit
    reduces to upper incomplete gamma terms of order -2/alpha_los.
    """
    ball = _require_losball(cfg)
    pl = cfg.path_loss
    lam = cfg.tx_density
    zz = np.atleast_1d(np.asarray(z, dtype=float))
    if lam == 0:
        out = np.ones_like(zz)
        return float(out[0]) if np.ndim(z) == 0 else out

    alpha = pl.alpha_los
    d = pl.ref_distance
    big_d = max(ball.d_los, d)
    order = -2.0 / alpha
    terms = _pair_terms(cfg)
    bracket = np.full_like(zz, big_d ** 2 / 2.0)
    for w_j, c_j in terms:
        s = zz * c_j * pl.beta
        tiny = s * d ** (-alpha) < 1e-280
        contrib = np.empty_like(zz)
        if np.any(~tiny):
            sv = s[~tiny]
            y_far = sv * big_d ** (-alpha)
            y_near = sv * d ** (-alpha)
            contrib[~tiny] = (d ** 2 / 2.0 * np.exp(-y_near)
                              + sv ** (2.0 / alpha) / alpha
                              * (upper_incomplete_gamma(order, y_far)
                                 - upper_incomplete_gamma(order, y_near)))
        contrib[tiny] = big_d ** 2 / 2.0
        bracket -= w_j * contrib
    out = np.exp(-_TWO_PI * lam * bracket)
    return float(out[0]) if np.ndim(z) == 0 else out


def avg_rate_typical_exact_losball(cfg: SystemConfig,
                                   quad: QuadratureSpec | None = None) -> float:
    """Average rate of the typical link in the hard LoS-ball model.

    The link must sit inside the ball; otherwise it is in outage and the rate
    is zero (a warning flags that case).
    """
    ball = _require_losball(cfg)
    quad = quad or _DEFAULT_QUAD
    if cfg.dipole_distance >= ball.d_los:
        warnings.warn("typical link lies outside the LoS ball: outage, rate 0",
                      RuntimeWarning, stacklevel=2)
        return 0.0
    tx, rx = cfg.pair_patterns()
    y_const = cfg.tx_power * tx.g_main * rx.g_main
    y = y_const * path_loss(cfg.path_loss, cfg.dipole_distance, LinkState.LOS)
    interference = None
    if cfg.tx_density > 0:
        interference = lambda z: float(losball_interference_laplace(cfg, z))
    return _average_log_rate([(1.0, y)], interference, cfg.noise_rx, quad)


# ---------------------------------------------------------------------------
# lower bounds and density caps


def interference_moment_quadrature(cfg: SystemConfig,
                                   quad: QuadratureSpec | None = None) -> float:
    """Per-density mean interference path gain, by direct radial integration.

    2*pi*beta*( clamp-region integral + far-field integral ) where the LoS
    fraction weights the two exponents at every radius.  Multiplying by the
    node density and the mean pair gain (and transmit power) gives the mean
    aggregate interference power.
    """
    _require_nlos_convergent(cfg)
    quad = quad or _DEFAULT_QUAD
    pl = cfg.path_loss
    blk = cfg.blockage
    d = pl.ref_distance

    near = (float(_los_radial_mass(blk, d)) * (d ** (-pl.alpha_los) - d ** (-pl.alpha_nlos))
            + d ** (-pl.alpha_nlos) * d ** 2 / 2.0)

    def far(r):
        r = np.asarray(r, dtype=float)
        frac = los_probability(blk, r)
        return (r ** (1.0 - pl.alpha_los) - r ** (1.0 - pl.alpha_nlos)) * frac \
            + r ** (1.0 - pl.alpha_nlos)

    breaks = []
    if isinstance(blk, ExponentialBlockage):
        breaks.append(d + 1.0 / blk.rho)
    elif isinstance(blk, LosBall) and blk.d_los > d:
        breaks.append(blk.d_los)
    res = integrate_semi_infinite(far, d, quad, breakpoints=breaks)
    return _TWO_PI * pl.beta * (near + res.value)


def interference_moment(cfg: SystemConfig,
                        quad: QuadratureSpec | None = None) -> float:
    """Per-density mean interference path gain.

    Closed form for exponential blockage (incomplete-gamma reduction of the
    far-field integral); direct quadrature otherwise.
    """
    _require_nlos_convergent(cfg)
    blk = cfg.blockage
    if not isinstance(blk, ExponentialBlockage):
        return interference_moment_quadrature(cfg, quad)
    pl = cfg.path_loss
    d = pl.ref_distance
    rho = blk.rho
    y = d * rho
    a_l, a_n = pl.alpha_los, pl.alpha_nlos
    value = (_truncated_exp_radial_mass(rho, d) * (d ** (-a_l) - d ** (-a_n))
             + upper_incomplete_gamma(2.0 - a_l, y) / rho ** (2.0 - a_l)
             + a_n * d ** (2.0 - a_n) / (2.0 * (a_n - 2.0))
             - upper_incomplete_gamma(2.0 - a_n, y) / rho ** (2.0 - a_n))
    return _TWO_PI * pl.beta * float(value)


def _lower_bound_rate(cfg: SystemConfig, numerator_gain: float,
                      gbar_lambda: float, power: float,
                      quad: QuadratureSpec | None) -> float:
    """log2(1 + G*beta*r^-abar / (density-weighted interference + noise/power))."""
    pl = cfg.path_loss
    abar = mixed_path_loss_exponent(cfg)
    r_eff = max(cfg.dipole_distance, pl.ref_distance)
    num = numerator_gain * pl.beta * r_eff ** (-abar)
    denom = gbar_lambda + cfg.noise_rx / power
    return math.log2(1.0 + num / denom)


def avg_rate_typical_lower(cfg: SystemConfig,
                           quad: QuadratureSpec | None = None) -> float:
    """Jensen-style lower bound on the typical link's average rate."""
    tx, rx = cfg.pair_patterns()
    gbar = mean_gain(sectored_pair_distribution(tx, rx))
    lam_term = cfg.tx_density * gbar * interference_moment(cfg, quad) \
        if cfg.tx_density > 0 else 0.0
    return _lower_bound_rate(cfg, tx.g_main * rx.g_main, lam_term,
                             cfg.tx_power, quad)


def avg_rate_typical_lower_ula(cfg: SystemConfig,
                               quad: QuadratureSpec | None = None) -> float:
    """Lower bound on the typical link's average rate with linear arrays."""
    ula = cfg.ula()
    gbar = ula_mean_interferer_gain(ula.n_tx, ula.spacing_ratio,
                                    ula.rx_boresight)
    lam_term = cfg.tx_density * gbar * interference_moment(cfg, quad) \
        if cfg.tx_density > 0 else 0.0
    return _lower_bound_rate(cfg, ula_boresight_gain(ula.n_tx), lam_term,
                             cfg.tx_power, quad)


def avg_rate_typical_lower_an(cfg: SystemConfig,
                              quad: QuadratureSpec | None = None) -> float:
    """Lower bound on the typical link's average rate under split power."""
    _require_an(cfg)
    _, rx = cfg.pair_patterns()
    mu = cfg.an.mu
    lam_term = cfg.tx_density * _an_interference_weight(cfg) \
        * interference_moment(cfg, quad) if cfg.tx_density > 0 else 0.0
    return _lower_bound_rate(cfg, cfg.an.signal.g_main * rx.g_main, lam_term,
                             mu * cfg.tx_power, quad)


def _an_interference_weight(cfg: SystemConfig) -> float:
    """Mean composite gain per unit signal power: Gbar_S + (1-mu)/mu * Gbar_A."""
    _, rx = cfg.pair_patterns()
    mu = cfg.an.mu
    gbar_s = mean_gain(sectored_pair_distribution(cfg.an.signal, rx))
    gbar_a = mean_gain(sectored_pair_distribution(cfg.an.noise, rx))
    return gbar_s + (1.0 - mu) / mu * gbar_a


def max_density_for_rate(cfg: SystemConfig, r_th: float,
                         quad: QuadratureSpec | None = None) -> float:
    """Largest node density whose lower-bound rate still meets ``r_th``."""
    if r_th <= 0:
        raise ValueError("target rate must be positive")
    tx, rx = cfg.pair_patterns()
    pl = cfg.path_loss
    abar = mixed_path_loss_exponent(cfg)
    r_eff = max(cfg.dipole_distance, pl.ref_distance)
    num = tx.g_main * rx.g_main * pl.beta * r_eff ** (-abar)
    gbar = mean_gain(sectored_pair_distribution(tx, rx))
    cap = (num / (2.0 ** r_th - 1.0) - cfg.noise_rx / cfg.tx_power) \
        / (gbar * interference_moment(cfg, quad))
    return max(cap, 0.0)


def max_density_for_rate_an(cfg: SystemConfig, r_th: float,
                            quad: QuadratureSpec | None = None) -> float:
    """Density cap meeting ``r_th`` under split-power jamming."""
    _require_an(cfg)
    if r_th <= 0:
        raise ValueError("target rate must be positive")
    _, rx = cfg.pair_patterns()
    pl = cfg.path_loss
    abar = mixed_path_loss_exponent(cfg)
    r_eff = max(cfg.dipole_distance, pl.ref_distance)
    num = cfg.an.signal.g_main * rx.g_main * pl.beta * r_eff ** (-abar)
    mu = cfg.an.mu
    cap = (num / (2.0 ** r_th - 1.0) - cfg.noise_rx / (mu * cfg.tx_power)) \
        / (_an_interference_weight(cfg) * interference_moment(cfg, quad))
    return max(cap, 0.0)


def _require_an(cfg: SystemConfig):
    if cfg.an is None:
        raise ValueError("config has no artificial-noise settings")


# ---------------------------------------------------------------------------
# strongest-interceptor rates


def _eve_threshold_terms(cfg: SystemConfig) -> list[tuple[float, float, float]]:
    """(weight, signal coefficient, jamming coefficient) per lobe combination.

    The strongest interceptor's SINR exceeds x only if some interceptor sits
    within radius ((A - B*x) / (x * noise))^(1/alpha) of the transmitter,
    where A collects the signal power*gains and B the jamming power*gains
    (B = 0 without jamming).
    """
    if cfg.an is None:
        tx, _ = cfg.pair_patterns()
        dist = sectored_pair_distribution(tx, cfg.eve_pattern)
        return [(p, cfg.tx_power * g * cfg.path_loss.beta, 0.0)
                for g, p in dist.levels]
    p_s, p_a = _an_split(cfg)
    beta = cfg.path_loss.beta
    terms = []
    for g_s, w_s in cfg.an.signal.lobe_levels():
        for g_a, w_a in cfg.an.noise.lobe_levels():
            for g_e, w_e in cfg.eve_pattern.lobe_levels():
                terms.append((w_s * w_a * w_e,
                              p_s * g_s * g_e * beta,
                              p_a * g_a * g_e * beta))
    return terms


def _eve_parts(cfg: SystemConfig, losball_only: bool):
    if losball_only:
        return [(cfg.path_loss.alpha_los, True)]
    return [(cfg.path_loss.alpha_los, True), (cfg.path_loss.alpha_nlos, False)]


def _eve_cdf_exponents(cfg: SystemConfig, x: np.ndarray,
                       terms: Sequence[tuple[float, float, float]],
                       losball_only: bool) -> tuple[np.ndarray, np.ndarray]:
    """Radial-mass exponents of the LoS and blocked interceptor halves."""
    d = cfg.path_loss.ref_distance
    sig_e2 = cfg.noise_eve
    exps = []
    for alpha, los_side in _eve_parts(cfg, losball_only):
        acc = np.zeros_like(x)
        for w_j, a_j, b_j in terms:
            num = a_j - b_j * x
            with np.errstate(divide="ignore", over="ignore"):
                radius = np.where(num > 0,
                                  (np.maximum(num, 0.0) / (x * sig_e2)) ** (1.0 / alpha),
                                  0.0)
            mass = (_los_radial_mass(cfg.blockage, radius) if los_side
                    else _nlos_radial_mass(cfg.blockage, radius))
            acc += w_j * np.where(radius > d, mass, 0.0)
        exps.append(acc)
    if losball_only:
        exps.append(np.zeros_like(x))
    return exps[0], exps[1]


def eve_snr_cdf_parts(cfg: SystemConfig, x) -> tuple[np.ndarray, np.ndarray]:
    """CDF factors of the strongest interceptor SNR: (LoS part, blocked part).

    Their product is P(max interceptor SNR < x) without jamming.
    """
    xx = np.atleast_1d(np.asarray(x, dtype=float))
    e_los, e_nlos = _eve_cdf_exponents(
        cfg, xx, _eve_threshold_terms(replace(cfg, an=None)), losball_only=False)
    lam = cfg.eve_density
    p1 = np.exp(-_TWO_PI * lam * e_los)
    p2 = np.exp(-_TWO_PI * lam * e_nlos)
    if np.ndim(x) == 0:
        return float(p1[0]), float(p2[0])
    return p1, p2


def eve_max_snr_cdf(cfg: SystemConfig, x):
    """P(strongest interceptor SNR < x) without jamming."""
    p1, p2 = eve_snr_cdf_parts(cfg, x)
    return p1 * p2


def an_eve_max_sinr_cdf(cfg: SystemConfig, x):
    """P(strongest interceptor SINR < x) under split-power jamming."""
    _require_an(cfg)
    xx = np.atleast_1d(np.asarray(x, dtype=float))
    e_los, e_nlos = _eve_cdf_exponents(cfg, xx, _eve_threshold_terms(cfg),
                                       losball_only=False)
    out = np.exp(-_TWO_PI * cfg.eve_density * (e_los + e_nlos))
    return float(out[0]) if np.ndim(x) == 0 else out


def _eve_rate_from_terms(cfg: SystemConfig,
                         terms: Sequence[tuple[float, float, float]],
                         losball_only: bool,
                         quad: QuadratureSpec) -> float:
    """Average rate of the strongest interceptor from its SINR distribution.

    Integrates the complementary CDF over w = ln(1 + x).  The support is
    bounded: once the detection radius of every lobe combination falls below
    the reference distance the CDF is exactly 1.  Those radius crossings are
    jump discontinuities, so they seed the quadrature panels.
    """
    lam_e = cfg.eve_density
    if lam_e == 0:
        return 0.0
    d = cfg.path_loss.ref_distance
    sig_e2 = cfg.noise_eve

    breaks = set()
    for alpha, _ in _eve_parts(cfg, losball_only):
        for _, a_j, b_j in terms:
            if a_j > 0:
                breaks.add(a_j / (sig_e2 * d ** alpha + b_j))
        if isinstance(cfg.blockage, LosBall):
            ball = cfg.blockage.d_los
            for _, a_j, b_j in terms:
                if a_j > 0:
                    # radius crossing of the ball edge: kink, not jump
                    breaks.add(a_j / (sig_e2 * ball ** alpha + b_j))
    if not breaks:
        return 0.0
    x_max = max(breaks)
    w_max = math.log1p(x_max)
    w_breaks = sorted(math.log1p(b) for b in breaks if b < x_max)

    def integrand(wv: np.ndarray) -> np.ndarray:
        x = np.expm1(np.asarray(wv, dtype=float))
        e_los, e_nlos = _eve_cdf_exponents(cfg, x, terms, losball_only)
        return -np.expm1(-_TWO_PI * lam_e * (e_los + e_nlos))

    res = integrate_finite(integrand, 0.0, w_max, quad, breakpoints=w_breaks)
    return res.value / _LN2


def avg_rate_eve_exact(cfg: SystemConfig,
                       quad: QuadratureSpec | None = None) -> float:
    """Average rate of the strongest interceptor, bits/s/Hz (no jamming)."""
    base = replace(cfg, an=None)
    return _eve_rate_from_terms(base, _eve_threshold_terms(base), False,
                                quad or _DEFAULT_QUAD)


def avg_rate_eve_exact_an(cfg: SystemConfig,
                          quad: QuadratureSpec | None = None) -> float:
    """Average rate of the strongest interceptor under split-power jamming.

    Lobe combinations whose jamming-adjusted signal margin is non-positive at
    a given SINR cannot reach it at any distance and contribute nothing.
    """
    _require_an(cfg)
    return _eve_rate_from_terms(cfg, _eve_threshold_terms(cfg), False,
                                quad or _DEFAULT_QUAD)


def avg_rate_eve_exact_losball(cfg: SystemConfig,
                               quad: QuadratureSpec | None = None) -> float:
    """Strongest-interceptor rate in the hard LoS-ball model.

    Only interceptors inside the ball see any signal; blocked ones are in
    outage, so the blocked CDF factor is 1.
    """
    _require_losball(cfg)
    base = replace(cfg, an=None)
    return _eve_rate_from_terms(base, _eve_threshold_terms(base), True,
                                quad or _DEFAULT_QUAD)


# ---------------------------------------------------------------------------
# linear-array interceptors


class _UlaGainProfile:
    """Interceptor gain versus azimuth, with fast level-crossing lookup.

    The pattern is fixed per configuration, so one dense grid of gains is
    shared across all SINR thresholds; crossings of any level are bracketed
    on the grid and refined by vectorized bisection.
    """

    def __init__(self, cfg: SystemConfig):
        ula = cfg.ula()
        self._gain = lambda ang: ula_eavesdropper_gain(
            np.asarray(ang, dtype=float), ula.tx_boresight, ula.n_tx,
            ula.n_eve, ula.spacing_ratio)
        m = max(1024, 64 * ula.n_tx)
        self.grid = np.linspace(0.0, _TWO_PI, m + 1)
        self.values = self._gain(self.grid)
        self.peak = float(ula.n_eve) ** 2
        interior = (self.values[1:-1] > self.values[:-2]) \
            & (self.values[1:-1] >= self.values[2:])
        self.local_max_values = np.unique(self.values[1:-1][interior])

    def __call__(self, ang):
        return self._gain(ang)

    def crossings(self, level: float) -> np.ndarray:
        """Angles where the pattern crosses ``level``, by 30-step bisection."""
        sign = np.signbit(self.values - level)
        idx = np.where(sign[:-1] != sign[1:])[0]
        if len(idx) == 0:
            return np.empty(0)
        lo = self.grid[idx].copy()
        hi = self.grid[idx + 1].copy()
        lo_below = sign[idx]
        for _ in range(30):
            mid = 0.5 * (lo + hi)
            below = self._gain(mid) < level
            lo = np.where(below == lo_below, mid, lo)
            hi = np.where(below == lo_below, hi, mid)
        return 0.5 * (lo + hi)


def avg_rate_eve_exact_ula(cfg: SystemConfig,
                           quad: QuadratureSpec | None = None) -> float:
    """Strongest-interceptor rate when all nodes carry linear arrays.

    The interceptor's gain depends on its azimuth relative to the serving
    beam, so the radial closed form is averaged over a uniform azimuth; the
    angular integrand switches off wherever the pattern drops below the gain
    needed to reach the SINR threshold at the reference distance.  Those
    switch-off angles seed the angular quadrature panels.
    """
    quad = quad or _DEFAULT_QUAD
    lam_e = cfg.eve_density
    if lam_e == 0:
        return 0.0
    pl = cfg.path_loss
    d = pl.ref_distance
    sig_e2 = cfg.noise_eve
    profile = _UlaGainProfile(cfg)
    angle_quad = QuadratureSpec(rel_tol=1e-7, abs_tol=1e-12,
                                max_subdivisions=quad.max_subdivisions)
    parts = _eve_parts(cfg, losball_only=False)

    def angular_exponent(x: float) -> float:
        total = 0.0
        for alpha, los_side in parts:
            g_crit = x * sig_e2 * d ** alpha / (cfg.tx_power * pl.beta)
            if g_crit >= profile.peak:
                continue
            crossings = profile.crossings(g_crit)

            def h(ang, _a=alpha, _los=los_side, _gc=g_crit):
                g = profile(ang)
                with np.errstate(divide="ignore", over="ignore"):
                    radius = np.where(g > _gc,
                                      (cfg.tx_power * g * pl.beta
                                       / (x * sig_e2)) ** (1.0 / _a),
                                      0.0)
                mass = (_los_radial_mass(cfg.blockage, radius) if _los
                        else _nlos_radial_mass(cfg.blockage, radius))
                return np.where(radius > d, mass, 0.0)

            res = integrate_finite(h, 0.0, _TWO_PI, angle_quad,
                                   breakpoints=crossings)
            total += res.value / _TWO_PI
        return total

    x_max = max(cfg.tx_power * profile.peak * pl.beta / (sig_e2 * d ** alpha)
                for alpha, _ in parts)
    w_max = math.log1p(x_max)

    # the integrand has kinks where the threshold gain sweeps past a local
    # maximum of the pattern (the active angular set changes topology there)
    w_kinks: set[float] = set()
    for alpha, _ in parts:
        for g_m in profile.local_max_values:
            x_m = cfg.tx_power * g_m * pl.beta / (sig_e2 * d ** alpha)
            if 0.0 < x_m < x_max:
                w_kinks.add(math.log1p(x_m))

    def integrand(wv: np.ndarray) -> np.ndarray:
        x = np.expm1(np.asarray(wv, dtype=float))
        return np.array([-math.expm1(-_TWO_PI * lam_e * angular_exponent(v))
                         for v in x])

    outer_quad = QuadratureSpec(rel_tol=1e-5, abs_tol=1e-9,
                                max_subdivisions=quad.max_subdivisions)
    res = integrate_finite(integrand, 0.0, w_max, outer_quad,
                           breakpoints=sorted(w_kinks))
    return res.value / _LN2


def secrecy_rate_ula_lower(cfg: SystemConfig,
                           quad: QuadratureSpec | None = None) -> float:
    """Guaranteed secrecy rate with linear arrays: bound minus interceptor rate."""
    return secrecy_rate(avg_rate_typical_lower_ula(cfg, quad),
                        avg_rate_eve_exact_ula(cfg, quad))
