"""Antenna gain models.

Three families:

* two-level sectored beams with uniformly random orientation, giving a
  discrete distribution over effective pair gains;
* a square planar array abstracted onto the sectored template
  (beamwidth 2*pi/sqrt(N), main lobe N, side lobe 1/sin^2(3*pi/(2*sqrt(N))));
* exact uniform linear array (ULA) gains from steering-vector inner products,
  reduced to real closed forms of the Dirichlet kernel
  (1 - cos(N*k)) / (1 - cos(k)).

Closed-form ULA gains are real-valued; complex steering vectors exist only so
tests can brute-force the same inner products independently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .numerics import QuadratureSpec, integrate_finite

__all__ = [
    "SectoredPattern",
    "GainDistribution",
    "UlaConfig",
    "sectored_pair_distribution",
    "mean_gain",
    "upa_pattern",
    "ula_steering",
    "ula_boresight_gain",
    "ula_interferer_gain",
    "ula_eavesdropper_gain",
    "ula_mean_interferer_gain",
]

_TWO_PI = 2.0 * math.pi
_PROB_SUM_TOL = 1e-12


@dataclass(frozen=True)
class SectoredPattern:
    """Two-level beam: main-lobe gain over ``beamwidth``, side-lobe elsewhere."""

    g_main: float       # linear
    g_side: float       # linear
    beamwidth: float    # rad, in (0, 2*pi]; 2*pi means an omnidirectional beam

    def __post_init__(self):
        if not (np.isfinite(self.g_main) and np.isfinite(self.g_side)):
            raise ValueError("gains must be finite")
        if not (self.g_main >= self.g_side > 0):
            raise ValueError("need g_main >= g_side > 0")
        if not (0.0 < self.beamwidth <= _TWO_PI):
            raise ValueError("beamwidth must lie in (0, 2*pi]")

    @property
    def prob_main(self) -> float:
        """Probability that a uniformly oriented beam covers a given direction."""
        return self.beamwidth / _TWO_PI

    def lobe_levels(self) -> Tuple[Tuple[float, float], ...]:
        """(gain, probability) for the main and side lobes."""
        p = self.prob_main
        return ((self.g_main, p), (self.g_side, 1.0 - p))


@dataclass(frozen=True)
class GainDistribution:
    """Discrete distribution over effective (pairwise) antenna gains."""

    levels: Tuple[Tuple[float, float], ...]  # (gain, probability)

    def __post_init__(self):
        if not self.levels:
            raise ValueError("distribution needs at least one level")
        gains = np.array([g for g, _ in self.levels])
        probs = np.array([p for _, p in self.levels])
        if np.any(gains <= 0) or np.any(~np.isfinite(gains)):
            raise ValueError("gains must be positive and finite")
        if np.any(probs < 0):
            raise ValueError("probabilities must be non-negative")
        if abs(probs.sum() - 1.0) > _PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {probs.sum()!r}, not 1")

    @property
    def gains(self) -> np.ndarray:
        return np.array([g for g, _ in self.levels])

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p for _, p in self.levels])


def sectored_pair_distribution(tx: SectoredPattern,
                               rx: SectoredPattern) -> GainDistribution:
    """Distribution of the product gain between two independently oriented beams.

    Each end points its main lobe at the other with probability
    beamwidth/(2*pi); the four lobe combinations give up to four gain levels.
    Levels with equal gain (e.g. the two cross terms of identical patterns)
    are merged with summed probability.
    """
    merged: dict[float, float] = {}
    for g_t, p_t in tx.lobe_levels():
        for g_r, p_r in rx.lobe_levels():
            g = g_t * g_r
            merged[g] = merged.get(g, 0.0) + p_t * p_r
    # omnidirectional ends leave zero-probability side-lobe levels behind
    levels = tuple(sorted(((g, p) for g, p in merged.items() if p > 0.0),
                          reverse=True))
    return GainDistribution(levels)


def mean_gain(dist: GainDistribution) -> float:
    """Probability-weighted average gain of a discrete distribution."""
    return float(np.dot(dist.gains, dist.probabilities))


def upa_pattern(n: int) -> SectoredPattern:
    """Sectored abstraction of a square planar array with n elements.

    Requires n >= 4 so the beamwidth stays below 2*pi and the side-lobe level
    1/sin^2(3*pi/(2*sqrt(n))) is meaningful.
    """
    if n < 4:
        raise ValueError("planar-array pattern needs at least 4 elements")
    root = math.sqrt(n)
    side = 1.0 / math.sin(3.0 * math.pi / (2.0 * root)) ** 2
    return SectoredPattern(g_main=float(n), g_side=side, beamwidth=_TWO_PI / root)


def ula_steering(angle: float, q: int, spacing_ratio: float = 0.5) -> np.ndarray:
    """Steering vector of a q-element ULA for an azimuth angle in radians.

    Element k carries exp(-j*2*pi*spacing_ratio*k*sin(angle)); spacing_ratio
    is the element spacing over the wavelength.
    """
    if q < 1:
        raise ValueError("need at least one element")
    k = np.arange(q)
    return np.exp(-1j * _TWO_PI * spacing_ratio * k * math.sin(angle))


def ula_boresight_gain(n: int) -> float:
    """Matched-filter gain of an aligned transmit/receive ULA pair: n^2."""
    if n < 1:
        raise ValueError("need at least one element")
    return float(n * n)


def _dirichlet_power_ratio(k, n: int):
    """(1 - cos(n*k)) / (1 - cos(k)) = (sin(n*k/2) / sin(k/2))^2, stable.

    The ratio has removable 0/0 singularities at k = 0 mod 2*pi where its
    value is n^2; near those points the direct form cancels catastrophically,
    so the half-angle is reduced modulo pi and a quadratic series takes over
    within 1e-5 of a singularity.
    """
    k = np.asarray(k, dtype=float)
    half = 0.5 * k
    u = half - np.round(half / math.pi) * math.pi  # in [-pi/2, pi/2]
    small = np.abs(u) < 1e-5
    safe = np.where(small, 1.0, u)
    direct = (np.sin(n * safe) / np.sin(safe)) ** 2
    series = n * n * (1.0 - (n * n - 1.0) * u * u / 3.0)
    return np.where(small, series, direct)


def ula_interferer_gain(xi_ro, xi_rio, phi_tio, phi_ti, n: int,
                        spacing_ratio: float = 0.5):
    """Cross gain between an interfering ULA link and the typical receiver.

    ``xi_ro`` is the receiver's own boresight arrival angle, ``xi_rio`` the
    arrival angle of the interferer, ``phi_tio`` the interferer's departure
    angle toward the receiver and ``phi_ti`` its own beam direction (all rad).
    Equals |a_r^H A a_t|^2 / n^2 of the matched-filter inner products.
    Vectorized over any broadcastable angle arrays.
    """
    if n < 1:
        raise ValueError("need at least one element")
    c = _TWO_PI * spacing_ratio
    k1 = c * (np.sin(xi_ro) - np.sin(np.asarray(xi_rio, dtype=float)))
    k2 = c * (np.sin(np.asarray(phi_tio, dtype=float)) - np.sin(phi_ti))
    out = _dirichlet_power_ratio(k1, n) * _dirichlet_power_ratio(k2, n) / (n * n)
    return float(out) if np.ndim(xi_rio) == 0 and np.ndim(phi_tio) == 0 else out


def ula_eavesdropper_gain(phi_teo, phi_to, n: int, n_eve: int,
                          spacing_ratio: float = 0.5):
    """Gain an n_eve-element intercepting array extracts from an n-element link.

    ``phi_teo`` is the transmitter's departure angle toward the interceptor,
    ``phi_to`` its serving-beam direction.  The closed form
    (n_eve/n)^2 * (1 - cos(n*k)) / (1 - cos(k)) peaks at n_eve^2 when the
    interceptor sits on the serving beam and shrinks as n grows.
    """
    if n < 1 or n_eve < 1:
        raise ValueError("need at least one element at each end")
    c = _TWO_PI * spacing_ratio
    k3 = c * (np.sin(np.asarray(phi_teo, dtype=float)) - np.sin(phi_to))
    out = (n_eve / n) ** 2 * _dirichlet_power_ratio(k3, n)
    return float(out) if np.ndim(phi_teo) == 0 else out


def ula_mean_interferer_gain(n: int, spacing_ratio: float = 0.5,
                             rx_boresight: float = 0.0,
                             quad: QuadratureSpec | None = None) -> float:
    """Average interferer gain over uniformly random beam angles.

    The three interferer angles are independent and uniform on [0, 2*pi); the
    receiver boresight stays fixed at ``rx_boresight``, so the average is a
    single angular integral (arrival side, at that boresight) times a double
    one (departure side), both of the Dirichlet power kernel, divided by n^2.
    """
    if n < 1:
        raise ValueError("need at least one element")
    if n == 1:
        return 1.0
    quad = quad or QuadratureSpec(rel_tol=1e-9, abs_tol=1e-12)
    c = _TWO_PI * spacing_ratio
    seeds = np.linspace(0.0, _TWO_PI, 4 * n + 1)[1:-1]

    def mean_over_arrivals(sin_ref: float) -> float:
        def f(ang):
            return _dirichlet_power_ratio(c * (sin_ref - np.sin(ang)), n)
        res = integrate_finite(f, 0.0, _TWO_PI, quad, breakpoints=seeds)
        return res.value / _TWO_PI

    arrival_factor = mean_over_arrivals(math.sin(rx_boresight))

    def g(ang):
        ang = np.asarray(ang, dtype=float)
        return np.array([mean_over_arrivals(s) for s in np.sin(ang)])

    outer = integrate_finite(g, 0.0, _TWO_PI,
                             QuadratureSpec(rel_tol=1e-8, abs_tol=1e-10,
                                            max_subdivisions=quad.max_subdivisions),
                             breakpoints=seeds)
    departure_factor = outer.value / _TWO_PI
    return arrival_factor * departure_factor / (n * n)


@dataclass(frozen=True)
class UlaConfig:
    """ULA link description: array sizes, spacing and fixed boresights."""

    n_tx: int
    n_eve: int
    spacing_ratio: float = 0.5   # element spacing / wavelength
    rx_boresight: float = 0.0    # arrival angle of the served link, rad
    tx_boresight: float = 0.0    # departure angle of the serving beam, rad

    def __post_init__(self):
        if self.n_tx < 1 or self.n_eve < 1:
            raise ValueError("antenna counts must be at least 1")
        if not (np.isfinite(self.spacing_ratio) and self.spacing_ratio > 0):
            raise ValueError("spacing_ratio must be positive")
