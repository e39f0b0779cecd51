"""Spatial primitives: Poisson scatter in a disc, blockage, short-range path loss.

Everything works in linear units (meters, watts, linear gains).  Functions are
vectorized over distance and pure given an explicit random generator, so they
are safe to call from concurrently running simulation trials as long as each
trial owns its generator.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

__all__ = [
    "SPEED_OF_LIGHT",
    "LinkState",
    "Point2D",
    "ExponentialBlockage",
    "LosBall",
    "BlockageModel",
    "PathLossModel",
    "los_probability",
    "sample_link_state",
    "sample_los_mask",
    "path_loss",
    "beta_from_frequency",
    "sample_ppp",
    "as_generator",
]

SPEED_OF_LIGHT = 3.0e8  # m/s


class LinkState(enum.Enum):
    LOS = "los"
    NLOS = "nlos"


class Point2D(NamedTuple):
    x: float  # m
    y: float  # m


@dataclass(frozen=True)
class ExponentialBlockage:
    """Line-of-sight probability decaying as exp(-rho * distance)."""

    rho: float  # 1/m

    def __post_init__(self):
        if not (np.isfinite(self.rho) and self.rho > 0):
            raise ValueError("rho must be a positive finite rate (1/m)")


@dataclass(frozen=True)
class LosBall:
    """Hard line-of-sight cutoff: LoS within d_los, blocked (outage) beyond."""

    d_los: float  # m

    def __post_init__(self):
        if not (np.isfinite(self.d_los) and self.d_los > 0):
            raise ValueError("d_los must be a positive finite distance (m)")


BlockageModel = Union[ExponentialBlockage, LosBall]


@dataclass(frozen=True)
class PathLossModel:
    """Short-range power law: beta * max(ref_distance, distance)^(-alpha)."""

    beta: float            # linear, dimensionless
    alpha_los: float
    alpha_nlos: float
    ref_distance: float = 1.0  # m

    def __post_init__(self):
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise ValueError("beta must be positive and finite")
        if not (self.alpha_nlos >= self.alpha_los >= 2.0):
            raise ValueError("exponents must satisfy alpha_nlos >= alpha_los >= 2")
        if not (np.isfinite(self.ref_distance) and self.ref_distance > 0):
            raise ValueError("ref_distance must be positive and finite")

    def exponent(self, state: LinkState) -> float:
        return self.alpha_los if state is LinkState.LOS else self.alpha_nlos


def as_generator(rng) -> np.random.Generator:
    """Normalize an int seed / SeedSequence / Generator into a Generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def los_probability(model: BlockageModel, distance):
    """Probability that a link of the given length (m) is line-of-sight."""
    d = np.asarray(distance, dtype=float)
    if np.any(~np.isfinite(d)) or np.any(d < 0):
        raise ValueError("distance must be finite and non-negative")
    if isinstance(model, ExponentialBlockage):
        out = np.exp(-model.rho * d)
    elif isinstance(model, LosBall):
        out = np.where(d <= model.d_los, 1.0, 0.0)
    else:
        raise TypeError(f"unknown blockage model: {model!r}")
    return float(out) if np.ndim(distance) == 0 else out


def sample_link_state(p_los: float, rng) -> LinkState:
    """Draw LoS with probability p_los, NLoS otherwise."""
    if not (0.0 <= p_los <= 1.0):
        raise ValueError("p_los must lie in [0, 1]")
    gen = as_generator(rng)
    return LinkState.LOS if gen.random() < p_los else LinkState.NLOS

def sample_los_mask(p_los: np.ndarray, rng) -> np.ndarray:
    """Vector Bernoulli draw: True where the link comes out line-of-sight."""
    p = np.asarray(p_los, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("p_los must lie in [0, 1]")
    gen = as_generator(rng)
    return gen.random(p.shape) < p


def path_loss(model: PathLossModel, distance, state: LinkState):
    """Linear propagation gain at the given distance and link state."""
    d = np.asarray(distance, dtype=float)
    if np.any(~np.isfinite(d)) or np.any(d < 0):
        raise ValueError("distance must be finite and non-negative")
    alpha = model.exponent(state)
    out = model.beta * np.maximum(d, model.ref_distance) ** (-alpha)
    return float(out) if np.ndim(distance) == 0 else out


def beta_from_frequency(f_c: float) -> float:
    """Free-space intercept (c / (4*pi*f_c))^2 for a carrier frequency in Hz."""
    if not (np.isfinite(f_c) and f_c > 0):
        raise ValueError("carrier frequency must be positive and finite")
    return (SPEED_OF_LIGHT / (4.0 * math.pi * f_c)) ** 2


def sample_ppp(density: float, window_radius: float, rng) -> np.ndarray:
    """Sample a homogeneous Poisson point process on a disc about the origin.

    Returns an (n, 2) array of xy coordinates in meters; n is Poisson with
    mean density * pi * window_radius^2 and positions are uniform on the disc.
    """
    if not (np.isfinite(density) and density >= 0):
        raise ValueError("density must be finite and non-negative")
    if not (np.isfinite(window_radius) and window_radius > 0):
        raise ValueError("window_radius must be positive and finite")
    gen = as_generator(rng)
    mean_count = density * math.pi * window_radius ** 2
    n = int(gen.poisson(mean_count))
    # sqrt of a uniform radius fraction makes the areal density uniform
    radii = window_radius * np.sqrt(gen.random(n))
    angles = gen.uniform(0.0, 2.0 * math.pi, n)
    return np.column_stack((radii * np.cos(angles), radii * np.sin(angles)))
