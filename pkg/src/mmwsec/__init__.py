"""Average achievable secrecy rate of mmWave ad hoc networks.

Analytic evaluators (exact rates, lower bounds, LoS-ball and linear-array
variants, split-power jamming) cross-validated against a first-principles
Monte Carlo simulator over sampled Poisson networks.
"""

from .analytic import (
    ArtificialNoiseConfig,
    RateReport,
    SectoredLink,
    SystemConfig,
    UlaLink,
    UpaLink,
    secrecy_rate,
)
from .antenna import GainDistribution, SectoredPattern, UlaConfig, upa_pattern
from .geometry import (
    ExponentialBlockage,
    LinkState,
    LosBall,
    PathLossModel,
    Point2D,
    beta_from_frequency,
)
from .numerics import QuadratureError, QuadratureResult, QuadratureSpec

__version__ = "0.1.0"
