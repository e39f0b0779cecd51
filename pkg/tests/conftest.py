"""Shared scenario builders and the acceptance summary hook."""

from __future__ import annotations

import math

import pytest

from mmwsec.analytic import (
    ArtificialNoiseConfig,
    SectoredLink,
    SystemConfig,
    UlaLink,
    UpaLink,
)
from mmwsec.antenna import SectoredPattern, UlaConfig, upa_pattern
from mmwsec.configio import (
    TABLE_PATH_LOSS_EXPONENTS,
    db_to_linear,
    dbm_to_watts,
    noise_power_watts,
)
from mmwsec.geometry import (
    ExponentialBlockage,
    LosBall,
    PathLossModel,
    beta_from_frequency,
)

NOISE_W = noise_power_watts(2e9, 10.0)
LOS_RANGE_M = 141.4

_ACCEPTANCE_LINES: list[str] = []


def record_acceptance(criterion: int, name: str, passed: bool, detail: str = ""):
    status = "PASS" if passed else "FAIL"
    line = f"ACCEPTANCE {criterion} [{status}] {name}"
    if detail:
        line += f" -- {detail}"
    _ACCEPTANCE_LINES.append(line)
    print(line)
    assert passed, line


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def pattern_db(main_db: float, side_db: float, width_deg: float) -> SectoredPattern:
    return SectoredPattern(g_main=db_to_linear(main_db),
                           g_side=db_to_linear(side_db),
                           beamwidth=math.radians(width_deg))


def upa_config(freq_ghz: float = 28.0, p_dbm: float = 30.0,
               lam_km2: float = 50.0, lam_e_km2: float = 100.0,
               r_m: float = 15.0, n: int = 16, n_eve: int = 4,
               blockage=None, an=None) -> SystemConfig:
    a_los, a_nlos = TABLE_PATH_LOSS_EXPONENTS[freq_ghz]
    freq = freq_ghz * 1e9
    return SystemConfig(
        carrier_frequency=freq,
        tx_power=dbm_to_watts(p_dbm),
        tx_density=lam_km2 * 1e-6,
        eve_density=lam_e_km2 * 1e-6,
        dipole_distance=r_m,
        path_loss=PathLossModel(beta=beta_from_frequency(freq),
                                alpha_los=a_los, alpha_nlos=a_nlos),
        blockage=blockage or ExponentialBlockage(1.0 / LOS_RANGE_M),
        noise_rx=NOISE_W, noise_eve=NOISE_W,
        gain_model=UpaLink(n), eve_pattern=upa_pattern(n_eve), an=an)


def sectored_config(freq_ghz: float = 60.0, p_dbm: float = 30.0,
                    lam_km2: float = 20.0, lam_e_km2: float = 300.0,
                    r_m: float = 50.0, link_pattern=None, eve_pattern=None,
                    blockage=None, an=None) -> SystemConfig:
    a_los, a_nlos = TABLE_PATH_LOSS_EXPONENTS[freq_ghz]
    freq = freq_ghz * 1e9
    link = link_pattern or pattern_db(10.0, -10.0, 15.0)
    return SystemConfig(
        carrier_frequency=freq,
        tx_power=dbm_to_watts(p_dbm),
        tx_density=lam_km2 * 1e-6,
        eve_density=lam_e_km2 * 1e-6,
        dipole_distance=r_m,
        path_loss=PathLossModel(beta=beta_from_frequency(freq),
                                alpha_los=a_los, alpha_nlos=a_nlos),
        blockage=blockage or ExponentialBlockage(1.0 / LOS_RANGE_M),
        noise_rx=NOISE_W, noise_eve=NOISE_W,
        gain_model=SectoredLink(link, link),
        eve_pattern=eve_pattern or pattern_db(3.0, -3.0, 45.0), an=an)


def ula_config(freq_ghz: float = 38.0, p_dbm: float = 10.0,
               lam_km2: float = 50.0, lam_e_km2: float = 100.0,
               r_m: float = 20.0, n: int = 16, n_eve: int = 4,
               blockage=None) -> SystemConfig:
    a_los, a_nlos = TABLE_PATH_LOSS_EXPONENTS[freq_ghz]
    freq = freq_ghz * 1e9
    return SystemConfig(
        carrier_frequency=freq,
        tx_power=dbm_to_watts(p_dbm),
        tx_density=lam_km2 * 1e-6,
        eve_density=lam_e_km2 * 1e-6,
        dipole_distance=r_m,
        path_loss=PathLossModel(beta=beta_from_frequency(freq),
                                alpha_los=a_los, alpha_nlos=a_nlos),
        blockage=blockage or ExponentialBlockage(1.0 / LOS_RANGE_M),
        noise_rx=NOISE_W, noise_eve=NOISE_W,
        gain_model=UlaLink(UlaConfig(n_tx=n, n_eve=n_eve, spacing_ratio=0.5,
                                     rx_boresight=math.pi / 3,
                                     tx_boresight=math.pi / 3)),
        eve_pattern=None)


def wide_an(mu: float = 0.85) -> ArtificialNoiseConfig:
    return ArtificialNoiseConfig(mu=mu,
                                 signal=pattern_db(3.0, -3.0, 45.0),
                                 noise=pattern_db(3.0, -3.0, 45.0))
