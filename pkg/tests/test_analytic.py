"""Closed-form and integral rate evaluators."""

import math
from dataclasses import replace

import numpy as np
import pytest

from conftest import pattern_db, sectored_config, ula_config, upa_config, wide_an
from mmwsec.analytic import (
    an_eve_max_sinr_cdf,
    an_typical_interference_laplace,
    avg_rate_eve_exact,
    avg_rate_eve_exact_an,
    avg_rate_eve_exact_losball,
    avg_rate_eve_exact_ula,
    avg_rate_typical_exact,
    avg_rate_typical_exact_an,
    avg_rate_typical_exact_losball,
    avg_rate_typical_lower,
    avg_rate_typical_lower_an,
    avg_rate_typical_lower_ula,
    eve_max_snr_cdf,
    eve_snr_cdf_parts,
    interference_moment,
    interference_moment_quadrature,
    losball_interference_laplace,
    max_density_for_rate,
    max_density_for_rate_an,
    mixed_path_loss_exponent,
    secrecy_rate,
    secrecy_rate_ula_lower,
    typical_interference_laplace,
    typical_signal_laplace,
    RateReport,
    SectoredLink,
    SystemConfig,
    UpaLink,
)
from mmwsec.antenna import SectoredPattern, mean_gain, sectored_pair_distribution, upa_pattern
from mmwsec.geometry import ExponentialBlockage, LinkState, LosBall, los_probability, path_loss
from mmwsec.numerics import QuadratureSpec, integrate_finite

TIGHT = QuadratureSpec(rel_tol=1e-11, abs_tol=1e-16, max_subdivisions=4000)


def noise_limited_rate(cfg, pair_gain):
    """Independent two-state closed form for an interference-free network."""
    p = los_probability(cfg.blockage, cfg.dipole_distance)
    out = 0.0
    for prob, state in ((p, LinkState.LOS), (1.0 - p, LinkState.NLOS)):
        snr = cfg.tx_power * pair_gain \
            * path_loss(cfg.path_loss, cfg.dipole_distance, state) / cfg.noise_rx
        out += prob * math.log2(1.0 + snr)
    return out


class TestSecrecyRate:
    def test_clamps(self):
        assert secrecy_rate(5.0, 7.0) == 0.0
        assert secrecy_rate(7.0, 5.0) == 2.0
        assert secrecy_rate(3.25, 0.0) == 3.25

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            secrecy_rate(-1.0, 0.0)

    def test_report_invariant(self):
        with pytest.raises(ValueError):
            RateReport(1.0, 2.0, 0.5, "x")
        rep = RateReport(2.0, 0.5, 1.5, "x")
        assert rep.rate_secrecy == 1.5


class TestTypicalExact:
    def test_noise_limited_closed_form(self):
        cfg = upa_config(lam_km2=0.0)
        expected = noise_limited_rate(cfg, 256.0)
        assert avg_rate_typical_exact(cfg) == pytest.approx(expected, rel=1e-8)

    def test_decreasing_in_tx_density(self):
        r1 = avg_rate_typical_exact(upa_config(lam_km2=50.0))
        r2 = avg_rate_typical_exact(upa_config(lam_km2=100.0))
        assert r1 > r2

    def test_decreasing_in_noise(self):
        cfg = upa_config()
        louder = replace(cfg, noise_rx=cfg.noise_rx * 10.0)
        assert avg_rate_typical_exact(cfg) > avg_rate_typical_exact(louder)

    def test_rejects_marginal_nlos_exponent(self):
        cfg = upa_config()
        pl = replace(cfg.path_loss, alpha_nlos=2.0)
        with pytest.raises(ValueError, match="alpha_nlos"):
            avg_rate_typical_exact(replace(cfg, path_loss=pl))

    def test_signal_laplace_shape(self):
        cfg = upa_config()
        # keep z * signal-power below the exp underflow threshold
        z = np.geomspace(1e2, 3e8, 40)
        vals = typical_signal_laplace(cfg, z)
        assert np.all((vals > 0.0) & (vals <= 1.0))
        assert np.all(np.diff(vals) <= 1e-15)

    def test_interference_laplace_shape(self):
        cfg = upa_config()
        z = np.geomspace(1e2, 1e11, 12)
        vals = typical_interference_laplace(cfg, z)
        assert np.all((vals > 0.0) & (vals <= 1.0))
        assert np.all(np.diff(vals) <= 1e-12)


class TestLowerBound:
    def test_bounded_by_exact_on_grid(self):
        for p_dbm in (10.0, 30.0):
            for lam in (10.0, 100.0):
                cfg = upa_config(p_dbm=p_dbm, lam_km2=lam)
                assert avg_rate_typical_lower(cfg) \
                    <= avg_rate_typical_exact(cfg) + 1e-9

    def test_high_power_asymptote(self):
        cfg = upa_config(p_dbm=90.0)
        tx, rx = cfg.pair_patterns()
        gbar = mean_gain(sectored_pair_distribution(tx, rx))
        expected = math.log2(
            1.0 + 256.0 * cfg.path_loss.beta
            * cfg.dipole_distance ** (-mixed_path_loss_exponent(cfg))
            / (cfg.tx_density * gbar * interference_moment(cfg)))
        assert avg_rate_typical_lower(cfg) == pytest.approx(expected, rel=1e-6)

    def test_moment_closed_form_matches_quadrature(self):
        # the exponential-blockage reduction against direct radial integration
        for freq in (28.0, 38.0, 60.0, 73.0):
            cfg = upa_config(freq_ghz=freq)
            closed = interference_moment(cfg)
            direct = interference_moment_quadrature(cfg, TIGHT)
            assert closed == pytest.approx(direct, rel=1e-6)

    def test_moment_losball_against_piecewise_integral(self):
        def power_integral(a, lo, hi):
            # integral of r^(1-a) over [lo, hi]
            if a == 2.0:
                return math.log(hi / lo)
            return (hi ** (2 - a) - lo ** (2 - a)) / (2 - a)

        cfg = upa_config(blockage=LosBall(120.0))
        pl = cfg.path_loss
        d, big_d = pl.ref_distance, 120.0
        a_l, a_n = pl.alpha_los, pl.alpha_nlos
        near = (d ** (-a_l) - d ** (-a_n)) * d ** 2 / 2.0 \
            + d ** (-a_n) * d ** 2 / 2.0
        mid = power_integral(a_l, d, big_d) - power_integral(a_n, d, big_d)
        far = d ** (2 - a_n) / (a_n - 2)
        expected = 2.0 * math.pi * pl.beta * (near + mid + far)
        assert interference_moment(cfg) == pytest.approx(expected, rel=1e-8)


class TestDensityCap:
    def test_round_trip(self):
        cfg = upa_config()
        target = 3.0
        cap = max_density_for_rate(cfg, target)
        assert avg_rate_typical_lower(replace(cfg, tx_density=cap)) \
            == pytest.approx(target, abs=1e-9)

    def test_unreachable_rate_gives_zero(self):
        assert max_density_for_rate(upa_config(), 60.0) == 0.0

    def test_narrower_beams_admit_more_nodes(self):
        cap16 = max_density_for_rate(upa_config(n=16), 3.0)
        cap64 = max_density_for_rate(upa_config(n=64), 3.0)
        assert cap64 > cap16

    def test_rejects_nonpositive_target(self):
        with pytest.raises(ValueError):
            max_density_for_rate(upa_config(), 0.0)


class TestEveExact:
    def test_no_interceptors_no_rate(self):
        assert avg_rate_eve_exact(upa_config(lam_e_km2=0.0)) == 0.0

    def test_increasing_in_interceptor_density(self):
        r1 = avg_rate_eve_exact(upa_config(lam_e_km2=100.0))
        r2 = avg_rate_eve_exact(upa_config(lam_e_km2=200.0))
        assert r2 > r1

    def test_increasing_in_power(self):
        r1 = avg_rate_eve_exact(upa_config(p_dbm=10.0))
        r2 = avg_rate_eve_exact(upa_config(p_dbm=30.0))
        assert r2 > r1

    def test_cdf_factor_shape(self):
        cfg = upa_config()
        x = np.geomspace(1e-3, 1e7, 60)
        p1, p2 = eve_snr_cdf_parts(cfg, x)
        for p in (p1, p2):
            assert np.all((p > 0.0) & (p <= 1.0))
            assert np.all(np.diff(p) >= -1e-12)
        assert eve_max_snr_cdf(cfg, 1e9) == pytest.approx(1.0, abs=1e-12)


class TestLosBall:
    def make(self, **kw):
        return upa_config(blockage=LosBall(141.4), **kw)

    def test_gamma_form_matches_direct_quadrature(self):
        cfg = self.make()
        pl = cfg.path_loss
        tx, rx = cfg.pair_patterns()
        dist = sectored_pair_distribution(tx, rx)
        for z in (1e3, 1e5, 3e6, 1e8):
            def deficit_mass(u):
                u = np.asarray(u, dtype=float)
                att = pl.beta * np.maximum(u, pl.ref_distance) ** (-pl.alpha_los)
                total = np.zeros_like(u)
                for g, w in dist.levels:
                    total += -w * np.expm1(-z * cfg.tx_power * g * att)
                return total * u
            inner = integrate_finite(deficit_mass, 0.0, 141.4, TIGHT,
                                     breakpoints=[pl.ref_distance]).value
            oracle = math.exp(-2.0 * math.pi * cfg.tx_density * inner)
            assert losball_interference_laplace(cfg, z) \
                == pytest.approx(oracle, rel=1e-6)

    def test_noise_limited_is_los_branch_only(self):
        cfg = self.make(lam_km2=0.0)
        snr = cfg.tx_power * 256.0 \
            * path_loss(cfg.path_loss, cfg.dipole_distance, LinkState.LOS) \
            / cfg.noise_rx
        assert avg_rate_typical_exact_losball(cfg) \
            == pytest.approx(math.log2(1.0 + snr), rel=1e-8)

    def test_decreasing_in_density(self):
        assert avg_rate_typical_exact_losball(self.make(lam_km2=20.0)) \
            > avg_rate_typical_exact_losball(self.make(lam_km2=200.0))

    def test_outage_outside_ball(self):
        cfg = upa_config(blockage=LosBall(10.0), r_m=15.0)
        with pytest.warns(RuntimeWarning, match="outage"):
            assert avg_rate_typical_exact_losball(cfg) == 0.0

    def test_eve_rate_vanishes_with_ball(self):
        rates = [avg_rate_eve_exact_losball(upa_config(blockage=LosBall(d)))
                 for d in (0.01, 1.0, 30.0, 141.4)]
        assert all(a < b for a, b in zip(rates, rates[1:]))
        assert rates[0] < 1e-4

    def test_eve_zero_density(self):
        assert avg_rate_eve_exact_losball(self.make(lam_e_km2=0.0)) == 0.0

    def test_requires_ball_blockage(self):
        with pytest.raises(ValueError):
            avg_rate_typical_exact_losball(upa_config())
        with pytest.raises(ValueError):
            avg_rate_eve_exact_losball(upa_config())


class TestUla:
    def test_single_element_reduces_to_unit_sectored_bound(self):
        cfg = ula_config(n=1, n_eve=1)
        unit = SectoredPattern(1.0, 1.0 - 1e-15, math.pi)
        ref = upa_config(freq_ghz=38.0, p_dbm=10.0, lam_km2=50.0,
                         lam_e_km2=100.0, r_m=20.0)
        ref = replace(ref, gain_model=SectoredLink(unit, unit),
                      eve_pattern=unit)
        assert avg_rate_typical_lower_ula(cfg) \
            == pytest.approx(avg_rate_typical_lower(ref), rel=1e-9)

    def test_bound_increases_with_array_size(self):
        b8 = avg_rate_typical_lower_ula(ula_config(n=8))
        b16 = avg_rate_typical_lower_ula(ula_config(n=16))
        assert b16 > b8

    def test_eve_zero_density(self):
        assert avg_rate_eve_exact_ula(ula_config(lam_e_km2=0.0)) == 0.0

    def test_eve_monotone_in_array_sizes(self):
        base = avg_rate_eve_exact_ula(ula_config(n=16, n_eve=4))
        fewer_tx = avg_rate_eve_exact_ula(ula_config(n=8, n_eve=4))
        more_eve = avg_rate_eve_exact_ula(ula_config(n=16, n_eve=8))
        assert fewer_tx > base
        assert more_eve > base

    def test_secrecy_composition(self):
        cfg = ula_config()
        assert secrecy_rate_ula_lower(cfg) == pytest.approx(
            max(avg_rate_typical_lower_ula(cfg) - avg_rate_eve_exact_ula(cfg),
                0.0), rel=1e-9)

    def test_sectored_evaluators_reject_ula_configs(self):
        with pytest.raises(ValueError):
            avg_rate_typical_exact(ula_config())


class TestArtificialNoise:
    def make(self, mu=0.85, **kw):
        return sectored_config(an=wide_an(mu), **kw)

    def test_mu_one_typical_reduces_to_plain(self):
        cfg = self.make(mu=1.0)
        plain = replace(cfg, an=None,
                        gain_model=SectoredLink(cfg.an.signal,
                                                cfg.gain_model.rx))
        assert avg_rate_typical_exact_an(cfg) \
            == pytest.approx(avg_rate_typical_exact(plain), rel=1e-8)

    def test_mu_one_lower_reduces_to_plain(self):
        cfg = self.make(mu=1.0)
        plain = replace(cfg, an=None,
                        gain_model=SectoredLink(cfg.an.signal,
                                                cfg.gain_model.rx))
        assert avg_rate_typical_lower_an(cfg) \
            == pytest.approx(avg_rate_typical_lower(plain), rel=1e-8)

    def test_mu_one_eve_reduces_to_plain(self):
        cfg = self.make(mu=1.0)
        plain = replace(cfg, an=None,
                        gain_model=SectoredLink(cfg.an.signal,
                                                cfg.gain_model.rx))
        assert avg_rate_eve_exact_an(cfg) \
            == pytest.approx(avg_rate_eve_exact(plain), rel=1e-8)

    def test_noise_limited_limit(self):
        cfg = self.make(lam_km2=0.0)
        rx = cfg.gain_model.rx
        p = los_probability(cfg.blockage, cfg.dipole_distance)
        expected = 0.0
        for prob, state in ((p, LinkState.LOS), (1.0 - p, LinkState.NLOS)):
            snr = cfg.an.mu * cfg.tx_power * cfg.an.signal.g_main * rx.g_main \
                * path_loss(cfg.path_loss, cfg.dipole_distance, state) \
                / cfg.noise_rx
            expected += prob * math.log2(1.0 + snr)
        assert avg_rate_typical_exact_an(cfg) == pytest.approx(expected,
                                                               rel=1e-8)

    def test_lower_bounded_by_exact(self):
        for p_dbm in (10.0, 25.0):
            cfg = self.make(p_dbm=p_dbm)
            assert avg_rate_typical_lower_an(cfg) \
                <= avg_rate_typical_exact_an(cfg) + 1e-9

    def test_eve_zero_density(self):
        assert avg_rate_eve_exact_an(self.make(lam_e_km2=0.0)) == 0.0

    def test_an_kernels_shape(self):
        cfg = self.make()
        z = np.geomspace(1e3, 1e10, 10)
        lap = an_typical_interference_laplace(cfg, z)
        assert np.all((lap > 0.0) & (lap <= 1.0))
        assert np.all(np.diff(lap) <= 1e-12)
        x = np.geomspace(1e-3, 1e4, 40)
        cdf = an_eve_max_sinr_cdf(cfg, x)
        assert np.all((cdf > 0.0) & (cdf <= 1.0))
        assert np.all(np.diff(cdf) >= -1e-12)
        # jamming caps the reachable SINR, so the CDF saturates exactly
        assert an_eve_max_sinr_cdf(cfg, 1e6) == 1.0

    def test_density_cap_round_trip(self):
        cfg = self.make()
        cap = max_density_for_rate_an(cfg, 0.8)
        assert avg_rate_typical_lower_an(replace(cfg, tx_density=cap)) \
            == pytest.approx(0.8, abs=1e-9)
        assert max_density_for_rate_an(cfg, 50.0) == 0.0

    def test_density_cap_grows_with_signal_fraction(self):
        caps = [max_density_for_rate_an(self.make(mu=m), 0.5)
                for m in (0.4, 0.6, 0.8)]
        assert all(a < b for a, b in zip(caps, caps[1:]))

    def test_requires_an_section(self):
        with pytest.raises(ValueError):
            avg_rate_typical_exact_an(sectored_config())
