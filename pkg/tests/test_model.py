"""Configuration model: unit conversions, validation, and the derived
metric identities."""

import math

import numpy as np
import pytest

from upcell import analytic
from upcell.model import (
    ConfigError,
    MetricsReport,
    NetworkConfig,
    TierConfig,
    dbm_to_watts,
    network_from_mapping,
    validate,
    watts_to_dbm,
)


def paper_defaults(**overrides):
    kwargs = dict(
        tiers=[TierConfig.from_engineering(2.0, -70.0, 0.0, 4.0)],
        p_max_watts=1.0,
        noise_dbm=-90.0,
        rho_min_dbm=-90.0,
        window_km=20.0,
    )
    kwargs.update(overrides)
    return NetworkConfig.from_engineering(**kwargs)


class TestUnits:
    def test_dbm_definitions(self):
        assert dbm_to_watts(-70.0) == pytest.approx(1e-10, rel=1e-14)
        assert dbm_to_watts(30.0) == pytest.approx(1.0, rel=1e-14)
        assert dbm_to_watts(0.0) == pytest.approx(1e-3, rel=1e-14)

    def test_round_trip(self):
        for w in (0.2812, 1e-10, 3.5, 1e-15):
            assert watts_to_dbm(dbm_to_watts(watts_to_dbm(w))) == pytest.approx(
                watts_to_dbm(w), rel=1e-12
            )
            assert dbm_to_watts(watts_to_dbm(w)) == pytest.approx(w, rel=1e-12)

    def test_nonpositive_watts_rejected(self):
        with pytest.raises(ValueError):
            watts_to_dbm(0.0)
        with pytest.raises(ValueError):
            watts_to_dbm(-1.0)


class TestValidation:
    def test_paper_defaults_valid(self):
        cfg = paper_defaults()
        assert cfg.tiers[0].intensity == pytest.approx(2e-6)
        assert cfg.tiers[0].rho_o == pytest.approx(1e-10)
        assert cfg.tiers[0].theta == 1.0
        assert cfg.noise == pytest.approx(1e-12)
        assert validate(cfg) is cfg

    def test_eta_at_divergence_boundary(self):
        with pytest.raises(ConfigError, match="path-loss exponent must exceed 2"):
            paper_defaults(tiers=[TierConfig.from_engineering(2.0, -70.0, 0.0, 2.0)])

    def test_cutoff_below_sensitivity(self):
        with pytest.raises(ConfigError, match="receiver sensitivity"):
            paper_defaults(
                tiers=[TierConfig.from_engineering(2.0, -95.0)], rho_min_dbm=-90.0
            )

    def test_every_violation_reported(self):
        bad = NetworkConfig(
            tiers=(TierConfig(intensity=-1.0, rho_o=1e-10, theta=0.0, eta=2.0),),
            p_max=-2.0,
            noise=-1.0,
            window_side=0.0,
        )
        with pytest.raises(ConfigError) as info:
            validate(bad)
        paths = {path for path, _ in info.value.errors}
        assert {
            "tiers[0].intensity",
            "tiers[0].theta",
            "tiers[0].eta",
            "p_max",
            "noise",
            "window_side",
        } <= paths

    def test_no_tiers(self):
        with pytest.raises(ConfigError, match="at least one tier"):
            validate(NetworkConfig(tiers=(), p_max=1.0, noise=0.0))

    def test_infinite_p_max_allowed(self):
        cfg = paper_defaults(p_max_watts=math.inf)
        assert math.isinf(cfg.p_max)


class TestMappingIngestion:
    def test_round_trip_keys(self):
        mapping = {
            "tiers": [
                {"lambda_per_km2": 2.0, "rho_o_dbm": -70.0, "theta_db": 0.0,
                 "eta": 4.0}
            ],
            "p_max_watts": 1.0,
            "noise_dbm": -90.0,
            "rho_min_dbm": -90.0,
            "window_km": 20.0,
            "guard_km": None,
        }
        cfg = network_from_mapping(mapping)
        assert cfg == paper_defaults()

    def test_inf_power_string(self):
        cfg = network_from_mapping(
            {"tiers": [{"lambda_per_km2": 2.0, "rho_o_dbm": -70.0}],
             "p_max_watts": "inf", "rho_min_dbm": None}
        )
        assert math.isinf(cfg.p_max)

    def test_malformed_numbers_do_not_crash(self):
        with pytest.raises(ConfigError) as info:
            network_from_mapping(
                {"tiers": [{"lambda_per_km2": "two", "rho_o_dbm": -70.0}],
                 "p_max_watts": {}}
            )
        paths = {path for path, _ in info.value.errors}
        assert "tiers[0].lambda_per_km2" in paths
        assert "p_max_watts" in paths

    def test_unknown_key_flagged(self):
        with pytest.raises(ConfigError, match="unknown key"):
            network_from_mapping(
                {"tiers": [{"lambda_per_km2": 2.0, "rho_o_dbm": -70.0}],
                 "lambda": 3.0}
            )

    def test_boundary_and_si_ingestion_agree(self):
        # identical analytic results whether the config came in engineering
        # units or was built directly in SI
        eng = paper_defaults()
        si = validate(
            NetworkConfig(
                tiers=(TierConfig(2e-6, 1e-10, 1.0, 4.0),),
                p_max=1.0,
                noise=1e-12,
                rho_min=1e-12,
                window_side=20000.0,
            )
        )
        for j in range(1):
            a = analytic.full_report(eng, j)
            b = analytic.full_report(si, j)
            for field in (
                "truncation_outage", "sinr_outage", "total_outage",
                "spectral_efficiency", "mean_tx_power",
            ):
                np.testing.assert_allclose(
                    getattr(a, field), getattr(b, field), rtol=1e-12
                )


class TestMetricsReport:
    def test_composite_identities_exact(self):
        report = MetricsReport.from_components(0.3, 0.25, 1.5, 0.2)
        assert report.total_outage == 0.3 + (1.0 - 0.3) * 0.25
        assert report.effective_spectral_efficiency == (1.0 - 0.3) * 1.5


class TestGuardMargin:
    def test_auto_guard_formula(self):
        cfg = paper_defaults()
        # 5 * (p_max / rho_o)^(1/eta) = 5 * (1e10)^(1/4) ~ 1581 m
        assert cfg.effective_guard_margin() == pytest.approx(
            5.0 * (1.0 / 1e-10) ** 0.25
        )

    def test_guard_capped_by_window(self):
        cfg = paper_defaults(p_max_watts=math.inf)
        assert cfg.effective_guard_margin() == cfg.window_side / 4.0

    def test_explicit_guard_respected(self):
        cfg = paper_defaults(guard_km=2.0)
        assert cfg.effective_guard_margin() == 2000.0
