"""Configuration data model shared by the analytic and Monte Carlo paths.

All internal computation is carried out in SI units: watts, meters, and
base stations per square meter.  Engineering units (dBm, BS/km^2, dB)
appear only at the ingestion boundary, via the ``from_engineering``
constructors and :func:`network_from_mapping`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

__all__ = [
    "ConfigError",
    "TierConfig",
    "NetworkConfig",
    "MetricsReport",
    "dbm_to_watts",
    "watts_to_dbm",
    "validate",
    "network_from_mapping",
    "network_to_mapping",
]

KM2_PER_M2 = 1e-6  # BS/km^2 -> BS/m^2


class ConfigError(ValueError):
    """Aggregated configuration failure; ``errors`` lists every violation
    as (field path, message) pairs."""

    def __init__(self, errors: Sequence[tuple[str, str]]):
        self.errors = list(errors)
        lines = [f"{path}: {msg}" for path, msg in self.errors]
        super().__init__("invalid configuration:\n  " + "\n  ".join(lines))


def dbm_to_watts(x_dbm: float) -> float:
    """Convert a power level in dBm to watts (10^((dBm - 30)/10))."""
    return 10.0 ** ((x_dbm - 30.0) / 10.0)


def watts_to_dbm(x_watts: float) -> float:
    """Convert a positive power in watts to dBm.  Inverse of
    :func:`dbm_to_watts` to better than 1e-12 relative."""
    if not x_watts > 0:
        raise ValueError(f"power must be positive to express in dBm, got {x_watts}")
    return 10.0 * math.log10(x_watts) + 30.0


@dataclass(frozen=True)
class TierConfig:
    """One network tier: BS intensity, power-control cutoff, SINR threshold,
    and path-loss exponent, all in SI/linear units."""

    intensity: float  # BS per m^2
    rho_o: float      # cutoff threshold, W
    theta: float      # SINR threshold, linear
    eta: float        # path-loss exponent

    @classmethod
    def from_engineering(
        cls,
        lambda_per_km2: float,
        rho_o_dbm: float,
        theta_db: float = 0.0,
        eta: float = 4.0,
    ) -> "TierConfig":
        return cls(
            intensity=lambda_per_km2 * KM2_PER_M2,
            rho_o=dbm_to_watts(rho_o_dbm),
            theta=10.0 ** (theta_db / 10.0),
            eta=eta,
        )


@dataclass(frozen=True)
class NetworkConfig:
    """Tiers plus the global uplink parameters.

    ``p_max`` may be ``math.inf`` to model an unconstrained transmit power;
    the analytic special cases for that regime are then evaluated exactly.
    ``guard_margin`` of ``None`` selects the default guard of
    5 * max_k (p_max / rho_o_k)^(1/eta_k), capped at window_side / 4.
    """

    tiers: tuple[TierConfig, ...]
    p_max: float              # maximum UE transmit power, W (may be inf)
    noise: float              # noise power sigma^2, W
    rho_min: float = 0.0      # receiver sensitivity, W (validated only)
    window_side: float = 20000.0   # simulation window edge, m
    guard_margin: float | None = None  # m; None -> auto

    @property
    def total_intensity(self) -> float:
        return sum(t.intensity for t in self.tiers)

    @property
    def n_tiers(self) -> int:
        return len(self.tiers)

    def tier(self, j: int) -> TierConfig:
        return self.tiers[j]

    def common_exponent(self) -> bool:
        """True when every tier shares one path-loss exponent."""
        return len({t.eta for t in self.tiers}) <= 1

    def effective_guard_margin(self) -> float:
        if self.guard_margin is not None:
            return self.guard_margin
        reach = max((self.p_max / t.rho_o) ** (1.0 / t.eta) for t in self.tiers)
        return min(5.0 * reach, self.window_side / 4.0)

    def with_tier_rho_o(self, j: int, rho_o: float) -> "NetworkConfig":
        """Copy of the config with tier ``j``'s cutoff replaced."""
        tiers = tuple(
            replace(t, rho_o=rho_o) if k == j else t for k, t in enumerate(self.tiers)
        )
        return replace(self, tiers=tiers)

    @classmethod
    def from_engineering(
        cls,
        tiers: Iterable[TierConfig],
        p_max_watts: float = 1.0,
        noise_dbm: float = -90.0,
        rho_min_dbm: float | None = -90.0,
        window_km: float = 20.0,
        guard_km: float | None = None,
    ) -> "NetworkConfig":
        return validate(
            cls(
                tiers=tuple(tiers),
                p_max=float(p_max_watts),
                noise=dbm_to_watts(noise_dbm),
                rho_min=0.0 if rho_min_dbm is None else dbm_to_watts(rho_min_dbm),
                window_side=window_km * 1000.0,
                guard_margin=None if guard_km is None else guard_km * 1000.0,
            )
        )


def _check_number(errors: list, path: str, value, allow_inf: bool = False) -> bool:
    try:
        v = float(value)
    except (TypeError, ValueError):
        errors.append((path, f"not a number: {value!r}"))
        return False
    if math.isnan(v):
        errors.append((path, "must not be NaN"))
        return False
    if math.isinf(v) and not allow_inf:
        errors.append((path, "must be finite"))
        return False
    return True


def validate(config: NetworkConfig) -> NetworkConfig:
    """Check every invariant of ``config`` and return it unchanged.

    Raises :class:`ConfigError` carrying the full list of violations so a
    bad file is diagnosed in one pass.
    """
    errors: list[tuple[str, str]] = []
    if len(config.tiers) < 1:
        errors.append(("tiers", "at least one tier is required"))
    for k, t in enumerate(config.tiers):
        base = f"tiers[{k}]"
        if _check_number(errors, f"{base}.intensity", t.intensity) and not t.intensity > 0:
            errors.append((f"{base}.intensity", "BS intensity must be positive"))
        if _check_number(errors, f"{base}.rho_o", t.rho_o) and not t.rho_o > 0:
            errors.append((f"{base}.rho_o", "cutoff threshold must be positive"))
        if _check_number(errors, f"{base}.theta", t.theta) and not t.theta > 0:
            errors.append((f"{base}.theta", "SINR threshold must be positive"))
        if _check_number(errors, f"{base}.eta", t.eta) and not t.eta > 2:
            errors.append((f"{base}.eta", "path-loss exponent must exceed 2"))
        if (
            isinstance(t.rho_o, (int, float))
            and isinstance(config.rho_min, (int, float))
            and not math.isnan(float(config.rho_min))
            and 0 < t.rho_o <= config.rho_min
        ):
            errors.append(
                (f"{base}.rho_o", "cutoff threshold must exceed the receiver "
                                  f"sensitivity rho_min ({config.rho_min} W)")
            )
    if _check_number(errors, "p_max", config.p_max, allow_inf=True) and not config.p_max > 0:
        errors.append(("p_max", "maximum transmit power must be positive"))
    if _check_number(errors, "noise", config.noise) and not config.noise >= 0:
        errors.append(("noise", "noise power must be nonnegative"))
    if _check_number(errors, "rho_min", config.rho_min) and not config.rho_min >= 0:
        errors.append(("rho_min", "receiver sensitivity must be nonnegative"))
    if _check_number(errors, "window_side", config.window_side) and not config.window_side > 0:
        errors.append(("window_side", "window side must be positive"))
    if config.guard_margin is not None:
        if _check_number(errors, "guard_margin", config.guard_margin) and not config.guard_margin >= 0:
            errors.append(("guard_margin", "guard margin must be nonnegative"))
    if errors:
        raise ConfigError(errors)
    return config


@dataclass(frozen=True)
class MetricsReport:
    """The six headline uplink metrics for one tier.

    ``total_outage`` and ``effective_spectral_efficiency`` are derived
    identities and are kept exact by constructing reports through
    :meth:`from_components`.
    """

    truncation_outage: float            # O_p
    sinr_outage: float                  # O_s, conditional on active
    total_outage: float                 # O_p + (1 - O_p) O_s
    spectral_efficiency: float          # nats/s/Hz, conditional on active
    effective_spectral_efficiency: float  # (1 - O_p) * spectral_efficiency
    mean_tx_power: float                # E[P], W

    @classmethod
    def from_components(
        cls,
        truncation_outage: float,
        sinr_outage: float,
        spectral_efficiency: float,
        mean_tx_power: float,
    ) -> "MetricsReport":
        o_p, o_s = truncation_outage, sinr_outage
        return cls(
            truncation_outage=o_p,
            sinr_outage=o_s,
            total_outage=o_p + (1.0 - o_p) * o_s,
            spectral_efficiency=spectral_efficiency,
            effective_spectral_efficiency=(1.0 - o_p) * spectral_efficiency,
            mean_tx_power=mean_tx_power,
        )


# --- structured config files -------------------------------------------------
#
# The on-disk schema mirrors the engineering-unit field names:
#
#   {"tiers": [{"lambda_per_km2": 2.0, "rho_o_dbm": -70.0,
#               "theta_db": 0.0, "eta": 4.0}],
#    "p_max_watts": 1.0,          # the string "inf" is accepted
#    "noise_dbm": -90.0,
#    "rho_min_dbm": -90.0,
#    "window_km": 20.0,
#    "guard_km": null}

_TIER_KEYS = ("lambda_per_km2", "rho_o_dbm", "theta_db", "eta")
_NETWORK_KEYS = ("tiers", "p_max_watts", "noise_dbm", "rho_min_dbm",
                 "window_km", "guard_km")


def _coerce(errors: list, path: str, value, allow_inf: bool = False) -> float:
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity") and allow_inf:
        return math.inf
    try:
        v = float(value)
    except (TypeError, ValueError):
        errors.append((path, f"not a number: {value!r}"))
        return math.nan
    return v


def network_from_mapping(mapping: Mapping) -> NetworkConfig:
    """Build and validate a :class:`NetworkConfig` from a parsed config file.

    Collects every problem (unknown keys, malformed numbers, violated
    invariants) into a single :class:`ConfigError`.
    """
    errors: list[tuple[str, str]] = []
    for key in mapping:
        if key not in _NETWORK_KEYS:
            errors.append((key, "unknown key"))
    raw_tiers = mapping.get("tiers")
    if not isinstance(raw_tiers, Sequence) or isinstance(raw_tiers, (str, bytes)) or not raw_tiers:
        errors.append(("tiers", "must be a non-empty list of tier tables"))
        raw_tiers = []
    tiers = []
    for k, entry in enumerate(raw_tiers):
        base = f"tiers[{k}]"
        if not isinstance(entry, Mapping):
            errors.append((base, "must be a table"))
            continue
        for key in entry:
            if key not in _TIER_KEYS:
                errors.append((f"{base}.{key}", "unknown key"))
        tiers.append(
            TierConfig(
                intensity=_coerce(errors, f"{base}.lambda_per_km2",
                                  entry.get("lambda_per_km2")) * KM2_PER_M2,
                rho_o=dbm_to_watts(_coerce(errors, f"{base}.rho_o_dbm",
                                           entry.get("rho_o_dbm"))),
                theta=10.0 ** (_coerce(errors, f"{base}.theta_db",
                                       entry.get("theta_db", 0.0)) / 10.0),
                eta=_coerce(errors, f"{base}.eta", entry.get("eta", 4.0)),
            )
        )
    p_max = _coerce(errors, "p_max_watts", mapping.get("p_max_watts", 1.0), allow_inf=True)
    noise_dbm = mapping.get("noise_dbm", -90.0)
    noise = 0.0 if noise_dbm is None else dbm_to_watts(
        _coerce(errors, "noise_dbm", noise_dbm))
    rho_min_dbm = mapping.get("rho_min_dbm")
    rho_min = 0.0 if rho_min_dbm is None else dbm_to_watts(
        _coerce(errors, "rho_min_dbm", rho_min_dbm))
    window = _coerce(errors, "window_km", mapping.get("window_km", 20.0)) * 1000.0
    guard_km = mapping.get("guard_km")
    guard = None if guard_km is None else _coerce(errors, "guard_km", guard_km) * 1000.0
    config = NetworkConfig(
        tiers=tuple(tiers),
        p_max=p_max,
        noise=noise,
        rho_min=rho_min,
        window_side=window,
        guard_margin=guard,
    )
    try:
        validate(config)
    except ConfigError as exc:
        errors = errors + exc.errors
    if errors:
        raise ConfigError(errors)
    return config


def network_to_mapping(config: NetworkConfig) -> dict:
    """Engineering-unit mapping for ``config`` (inverse of
    :func:`network_from_mapping` up to float round trip)."""
    return {
        "tiers": [
            {
                "lambda_per_km2": t.intensity / KM2_PER_M2,
                "rho_o_dbm": watts_to_dbm(t.rho_o),
                "theta_db": 10.0 * math.log10(t.theta),
                "eta": t.eta,
            }
            for t in config.tiers
        ],
        "p_max_watts": config.p_max,
        "noise_dbm": watts_to_dbm(config.noise) if config.noise > 0 else None,
        "rho_min_dbm": watts_to_dbm(config.rho_min) if config.rho_min > 0 else None,
        "window_km": config.window_side / 1000.0,
        "guard_km": None if config.guard_margin is None else config.guard_margin / 1000.0,
    }
