"""Monte Carlo simulation of the uplink system model.

Protocol per realization:

1. Draw each tier's BSs as an independent PPP on an expanded square window
   (the inner measurement window plus a guard ring on every side).
2. Drop UEs uniformly over the expanded window in batches until every BS
   inside the inner window has at least one associated UE whose
   channel-inversion power fits the budget (saturation); realizations
   that exceed the batch cap are discarded and counted.
3. Schedule exactly one eligible UE per BS, chosen uniformly at random.
4. Measure the BS nearest the window centre (a Slivnyak-style surrogate
   for the typical BS): its uplink is received at rho_o * h with h a
   unit-mean exponential fade, while every other scheduled UE interferes
   with power P_i h_i d_i^(-eta_j).
5. Drop one independent probe UE in the inner window to sample the
   truncation-outage indicator.

Association follows the best average link: argmin over BSs of
r^eta_tier(BS) with r in metres, which reduces to nearest-BS association
when all tiers share an exponent.

Reproducibility: realization ``i`` of a run uses a counter-based Philox
stream keyed by ``(seed, i)``, so results are bitwise identical for a
given (seed, iterations) regardless of the worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from multiprocessing import get_context
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from .model import MetricsReport, NetworkConfig

__all__ = [
    "SaturationError",
    "Association",
    "Realization",
    "EstimateWithCI",
    "SimulationReport",
    "wilson_interval",
    "sample_ppp",
    "associate",
    "build_realization",
    "estimate_metrics",
]

MAX_BATCHES_DEFAULT = 50


class SaturationError(RuntimeError):
    """The UE-drop loop could not activate every in-window BS within the
    batch cap (likely a high-truncation configuration)."""


def sample_ppp(
    intensity: float, side: float, rng: np.random.Generator
) -> np.ndarray:
    """Homogeneous PPP on a square of the given side centred at the origin.

    Returns an (n, 2) array with n ~ Poisson(intensity * side^2) and
    positions i.i.d. uniform.
    """
    if intensity < 0:
        raise ValueError(f"intensity must be nonnegative, got {intensity}")
    if not side > 0:
        raise ValueError(f"window side must be positive, got {side}")
    n = rng.poisson(intensity * side * side)
    return rng.uniform(-side / 2.0, side / 2.0, size=(n, 2))


@dataclass(frozen=True)
class Association:
    bs_index: int
    tier: int
    required_power: float
    truncated: bool


def associate(
    ue: Sequence[float],
    bs_xy: np.ndarray,
    bs_tier: np.ndarray,
    config: NetworkConfig,
) -> Association:
    """Best-link association of one UE against an explicit BS layout.

    The serving BS minimizes r^eta over all BSs (r in metres, eta that
    BS's tier exponent); the required transmit power is
    rho_o_tier * r^eta, and the UE is truncated when it exceeds p_max.
    """
    bs_xy = np.asarray(bs_xy, dtype=float)
    if bs_xy.size == 0:
        raise ValueError("association requires at least one base station")
    bs_tier = np.asarray(bs_tier, dtype=int)
    r = np.hypot(bs_xy[:, 0] - ue[0], bs_xy[:, 1] - ue[1])
    etas = np.array([t.eta for t in config.tiers])
    weights = r ** etas[bs_tier]
    i = int(np.argmin(weights))
    tier = int(bs_tier[i])
    required = config.tiers[tier].rho_o * weights[i]
    return Association(i, tier, float(required), bool(required > config.p_max))


@dataclass
class Realization:
    """One Monte Carlo draw.

    ``ue_*`` arrays describe the scheduled UEs (at most one per BS); the
    tagged quantities describe the measured link at the BS nearest the
    window centre.  ``tagged_fade`` and ``tagged_interference`` are stored
    so the SINR identity can be re-checked exactly.
    """

    bs_xy: np.ndarray          # (n_bs, 2) m
    bs_tier: np.ndarray        # (n_bs,) tier index
    ue_xy: np.ndarray          # (n_sched, 2) m
    ue_bs: np.ndarray          # (n_sched,) serving BS index
    ue_power: np.ndarray       # (n_sched,) W
    tagged_bs: int
    tagged_tier: int
    tagged_sinr: float
    tagged_active: bool
    tagged_fade: float
    tagged_interference: float
    tagged_ue_power: float     # W, the scheduled UE in the tagged cell
    probe_truncated: bool
    n_ue_dropped: int
    n_batches: int


def _tier_slices(counts: list[int]) -> list[slice]:
    out, start = [], 0
    for c in counts:
        out.append(slice(start, start + c))
        start += c
    return out


def build_realization(
    config: NetworkConfig,
    rng: np.random.Generator,
    tagged_tier: int | None = None,
    max_batches: int = MAX_BATCHES_DEFAULT,
    tagged_rule: str = "center",
) -> Realization:
    """Run the full drop/saturate/schedule/measure protocol once.

    ``tagged_tier`` restricts the measured BS to one tier; ``None`` draws
    from all tiers.  ``tagged_rule`` picks the measured BS among the
    in-window candidates: ``"center"`` takes the BS nearest the window
    centre, ``"uniform"`` a uniformly random BS (the area-unbiased typical
    BS; the centre BS's cell is slightly size-biased).
    Raises :class:`SaturationError` when saturation is not reached within
    ``max_batches`` UE batches, or when the window contains no usable BS.
    """
    if tagged_rule not in ("center", "uniform"):
        raise ValueError(f"unknown tagged_rule {tagged_rule!r}")
    guard = config.effective_guard_margin()
    drop_side = config.window_side + 2.0 * guard
    half_window = config.window_side / 2.0

    tier_xy = [sample_ppp(t.intensity, drop_side, rng) for t in config.tiers]
    counts = [len(p) for p in tier_xy]
    n_bs = sum(counts)
    if n_bs == 0:
        raise SaturationError("no base stations fell in the window")
    bs_xy = np.concatenate(tier_xy, axis=0)
    bs_tier = np.concatenate(
        [np.full(c, k, dtype=np.intp) for k, c in enumerate(counts)]
    )
    trees = [cKDTree(p) if len(p) else None for p in tier_xy]
    slices = _tier_slices(counts)

    etas = np.array([t.eta for t in config.tiers])
    rhos = np.array([t.rho_o for t in config.tiers])

    def batch_associate(points: np.ndarray):
        # weight toward the best BS of each tier, then argmin across tiers
        m = len(points)
        weights = np.full((config.n_tiers, m), np.inf)
        local = np.zeros((config.n_tiers, m), dtype=np.intp)
        for k, tree in enumerate(trees):
            if tree is None:
                continue
            d, i = tree.query(points)
            weights[k] = d ** etas[k]
            local[k] = i
        choice = np.argmin(weights, axis=0)
        cols = np.arange(m)
        w = weights[choice, cols]
        serving = np.array([slices[k].start for k in range(config.n_tiers)])[
            choice
        ] + local[choice, cols]
        required = rhos[choice] * w
        return serving, required

    inner = np.max(np.abs(bs_xy), axis=1) <= half_window
    if not inner.any():
        raise SaturationError("no base station inside the inner window")
    targets = np.flatnonzero(inner)

    batch_size = math.ceil(config.total_intensity * drop_side * drop_side * 10.0)
    best_priority = np.full(n_bs, np.inf)
    best_xy = np.zeros((n_bs, 2))
    best_power = np.zeros(n_bs)
    n_dropped = 0
    saturated = False
    n_batches = 0
    for n_batches in range(1, max_batches + 1):
        pts = rng.uniform(-drop_side / 2.0, drop_side / 2.0, size=(batch_size, 2))
        n_dropped += batch_size
        serving, required = batch_associate(pts)
        keep = required <= config.p_max
        if keep.any():
            bs_i = serving[keep]
            # uniform scheduling: each eligible UE gets an i.i.d. priority
            # and every BS keeps its minimum-priority UE
            prio = rng.random(keep.sum())
            order = np.lexsort((prio, bs_i))
            bs_sorted = bs_i[order]
            firsts = order[np.unique(bs_sorted, return_index=True)[1]]
            cand_bs = bs_i[firsts]
            better = prio[firsts] < best_priority[cand_bs]
            upd = cand_bs[better]
            best_priority[upd] = prio[firsts][better]
            best_xy[upd] = pts[keep][firsts][better]
            best_power[upd] = required[keep][firsts][better]
        if np.isfinite(best_priority[targets]).all():
            saturated = True
            break
    if not saturated:
        raise SaturationError(
            f"saturation not reached after {max_batches} batches "
            f"({n_dropped} UEs dropped)"
        )

    scheduled = np.flatnonzero(np.isfinite(best_priority))
    ue_xy = best_xy[scheduled]
    ue_power = best_power[scheduled]

    if tagged_tier is None:
        candidates = targets
    else:
        candidates = np.flatnonzero(inner & (bs_tier == tagged_tier))
        if candidates.size == 0:
            raise SaturationError(
                f"no tier-{tagged_tier} base station inside the inner window"
            )
    if tagged_rule == "uniform":
        tagged = int(candidates[rng.integers(candidates.size)])
    else:
        centre_dist = np.hypot(bs_xy[candidates, 0], bs_xy[candidates, 1])
        tagged = int(candidates[np.argmin(centre_dist)])
    tier_j = int(bs_tier[tagged])
    eta_j = config.tiers[tier_j].eta
    rho_j = config.tiers[tier_j].rho_o

    fade = float(rng.exponential())
    interferers = scheduled != tagged
    d = np.hypot(
        ue_xy[interferers, 0] - bs_xy[tagged, 0],
        ue_xy[interferers, 1] - bs_xy[tagged, 1],
    )
    h = rng.exponential(size=d.shape[0])
    interference = float(np.sum(ue_power[interferers] * h * d**-eta_j))
    sinr = rho_j * fade / (config.noise + interference)

    probe = rng.uniform(-half_window, half_window, size=2)
    w_min, k_min = math.inf, 0
    for k, tree in enumerate(trees):
        if tree is None:
            continue
        dist, _ = tree.query(probe)
        w = float(dist) ** etas[k]
        if w < w_min:
            w_min, k_min = w, k
    # tier-specific truncation applies the tagged tier's cutoff to the
    # best-link weight, matching the analytic convention
    probe_rho = rhos[tagged_tier] if tagged_tier is not None else rhos[k_min]
    probe_truncated = bool(probe_rho * w_min > config.p_max)

    tagged_pos = np.flatnonzero(scheduled == tagged)[0]
    return Realization(
        bs_xy=bs_xy,
        bs_tier=bs_tier,
        ue_xy=ue_xy,
        ue_bs=scheduled,
        ue_power=ue_power,
        tagged_bs=tagged,
        tagged_tier=tier_j,
        tagged_sinr=float(sinr),
        tagged_active=True,
        tagged_fade=fade,
        tagged_interference=interference,
        tagged_ue_power=float(ue_power[tagged_pos]),
        probe_truncated=probe_truncated,
        n_ue_dropped=n_dropped,
        n_batches=n_batches,
    )


def realization_rng(seed: int, index: int) -> np.random.Generator:
    """Counter-based stream for realization ``index`` of run ``seed``."""
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


# --- estimation ---------------------------------------------------------------


@dataclass(frozen=True)
class EstimateWithCI:
    """Point estimate with a 95% half-width: 1.96 * std / sqrt(n) for means
    and the Wilson interval half-width for proportions."""

    mean: float
    half_width_95: float
    n_samples: int


def wilson_interval(successes: int, n: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n < 1:
        raise ValueError("Wilson interval requires at least one sample")
    p = successes / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom
    return centre - half, centre + half


def _proportion_estimate(successes: int, n: int) -> EstimateWithCI:
    lo, hi = wilson_interval(successes, n)
    return EstimateWithCI(successes / n, (hi - lo) / 2.0, n)


def _mean_estimate(values: np.ndarray) -> EstimateWithCI:
    n = len(values)
    mean = math.fsum(values) / n
    if n > 1:
        var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
        half = 1.96 * math.sqrt(var / n)
    else:
        half = math.inf
    return EstimateWithCI(mean, half, n)


@dataclass(frozen=True)
class SimulationReport:
    """Per-metric estimates with confidence intervals, plus saturation
    bookkeeping.  The composite fields are derived from the component
    means through the exact outage/rate identities, with half-widths
    propagated to first order."""

    truncation_outage: EstimateWithCI
    sinr_outage: EstimateWithCI
    total_outage: EstimateWithCI
    spectral_efficiency: EstimateWithCI
    effective_spectral_efficiency: EstimateWithCI
    mean_tx_power: EstimateWithCI
    iterations: int
    n_discarded: int
    seed: int

    def point_report(self) -> MetricsReport:
        return MetricsReport.from_components(
            truncation_outage=self.truncation_outage.mean,
            sinr_outage=self.sinr_outage.mean,
            spectral_efficiency=self.spectral_efficiency.mean,
            mean_tx_power=self.mean_tx_power.mean,
        )


def _run_chunk(args) -> np.ndarray:
    config, seed, tagged_tier, max_batches, tagged_rule, indices = args
    out = np.empty((len(indices), 5))
    for row, i in enumerate(indices):
        rng = realization_rng(seed, i)
        try:
            r = build_realization(config, rng, tagged_tier, max_batches, tagged_rule)
        except SaturationError:
            out[row] = (0.0, np.nan, np.nan, np.nan, np.nan)
            continue
        theta = config.tiers[r.tagged_tier].theta
        out[row] = (
            1.0,
            1.0 if r.tagged_sinr <= theta else 0.0,
            math.log1p(r.tagged_sinr),
            r.tagged_ue_power,
            1.0 if r.probe_truncated else 0.0,
        )
    return out


def estimate_metrics(
    config: NetworkConfig,
    iterations: int,
    seed: int,
    *,
    tier: int | None = None,
    workers: int = 1,
    max_batches: int = MAX_BATCHES_DEFAULT,
    tagged_rule: str = "center",
) -> SimulationReport:
    """Estimate the uplink metrics from ``iterations`` independent
    realizations.

    The SINR outage, rate, and transmit power are measured on the tagged
    link; the truncation outage on the per-realization probe UE.  Output
    is bitwise reproducible for a given (seed, iterations) whatever
    ``workers`` is, because every realization owns its own keyed stream
    and the reduction runs in realization order.
    """
    if iterations < 100:
        raise ValueError(f"at least 100 iterations required, got {iterations}")
    if not 0 <= seed < 2**64:
        raise ValueError("seed must fit in an unsigned 64-bit integer")
    indices = np.arange(iterations)
    chunk_size = max(1, math.ceil(iterations / max(1, workers * 8)))
    chunks = [
        (config, seed, tier, max_batches, tagged_rule, indices[i : i + chunk_size])
        for i in range(0, iterations, chunk_size)
    ]
    if workers > 1:
        with get_context("fork").Pool(workers) as pool:
            parts = pool.map(_run_chunk, chunks)
    else:
        parts = [_run_chunk(c) for c in chunks]
    records = np.concatenate(parts, axis=0)

    valid = records[:, 0] == 1.0
    n_valid = int(valid.sum())
    n_discarded = iterations - n_valid
    if n_valid == 0:
        raise SaturationError("every realization was discarded; the "
                              "configuration cannot reach saturation")
    outages = records[valid, 1]
    o_s = _proportion_estimate(int(outages.sum()), n_valid)
    rate = _mean_estimate(records[valid, 2])
    power = _mean_estimate(records[valid, 3])
    o_p = _proportion_estimate(int(records[valid, 4].sum()), n_valid)

    # composite identities on the means; half-widths by the delta method
    o_t_mean = o_p.mean + (1.0 - o_p.mean) * o_s.mean
    o_t_half = math.hypot(
        (1.0 - o_s.mean) * o_p.half_width_95, (1.0 - o_p.mean) * o_s.half_width_95
    )
    eff_mean = (1.0 - o_p.mean) * rate.mean
    eff_half = math.hypot(
        rate.mean * o_p.half_width_95, (1.0 - o_p.mean) * rate.half_width_95
    )
    return SimulationReport(
        truncation_outage=o_p,
        sinr_outage=o_s,
        total_outage=EstimateWithCI(o_t_mean, o_t_half, n_valid),
        spectral_efficiency=rate,
        effective_spectral_efficiency=EstimateWithCI(eff_mean, eff_half, n_valid),
        mean_tx_power=power,
        iterations=iterations,
        n_discarded=n_discarded,
        seed=seed,
    )
