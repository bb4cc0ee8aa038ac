"""Seeded Monte Carlo and exhaustive oracles for the analytical model.

All randomness comes from numpy's Philox counter-based generator.  Trials are
processed in fixed-size chunks and chunk c uses the stream derived from
``SeedSequence(seed, spawn_key=(c,))``, so results are bit-identical for a
given seed regardless of how the work is scheduled.

The oracles report E in the same convention as the analytical formulas: the
per-frame rank increment conditioned on the frame's own header arriving,
obtained by dividing the unconditional per-frame increment by d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .frame import AggregationContext, frame_efficiency, frame_size, max_feasible_n
from .gf256 import gf256_rank_many
from .network import NodeStrategy
from .params import EnumerationSizeError, ParameterError, RankDistribution
from .phases import batch_lineages

RANK_COUNTING = "rank_counting"
GF256_MATRIX = "gf256_matrix"

_CHUNK = 1 << 16
_MAX_ENUM_TERMS = 1 << 24


@dataclass(frozen=True)
class TrialConfig:
    """A reproducible Monte Carlo run: scenario, mode, seed and trial count."""

    ctx: AggregationContext
    n: int
    seed: int
    trials: int
    mode: str = RANK_COUNTING

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ParameterError(f"trials must be >= 1, got {self.trials!r}")
        if self.mode not in (RANK_COUNTING, GF256_MATRIX):
            raise ParameterError(f"unknown mode {self.mode!r}")


@dataclass(frozen=True)
class PeriodEstimate:
    """Empirical per-frame rank increment with its standard error."""

    mean: float
    std_error: float
    trials: int
    mode: str
    rank_histogram: tuple[float, ...]


@dataclass(frozen=True)
class HopEstimate:
    hop: int
    n: int
    throughput: float
    std_error: float


def _chunk_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(seed, spawn_key=key))
    )


def _draw_ranks(rng: np.random.Generator, hbar: RankDistribution, shape) -> np.ndarray:
    cum = np.cumsum(hbar.masses)
    cum[-1] = 1.0
    return np.searchsorted(cum, rng.random(shape), side="right") + 1


def _received_counts(
    rng: np.random.Generator, ctx: AggregationContext, n: int, trials: int
) -> np.ndarray:
    """Per-batch received packet counts for ``trials`` simulated periods."""
    m = ctx.code.batch_size
    period = math.lcm(m, n)
    frames = period // n
    headers = rng.random((trials, frames)) < ctx.d
    packets = rng.random((trials, period)) < ctx.f
    slot_frame = np.arange(period) // n
    received = packets & headers[:, slot_frame]
    return received.reshape(trials, period // m, m).sum(axis=2)


def _gf_increments(
    rng: np.random.Generator, counts: np.ndarray, ranks: np.ndarray, m: int
) -> np.ndarray:
    """Rank increments via explicit random coefficient matrices.

    A batch of rank r is recoded into M packets whose coordinates in the
    r-dimensional received space are uniform; receiving j of them yields the
    rank of a uniform j x r matrix.  Groups of equal (j, r) are ranked in one
    vectorized elimination; the group order is fixed so the stream of random
    draws is reproducible.
    """
    inc = np.zeros(counts.shape, dtype=np.int64)
    for j in range(1, m + 1):
        for r in range(1, m + 1):
            mask = (counts == j) & (ranks == r)
            how_many = int(mask.sum())
            if how_many == 0:
                continue
            mats = rng.integers(0, 256, size=(how_many, j, r), dtype=np.int64)
            inc[mask] = gf256_rank_many(mats)
    return inc


def simulate_period(config: TrialConfig) -> PeriodEstimate:
    """Estimate E by simulating whole lcm(M, N)-packet periods.

    Unlike the analytical formulas, batches sharing a frame share its header
    loss event here, so the estimate also probes that factorization.
    """
    ctx, n = config.ctx, config.n
    m = ctx.code.batch_size
    if ctx.d <= 0.0:
        raise ParameterError("header survival is zero; E is undefined")
    frames = math.lcm(m, n) // n
    total = 0.0
    total_sq = 0.0
    hist = np.zeros(m + 1)
    done = 0
    chunk_index = 0
    while done < config.trials:
        t = min(_CHUNK, config.trials - done)
        rng = _chunk_rng(config.seed, chunk_index)
        ranks = _draw_ranks(rng, ctx.rank_dist, (t, math.lcm(m, n) // m))
        counts = _received_counts(rng, ctx, n, t)
        if config.mode == RANK_COUNTING:
            inc = np.minimum(counts, ranks)
        else:
            inc = _gf_increments(rng, counts, ranks, m)
        hist += np.bincount(inc.ravel(), minlength=m + 1)[: m + 1]
        per_trial = inc.sum(axis=1) / (frames * ctx.d)
        total += float(per_trial.sum())
        total_sq += float((per_trial**2).sum())
        done += t
        chunk_index += 1
    mean = total / config.trials
    var = max(total_sq / config.trials - mean**2, 0.0)
    se = math.sqrt(var / config.trials)
    return PeriodEstimate(
        mean=mean,
        std_error=se,
        trials=config.trials,
        mode=config.mode,
        rank_histogram=tuple(hist / hist.sum()),
    )


def enumerate_period_exact(ctx: AggregationContext, n: int) -> float:
    """Exact E by enumerating every reception outcome, batch by batch.

    Expectation is additive over the batches of a period, so each batch's
    increment is enumerated over all survival patterns of its own packets and
    the header events of the frames it touches.  Nothing here shares code
    with the phase-average formulas.
    """
    m = ctx.code.batch_size
    lineages = batch_lineages(m, n)
    cost = sum(2 ** (m + len(groups)) for groups in lineages)
    if cost > _MAX_ENUM_TERMS:
        raise EnumerationSizeError(
            f"enumeration needs {cost} terms, above the {_MAX_ENUM_TERMS} bound"
        )
    if ctx.d <= 0.0:
        raise ParameterError("header survival is zero; E is undefined")
    hbar = ctx.rank_dist.masses
    emin = [
        sum(hbar[r - 1] * min(j, r) for r in range(1, m + 1)) for j in range(m + 1)
    ]
    total = 0.0
    for groups in lineages:
        pmf = np.ones(1)
        for size in groups:
            pmf = np.convolve(pmf, _group_pmf_brute(size, ctx.f, ctx.d))
        total += sum(pmf[j] * emin[j] for j in range(pmf.size))
    frames = math.lcm(m, n) // n
    return total / (frames * ctx.d)


def _group_pmf_brute(size: int, f: float, d: float) -> np.ndarray:
    """Received-count pmf for one group, by enumerating each packet's bit."""
    survive = np.zeros(size + 1)
    for mask in range(1 << size):
        bits = mask.bit_count()
        survive[bits] += f**bits * (1.0 - f) ** (size - bits)
    pmf = d * survive
    pmf[0] += 1.0 - d
    return pmf


def simulate_end_to_end(
    ctx: AggregationContext,
    hops: int,
    strategy: NodeStrategy,
    seed: int,
    trials: int,
) -> list[HopEstimate]:
    """Empirical throughput per byte on each hop of a line network.

    ``trials`` is the period count simulated at each hop; the batch
    population starts at full rank and is carried hop to hop.  N is chosen
    per hop from the empirical rank histogram of the surviving population.
    """
    if hops < 1:
        raise ParameterError(f"hops must be >= 1, got {hops!r}")
    m = ctx.code.batch_size
    payload = ctx.code.payload
    records = []
    ranks = None
    for hop in range(1, hops + 1):
        if ranks is None:
            pop = trials * m  # sized so hop 1 has about `trials` periods at N=M
            ranks = np.full(pop, m, dtype=np.int64)
        positive = ranks[ranks > 0]
        if positive.size == 0:
            raise ParameterError(f"population extinct before hop {hop}")
        hist = np.bincount(positive, minlength=m + 1)[1 : m + 1]
        local = ctx.with_rank_dist(RankDistribution.from_masses(hist))
        n = strategy.select(local)
        period = math.lcm(m, n)
        per_period = period // m
        frames = period // n
        n_periods = ranks.size // per_period
        used = ranks[: n_periods * per_period].reshape(n_periods, per_period)
        inc_sum = np.zeros(n_periods)
        next_ranks = np.empty_like(used)
        done = 0
        chunk_index = 0
        while done < n_periods:
            t = min(_CHUNK, n_periods - done)
            rng = _chunk_rng(seed, hop, chunk_index)
            counts = _received_counts(rng, local, n, t)
            inc = np.minimum(counts, used[done : done + t])
            inc_sum[done : done + t] = inc.sum(axis=1)
            next_ranks[done : done + t] = inc
            done += t
            chunk_index += 1
        bytes_per_period = frames * frame_size(n, ctx.channel, ctx.code)
        per_period_tp = payload * inc_sum / bytes_per_period
        mean = float(per_period_tp.mean())
        se = float(per_period_tp.std(ddof=0) / math.sqrt(n_periods))
        records.append(HopEstimate(hop=hop, n=n, throughput=mean, std_error=se))
        ranks = next_ranks.ravel()
    return records
