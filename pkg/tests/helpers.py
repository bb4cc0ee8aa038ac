"""Brute-force oracles used by the tests.

Everything here enumerates reception outcomes bit by bit and shares no code
with the closed-form implementation it checks.
"""

from __future__ import annotations

import dataclasses
import itertools
import math

from bncagg import AggregationContext, ChannelParams, CodeParams, RankDistribution


def make_ctx(
    m: int,
    f: float,
    d: float,
    hbar: RankDistribution | None = None,
    payload: int = 64,
    plr: float = 0.1,
    mtu: int = 9000,
) -> AggregationContext:
    """Context with the survival probabilities pinned to given values."""
    channel = ChannelParams(max_payload=mtu, baseline_plr=plr)
    code = CodeParams(batch_size=m, payload=payload, bnc_header=m + 2, integrity=2)
    if hbar is None:
        hbar = RankDistribution.degenerate(m)
    ctx = AggregationContext.build(channel, code, hbar)
    return dataclasses.replace(ctx, f=f, d=d)


def enum_group_counts(sizes, f, d, with_header):
    """Yield (probability, received counts per group) over every outcome.

    ``with_header[i]`` says whether group i rides its own frame header (lost
    entirely with probability 1 - d).
    """
    per_group = []
    for size, headed in zip(sizes, with_header):
        outcomes = {}
        for bits in itertools.product((0, 1), repeat=size):
            got = sum(bits)
            w = f**got * (1.0 - f) ** (size - got)
            outcomes[got] = outcomes.get(got, 0.0) + w
        if headed:
            scaled = {k: d * w for k, w in outcomes.items()}
            scaled[0] = scaled.get(0.0, 0.0) + (1.0 - d)
            outcomes = scaled
        per_group.append(sorted(outcomes.items()))
    for combo in itertools.product(*per_group):
        prob = 1.0
        counts = []
        for got, w in combo:
            prob *= w
            counts.append(got)
        yield prob, counts


def expected_increment(prior_sizes, current, ctx) -> float:
    """E over ranks of the increment from the current group of a split batch.

    Prior groups carry their own headers; the current group's frame is
    conditioned delivered.
    """
    hbar = ctx.rank_dist.masses
    sizes = list(prior_sizes) + [current]
    headed = [True] * len(prior_sizes) + [False]
    total = 0.0
    for prob, counts in enum_group_counts(sizes, ctx.f, ctx.d, headed):
        j = counts[-1]
        prior = sum(counts[:-1])
        total += prob * sum(
            hbar[r - 1] * max(min(j, r - prior), 0)
            for r in range(1, len(hbar) + 1)
        )
    return total


def batch_increment_unconditional(groups, ctx) -> float:
    """E over ranks of min(total received, r); every group headed."""
    hbar = ctx.rank_dist.masses
    total = 0.0
    for prob, counts in enum_group_counts(
        list(groups), ctx.f, ctx.d, [True] * len(groups)
    ):
        j = sum(counts)
        total += prob * sum(
            hbar[r - 1] * min(j, r) for r in range(1, len(hbar) + 1)
        )
    return total


def period_expected_increment(n: int, ctx) -> float:
    """Exact per-frame E (conditioned on own header) by full enumeration."""
    m = ctx.code.batch_size
    period = math.lcm(m, n)
    total = 0.0
    for b in range(period // m):
        start, end = b * m, (b + 1) * m
        groups = []
        pos = start
        while pos < end:
            nxt = min(end, (pos // n + 1) * n)
            groups.append(nxt - pos)
            pos = nxt
        total += batch_increment_unconditional(groups, ctx)
    return total / ((period // n) * ctx.d)


def reception_pmf_bruteforce(r: int, n: int, ctx) -> list[float]:
    """Distribution of min(received, r) for a rank-r batch, over lineages."""
    m = ctx.code.batch_size
    period = math.lcm(m, n)
    lineage_count = period // m
    pmf = [0.0] * (r + 1)
    for b in range(lineage_count):
        start, end = b * m, (b + 1) * m
        groups = []
        pos = start
        while pos < end:
            nxt = min(end, (pos // n + 1) * n)
            groups.append(nxt - pos)
            pos = nxt
        for prob, counts in enum_group_counts(
            groups, ctx.f, ctx.d, [True] * len(groups)
        ):
            pmf[min(sum(counts), r)] += prob / lineage_count
    return pmf
