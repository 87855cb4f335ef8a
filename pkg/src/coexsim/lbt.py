"""Duty-cycled listen-before-talk LTE-U nodes.

Each node shares the Wi-Fi slot clock: it senses for a CCA period, draws
a uniform backoff from a fixed window (no exponential growth), freezes on
busy slots, and fires a fixed-length burst when its counter hits zero.
After every burst, collided or clean, it defers for a duty-off period
sized so its long-run airtime share approaches 1/(M+N).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .radio import ChannelParams, LinkBudget, fading_gains, lte_rate

SUBFRAME_US = 1000
BURST_HEADER_US = 32
BURST_ACK_US = 32


@dataclass(frozen=True)
class LbtParams:
    cca_us: int = 50               # sensing period before backoff (= DIFS)
    contention_window: int = 16    # fixed; draw is uniform over [0, cw-1]
    burst_us: int = 8064
    duty_off_factor: int | None = None  # defaults to M+N-1 at scenario build

    def __post_init__(self):
        if self.contention_window < 1:
            raise ValueError("contention_window must be >= 1")
        if self.burst_us < 1:
            raise ValueError("burst_us must be positive")

    def duty_off_us(self, m_lte: int, n_wifi: int) -> int:
        factor = self.duty_off_factor
        if factor is None:
            factor = max(m_lte + n_wifi - 1, 0)
        return self.burst_us * factor

    @property
    def data_subframes(self) -> int:
        return max((self.burst_us - BURST_HEADER_US - BURST_ACK_US) // SUBFRAME_US, 0)


class LbtNode:
    """Contention state for one LTE-U node."""

    __slots__ = ("node_id", "params", "link", "rng", "counter",
                 "wake_at_us", "contending", "burst_count", "collision_count")

    def __init__(self, node_id: str, params: LbtParams, link: LinkBudget,
                 rng: np.random.Generator):
        self.node_id = node_id
        self.params = params
        self.link = link
        self.rng = rng
        self.counter = 0
        self.wake_at_us = 0          # eligible to start sensing at this time
        self.contending = False
        self.burst_count = 0
        self.collision_count = 0

    def draw_backoff(self) -> None:
        self.counter = int(self.rng.integers(0, self.params.contention_window))

    def start_duty_off(self, burst_end_us: int, m_lte: int, n_wifi: int) -> None:
        self.contending = False
        self.wake_at_us = burst_end_us + self.params.duty_off_us(m_lte, n_wifi)


def burst_transmit(node: LbtNode, channel: ChannelParams) -> float:
    """Delivered bits of one clean burst: per-subframe fading, 1 ms each."""
    n_sub = node.params.data_subframes
    gains = fading_gains(node.rng, n_sub, channel)
    return sum(lte_rate(node.link.mean_snr * float(g), channel) * (SUBFRAME_US * 1e-6)
               for g in gains)
