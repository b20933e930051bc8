"""Rayleigh fading / path loss channel model.

Fading magnitudes are Rayleigh with parameter mu, so the squared magnitude
is exponential with mean 2*mu.  Phases are uniform on [0, 2*pi).  Rates are
in bits per channel use with unit noise power, and the path loss law is
d**(-gamma) with unit constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FadingDraw:
    """One fading realization: nonnegative magnitude and uniform phase."""

    magnitude: float
    phase: float


def sample_fading(mu: float, rng: np.random.Generator) -> FadingDraw:
    """Draw one Rayleigh(mu) magnitude and an independent uniform phase."""
    if not (mu > 0 and math.isfinite(mu)):
        raise ValueError(f"mu must be positive and finite, got {mu}")
    h = rng.rayleigh(math.sqrt(mu))
    theta = rng.random() * 2.0 * math.pi
    return FadingDraw(float(h), float(theta))


def sample_fading_block(mu: float, size, rng: np.random.Generator):
    """Vectorized fading draws: returns (magnitudes, phases) arrays."""
    if not (mu > 0 and math.isfinite(mu)):
        raise ValueError(f"mu must be positive and finite, got {mu}")
    h = rng.rayleigh(math.sqrt(mu), size)
    theta = rng.random(size) * 2.0 * math.pi
    return h, theta


def rayleigh_moment(mu: float, p: int) -> float:
    """E{H^p} for H Rayleigh with parameter mu: (2*mu)**(p/2) * Gamma(1 + p/2)."""
    if not (mu > 0 and math.isfinite(mu)):
        raise ValueError(f"mu must be positive and finite, got {mu}")
    if p < 0:
        raise ValueError(f"moment order must be >= 0, got {p}")
    return (2.0 * mu) ** (p / 2.0) * math.gamma(1.0 + p / 2.0)


def link_capacity(p: float, h, d, gamma: float):
    """Single-link rate log2(1 + p * h**2 * d**(-gamma)), unit noise.

    Accepts scalars or arrays for ``h`` and ``d``.
    """
    if p < 0:
        raise ValueError(f"power must be >= 0, got {p}")
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be positive")
    h = np.asarray(h, dtype=float)
    out = np.log2(1.0 + p * h * h * d ** (-gamma))
    return float(out) if out.ndim == 0 else out


def complex_gain(d: float, draw: FadingDraw, gamma: float) -> complex:
    """Complex baseband gain h * d**(-gamma/2) * exp(j*theta)."""
    if d <= 0:
        raise ValueError(f"distance must be positive, got {d}")
    return draw.magnitude * d ** (-gamma / 2.0) * complex(
        math.cos(draw.phase), math.sin(draw.phase)
    )
