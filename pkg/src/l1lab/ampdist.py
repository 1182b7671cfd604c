"""Amplitude distributions for the nonzero entries of sparse signals.

Every built-in law lives on x >= 0 and is normalized so that the mean
magnitude is exactly 1, which makes error budgets comparable across
distributions.  Each law carries ``t_order``, the smallest integer t with
f^(t)(0) != 0 (``math.inf`` for the point mass, which has no density).

Built-ins and their closed forms (unit mean):

* ``half_normal``   f(x) = (2/pi) exp(-x^2/pi)
* ``uniform``       f(x) = 1/2 on [0, 2]
* ``power(t)``      f(x) = (t+1) x^t / b^(t+1) on [0, b], b = (t+2)/(t+1)
* ``point_mass``    unit atom at x = 1 (no density)

Instances are immutable and safe to share across threads; sampling takes
an explicit seed and keeps no state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf, erfinv

from .seeding import rng_for

_KINDS = ("half_normal", "uniform", "power", "point_mass")

# scale of the unit-mean half normal: sigma = sqrt(pi/2)
_HALF_NORMAL_SIGMA = math.sqrt(math.pi / 2.0)


@dataclass(frozen=True)
class AmplitudeDistribution:
    """A unit-mean magnitude law for nonzero signal entries.

    Attributes
    ----------
    kind : str
        One of ``half_normal``, ``uniform``, ``power``, ``point_mass``.
    t : int or None
        Exponent of the power law; ``None`` for the other kinds.
    """

    kind: str
    t: int | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "power":
            if self.t is None or int(self.t) != self.t or self.t < 0:
                raise ValueError("power law needs a nonnegative integer t")
            object.__setattr__(self, "t", int(self.t))
        elif self.t is not None:
            raise ValueError(f"{self.kind} takes no exponent")

    # ------------------------------------------------------------------
    @property
    def t_order(self) -> float:
        """Smallest t with f^(t)(0) != 0; inf for the point mass."""
        if self.kind == "point_mass":
            return math.inf
        if self.kind == "power":
            return float(self.t)
        return 0.0

    @property
    def scale(self) -> float:
        """Scale parameter fixed by the unit-mean normalization.

        Half normal: sigma; uniform/power: the upper support endpoint;
        point mass: the atom location.
        """
        if self.kind == "half_normal":
            return _HALF_NORMAL_SIGMA
        if self.kind == "uniform":
            return 2.0
        if self.kind == "power":
            return (self.t + 2.0) / (self.t + 1.0)
        return 1.0

    @property
    def support_end(self) -> float:
        """Right endpoint of the support (inf for the half normal)."""
        return math.inf if self.kind == "half_normal" else self.scale

    # ------------------------------------------------------------------
    def pdf(self, x):
        """Density f(x) for x >= 0.  The point mass has no density."""
        if self.kind == "point_mass":
            raise ValueError("point_mass has an atom, not a density")
        x = _check_nonneg(x)
        if self.kind == "half_normal":
            out = (2.0 / math.pi) * np.exp(-np.square(x) / math.pi)
        elif self.kind == "uniform":
            out = np.where(x <= 2.0, 0.5, 0.0)
        else:
            b = self.scale
            out = np.where(x <= b, (self.t + 1.0) * x ** self.t / b ** (self.t + 1), 0.0)
        return out if np.ndim(x) else float(out)

    def cdf(self, x):
        """Cumulative distribution F(x); F(0) = 0, monotone to 1."""
        x = _check_nonneg(x)
        if self.kind == "half_normal":
            out = erf(x / math.sqrt(math.pi))
        elif self.kind == "point_mass":
            out = np.where(x >= 1.0, 1.0, 0.0)
        elif self.kind == "uniform":
            out = np.clip(x / 2.0, 0.0, 1.0)
        else:
            out = np.clip(x / self.scale, 0.0, 1.0) ** (self.t + 1)
        return out if np.ndim(x) else float(out)

    def quantile(self, p):
        """Generalized inverse F^{-1}(p) for p in [0, 1]."""
        p = np.asarray(p, dtype=float)
        if np.any((p < 0.0) | (p > 1.0)):
            raise ValueError("quantile argument must lie in [0, 1]")
        if self.kind == "half_normal":
            out = math.sqrt(math.pi) * erfinv(p)
        elif self.kind == "uniform":
            out = 2.0 * p
        elif self.kind == "power":
            out = self.scale * p ** (1.0 / (self.t + 1))
        else:
            out = np.where(p > 0.0, 1.0, 0.0)
        return out if np.ndim(p) else float(out)

    def partial_first_moment(self, y):
        """Truncated first moment: integral of x f(x) over [0, y].

        Nondecreasing in y with limit 1 (the unit mean).  For the point
        mass this is the Stieltjes integral, a unit step at y = 1.
        """
        y = _check_nonneg(y)
        if self.kind == "half_normal":
            out = 1.0 - np.exp(-np.square(y) / math.pi)
        elif self.kind == "uniform":
            out = np.square(np.minimum(y, 2.0)) / 4.0
        elif self.kind == "power":
            b = self.scale
            out = (self.t + 1.0) / (self.t + 2.0) * np.minimum(y, b) ** (self.t + 2) / b ** (self.t + 1)
        else:
            out = np.where(y >= 1.0, 1.0, 0.0)
        return out if np.ndim(y) else float(out)

    def sample(self, count: int, seed: int) -> np.ndarray:
        """Draw ``count`` i.i.d. magnitudes, deterministic per seed."""
        if count < 0:
            raise ValueError("count must be >= 0")
        rng = rng_for(seed)
        u = rng.random(count)
        # inverse-CDF sampling; redraw the (measure-zero) exact zeros so
        # magnitudes stay strictly positive
        while np.any(u == 0.0):
            u[u == 0.0] = rng.random(int(np.sum(u == 0.0)))
        if self.kind == "point_mass":
            return np.ones(count)
        return np.asarray(self.quantile(u), dtype=float)

    # ------------------------------------------------------------------
    def spec_string(self) -> str:
        return f"power:{self.t}" if self.kind == "power" else self.kind

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.spec_string()


def _check_nonneg(x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("argument must be nonnegative")
    return x


# ----------------------------------------------------------------------
# constructors and parsing


def half_normal() -> AmplitudeDistribution:
    return AmplitudeDistribution("half_normal")


def uniform() -> AmplitudeDistribution:
    return AmplitudeDistribution("uniform")


def power(t: int) -> AmplitudeDistribution:
    return AmplitudeDistribution("power", t)


def point_mass() -> AmplitudeDistribution:
    return AmplitudeDistribution("point_mass")


def parse_distribution(spec: str) -> AmplitudeDistribution:
    """Parse a CLI-style spec: ``half_normal``, ``uniform``, ``power:2``,
    ``point_mass``."""
    spec = spec.strip()
    if spec.startswith("power"):
        parts = spec.split(":")
        if len(parts) != 2:
            raise ValueError("power law spec must look like 'power:2'")
        try:
            t = int(parts[1])
        except ValueError as e:
            raise ValueError(f"bad power exponent {parts[1]!r}") from e
        return power(t)
    if spec in ("half_normal", "uniform", "point_mass"):
        return AmplitudeDistribution(spec)
    raise ValueError(f"unknown distribution spec {spec!r}")


# ----------------------------------------------------------------------
# functional aliases matching the operation names used elsewhere


def pdf_at(dist: AmplitudeDistribution, x):
    return dist.pdf(x)


def cdf_at(dist: AmplitudeDistribution, x):
    return dist.cdf(x)


def quantile(dist: AmplitudeDistribution, p):
    return dist.quantile(p)


def partial_first_moment(dist: AmplitudeDistribution, y):
    return dist.partial_first_moment(y)


def sample_amplitudes(dist: AmplitudeDistribution, count: int, seed: int) -> np.ndarray:
    return dist.sample(count, seed)


BUILTIN_DISTRIBUTIONS = ("half_normal", "uniform", "power:1", "power:2", "point_mass")
