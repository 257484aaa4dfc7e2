"""Killing-rate functions with a declared left-tail class.

An OmegaSpec is a nonnegative, locally bounded rate function omega that
equals a declared closed form on (-infty, x_tail] and an arbitrary evaluable
body on [x_tail, infty). Solvers dispatch on the tail class; the body is
only ever sampled on a finite grid.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError, DomainError


@dataclass(frozen=True)
class ZeroTail:
    """omega vanishes on the tail."""

    def value(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class ConstantTail:
    """omega = a > 0 on the tail."""

    a: float

    def __post_init__(self):
        if self.a <= 0:
            raise DomainError("ConstantTail requires a > 0")

    def value(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.a)


@dataclass(frozen=True)
class ExponentialTail:
    """omega = gamma * e^{alpha x} on the tail."""

    gamma: float
    alpha: float

    def __post_init__(self):
        if self.gamma < 0 or self.alpha <= 0:
            raise DomainError("ExponentialTail requires gamma >= 0, alpha > 0")

    def value(self, x):
        return self.gamma * np.exp(self.alpha * np.asarray(x, dtype=float))


@dataclass(frozen=True)
class PowerExpTail:
    """omega = gamma * |x|^degree * e^{alpha x} on the tail."""

    gamma: float
    alpha: float
    degree: int

    def __post_init__(self):
        if self.gamma < 0 or self.alpha <= 0 or self.degree < 0:
            raise DomainError("PowerExpTail requires gamma >= 0, alpha > 0, degree >= 0")

    def value(self, x):
        xa = np.asarray(x, dtype=float)
        return self.gamma * np.abs(xa) ** self.degree * np.exp(self.alpha * xa)


@dataclass(frozen=True)
class CsbpTail:
    """omega = gamma / |x| on the tail; requires x_tail <= -c < 0."""

    gamma: float
    c: float

    def __post_init__(self):
        if self.gamma <= 0 or self.c <= 0:
            raise DomainError("CsbpTail requires gamma > 0 and c > 0")

    def value(self, x):
        return self.gamma / np.abs(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class PowerTail:
    """omega = gamma / |x|^n on the tail, n >= 2; requires x_tail <= -c < 0."""

    gamma: float
    n: int
    c: float

    def __post_init__(self):
        if self.gamma < 0 or self.n < 2 or self.c <= 0:
            raise DomainError("PowerTail requires gamma >= 0, integer n >= 2, c > 0")

    def value(self, x):
        return self.gamma / np.abs(np.asarray(x, dtype=float)) ** self.n


TAIL_CLASSES = (ZeroTail, ConstantTail, ExponentialTail, PowerExpTail, CsbpTail, PowerTail)

# Tail classes whose split at x_tail may be discontinuous by design: a zero
# tail models rates that switch on at x_tail, so only the tail side is pinned.
_AGREEMENT_EXEMPT = (ZeroTail,)

AGREEMENT_ATOL = 1e-9


@dataclass(frozen=True)
class OmegaSpec:
    """Killing rate: declared tail form on (-inf, x_tail], body above.

    The body must be vectorized (accept and return numpy arrays). Values are
    checked to be finite and >= 0 wherever solvers sample them.
    """

    body: Callable
    tail: object
    x_tail: float

    def __post_init__(self):
        if not isinstance(self.tail, TAIL_CLASSES):
            raise ConfigError(f"unknown tail class {type(self.tail).__name__}")
        if isinstance(self.tail, (CsbpTail, PowerTail)) and self.x_tail > -self.tail.c:
            raise ConfigError("csbp/power tails require x_tail <= -c")
        if not isinstance(self.tail, _AGREEMENT_EXEMPT):
            b = float(np.asarray(self.body(np.array([self.x_tail])))[0])
            t = float(np.asarray(self.tail.value(np.array([self.x_tail])))[0])
            if abs(b - t) > AGREEMENT_ATOL:
                raise ConfigError(
                    f"body({self.x_tail:g}) = {b:g} disagrees with tail form {t:g}")

    def __call__(self, x):
        xa = np.asarray(x, dtype=float)
        out = np.empty_like(xa)
        below = xa <= self.x_tail
        if np.any(below):
            out[below] = self.tail.value(xa[below])
        if np.any(~below):
            out[~below] = np.asarray(self.body(xa[~below]), dtype=float)
        return float(out) if np.isscalar(x) else out

    def validate_on(self, xs):
        """Sampled check: finite and nonnegative on the given grid."""
        vals = self(np.asarray(xs, dtype=float))
        if not np.all(np.isfinite(vals)):
            raise DomainError("omega must be finite on the grid")
        if np.any(vals < 0):
            raise DomainError("omega must be nonnegative")
        return vals

    # -- convenience constructors ------------------------------------------

    @staticmethod
    def zero():
        return OmegaSpec(body=lambda x: np.zeros_like(x), tail=ZeroTail(), x_tail=0.0)

    @staticmethod
    def constant(a: float, x_tail: float = 0.0):
        return OmegaSpec(body=lambda x: np.full_like(x, a), tail=ConstantTail(a),
                         x_tail=x_tail)

    @staticmethod
    def exponential(gamma: float, alpha: float, x_tail: float = 0.0):
        """omega = gamma * e^{alpha x} everywhere."""
        return OmegaSpec(body=lambda x: gamma * np.exp(alpha * x),
                         tail=ExponentialTail(gamma, alpha), x_tail=x_tail)
