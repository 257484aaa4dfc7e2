"""Spectrally negative Levy process families.

Two families are built in, both with closed-form Laplace exponent psi and
derivative: Brownian motion with drift, and the Cramer-Lundberg (compound
Poisson with exponential claims) model, optionally with a Gaussian part.
The right-continuous inverse Phi(p) = inf{c >= 0 : psi(c) > p} is computed
by bracketed bisection refined with Newton steps.

Instances are immutable after construction and safe to share across threads;
all operations are pure functions of their inputs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

# absolute tolerance for the inverse Phi
PHI_TOL = 1e-12


def _check_nonneg(theta, what="theta"):
    arr = np.asarray(theta)
    if not np.iscomplexobj(arr) and np.any(arr < 0):
        raise DomainError(f"{what} must be >= 0")


def _hybrid_root(f, fprime, lo, hi, tol=PHI_TOL):
    """Root of increasing f on [lo, hi] with f(lo) <= 0 <= f(hi)."""
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if f(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-6 * (1.0 + abs(lo)):
            break
    x = 0.5 * (lo + hi)
    for _ in range(60):
        fx = f(x)
        d = fprime(x)
        if d <= 0.0:
            break
        step = fx / d
        x_new = x - step
        if x_new < lo or x_new > hi:
            # fall back to bisection when Newton leaves the bracket
            if fx > 0.0:
                hi = x
            else:
                lo = x
            x_new = 0.5 * (lo + hi)
        if abs(x_new - x) <= tol:
            return x_new
        x = x_new
    return x


class LevyModel:
    """Interface shared by the process families."""

    def psi(self, theta):
        raise NotImplementedError

    def psi_prime(self, theta):
        raise NotImplementedError

    def psi_prime0(self) -> float:
        """Right derivative of psi at 0 (a limit value, possibly negative)."""
        raise NotImplementedError

    def psi_delta(self, base, delta):
        """psi(base + delta) - psi(base), computed without cancellation."""
        raise NotImplementedError

    def phi0(self) -> float:
        """Largest zero of psi."""
        if self.psi_prime0() >= 0.0:
            return 0.0
        # psi dips below zero; find its minimizer, then the zero above it.
        hi = 1.0
        while self.psi_prime(hi) <= 0.0:
            hi *= 2.0
        theta_star = _hybrid_root(self.psi_prime, self._psi_second, 0.0, hi)
        hi = max(1.0, 2.0 * theta_star)
        while self.psi(hi) <= 0.0:
            hi *= 2.0
        return _hybrid_root(self.psi, self.psi_prime, theta_star, hi)

    def phi(self, p: float) -> float:
        """Right-continuous inverse of psi: psi(phi(p)) = p, phi(p) >= phi0."""
        if p < 0:
            raise DomainError("phi requires p >= 0")
        lo = self.phi0()
        if p == 0.0:
            return lo
        hi = max(1.0, lo + 1.0)
        while self.psi(hi) <= p:
            hi *= 2.0
        return _hybrid_root(lambda t: self.psi(t) - p, self.psi_prime, lo, hi)

    def psi_prime_at_phi(self, q: float) -> float:
        """psi'(Phi(q)+); zero only in the critical case q = Phi(0) = psi'(0+) = 0."""
        pq = self.phi(q)
        if pq > 0.0:
            return self.psi_prime(pq)
        return max(self.psi_prime0(), 0.0)

    def _psi_second(self, theta):
        raise NotImplementedError


@dataclass(frozen=True)
class BrownianDrift(LevyModel):
    """X_t = mu*t + sqrt(sigma2)*B_t; psi(theta) = mu*theta + sigma2*theta^2/2."""

    mu: float
    sigma2: float

    def __post_init__(self):
        if self.sigma2 <= 0:
            raise DomainError("BrownianDrift requires sigma2 > 0")

    def psi(self, theta):
        _check_nonneg(theta)
        return self.mu * theta + 0.5 * self.sigma2 * theta * theta

    def psi_prime(self, theta):
        arr = np.asarray(theta)
        if not np.iscomplexobj(arr) and np.any(arr <= 0):
            raise DomainError("psi_prime requires theta > 0")
        return self.mu + self.sigma2 * theta

    def psi_prime0(self):
        return self.mu

    def psi_delta(self, base, delta):
        return self.mu * delta + 0.5 * self.sigma2 * (2.0 * base + delta) * delta

    def _psi_second(self, theta):
        return self.sigma2


@dataclass(frozen=True)
class CramerLundberg(LevyModel):
    """Premium drift c, claims at rate lam with Exp(eta) sizes, optional Gaussian part.

    psi(theta) = c*theta + sigma2*theta^2/2 + lam*(eta/(eta+theta) - 1).
    """

    c: float
    lam: float
    eta: float
    sigma2: float = 0.0

    def __post_init__(self):
        if self.c <= 0:
            raise DomainError("CramerLundberg requires premium c > 0")
        if self.lam < 0 or self.eta <= 0 or self.sigma2 < 0:
            raise DomainError("CramerLundberg requires lam >= 0, eta > 0, sigma2 >= 0")
        if self.sigma2 == 0.0 and self.lam == 0.0:
            raise DomainError("paths must be non-monotone: lam > 0 when sigma2 = 0")

    def psi(self, theta):
        _check_nonneg(theta)
        return (self.c * theta + 0.5 * self.sigma2 * theta * theta
                + self.lam * (self.eta / (self.eta + theta) - 1.0))

    def psi_prime(self, theta):
        arr = np.asarray(theta)
        if not np.iscomplexobj(arr) and np.any(arr <= 0):
            raise DomainError("psi_prime requires theta > 0")
        return self.c + self.sigma2 * theta - self.lam * self.eta / (self.eta + theta) ** 2

    def psi_prime0(self):
        return self.c - self.lam / self.eta

    def psi_delta(self, base, delta):
        jump = -self.lam * self.eta * delta / ((self.eta + base + delta) * (self.eta + base))
        return self.c * delta + 0.5 * self.sigma2 * (2.0 * base + delta) * delta + jump

    def _psi_second(self, theta):
        return self.sigma2 + 2.0 * self.lam * self.eta / (self.eta + theta) ** 3
