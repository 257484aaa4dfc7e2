"""Explicit solutions for special killing rates.

Three families admit (semi-)closed forms for the passage function H:

* exponential rates gamma*e^{alpha x}: a power series in gamma*e^{alpha x}
  whose coefficients are reciprocal products of psi(Phi(q) + l*alpha) - q;
* rates gamma/|x| on a left half-line (branching-process time change): an
  integral over the Laplace variable z of e^{xz} against a density built
  from 1/(psi(z) - q);
* rates gamma/|x|^n, n >= 2, on a left half-line: a series of iterated
  integrals, evaluated here by nested generalized Gauss-Laguerre quadrature.

All objects tabulate once and are immutable afterwards; evaluation is pure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, roots_genlaguerre

from .errors import (AccuracyError, CostGuardError, DomainError,
                     GridRangeError, UnsupportedCaseError)
from .levy import LevyModel

SERIES_RELTOL = 1e-16
SERIES_CAP = 200


# ---------------------------------------------------------------------------
# exponential killing: power series
# ---------------------------------------------------------------------------

class PatieSeries:
    """Power-series solution for omega = gamma * e^{alpha x}.

    H(x) = e^{Phi(q) x} * S(x) / S(0) with
    S(x) = sum_k a_k (gamma e^{alpha x})^k,
    a_k = 1 / prod_{l=1..k} (psi(Phi(q) + l alpha) - q),
    and the tail constant is L = 1 / S(0).
    """

    def __init__(self, model: LevyModel, q: float, alpha: float, gamma: float):
        if alpha <= 0:
            raise DomainError("alpha must be > 0")
        if gamma < 0:
            raise DomainError("gamma must be >= 0")
        if q < 0:
            raise DomainError("q must be >= 0")
        self.model = model
        self.q = float(q)
        self.alpha = float(alpha)
        self.gamma = float(gamma)
        self.phi_q = model.phi(q)
        self._denoms = []   # psi(Phi(q) + l*alpha) - q for l = 1, 2, ...
        self._coeffs = [1.0]
        s0 = self._series_scalar(self.gamma)
        self.norm = s0
        self.L = 1.0 / s0
        self.K = len(self._coeffs) - 1

    # a_k, extended on demand
    def coeff(self, k: int) -> float:
        while len(self._coeffs) <= k:
            j = len(self._coeffs)
            if len(self._denoms) < j:
                self._denoms.append(
                    self.model.psi_delta(self.phi_q, j * self.alpha))
            self._coeffs.append(self._coeffs[-1] / self._denoms[j - 1])
        return self._coeffs[k]

    def _series_scalar(self, z: float) -> float:
        acc = 0.0
        term = 1.0
        for k in range(SERIES_CAP + 1):
            acc += term
            d = self._denom(k + 1)
            term = term * z / d
            if not math.isfinite(term):
                raise GridRangeError("series overflow; reduce gamma*e^{alpha x}")
            if d > max(z, 1.0) and term < SERIES_RELTOL * acc:
                self.coeff(k + 1)  # keep coefficients in step with denominators
                return acc
        raise AccuracyError(f"series not converged within {SERIES_CAP} terms")

    def _denom(self, l: int) -> float:
        while len(self._denoms) < l:
            j = len(self._denoms) + 1
            self._denoms.append(self.model.psi_delta(self.phi_q, j * self.alpha))
        return self._denoms[l - 1]

    def series(self, x):
        """S(x) = sum_k a_k (gamma e^{alpha x})^k, vectorized."""
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        z = self.gamma * np.exp(self.alpha * xa)
        acc = np.zeros_like(z)
        term = np.ones_like(z)
        zmax = float(np.max(z)) if z.size else 0.0
        for k in range(SERIES_CAP + 1):
            acc += term
            d = self._denom(k + 1)
            term = term * z / d
            if not np.all(np.isfinite(term)):
                cap = (700.0 * self.alpha - math.log(max(self.gamma, 1e-300))) \
                    / self.alpha if self.gamma > 0 else math.inf
                raise GridRangeError(
                    f"series overflow at x = {float(xa[np.argmax(~np.isfinite(term))]):g}; "
                    f"keep gamma*e^(alpha x) moderate (x below ~{cap:g})")
            if d > max(zmax, 1.0) and float(np.max(term / np.maximum(acc, 1e-300))) \
                    < SERIES_RELTOL:
                break
        else:
            raise AccuracyError(f"series not converged within {SERIES_CAP} terms")
        return acc if np.ndim(x) else float(acc[0])

    def tilted_unnormalized(self, x):
        """e^{-Phi(q) x} H(x) / L = S(x); the natural boundary object."""
        return self.series(x)

    def value(self, x):
        """H(x), normalized to H(0) = 1."""
        s = self.series(x)
        return np.exp(self.phi_q * np.asarray(x, dtype=float)) * s * self.L


def patie_H(series: PatieSeries, x):
    """H(x) for exponential killing; series built once, evaluated anywhere."""
    return series.value(x)


# ---------------------------------------------------------------------------
# csbp-type killing gamma/|x|: Laplace-variable integral
# ---------------------------------------------------------------------------

@dataclass
class CsbpIntegral:
    """H (up to a constant) for omega = gamma/|x| on (-inf, -c].

    Represents H(x) = int_{Phi(q)}^inf dz/(psi(z)-q) *
    exp(x z + int_theta^z gamma/(psi(u)-q) du) through nodes in
    u = log(z - Phi(q)); theta > Phi(q) only shifts the overall constant.
    Valid for x <= -c; ratios are the invariant object.
    """

    model: LevyModel
    q: float
    gamma: float
    c: float
    theta: float
    du_fine: float = 1e-3
    _nodes_s: np.ndarray = field(init=False, repr=False, default=None)
    _log_meas: np.ndarray = field(init=False, repr=False, default=None)
    _wts: np.ndarray = field(init=False, repr=False, default=None)

    def __post_init__(self):
        if self.gamma <= 0 or self.c <= 0:
            raise DomainError("csbp requires gamma > 0 and c > 0")
        self.phi_q = self.model.phi(self.q)
        if self.theta <= self.phi_q:
            raise DomainError("theta must exceed Phi(q)")
        self.dpsi = self.model.psi_prime_at_phi(self.q)
        if self.dpsi <= 0.0:
            raise UnsupportedCaseError(
                "critical case psi'(Phi(q)+) = 0 not supported for csbp rates")
        self.p = self.gamma / self.dpsi
        u_min = -(40.0 / self.p + 20.0)
        u_min = max(u_min, -600.0)
        ref = None
        for _ in range(8):
            self._build(u_min)
            probe = float(self.tilted(np.array([-self.c]))[0])
            if ref is not None and abs(probe - ref) <= 1e-12 * abs(ref):
                break
            ref = probe
            u_min -= 10.0
            if u_min < -640.0:
                raise AccuracyError("csbp lower-cutoff study did not converge")

    def _build(self, u_min):
        # u-grid: coarse far left (integrand ~ e^{p u}, nearly log-linear),
        # fine around the mass of the integrand and up to the z cutoff.
        u_split = -12.0
        z_top = self.phi_q + 60.0 / self.c + 10.0
        u_max = math.log(z_top - self.phi_q)
        coarse = np.arange(u_min, u_split, 0.05)
        fine = np.arange(u_split, u_max, self.du_fine)
        u = np.concatenate([coarse, fine, [u_max]])
        s = np.exp(u)
        z_delta = s  # z - Phi(q)
        psi_minus_q = np.asarray(self.model.psi_delta(self.phi_q, z_delta), dtype=float)
        dIdu = self.gamma * s / psi_minus_q
        inner = np.concatenate([[0.0], np.cumsum(
            0.5 * (dIdu[1:] + dIdu[:-1]) * np.diff(u))])
        u_theta = math.log(self.theta - self.phi_q)
        inner_theta = float(np.interp(u_theta, u, inner))
        # log of the measure against e^{x z}: exp(inner)/(psi-q) * dz/du
        self._log_meas = inner - inner_theta - np.log(psi_minus_q) + u
        self._nodes_s = s
        w = np.empty_like(u)
        du = np.diff(u)
        w[0] = 0.5 * du[0]
        w[-1] = 0.5 * du[-1]
        w[1:-1] = 0.5 * (du[1:] + du[:-1])
        self._wts = w
        # amplitude of the deep-left asymptote: inner - p*u -> const
        self._asym_log_k = float(inner[0] - inner_theta - self.p * u[0]
                                 - math.log(self.dpsi))

    def tilted(self, x):
        """e^{-Phi(q) x} H(x) for x <= -c (vectorized, chunked)."""
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(xa > -self.c + 1e-12):
            raise DomainError("csbp form is valid for x <= -c only")
        out = np.empty_like(xa)
        for lo in range(0, xa.size, 256):
            blk = xa[lo:lo + 256, None]
            expo = blk * self._nodes_s[None, :] + self._log_meas[None, :]
            out[lo:lo + 256] = np.exp(expo) @ self._wts
        return out if np.ndim(x) else float(out[0])

    def raw(self, x):
        """H(x) up to the overall multiplicative constant."""
        xa = np.asarray(x, dtype=float)
        return np.exp(self.phi_q * xa) * self.tilted(x)

    def ratio(self, x1: float, x2: float) -> float:
        """H(x1)/H(x2); independent of theta and of the overall constant."""
        t = self.tilted(np.array([x1, x2], dtype=float))
        return float(t[0] / t[1] * math.exp(self.phi_q * (x1 - x2)))

    def tilted_asymptote(self, x):
        """Deep-left model K*Gamma(p)/|x|^p for e^{-Phi(q) x} H(x)."""
        xa = np.asarray(x, dtype=float)
        return math.exp(self._asym_log_k + gammaln(self.p)) / np.abs(xa) ** self.p


def csbp_H(model: LevyModel, q: float, gamma: float, c: float, theta: float, x):
    """H(x) for omega = gamma/|x| on (-inf, -c], normalized so H(-c) = 1."""
    integral = CsbpIntegral(model, q, gamma, c, theta)
    ref = integral.raw(np.array([-c]))[0]
    return integral.raw(x) / ref


# ---------------------------------------------------------------------------
# power tails gamma/|x|^n: iterated integrals
# ---------------------------------------------------------------------------

def powertail_terms(model: LevyModel, q: float, gamma: float, n: int, c: float,
                    depth: int, x, return_error=False):
    """H (up to a constant) for omega = gamma/|x|^n on (-inf, -c].

    Evaluates e^{Phi(q) x} [1 + sum_{d=1}^{depth} (d-fold nested integral)],
    each nest being int_0^inf dy y^{n-1} e^{x y} /
    ((n-1)! (psi(Phi(q) + accumulated + y) - q)). Nested quadrature uses
    generalized Gauss-Laguerre nodes, validated by doubling the node count
    (per-level relative tolerance 1e-10/depth). The magnitude of the last
    term is returned as an error estimate when return_error is set.
    """
    if n < 2 or int(n) != n:
        raise DomainError("power tail requires integer n >= 2")
    if c <= 0 or gamma < 0 or q < 0:
        raise DomainError("require c > 0, gamma >= 0, q >= 0")
    if depth < 0:
        raise DomainError("depth must be >= 0")
    if depth > 6:
        raise CostGuardError("depth > 6 exceeds the nested-quadrature cost guard")
    phi_q = model.phi(q)
    if q == 0.0 and phi_q == 0.0 and model.psi_prime0() == 0.0:
        raise UnsupportedCaseError(
            "critical case q = Phi(0) = psi'(0+) = 0 not supported for power tails")
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa > -c + 1e-12):
        raise DomainError("power-tail form is valid for x <= -c only")

    vals = np.empty_like(xa)
    errs = np.empty_like(xa)
    for i, xi in enumerate(xa):
        vals[i], errs[i] = _powertail_single(model, q, phi_q, gamma, n, depth, float(xi))
    fac = np.exp(phi_q * xa)
    vals, errs = fac * vals, fac * errs
    if not np.ndim(x):
        vals, errs = float(vals[0]), float(errs[0])
    return (vals, errs) if return_error else vals


def _powertail_single(model, q, phi_q, gamma, n, depth, x):
    if gamma == 0.0 or depth == 0:
        return 1.0, 0.0
    tol = 1e-10 / depth
    prev = None
    for panels in (24, 48, 96):
        total, last = _powertail_nested(model, phi_q, gamma, n, depth, x, panels)
        if prev is not None and abs(total - prev) <= tol * abs(total):
            return total, last
        prev = total
    raise AccuracyError("nested quadrature did not converge at 96 panels")


def _powertail_nodes(x, panels, per_panel=16):
    # composite Gauss-Legendre on geometric panels of [0, 60/|x|]; the
    # integrand behaves like y^{n-2} near 0 and decays like e^{x y}
    y_top = 60.0 / abs(x)
    edges = np.concatenate([[0.0], y_top * np.geomspace(1e-5, 1.0, panels)])
    gx, gw = np.polynomial.legendre.leggauss(per_panel)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * np.diff(edges)
    ys = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
    ws = (half[:, None] * gw[None, :]).ravel()
    return ys, ws


def _powertail_nested(model, phi_q, gamma, n, depth, x, panels):
    ys, ws = _powertail_nodes(x, panels)
    base = ws * ys ** (n - 1) * np.exp(x * ys)
    pref = gamma / math.gamma(n)
    # G_d has an s*log(s)-type cusp at s = 0; tabulate on a log-dense grid
    # that does not depend on the panel count
    s_max = depth * 60.0 / abs(x)
    sgrid = np.concatenate([[0.0], s_max * np.geomspace(1e-9, 1.0, 4500)])
    lev = None                           # G_d tabulated on sgrid
    g_at_zero = []
    for d in range(1, depth + 1):
        shifted = sgrid[:, None] + ys[None, :]
        denom = np.asarray(model.psi_delta(phi_q, shifted), dtype=float)
        inner = np.ones_like(shifted) if lev is None else \
            np.interp(shifted, sgrid, lev)
        gz = pref * np.sum(base[None, :] / denom * inner, axis=1)
        lev = gz
        g_at_zero.append(float(gz[0]))
    total = 1.0 + sum(g_at_zero)
    return total, abs(g_at_zero[-1])
