"""Independent oracles for the test suite.

Everything here deliberately avoids the package's own evaluation paths:
expectations come from scipy quadrature / ODE integration, closed forms
derived by hand, or brute-force enumeration over raw Python floats.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy import integrate


def phi_quad(fn, params, limit: float = 12.0) -> float:
    """Integral of fn against the 1-D stationary Gaussian via scipy."""
    s2 = params.sigma**2 / (2.0 * params.mu)
    std = math.sqrt(s2)

    def integrand(x):
        return fn(x) * math.exp(-0.5 * x * x / s2) / math.sqrt(2 * math.pi * s2)

    val, _ = integrate.quad(integrand, -limit * std, limit * std, limit=400)
    return val


def semigroup_quad(fn, t, x, params, limit: float = 12.0) -> float:
    """E fn(x e^{-mu t} + relax(t) G) via scipy quadrature."""
    decay = math.exp(-params.mu * t)
    mix = math.sqrt(1.0 - math.exp(-2.0 * params.mu * t))
    return phi_quad(lambda y: fn(x * decay + mix * y), params, limit)


def extinction_ode(t: float, lam: float, p: float) -> float:
    """Extinction-by-t probability by integrating the backward flow."""

    def rhs(_s, q):
        return lam * (p * q**2 - q + (1.0 - p))

    sol = integrate.solve_ivp(rhs, (0.0, t), [0.0], rtol=1e-10, atol=1e-12)
    return float(sol.y[0, -1])


def second_moment_linear(t: float, params) -> float:
    """E (sum of particle positions)^2 by the hand-derived closed form:
    single-ancestor variance term plus the branching pair integral."""
    lam, p, mu = params.lam, params.p, params.mu
    g = (2 * p - 1) * lam
    s2 = params.sigma**2 / (2 * mu)
    x0 = params.x0[0]
    mean2 = x0**2 * math.exp(-2 * mu * t)
    term1 = math.exp(g * t) * (mean2 + s2 * (1.0 - math.exp(-2 * mu * t)))

    def pair(u):
        cov = s2 * math.exp(-2 * mu * u) * (1.0 - math.exp(-2 * mu * (t - u)))
        return math.exp(g * u) * (mean2 + cov)

    integral, _ = integrate.quad(pair, 0.0, t, limit=400)
    return term1 + 2 * p * lam * math.exp(g * t) * integral


def yule_second_moment(t: float, lam: float) -> float:
    return 2.0 * math.exp(2 * lam * t) - math.exp(lam * t)


def brute_v(positions: np.ndarray, fn, n: int) -> float:
    """V-statistic by direct enumeration; fn takes n scalar/vector args."""
    m = len(positions)
    total = 0.0
    for idx in itertools.product(range(m), repeat=n):
        total += fn(*(positions[i] for i in idx))
    return total


def brute_u(positions: np.ndarray, fn, n: int) -> float:
    """U-statistic by direct enumeration over injective tuples."""
    m = len(positions)
    total = 0.0
    for idx in itertools.permutations(range(m), n):
        total += fn(*(positions[i] for i in idx))
    return total


def var_se(x) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    n = len(x)
    m2 = x.var(ddof=1)
    m4 = np.mean((x - x.mean()) ** 4)
    return float(m2), math.sqrt(max(m4 - m2**2 * (n - 3) / (n - 1), 0.0) / n)


def mean_se(x) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(len(x)))
