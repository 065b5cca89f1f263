"""Asymptotic variances and samplers for the three limit laws.

Slow regime: the normalized U-statistic of a canonical tensor-sum kernel
converges to a signed sum over partial pairings (Feynman diagrams) of
products of stationary pair integrals and a centered Gaussian family whose
covariance adds the stationary product integral and an exponentially tilted
semigroup time integral.

Critical regime: the limit tensorizes into a product of Gaussians indexed
by the factors, with covariance built from pairings against the gradient
of the stationary density.

Fast regime: the limit is a polynomial in the position-sum martingale
limit, with coefficients given by stationary means of kernel derivatives;
the martingale limit is approximated by its value at a long finite horizon.

All limit laws are sampled through these finite Gaussian-polynomial
representations, which are exact in distribution for tensor-sum kernels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .kernels import Factor, Kernel, ProductFunc, factor_1d, is_canonical
from .model import ModelParams, Regime, classify, derive
from .ou import (
    Func1D,
    QuadratureRule,
    default_rule,
    evolve_poly,
    poly_derivative,
    poly_mul,
    poly_phi_mean,
    semigroup_apply,
)
from .simulator import Caps, h_value, simulate


class RegimeError(ValueError):
    """Operation invoked outside its branching regime."""


class CenteringError(ValueError):
    """A factor that must integrate to zero against the stationary law
    does not."""


class NonPolynomialError(ValueError):
    """Operation requires polynomial (differentiable) factors."""


class DivergenceError(RuntimeError):
    """Time-integral tail failed its decay check."""


# ---------------------------------------------------------------------------
# Feynman diagrams


@dataclass(frozen=True)
class FeynmanDiagram:
    """Partial pairing of {1..n}: disjoint edges plus unpaired labels."""

    n: int
    edges: tuple[tuple[int, int], ...]
    unpaired: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.edges)


def enumerate_diagrams(n: int, cap: int = 8) -> list[FeynmanDiagram]:
    """All partial pairings of {1..n}; the count is the involution number."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > cap:
        raise ValueError(f"n={n} above the diagram cap {cap}")

    def rec(labels: tuple[int, ...]):
        if not labels:
            yield ()
            return
        head, rest = labels[0], labels[1:]
        # head unpaired
        for tail in rec(rest):
            yield tail
        # head paired with each later label
        for j, other in enumerate(rest):
            remaining = rest[:j] + rest[j + 1:]
            for tail in rec(remaining):
                yield ((head, other),) + tail

    labels = tuple(range(1, n + 1))
    out = []
    for edges in rec(labels):
        used = {i for e in edges for i in e}
        unpaired = tuple(i for i in labels if i not in used)
        out.append(FeynmanDiagram(n=n, edges=tuple(sorted(edges)),
                                  unpaired=unpaired))
    return out


def involution_number(n: int) -> int:
    a, b = 1, 1  # I(0), I(1)
    if n == 0:
        return 1
    for k in range(2, n + 1):
        a, b = b, b + (k - 1) * a
    return b


# ---------------------------------------------------------------------------
# factor-level integrals


def _as_factor(f) -> Factor:
    if isinstance(f, Factor):
        return f
    if isinstance(f, ProductFunc):
        return Factor.from_product(f)
    if isinstance(f, Func1D):
        return factor_1d(f)
    raise TypeError(f"cannot interpret {type(f)!r} as a kernel slot")


def factor_pair_phi(F: Factor, G: Factor, params: ModelParams,
                    rule: QuadratureRule | None = None) -> float:
    """Stationary integral of the product of two slot functions."""
    rule = rule or default_rule(params)
    total = 0.0
    for ca, pa in F.atoms:
        for cb, pb in G.atoms:
            total += ca * cb * pa.times(pb).phi_mean(params, rule)
    return total


def _evolved_pair_phi(a: Func1D, b: Func1D, s: float, params: ModelParams,
                      rule: QuadratureRule) -> float:
    """Stationary integral of (T_s a)(T_s b) for 1-D functions."""
    if a.is_polynomial and b.is_polynomial:
        pa = evolve_poly(a.coeffs, s, params)
        pb = evolve_poly(b.coeffs, s, params)
        return poly_phi_mean(poly_mul(pa, pb), params)
    va = semigroup_apply(a, s, rule.nodes, params, rule)
    vb = semigroup_apply(b, s, rule.nodes, params, rule)
    return float(np.dot(rule.weights, va * vb))


def _evolved_factor_pair_phi(F: Factor, G: Factor, s: float,
                             params: ModelParams, rule: QuadratureRule) -> float:
    total = 0.0
    for ca, pa in F.atoms:
        for cb, pb in G.atoms:
            prod = ca * cb
            for c in range(pa.dim):
                prod *= _evolved_pair_phi(pa.funcs[c], pb.funcs[c], s, params, rule)
            total += prod
    return total


@lru_cache(maxsize=None)
def _leggauss01(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def slow_pair_integral(
    F: Factor,
    G: Factor,
    params: ModelParams,
    rule: QuadratureRule | None = None,
    time_nodes: int = 128,
    tail_tol: float = 1e-8,
) -> float:
    """Time integral 2 lam p int_0^inf e^{growth s} <phi, (T_s F)(T_s G)> ds
    for stationary-centered slot functions.

    The half-line maps to (0, 1] through u = exp(-kappa s) with kappa set
    to half the known decay rate of the integrand, then a Gauss-Legendre
    rule applies; a tail check guards against undeclared growth.
    """
    rule = rule or default_rule(params)
    consts = derive(params)
    growth = consts.growth_rate
    kappa = params.mu - 0.5 * growth
    if kappa <= 0:
        raise RegimeError("time integral diverges unless growth < 2 mu")
    for fac in (F, G):
        if abs(fac.phi_mean(params, rule)) > 1e-9:
            raise CenteringError("slot functions must be stationary-centered")

    def integrand(s: float) -> float:
        return math.exp(growth * s) * _evolved_factor_pair_phi(F, G, s, params, rule)

    u, w = _leggauss01(time_nodes)
    s_vals = -np.log(u) / kappa
    total = 0.0
    for ui, wi, si in zip(u, w, s_vals):
        total += wi * integrand(float(si)) / (kappa * ui)
    s_tail = float(s_vals.max())
    tail = abs(integrand(s_tail))
    if tail > tail_tol * max(abs(total), 1.0):
        raise DivergenceError(
            f"integrand at s={s_tail:.3g} is {tail:.3g}; decay check failed"
        )
    return 2.0 * params.lam * params.p * total


def grad_density_pairing(F: Factor, l: int, params: ModelParams,
                         rule: QuadratureRule | None = None) -> float:
    """Pairing <F, d phi / d x_l> = -(2 mu / sigma^2) <x_l F, phi>."""
    if not 1 <= l <= F.dim:
        raise ValueError(f"coordinate {l} outside 1..{F.dim}")
    rule = rule or default_rule(params)
    scale = -2.0 * params.mu / params.sigma**2
    total = 0.0
    for c, pf in F.atoms:
        funcs = list(pf.funcs)
        funcs[l - 1] = funcs[l - 1].times(Func1D.polynomial([0.0, 1.0]))
        total += c * ProductFunc(tuple(funcs)).phi_mean(params, rule)
    return scale * total


def gradient_phi_mean(F: Factor, i: int, params: ModelParams) -> float:
    """Stationary mean of the partial derivative of F along coordinate i."""
    if not F.is_polynomial:
        raise NonPolynomialError("derivative pairings require polynomial factors")
    total = 0.0
    for c, pf in F.atoms:
        prod = c
        for cidx, g in enumerate(pf.funcs, start=1):
            if cidx == i:
                prod *= poly_phi_mean(poly_derivative(g.coeffs), params)
            else:
                prod *= poly_phi_mean(g.coeffs, params)
        total += prod
    return total


# ---------------------------------------------------------------------------
# asymptotic variances


def sigma_slow(
    f,
    params: ModelParams,
    rule: QuadratureRule | None = None,
    time_nodes: int = 128,
) -> float:
    """Slow-regime asymptotic variance of the linear statistic of ``f``:
    the stationary variance of the centered function plus its tilted
    semigroup time integral."""
    regime = classify(params)
    if not regime.is_slow:
        raise RegimeError("slow-regime variance needs growth < 2 mu")
    rule = rule or default_rule(params)
    fac = _as_factor(f).centered(params, rule)
    return factor_pair_phi(fac, fac, params, rule) + \
        slow_pair_integral(fac, fac, params, rule, time_nodes)


def sigma_critical(
    f,
    params: ModelParams,
    rule: QuadratureRule | None = None,
) -> float:
    """Critical-regime asymptotic variance: scaled sum over coordinates of
    the squared pairings with the stationary density gradient."""
    regime = classify(params)
    if not regime.is_critical:
        raise RegimeError("critical-regime variance needs growth = 2 mu")
    rule = rule or default_rule(params)
    fac = _as_factor(f)
    scale = params.lam * params.p * params.sigma**2 / params.mu
    return scale * sum(
        grad_density_pairing(fac, l, params, rule) ** 2
        for l in range(1, fac.dim + 1)
    )


# ---------------------------------------------------------------------------
# Gaussian families and samplers


@dataclass(frozen=True)
class GaussianFamily:
    """Centered Gaussian vector over kernel slot functions."""

    covariance: np.ndarray
    transform: np.ndarray  # draws = standard normals @ transform.T

    @staticmethod
    def from_covariance(cov: np.ndarray, clip: float = 1e-10) -> "GaussianFamily":
        cov = np.asarray(cov, dtype=float)
        sym = 0.5 * (cov + cov.T)
        vals, vecs = np.linalg.eigh(sym)
        if vals.min() < -clip * max(1.0, float(vals.max())):
            raise ValueError(f"covariance not PSD: min eigenvalue {vals.min():.3g}")
        vals = np.clip(vals, 0.0, None)
        return GaussianFamily(covariance=sym, transform=vecs * np.sqrt(vals))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        z = rng.standard_normal((size, self.transform.shape[1]))
        return z @ self.transform.T


def _require_tensor_sum(f: Kernel):
    if not f.is_tensor_sum:
        raise NonPolynomialError(
            "limit samplers require a tensor-sum kernel; supply a tensor-sum "
            "approximation for black-box kernels"
        )


def _centered_slots(f: Kernel, params: ModelParams, rule: QuadratureRule):
    """Per-term centered slot functions; exact rewrite for canonical
    kernels."""
    return [
        (coef, tuple(s.centered(params, rule) for s in slots))
        for coef, slots in f.terms
    ]


def slow_covariance(
    funcs: list[Factor],
    params: ModelParams,
    rule: QuadratureRule | None = None,
    time_nodes: int = 128,
) -> GaussianFamily:
    """Covariance of the slow-regime Gaussian family over slot functions."""
    rule = rule or default_rule(params)
    m = len(funcs)
    cov = np.zeros((m, m))
    for a in range(m):
        for b in range(a, m):
            cov[a, b] = cov[b, a] = (
                factor_pair_phi(funcs[a], funcs[b], params, rule)
                + slow_pair_integral(funcs[a], funcs[b], params, rule, time_nodes)
            )
    return GaussianFamily.from_covariance(cov)


def slow_limit_sampler(
    f: Kernel,
    params: ModelParams,
    rng: np.random.Generator,
    size: int = 1,
    rule: QuadratureRule | None = None,
    time_nodes: int = 128,
    tol: float = 1e-9,
) -> np.ndarray:
    """Draws of the slow-regime limit law of a canonical tensor-sum kernel:
    the signed diagram sum with stationary pair integrals on edges and the
    Gaussian family on unpaired labels."""
    regime = classify(params)
    if not regime.is_slow:
        raise RegimeError("slow sampler needs growth < 2 mu")
    _require_tensor_sum(f)
    rule = rule or default_rule(params)
    if not is_canonical(f, params, rule, tol):
        raise CenteringError("slow-regime limit is defined for canonical kernels")
    terms = _centered_slots(f, params, rule)
    n = f.arity
    funcs = [s for _, slots in terms for s in slots]
    family = slow_covariance(funcs, params, rule, time_nodes)
    draws = family.sample(rng, size)  # (size, L*n)
    edge_w = {}
    for l, (_, slots) in enumerate(terms):
        for j in range(n):
            for k in range(j + 1, n):
                edge_w[(l, j + 1, k + 1)] = factor_pair_phi(
                    slots[j], slots[k], params, rule
                )
    out = np.zeros(size)
    for gamma in enumerate_diagrams(n):
        sign = (-1) ** gamma.rank
        for l, (coef, _) in enumerate(terms):
            piece = np.full(size, float(sign) * coef)
            for (j, k) in gamma.edges:
                piece *= edge_w[(l, j, k)]
            for r in gamma.unpaired:
                piece = piece * draws[:, l * n + (r - 1)]
            out += piece
    return out


def critical_limit_sampler(
    f: Kernel,
    params: ModelParams,
    rng: np.random.Generator,
    size: int = 1,
    rule: QuadratureRule | None = None,
    tol: float = 1e-9,
) -> np.ndarray:
    """Draws of the critical-regime limit law: products over slots of a
    Gaussian family with gradient-pairing covariance."""
    regime = classify(params)
    if not regime.is_critical:
        raise RegimeError("critical sampler needs growth = 2 mu")
    _require_tensor_sum(f)
    rule = rule or default_rule(params)
    scale = math.sqrt(params.lam * params.p * params.sigma**2 / params.mu)
    vectors = []
    for coef, slots in f.terms:
        for s in slots:
            if abs(s.phi_mean(params, rule)) > tol:
                raise CenteringError(
                    "critical-regime tensorization needs stationary-centered factors"
                )
            vectors.append(scale * np.array([
                grad_density_pairing(s, l, params, rule)
                for l in range(1, f.dim + 1)
            ]))
    g = rng.standard_normal((size, f.dim))
    out = np.zeros(size)
    n = f.arity
    for l, (coef, _) in enumerate(f.terms):
        piece = np.full(size, coef)
        for j in range(n):
            piece = piece * (g @ vectors[l * n + j])
        out += piece
    return out


def default_fast_horizon(params: ModelParams, caps: Caps = Caps()) -> float:
    """Horizon for approximating the position-sum martingale limit: long
    enough for the squared approximation gap (decay rate growth - 2 mu) to
    be negligible, capped so the expected particle budget stays moderate."""
    consts = derive(params)
    gap_rate = consts.growth_rate - 2.0 * params.mu
    if gap_rate <= 0:
        raise RegimeError("fast horizon needs growth > 2 mu")
    t_theory = 14.0 / gap_rate
    births_per_growth = 2.0 * params.p * params.lam / consts.growth_rate
    t_budget = math.log(
        max(2.0, 0.01 * caps.max_particles / births_per_growth)
    ) / consts.growth_rate
    return min(t_theory, t_budget)


def h_polynomial_value(f: Kernel, h: np.ndarray, params: ModelParams) -> float:
    """The fast-regime limit polynomial evaluated at a martingale value:
    sum over terms of the product over slots of the gradient-mean vector
    dotted with ``h``."""
    _require_tensor_sum(f)
    h = np.asarray(h, dtype=float)
    total = 0.0
    for coef, slots in f.terms:
        prod = coef
        for s in slots:
            w = np.array([gradient_phi_mean(s, i, params)
                          for i in range(1, f.dim + 1)])
            prod *= float(w @ h)
        total += prod
    return total


def fast_limit_sampler(
    f: Kernel,
    params: ModelParams,
    rng: np.random.Generator,
    size: int = 1,
    t_approx: float | None = None,
    condition_on_survival: bool = False,
    caps: Caps = Caps(),
    max_attempts: int = 10_000,
) -> np.ndarray:
    """Draws of the fast-regime limit law: the limit polynomial evaluated
    at the position-sum martingale sampled at a long horizon from fresh
    simulator trajectories."""
    regime = classify(params)
    if not regime.is_fast:
        raise RegimeError("fast sampler needs growth > 2 mu")
    _require_tensor_sum(f)
    if not f.is_polynomial:
        raise NonPolynomialError("fast-regime limit needs differentiable factors")
    consts = derive(params)
    if t_approx is None:
        t_approx = default_fast_horizon(params, caps)
    out = np.empty(size)
    for i in range(size):
        attempts = 0
        while True:
            attempts += 1
            snap = simulate(params, t_approx, rng, caps)
            if not condition_on_survival or snap.count > 0:
                break
            if attempts >= max_attempts:
                raise RuntimeError("survival conditioning failed repeatedly")
        h = h_value(snap, params, consts)
        out[i] = h_polynomial_value(f, h, params)
    return out
