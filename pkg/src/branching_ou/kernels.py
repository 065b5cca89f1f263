"""n-variate kernels in tensor-sum or black-box form, Hoeffding projections,
canonicality and degeneracy-order detection.

A tensor-sum kernel is sum_l coef_l * prod_i F_i^l(x_i) where each slot
function F_i^l acts on one d-dimensional argument.  Slot functions are kept
as small linear combinations of coordinate products, which makes Hoeffding
projections closed-form: averaging a slot multiplies the term coefficient
by the slot's stationary mean, while projecting onto a slot recenters the
slot function, with no growth in the number of terms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .model import ModelParams
from .ou import FUNC_ONE, Func1D, GrowthError, QuadratureRule, default_rule, invariant_integral


class KernelShapeError(ValueError):
    """Arity or dimension mismatch between a kernel and its arguments."""


class ConstantKernelError(ValueError):
    """All Hoeffding projections of positive order vanish."""


# ---------------------------------------------------------------------------
# slot functions


@dataclass(frozen=True)
class ProductFunc:
    """A product of per-coordinate 1-D functions on R^d."""

    funcs: tuple[Func1D, ...]

    @property
    def dim(self) -> int:
        return len(self.funcs)

    @property
    def is_polynomial(self) -> bool:
        return all(g.is_polynomial for g in self.funcs)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        # x has shape (m, dim); returns (m,)
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.ones(x.shape[0])
        for c, g in enumerate(self.funcs):
            out *= g(x[:, c])
        return out

    def phi_mean(self, params: ModelParams, rule: QuadratureRule | None = None):
        return invariant_integral(self.funcs, params, rule)

    def times(self, other: "ProductFunc") -> "ProductFunc":
        if self.dim != other.dim:
            raise KernelShapeError("dimension mismatch in product")
        return ProductFunc(tuple(a.times(b) for a, b in zip(self.funcs, other.funcs)))


def product_ones(dim: int) -> ProductFunc:
    return ProductFunc((FUNC_ONE,) * dim)


@dataclass(frozen=True)
class Factor:
    """One kernel slot: a linear combination of coordinate products."""

    atoms: tuple[tuple[float, ProductFunc], ...]

    @staticmethod
    def from_product(pf: ProductFunc, coef: float = 1.0) -> "Factor":
        return Factor(((float(coef), pf),))

    @staticmethod
    def from_polys(coeff_vectors: Sequence, coef: float = 1.0) -> "Factor":
        """Build a single-product slot from per-coordinate polynomial
        coefficient vectors (ascending powers)."""
        pf = ProductFunc(tuple(Func1D.polynomial(c) for c in coeff_vectors))
        return Factor.from_product(pf, coef)

    @staticmethod
    def constant(value: float, dim: int) -> "Factor":
        return Factor.from_product(product_ones(dim), value)

    @property
    def dim(self) -> int:
        return self.atoms[0][1].dim

    @property
    def is_polynomial(self) -> bool:
        return all(pf.is_polynomial for _, pf in self.atoms)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.zeros(x.shape[0])
        for c, pf in self.atoms:
            out += c * pf(x)
        return out

    def phi_mean(self, params: ModelParams, rule: QuadratureRule | None = None) -> float:
        return float(sum(c * pf.phi_mean(params, rule) for c, pf in self.atoms))

    def centered(self, params: ModelParams, rule: QuadratureRule | None = None) -> "Factor":
        m = self.phi_mean(params, rule)
        if m == 0.0:
            return self
        return Factor(self.atoms + ((-m, product_ones(self.dim)),))

    def scaled(self, c: float) -> "Factor":
        return Factor(tuple((c * a, pf) for a, pf in self.atoms))

    def times(self, other: "Factor") -> "Factor":
        atoms = tuple(
            (ca * cb, pa.times(pb))
            for ca, pa in self.atoms
            for cb, pb in other.atoms
        )
        return Factor(atoms)


def factor_1d(func: Func1D) -> Factor:
    return Factor.from_product(ProductFunc((func,)))


# ---------------------------------------------------------------------------
# kernels


@dataclass(frozen=True)
class Kernel:
    """n-variate kernel over (R^d)^n; symmetry is declared, not enforced."""

    arity: int
    dim: int
    terms: tuple[tuple[float, tuple[Factor, ...]], ...] | None = None
    evaluator: Callable | None = None
    symmetric: bool = False
    poly_bounded: bool = True

    @staticmethod
    def tensor_sum(
        terms: Iterable[tuple[float, Sequence[Factor]]],
        dim: int,
        symmetric: bool = False,
    ) -> "Kernel":
        tt = tuple((float(c), tuple(slots)) for c, slots in terms)
        if not tt:
            raise KernelShapeError("tensor-sum kernel needs at least one term")
        arity = len(tt[0][1])
        for _, slots in tt:
            if len(slots) != arity:
                raise KernelShapeError("inconsistent arity across terms")
            for s in slots:
                if s.dim != dim:
                    raise KernelShapeError("inconsistent slot dimension")
        return Kernel(arity=arity, dim=dim, terms=tt, symmetric=symmetric)

    @staticmethod
    def from_slot_funcs(
        slot_funcs: Sequence[Func1D], symmetric: bool = False
    ) -> "Kernel":
        """1-D convenience: one term f_1 x ... x f_n with d = 1."""
        slots = tuple(factor_1d(f) for f in slot_funcs)
        return Kernel.tensor_sum([(1.0, slots)], dim=1, symmetric=symmetric)

    @staticmethod
    def black_box(
        fn: Callable, arity: int, dim: int, symmetric: bool = False,
        poly_bounded: bool = True,
    ) -> "Kernel":
        """Wrap an evaluator fn(args) where args is a list of ``arity``
        arrays of shape (m, dim) returning (m,) values."""
        return Kernel(
            arity=arity, dim=dim, evaluator=fn, symmetric=symmetric,
            poly_bounded=poly_bounded,
        )

    @property
    def is_tensor_sum(self) -> bool:
        return self.terms is not None

    @property
    def is_polynomial(self) -> bool:
        return self.is_tensor_sum and all(
            f.is_polynomial for _, slots in self.terms for f in slots
        )

    def evaluate(self, args: Sequence[np.ndarray]) -> np.ndarray:
        """Evaluate on a batch: args is a sequence of ``arity`` arrays of
        shape (m, dim); returns (m,)."""
        if len(args) != self.arity:
            raise KernelShapeError(
                f"kernel has arity {self.arity}, got {len(args)} arguments"
            )
        args = [np.atleast_2d(np.asarray(a, dtype=float)) for a in args]
        for a in args:
            if a.shape[1] != self.dim:
                raise KernelShapeError("argument dimension mismatch")
        if not self.is_tensor_sum:
            return np.asarray(self.evaluator(args), dtype=float)
        m = args[0].shape[0]
        out = np.zeros(m)
        for coef, slots in self.terms:
            prod = np.full(m, coef)
            for i, f in enumerate(slots):
                prod *= f(args[i])
            out += prod
        return out

    def scaled(self, c: float) -> "Kernel":
        if self.is_tensor_sum:
            return Kernel(
                arity=self.arity, dim=self.dim,
                terms=tuple((c * a, slots) for a, slots in self.terms),
                symmetric=self.symmetric,
            )
        fn = self.evaluator
        return Kernel.black_box(
            lambda args: c * fn(args), self.arity, self.dim,
            symmetric=self.symmetric, poly_bounded=self.poly_bounded,
        )


# ---------------------------------------------------------------------------
# Hoeffding projections


def _quad_grid(rule: QuadratureRule, dim: int):
    """Tensor grid of quadrature nodes with product weights on R^dim."""
    grids = np.meshgrid(*([rule.nodes] * dim), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    wg = np.meshgrid(*([rule.weights] * dim), indexing="ij")
    w = np.ones(pts.shape[0])
    for g in wg:
        w *= g.ravel()
    return pts, w


def _blackbox_average(kernel: Kernel, slots_out: tuple[int, ...],
                      params: ModelParams, rule: QuadratureRule) -> Callable:
    """Average a black-box kernel over the 0-based slots ``slots_out`` by
    tensor quadrature; returns an evaluator of the remaining slots (in their
    original order)."""
    if not kernel.poly_bounded:
        raise GrowthError("black-box kernel lacks a growth declaration")
    keep = [i for i in range(kernel.arity) if i not in slots_out]
    pts, w = _quad_grid(rule, kernel.dim)
    n_quad = pts.shape[0]

    def fn(args):
        m = np.atleast_2d(args[0]).shape[0] if keep else 1
        total = np.zeros(m)
        for combo in itertools.product(range(n_quad), repeat=len(slots_out)):
            full = [None] * kernel.arity
            for j, i in enumerate(keep):
                full[i] = np.atleast_2d(args[j])
            wprod = 1.0
            for j, i in enumerate(slots_out):
                full[i] = np.broadcast_to(pts[combo[j]], (m, kernel.dim))
                wprod *= w[combo[j]]
            total += wprod * kernel.evaluate(full)
        return total

    return fn


def _blackbox_total(f: Kernel, params: ModelParams, rule: QuadratureRule) -> float:
    avg = _blackbox_average(f, tuple(range(f.arity)), params, rule)
    return float(avg([])[0])


def _subsets(items: tuple):
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def project(
    f: Kernel,
    I: Iterable[int],
    params: ModelParams,
    rule: QuadratureRule | None = None,
):
    """Hoeffding projection onto the slot subset ``I`` (1-based slots).

    Slots outside ``I`` are averaged against the stationary law; slots in
    ``I`` are recentered.  Returns a Kernel of arity ``len(I)``, or the
    scalar total integral when ``I`` is empty.
    """
    I = sorted(set(I))
    if any(i < 1 or i > f.arity for i in I):
        raise KernelShapeError(f"projection slots {I} outside 1..{f.arity}")
    rule = rule or default_rule(params)
    if f.is_tensor_sum:
        if not I:
            return float(
                sum(
                    coef * float(np.prod([s.phi_mean(params, rule) for s in slots]))
                    for coef, slots in f.terms
                )
            )
        new_terms = []
        for coef, slots in f.terms:
            c = coef
            kept = []
            for i, s in enumerate(slots, start=1):
                if i in I:
                    kept.append(s.centered(params, rule))
                else:
                    c *= s.phi_mean(params, rule)
            new_terms.append((c, tuple(kept)))
        return Kernel.tensor_sum(new_terms, dim=f.dim)
    if not I:
        return _blackbox_total(f, params, rule)
    # black-box: expand the product of (delta_x - phi) over the slots of I
    I0 = tuple(i - 1 for i in I)
    out = tuple(i for i in range(f.arity) if i not in I0)
    pieces = []
    for S in _subsets(I0):
        sign = (-1) ** (len(I0) - len(S))
        averaged = tuple(sorted(set(out) | (set(I0) - set(S))))
        avg_fn = _blackbox_average(f, averaged, params, rule)
        positions = [I0.index(i) for i in sorted(S)]
        pieces.append((sign, avg_fn, positions))

    def fn(args, _pieces=pieces):
        m = np.atleast_2d(args[0]).shape[0]
        total = np.zeros(m)
        for sign, avg_fn, positions in _pieces:
            sub_args = [args[j] for j in positions]
            vals = avg_fn(sub_args)
            total += sign * (vals if len(positions) else float(vals[0]))
        return total

    return Kernel.black_box(fn, arity=len(I), dim=f.dim,
                            poly_bounded=f.poly_bounded)


def hoeffding_table(
    f: Kernel, params: ModelParams, rule: QuadratureRule | None = None
) -> dict:
    """All projections keyed by slot subset, plus the constant under ()."""
    rule = rule or default_rule(params)
    table = {}
    for r in range(f.arity + 1):
        for I in itertools.combinations(range(1, f.arity + 1), r):
            table[I] = project(f, I, params, rule)
    return table


def reconstruct_from_table(table: dict, args: Sequence[np.ndarray]) -> np.ndarray:
    """Evaluate sum_I (projection_I)((x_i)_{i in I}) on a batch of points."""
    args = [np.atleast_2d(np.asarray(a, dtype=float)) for a in args]
    m = args[0].shape[0]
    out = np.zeros(m)
    for I, proj in table.items():
        if not I:
            out += proj
        else:
            out += proj.evaluate([args[i - 1] for i in I])
    return out


def _test_points(f: Kernel, arity: int, params: ModelParams,
                 rule: QuadratureRule, max_points: int = 256):
    """Deterministic evaluation points drawn from the quadrature nodes."""
    stride = max(1, len(rule.nodes) // 8)
    base = rule.nodes[::stride]
    rng = np.random.default_rng(0)
    n_pts = min(max_points, len(base) ** (arity * f.dim))
    pts = rng.choice(base, size=(n_pts, arity, f.dim))
    pts[0] = 0.0
    pts[-1] = base[-1]
    return pts


def is_canonical(
    f: Kernel,
    params: ModelParams,
    rule: QuadratureRule | None = None,
    tol: float = 1e-9,
) -> bool:
    """True iff averaging any single slot against the stationary law kills
    the kernel, checked on a deterministic grid of quadrature nodes."""
    rule = rule or default_rule(params)
    for k in range(1, f.arity + 1):
        avg = _slot_average(f, k, params, rule)
        if f.arity == 1:
            if abs(avg) > tol:
                return False
            continue
        pts = _test_points(f, f.arity - 1, params, rule)
        vals = avg.evaluate([pts[:, j, :] for j in range(f.arity - 1)])
        if np.max(np.abs(vals)) > tol:
            return False
    return True


def _slot_average(f: Kernel, k: int, params: ModelParams, rule: QuadratureRule):
    """Average slot ``k`` (1-based); result has arity - 1 (or is a float)."""
    if f.is_tensor_sum:
        terms = []
        for coef, slots in f.terms:
            c = coef * slots[k - 1].phi_mean(params, rule)
            kept = tuple(s for i, s in enumerate(slots, start=1) if i != k)
            terms.append((c, kept))
        if f.arity == 1:
            return float(sum(c for c, _ in terms))
        return Kernel.tensor_sum(terms, dim=f.dim)
    if f.arity == 1:
        return _blackbox_total(f, params, rule)
    fn = _blackbox_average(f, (k - 1,), params, rule)

    def reordered(args, _fn=fn):
        return _fn(args)

    return Kernel.black_box(reordered, arity=f.arity - 1, dim=f.dim,
                            poly_bounded=f.poly_bounded)


def degeneracy_order(
    f: Kernel,
    params: ModelParams,
    rule: QuadratureRule | None = None,
    tol: float = 1e-9,
) -> tuple[int, Kernel]:
    """Smallest k with a non-vanishing order-k projection, as (k - 1, proj).

    Requires the symmetric flag; raises ConstantKernelError when every
    positive-order projection vanishes on the test grid.
    """
    if not f.symmetric:
        raise KernelShapeError("degeneracy order requires a symmetric kernel")
    rule = rule or default_rule(params)
    for k in range(1, f.arity + 1):
        proj = project(f, range(1, k + 1), params, rule)
        pts = _test_points(f, k, params, rule)
        vals = proj.evaluate([pts[:, j, :] for j in range(k)])
        if np.max(np.abs(vals)) > tol:
            return k - 1, proj
    raise ConstantKernelError("kernel is constant up to stationary-null terms")


def substitute_partition(f: Kernel, J: Sequence[Sequence[int]]) -> Kernel:
    """Kernel of arity |J| obtained by feeding one variable to all the slots
    of each block.  Blocks are ordered by their smallest element."""
    blocks = sorted((tuple(sorted(b)) for b in J), key=lambda b: b[0])
    flat = sorted(i for b in blocks for i in b)
    if flat != list(range(1, f.arity + 1)):
        raise KernelShapeError(f"{blocks} is not a partition of 1..{f.arity}")
    if f.is_tensor_sum:
        terms = []
        for coef, slots in f.terms:
            merged = []
            for b in blocks:
                fac = slots[b[0] - 1]
                for i in b[1:]:
                    fac = fac.times(slots[i - 1])
                merged.append(fac)
            terms.append((coef, tuple(merged)))
        return Kernel.tensor_sum(terms, dim=f.dim)
    fn = f.evaluator
    arity = f.arity

    def expanded(args, _blocks=blocks, _fn=fn, _arity=arity):
        full = [None] * _arity
        for j, b in enumerate(_blocks):
            for i in b:
                full[i - 1] = args[j]
        return _fn(full)

    return Kernel.black_box(expanded, arity=len(blocks), dim=f.dim,
                            poly_bounded=f.poly_bounded)


def center_kernel(
    f: Kernel, params: ModelParams, rule: QuadratureRule | None = None
) -> Kernel:
    """Subtract the total stationary integral from the kernel."""
    rule = rule or default_rule(params)
    c = project(f, [], params, rule)
    if c == 0.0:
        return f
    if f.is_tensor_sum:
        ones = tuple(Factor.constant(1.0, f.dim) for _ in range(f.arity))
        return Kernel.tensor_sum(
            list(f.terms) + [(-c, ones)], dim=f.dim, symmetric=f.symmetric
        )
    fn = f.evaluator
    return Kernel.black_box(
        lambda args: fn(args) - c, f.arity, f.dim,
        symmetric=f.symmetric, poly_bounded=f.poly_bounded,
    )
