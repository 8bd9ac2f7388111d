"""Metric Lie algebras from structure constants.

A finite-dimensional real Lie algebra is stored as a rank-3 array c with
[e_i, e_j] = sum_k c[i,j,k] e_k together with a positive-definite inner
product g on the same basis.  Everything here is exact linear algebra up to
floating point: brackets, adjoint maps, the Levi-Civita connection of the
corresponding left-invariant metric, structural classification (solvable,
nilpotent, radical, compact-type Levi factor) and the mean curvature of the
subgroup generated by an ideal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import NotAnIdealError
from .tolerances import Tolerances, DEFAULT


def _asvec(x, n: int) -> np.ndarray:
    v = np.asarray(x, dtype=float).reshape(-1)
    if v.shape != (n,):
        raise ValueError(f"expected a vector of length {n}, got shape {np.shape(x)}")
    return v


@dataclass(frozen=True)
class MetricLieAlgebra:
    """Lie algebra with structure constants ``structure`` and inner product ``metric``."""

    dim: int
    structure: np.ndarray          # (n, n, n), [e_i, e_j] = structure[i, j, :]
    metric: np.ndarray             # (n, n) symmetric positive definite
    basis_labels: Optional[tuple] = None

    def __post_init__(self):
        c = np.array(self.structure, dtype=float)
        g = np.array(self.metric, dtype=float)
        n = int(self.dim)
        if c.shape != (n, n, n):
            raise ValueError(f"structure constants must have shape {(n, n, n)}")
        if g.shape != (n, n):
            raise ValueError(f"metric must have shape {(n, n)}")
        c.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "dim", n)
        object.__setattr__(self, "structure", c)
        object.__setattr__(self, "metric", g)
        if self.basis_labels is not None:
            labels = tuple(str(s) for s in self.basis_labels)
            if len(labels) != n:
                raise ValueError("need one label per basis vector")
            object.__setattr__(self, "basis_labels", labels)

    # -- basic linear algebra -------------------------------------------------

    def basis_vector(self, i: int) -> np.ndarray:
        e = np.zeros(self.dim)
        e[i] = 1.0
        return e

    def bracket(self, x, y) -> np.ndarray:
        x = _asvec(x, self.dim)
        y = _asvec(y, self.dim)
        return np.einsum("i,j,ijk->k", x, y, self.structure)

    def ad_matrix(self, x) -> np.ndarray:
        """Matrix of ad(x): y -> [x, y] in the stored basis."""
        x = _asvec(x, self.dim)
        # (ad x)[k, j] = sum_i x_i c[i, j, k]
        return np.einsum("i,ijk->kj", x, self.structure)

    def inner(self, x, y) -> float:
        return float(_asvec(x, self.dim) @ self.metric @ _asvec(y, self.dim))

    def norm(self, x) -> float:
        return float(np.sqrt(max(self.inner(x, x), 0.0)))

    def trace_covector(self) -> "Covector":
        """Functional tau with tau(x) = tr(ad x)."""
        comps = np.einsum("ijj->i", self.structure)
        return Covector(self, comps)

    def is_unimodular(self, tol: float = DEFAULT.unimodular_tol) -> bool:
        return bool(np.max(np.abs(self.trace_covector().components), initial=0.0) < tol)

    def killing_form(self) -> np.ndarray:
        # ads[i] = ad(e_i); B[i, j] = tr(ad e_i ad e_j)
        ads = np.einsum("ijk->ikj", self.structure)
        return np.einsum("iab,jba->ij", ads, ads)

    def koszul_connection(self, x, y) -> np.ndarray:
        """Levi-Civita connection of the left-invariant metric on constant fields.

        Solves g w = rhs where rhs_k is half of
        <[x,y],e_k> - <[y,e_k],x> + <[e_k,x],y>.
        """
        x = _asvec(x, self.dim)
        y = _asvec(y, self.dim)
        g = self.metric
        c = self.structure
        gx = g @ x
        gy = g @ y
        t1 = g @ self.bracket(x, y)
        t2 = np.einsum("j,jkm,m->k", y, c, gx)   # <[y, e_k], x>
        t3 = np.einsum("kim,i,m->k", c, x, gy)   # <[e_k, x], y>
        rhs = 0.5 * (t1 - t2 + t3)
        return np.linalg.solve(g, rhs)

    # -- span helpers ---------------------------------------------------------

    def gram_orthonormalize(self, rows: np.ndarray, rank_tol: float = DEFAULT.rank_tol) -> np.ndarray:
        """Rows spanning a subspace -> g-orthonormal rows (rank revealed by SVD)."""
        rows = np.atleast_2d(np.asarray(rows, dtype=float))
        if rows.size == 0 or rows.shape[0] == 0:
            return np.zeros((0, self.dim))
        # work in coordinates where g is the identity
        L = np.linalg.cholesky(self.metric)
        cols = rows @ L  # euclidean rows in the flat coordinates
        u, s, vt = np.linalg.svd(cols, full_matrices=False)
        keep = s > rank_tol * max(s[0], 1e-300)
        flat = vt[keep]
        return np.linalg.solve(L.T, flat.T).T

    def project_onto(self, onb_rows: np.ndarray, v) -> np.ndarray:
        """g-orthogonal projection of v onto the span of g-orthonormal rows."""
        v = _asvec(v, self.dim)
        if onb_rows.shape[0] == 0:
            return np.zeros(self.dim)
        coeff = onb_rows @ (self.metric @ v)
        return coeff @ onb_rows


@dataclass(frozen=True)
class Covector:
    """Linear functional in the dual basis; evaluation on e_i gives components[i]."""

    parent: MetricLieAlgebra
    components: np.ndarray

    def __post_init__(self):
        comps = np.array(self.components, dtype=float).reshape(-1)
        if comps.shape != (self.parent.dim,):
            raise ValueError("component count must match the parent dimension")
        comps.setflags(write=False)
        object.__setattr__(self, "components", comps)

    def __call__(self, x) -> float:
        return float(self.components @ _asvec(x, self.parent.dim))

    def metric_dual(self) -> np.ndarray:
        """Vector T with <T, x> = tau(x) for all x."""
        return np.linalg.solve(self.parent.metric, self.components)

    def dual_norm(self) -> float:
        """sup of tau over the unit sphere of the metric; equals |T|."""
        val = float(self.components @ self.metric_dual())
        return float(np.sqrt(max(val, 0.0)))


@dataclass(frozen=True)
class Ideal:
    """Subspace of a MetricLieAlgebra given by a spanning set of coordinate rows.

    The stored orthonormal basis is with respect to the parent metric.  Whether
    the span is a subalgebra or an ideal is checked by residuals, not assumed.
    """

    parent: MetricLieAlgebra
    span: np.ndarray
    onb: np.ndarray = field(init=False)

    def __post_init__(self):
        span = np.atleast_2d(np.asarray(self.span, dtype=float))
        if span.size == 0:
            span = np.zeros((0, self.parent.dim))
        if span.shape[1] != self.parent.dim:
            raise ValueError("spanning vectors must live in the parent algebra")
        span.setflags(write=False)
        object.__setattr__(self, "span", span)
        onb = self.parent.gram_orthonormalize(span)
        onb.setflags(write=False)
        object.__setattr__(self, "onb", onb)

    @property
    def dim(self) -> int:
        return self.onb.shape[0]

    def residual_off(self, v) -> float:
        """Metric norm of the component of v outside the span."""
        v = _asvec(v, self.parent.dim)
        rest = v - self.parent.project_onto(self.onb, v)
        return self.parent.norm(rest)

    def subalgebra_residual(self) -> float:
        r = 0.0
        for a in self.onb:
            for b in self.onb:
                r = max(r, self.residual_off(self.parent.bracket(a, b)))
        return r

    def ideal_residual(self) -> float:
        r = 0.0
        for i in range(self.parent.dim):
            e = self.parent.basis_vector(i)
            for b in self.onb:
                r = max(r, self.residual_off(self.parent.bracket(e, b)))
        return r

    def is_subalgebra(self, tol: float = DEFAULT.ideal_tol) -> bool:
        return self.subalgebra_residual() < tol

    def is_ideal(self, tol: float = DEFAULT.ideal_tol) -> bool:
        return self.ideal_residual() < tol

    def complement_onb(self) -> np.ndarray:
        """g-orthonormal basis of the orthogonal complement of the span."""
        n = self.parent.dim
        if self.dim == 0:
            return self.parent.gram_orthonormalize(np.eye(n))
        rest = np.eye(n) - np.array(
            [self.parent.project_onto(self.onb, np.eye(n)[i]) for i in range(n)]
        )
        comp = self.parent.gram_orthonormalize(rest, rank_tol=1e-10)
        if comp.shape[0] != n - self.dim:
            raise RuntimeError("complement rank detection failed")
        return comp


@dataclass(frozen=True)
class ValidationReport:
    antisymmetry_residual: float
    jacobi_residual: float
    metric_symmetry_residual: float
    min_metric_eigenvalue: float
    ok: bool


@dataclass(frozen=True)
class ClassificationReport:
    unimodular: bool
    solvable: bool
    nilpotent: bool
    semisimple: bool
    amenable: bool
    radical: Ideal
    derived_series_lengths: tuple
    numerically_marginal: bool
    derivation: str


def validate(alg: MetricLieAlgebra, tols: Tolerances = DEFAULT) -> ValidationReport:
    """Check antisymmetry, the Jacobi identity and metric positivity."""
    c = alg.structure
    anti = float(np.max(np.abs(c + np.transpose(c, (1, 0, 2))), initial=0.0))
    # jac[i,j,l,k] = sum_m c[i,j,m] c[m,l,k] + cyclic
    cyc = np.einsum("ijm,mlk->ijlk", c, c)
    jac = cyc + np.transpose(cyc, (1, 2, 0, 3)) + np.transpose(cyc, (2, 0, 1, 3))
    jacobi = float(np.max(np.abs(jac), initial=0.0))
    gsym = float(np.max(np.abs(alg.metric - alg.metric.T), initial=0.0))
    try:
        min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (alg.metric + alg.metric.T))))
    except np.linalg.LinAlgError:
        min_eig = float("-inf")
    ok = (
        anti < tols.antisym_tol
        and jacobi < tols.jacobi_tol
        and gsym < tols.antisym_tol
        and min_eig > tols.spd_tol
    )
    return ValidationReport(anti, jacobi, gsym, min_eig, ok)


def full_ideal(alg: MetricLieAlgebra) -> Ideal:
    return Ideal(alg, np.eye(alg.dim))


def zero_ideal(alg: MetricLieAlgebra) -> Ideal:
    return Ideal(alg, np.zeros((0, alg.dim)))


def _bracket_span(alg: MetricLieAlgebra, rows_a: np.ndarray, rows_b: np.ndarray,
                  rank_tol: float, marginal: Optional[list] = None) -> np.ndarray:
    if rows_a.shape[0] == 0 or rows_b.shape[0] == 0:
        return np.zeros((0, alg.dim))
    prods = np.einsum("ai,bj,ijk->abk", rows_a, rows_b, alg.structure)
    prods = prods.reshape(-1, alg.dim)
    u, s, vt = np.linalg.svd(prods, full_matrices=False)
    if marginal is not None and _marginal_svals(s, rank_tol):
        marginal.append(True)
    if s.size == 0 or s[0] <= rank_tol:
        return np.zeros((0, alg.dim))
    return vt[s > rank_tol * s[0]]


def derived_subalgebra(alg: MetricLieAlgebra, sub: Optional[Ideal] = None,
                       tols: Tolerances = DEFAULT,
                       marginal: Optional[list] = None) -> Ideal:
    """Span of all brackets of pairs of spanning vectors of ``sub``."""
    if sub is None:
        sub = full_ideal(alg)
    rows = _bracket_span(alg, sub.onb, sub.onb, tols.rank_tol, marginal)
    return Ideal(alg, rows)


def _series_dims(alg, step, tols):
    """Iterate a span-shrinking step until the dimension stabilizes."""
    current = full_ideal(alg)
    dims = [current.dim]
    for _ in range(alg.dim + 1):
        nxt = step(current)
        dims.append(nxt.dim)
        if nxt.dim == 0 or nxt.dim == current.dim:
            break
        current = nxt
    return dims


def _marginal_svals(svals: np.ndarray, rank_tol: float) -> bool:
    if svals.size == 0:
        return False
    top = max(float(svals[0]), 1e-300)
    rel = svals / top
    return bool(np.any((rel > rank_tol * 1e-2) & (rel < rank_tol * 1e2)))


def radical(alg: MetricLieAlgebra, tols: Tolerances = DEFAULT):
    """Largest solvable ideal, via the Killing-orthogonal of the derived algebra.

    Returns (Ideal, marginal_flag).
    """
    der = derived_subalgebra(alg, tols=tols)
    if der.dim == 0:
        return full_ideal(alg), False
    B = alg.killing_form()
    m = der.onb @ B  # rows: v -> B(d_a, v)
    u, s, vt = np.linalg.svd(m, full_matrices=True)
    marginal = _marginal_svals(s, tols.rank_tol)
    top = max(float(s[0]), 1e-300) if s.size else 0.0
    null_rows = vt[np.sum(s > tols.rank_tol * top):]
    return Ideal(alg, null_rows), marginal


def quotient_algebra(alg: MetricLieAlgebra, n_ideal: Ideal,
                     tols: Tolerances = DEFAULT):
    """Quotient by an ideal, realized on the metric complement of the span.

    Returns (quotient algebra with identity metric, pushforward matrix P) where
    P maps parent coordinates to quotient coordinates and is an isometry on the
    complement.
    """
    if n_ideal.dim > 0 and not n_ideal.is_ideal(tols.ideal_tol):
        raise NotAnIdealError("span is not an ideal; quotient bracket undefined")
    Q = n_ideal.complement_onb()
    q = Q.shape[0]
    P = Q @ alg.metric
    if q == 0:
        return MetricLieAlgebra(0, np.zeros((0, 0, 0)), np.zeros((0, 0))), P
    br = np.einsum("ai,bj,ijk->abk", Q, Q, alg.structure)
    cq = np.einsum("abk,ck->abc", br @ alg.metric, Q)
    return MetricLieAlgebra(q, cq, np.eye(q)), P


def restrict_to_span(alg: MetricLieAlgebra, sub: Ideal,
                     tols: Tolerances = DEFAULT) -> MetricLieAlgebra:
    """The subalgebra spanned by ``sub`` with the restricted metric."""
    if sub.dim > 0 and not sub.is_subalgebra(tols.ideal_tol):
        raise NotAnIdealError("span is not closed under the bracket")
    E = sub.onb
    k = E.shape[0]
    if k == 0:
        return MetricLieAlgebra(0, np.zeros((0, 0, 0)), np.zeros((0, 0)))
    br = np.einsum("ai,bj,ijk->abk", E, E, alg.structure)
    cs = np.einsum("abk,ck->abc", br @ alg.metric, E)
    return MetricLieAlgebra(k, cs, np.eye(k))


def classify(alg: MetricLieAlgebra, tols: Tolerances = DEFAULT) -> ClassificationReport:
    """Structural booleans of the algebra.

    solvable/nilpotent come from the derived and lower central series,
    the radical from the Killing-orthogonal of the derived algebra, and
    amenability from the definiteness of the Killing form of the Levi
    quotient (compact type) -- quotient zero counts as amenable.
    """
    if alg.dim == 0:
        rad = zero_ideal(alg)
        return ClassificationReport(True, True, True, True, True, rad, (0,), False,
                                    "zero algebra")
    marks: list = []
    derived_dims = _series_dims(
        alg, lambda s: derived_subalgebra(alg, s, tols, marks), tols)
    solvable = derived_dims[-1] == 0
    lower_dims = _series_dims(
        alg,
        lambda s: Ideal(alg, _bracket_span(alg, full_ideal(alg).onb, s.onb,
                                           tols.rank_tol, marks)),
        tols,
    )
    nilpotent = lower_dims[-1] == 0
    rad, marginal = radical(alg, tols)
    marginal = marginal or bool(marks)
    if solvable and rad.dim != alg.dim:
        # keep the report consistent when rank decisions disagree
        rad, marginal = full_ideal(alg), True
    semisimple = rad.dim == 0
    if rad.dim == alg.dim:
        amenable = True
        derivation = "solvable radical is everything; compact extension trivial"
    else:
        quot, _ = quotient_algebra(alg, rad, tols)
        eigs = np.linalg.eigvalsh(quot.killing_form())
        scale = max(float(np.max(np.abs(eigs), initial=0.0)), 1e-300)
        amenable = bool(np.max(eigs) < -tols.definite_tol * scale)
        if _marginal_svals(np.sort(np.abs(eigs))[::-1], tols.definite_tol):
            marginal = True
        derivation = ("Levi quotient Killing form negative definite"
                      if amenable else "Levi quotient of non-compact type")
    return ClassificationReport(
        unimodular=alg.is_unimodular(tols.unimodular_tol),
        solvable=solvable,
        nilpotent=nilpotent,
        semisimple=semisimple,
        amenable=amenable,
        radical=rad,
        derived_series_lengths=tuple(derived_dims),
        numerically_marginal=marginal,
        derivation=derivation,
    )


def mean_curvature(alg: MetricLieAlgebra, n_ideal: Ideal,
                   tols: Tolerances = DEFAULT) -> np.ndarray:
    """Mean curvature vector of the subgroup generated by an ideal.

    Sums the complement part of nabla_E E over a g-orthonormal basis {E} of
    the ideal.  The result lies in the metric complement of the span and does
    not depend on the basis choice.
    """
    if n_ideal.dim > 0 and not n_ideal.is_ideal(tols.ideal_tol):
        raise NotAnIdealError("mean curvature needs an ideal")
    H = np.zeros(alg.dim)
    for e in n_ideal.onb:
        H += alg.koszul_connection(e, e)
    return H - alg.project_onto(n_ideal.onb, H)
