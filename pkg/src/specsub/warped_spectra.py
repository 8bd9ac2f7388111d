"""Finite-difference spectral checks on 1D-base warped products.

The model space is base x_psi S^1 with a positive warp psi on the base (a
circle or an interval).  Three operator families are discretized:

* S, the Schrodinger operator -f'' + V f with V = (psi^{k/2})''/psi^{k/2}
  evaluated by centered second differences, uniform weights;
* L_m, the Fourier-mode operators -(psi f')'/psi + m^2/psi^2 f in divergence
  form, weighted by psi;
* the full 2D quadratic form on base x fiber, used for pushdown checks.

Half-node fluxes use geometric means sqrt(psi_i psi_{i+1}).  With that choice
diag(sqrt(psi)) conjugates the discrete L_0 exactly into the discrete S, so
the two routes to the bottom of the spectrum agree at the matrix level, S is
exactly non-negative, and the discrete pushdown inequality holds with no
discretization slack (reverse triangle inequality on fiber columns).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

import numpy as np
import scipy.sparse as sp

from .eigensolve import (DEFAULT_SOLVER, SolverConfig, SpectrumEstimate,
                         lowest_eigenvalue)
from .tolerances import Tolerances, DEFAULT


class Boundary(str, enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


@dataclass(frozen=True)
class CircleBase:
    length: float

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError("circle length must be positive")


@dataclass(frozen=True)
class IntervalBase:
    a: float
    b: float
    boundary: Boundary = Boundary.DIRICHLET

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError("interval needs b > a")
        object.__setattr__(self, "boundary", Boundary(self.boundary))


Base = Union[CircleBase, IntervalBase]


@dataclass(frozen=True)
class WarpProfile:
    """Warp function: a named closure from the catalog or raw grid samples."""

    kind: str                      # const | exp | sinshift | samples
    params: tuple = ()
    samples: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.kind == "samples":
            arr = np.asarray(self.samples, dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, "samples", arr)
        elif self.kind not in ("const", "exp", "sinshift"):
            raise ValueError(f"unknown warp kind {self.kind!r}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "const":
            return np.full_like(x, self.params[0])
        if self.kind == "exp":
            return np.exp(self.params[0] * x)
        if self.kind == "sinshift":
            amp = self.params[0]
            return (1.0 + amp) + amp * np.sin(x)
        raise ValueError("sampled warps can only be evaluated on their own grid")


@dataclass(frozen=True)
class WarpedProductSpec:
    base: Base
    warp: WarpProfile
    fiber_dim: int = 1
    fiber_lambda0: float = 0.0
    name: str = ""

    def __post_init__(self):
        if self.fiber_dim < 1:
            raise ValueError("fiber dimension must be positive")
        if self.fiber_lambda0 < 0:
            raise ValueError("fiber lambda0 must be nonnegative")


@dataclass(frozen=True)
class Grid:
    x: np.ndarray        # nodes carrying unknowns
    h: float
    periodic: bool
    boundary: Optional[Boundary] = None


def base_grid(spec: WarpedProductSpec, grid_n: int) -> Grid:
    if grid_n < 16:
        raise ValueError("grid_n must be at least 16")
    if isinstance(spec.base, CircleBase):
        h = spec.base.length / grid_n
        return Grid(np.arange(grid_n) * h, h, True)
    a, b, bc = spec.base.a, spec.base.b, spec.base.boundary
    if bc == Boundary.DIRICHLET:
        h = (b - a) / (grid_n + 1)
        return Grid(a + h * np.arange(1, grid_n + 1), h, False, bc)
    h = (b - a) / grid_n
    return Grid(a + h * (np.arange(grid_n) + 0.5), h, False, bc)


def warp_values(spec: WarpedProductSpec, grid: Grid) -> np.ndarray:
    """psi at the grid nodes plus, for Dirichlet intervals, at both endpoints.

    Returns an array of length n (circle, Neumann) or n + 2 (Dirichlet, with
    psi(a) first and psi(b) last).  Sampled warps must match the grid size;
    missing endpoint values are filled by quadratic extrapolation.
    """
    n = grid.x.size
    w = spec.warp
    if w.kind == "samples":
        if w.samples.size != n:
            raise ValueError(
                f"sampled warp has {w.samples.size} values but the grid has {n} nodes")
        vals = np.array(w.samples, dtype=float)
    else:
        vals = np.asarray(w(grid.x), dtype=float)
    if grid.periodic or grid.boundary == Boundary.NEUMANN:
        out = vals
    else:
        a, b = spec.base.a, spec.base.b
        if w.kind == "samples":
            pa = _extrapolate(vals[:3], -1.0)
            pb = _extrapolate(vals[-3:][::-1], -1.0)
        else:
            pa = float(w(np.array(a)))
            pb = float(w(np.array(b)))
        out = np.concatenate(([pa], vals, [pb]))
    if np.any(out <= 0.0):
        bad = int(np.argmax(out <= 0.0))
        raise ValueError(f"warp must be positive everywhere (node {bad})")
    return out


def _extrapolate(three, t):
    """Quadratic extrapolation of equally spaced values to offset t (in steps)."""
    y0, y1, y2 = three
    # Newton form around index 0
    return y0 + t * (y1 - y0) + 0.5 * t * (t - 1.0) * (y2 - 2.0 * y1 + y0)


@dataclass(frozen=True)
class DiscreteOperator:
    """Grid operator self-adjoint with respect to the weighted inner product."""

    matrix: sp.csr_matrix
    weights: np.ndarray
    label: str
    grid: Grid

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def symmetry_residual(self) -> float:
        """Max entry of A^T W - W A, relative to the scale of the form W A."""
        W = sp.diags(self.weights)
        form = W @ self.matrix
        R = (self.matrix.T @ W - form).tocoo()
        scale = max(float(np.max(np.abs(form.tocoo().data), initial=0.0)), 1.0)
        return float(np.max(np.abs(R.data), initial=0.0)) / scale

    def quadratic_form(self, f: np.ndarray) -> float:
        f = np.asarray(f, dtype=float)
        return float(f @ (self.weights * (self.matrix @ f)))

    def norm2(self, f: np.ndarray) -> float:
        f = np.asarray(f, dtype=float)
        return float(f @ (self.weights * f))

    def rayleigh(self, f: np.ndarray) -> float:
        return self.quadratic_form(f) / self.norm2(f)

    def restricted(self, mask: np.ndarray, label: Optional[str] = None) -> "DiscreteOperator":
        """Principal submatrix on the masked nodes (Dirichlet restriction)."""
        idx = np.flatnonzero(mask)
        sub = self.matrix[idx][:, idx].tocsr()
        g = Grid(self.grid.x[idx], self.grid.h, False, Boundary.DIRICHLET)
        return DiscreteOperator(sub, self.weights[idx], label or self.label, g)


def _operator_from_form(K: sp.spmatrix, weights: np.ndarray, label: str,
                        grid: Grid) -> DiscreteOperator:
    """Build A = W^{-1} K from a symmetric form matrix K; w-self-adjoint by design."""
    A = (sp.diags(1.0 / weights) @ K).tocsr()
    return DiscreteOperator(A, weights, label, grid)


def _laplacian_form(grid: Grid, conduct: np.ndarray) -> sp.csr_matrix:
    """Symmetric form matrix of a flux Laplacian with edge conductances.

    conduct[e] multiplies (f_j - f_i)^2 / h^2 for edge e; on a circle there
    are n wrap-around edges, on a Dirichlet interval n + 1 edges (boundary
    values clamped to 0), on a Neumann interval n - 1 interior edges.
    """
    n = grid.x.size
    h2 = grid.h * grid.h
    diag = np.zeros(n)
    if grid.periodic:
        off = conduct / h2                      # edge i: (i, i+1 mod n)
        diag = (conduct + np.roll(conduct, 1)) / h2
        i = np.arange(n)
        j = (i + 1) % n
        rows = np.concatenate([i, i, j])
        cols = np.concatenate([i, j, i])
        vals = np.concatenate([diag, -off, -off])
        return sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    if grid.boundary == Boundary.DIRICHLET:
        # conduct has n + 1 entries: edges (a,1), (1,2), ..., (n,b)
        inner = conduct[1:-1]
        diag += conduct[:-1] / h2
        diag += conduct[1:] / h2
        return sp.diags_array(
            [-inner / h2, diag, -inner / h2], offsets=[-1, 0, 1]).tocsr()
    # Neumann: n - 1 interior edges, zero flux at the ends
    inner = conduct
    diag[:-1] += inner / h2
    diag[1:] += inner / h2
    return sp.diags_array(
        [-inner / h2, diag, -inner / h2], offsets=[-1, 0, 1]).tocsr()


def _potential_from_phi(grid: Grid, phi: np.ndarray) -> np.ndarray:
    """V = (centered second difference of phi) / phi with the grid's closure.

    phi includes endpoint values for Dirichlet intervals; Neumann ends use
    reflected ghosts, matching the zero-flux divergence form exactly.
    """
    h2 = grid.h * grid.h
    if grid.periodic:
        return (np.roll(phi, -1) + np.roll(phi, 1) - 2.0 * phi) / (phi * h2)
    if grid.boundary == Boundary.DIRICHLET:
        inner = phi[1:-1]
        return (phi[2:] + phi[:-2] - 2.0 * inner) / (inner * h2)
    V = np.empty_like(phi)
    V[1:-1] = (phi[2:] + phi[:-2] - 2.0 * phi[1:-1]) / (phi[1:-1] * h2)
    V[0] = (phi[1] - phi[0]) / (phi[0] * h2)
    V[-1] = (phi[-2] - phi[-1]) / (phi[-1] * h2)
    return V


def _edge_geomean(grid: Grid, vals: np.ndarray) -> np.ndarray:
    """Geometric means of vals over grid edges (layout as in _laplacian_form)."""
    if grid.periodic:
        return np.sqrt(vals * np.roll(vals, -1))
    if grid.boundary == Boundary.DIRICHLET:
        return np.sqrt(vals[:-1] * vals[1:])     # vals includes endpoints
    return np.sqrt(vals[:-1] * vals[1:])


def build_schrodinger(spec: WarpedProductSpec, grid_n: int) -> DiscreteOperator:
    """S = -f'' + V f with V = (psi^{k/2})''/psi^{k/2}, uniform weights."""
    grid = base_grid(spec, grid_n)
    psi = warp_values(spec, grid)
    phi = psi ** (spec.fiber_dim / 2.0)
    V = _potential_from_phi(grid, phi)
    n = grid.x.size
    if grid.periodic:
        cond = np.ones(n)
    elif grid.boundary == Boundary.DIRICHLET:
        cond = np.ones(n + 1)
    else:
        cond = np.ones(n - 1)
    w = np.full(n, grid.h)
    K = _laplacian_form(grid, cond) * grid.h + sp.diags(V * w)
    return _operator_from_form(K, w, "S", grid)


def build_warped_mode(spec: WarpedProductSpec, m: int, grid_n: int) -> DiscreteOperator:
    """Fourier-mode operator L_m f = -(psi f')'/psi + m^2/psi^2 f (fiber S^1)."""
    if spec.fiber_dim != 1:
        raise ValueError("mode operators are only defined for a circle fiber (k = 1)")
    if m < 0:
        raise ValueError("mode index must be nonnegative")
    grid = base_grid(spec, grid_n)
    psi_full = warp_values(spec, grid)
    psi = psi_full if (grid.periodic or grid.boundary == Boundary.NEUMANN) \
        else psi_full[1:-1]
    cond = _edge_geomean(grid, psi_full)
    w = psi * grid.h
    pot = (m * m) / (psi * psi)
    K = _laplacian_form(grid, cond) * grid.h + sp.diags(pot * w)
    return _operator_from_form(K, w, f"L_{m}", grid)


# -- verification reports -----------------------------------------------------

@dataclass(frozen=True)
class EqualityReport:
    fixture: str
    grid_n: int
    lambda0_modes: tuple          # lambda0 of L_0, L_1, ..., L_mmax
    lambda0_total: float          # min over modes
    lambda0_schrodinger: float
    residuals: tuple
    difference: float
    passed: bool


@dataclass(frozen=True)
class InequalityReport:
    fixture: str
    grid_n: int
    lambda0_modes: tuple
    lhs: float                    # lambda0 of the total space (min over modes)
    lambda0_schrodinger: float
    rhs: float                    # lambda0(S) + fiber term
    slack: float
    residuals: tuple
    passed: bool


@dataclass(frozen=True)
class TailReport:
    fixture: str
    grid_n: int
    cutoffs: tuple
    values: tuple
    residuals: tuple
    monotone: bool


def solve_lowest(op: DiscreteOperator, cfg: SolverConfig = DEFAULT_SOLVER,
                 mode: Optional[int] = None) -> SpectrumEstimate:
    """Lowest eigenvalue of a DiscreteOperator (see eigensolve for the contract)."""
    return lowest_eigenvalue(op.matrix, op.weights, cfg,
                             grid_n=op.n, mode=mode)


def mode_scan(spec: WarpedProductSpec, grid_n: int, m_max: int = 8,
              cfg: SolverConfig = DEFAULT_SOLVER):
    ests = []
    for m in range(m_max + 1):
        op = build_warped_mode(spec, m, grid_n)
        ests.append(lowest_eigenvalue(op.matrix, op.weights, cfg,
                                      grid_n=grid_n, mode=m))
    return ests


def verify_closed_fiber_equality(spec: WarpedProductSpec, grid_n: int,
                                 tols: Tolerances = DEFAULT,
                                 cfg: SolverConfig = DEFAULT_SOLVER,
                                 m_max: int = 8) -> EqualityReport:
    """Two routes to the bottom of the warped-product spectrum must agree.

    Route one: the m = 0 mode operator (weighted by psi).  Route two: the
    Schrodinger operator S on the base; the multiplication map by sqrt(psi)
    identifies the two problems.  Also checks that the mode scan attains its
    minimum at m = 0.
    """
    ests = mode_scan(spec, grid_n, m_max, cfg)
    lams = tuple(e.lambda0 for e in ests)
    s_op = build_schrodinger(spec, grid_n)
    s_est = lowest_eigenvalue(s_op.matrix, s_op.weights, cfg, grid_n=grid_n)
    total = min(lams)
    diff = abs(lams[0] - s_est.lambda0)
    slack = 10.0 * max(ests[0].residual, s_est.residual, 1e-15)
    passed = diff <= tols.unitary_tol and total >= lams[0] - slack
    return EqualityReport(spec.name, grid_n, lams, total, s_est.lambda0,
                          tuple(e.residual for e in ests) + (s_est.residual,),
                          diff, passed)


def verify_warped_inequality(spec: WarpedProductSpec, grid_n: int,
                             tols: Tolerances = DEFAULT,
                             cfg: SolverConfig = DEFAULT_SOLVER,
                             m_max: int = 8) -> InequalityReport:
    """Total-space bottom >= base Schrodinger bottom + fiber term, on the grid."""
    ests = mode_scan(spec, grid_n, m_max, cfg)
    lams = tuple(e.lambda0 for e in ests)
    lhs = min(lams)
    grid = base_grid(spec, grid_n)
    psi = warp_values(spec, grid)
    s_op = build_schrodinger(spec, grid_n)
    s_est = lowest_eigenvalue(s_op.matrix, s_op.weights, cfg, grid_n=grid_n)
    rhs = s_est.lambda0 + spec.fiber_lambda0 * float(np.min(1.0 / psi ** 2))
    slack = lhs - rhs
    return InequalityReport(spec.name, grid_n, lams, lhs, s_est.lambda0, rhs,
                            slack, tuple(e.residual for e in ests) + (s_est.residual,),
                            slack >= -tols.ineq_tol)


def lambda0_ess_tail(spec: WarpedProductSpec, cutoffs: Sequence[float],
                     grid_n: int, cfg: SolverConfig = DEFAULT_SOLVER) -> TailReport:
    """Bottom of S restricted (Dirichlet) beyond each cutoff, as a tail estimate.

    Restriction is the principal submatrix on nodes past the cutoff, so the
    sequence is non-decreasing by eigenvalue interlacing.
    """
    if not isinstance(spec.base, IntervalBase):
        raise ValueError("tail estimates need an interval (truncated ray) base")
    cutoffs = [float(c) for c in cutoffs]
    if any(c2 <= c1 for c1, c2 in zip(cutoffs, cutoffs[1:])):
        raise ValueError("cutoffs must be strictly increasing")
    op = build_schrodinger(spec, grid_n)
    values = []
    residuals = []
    for c in cutoffs:
        if not (spec.base.a <= c < spec.base.b):
            raise ValueError(f"cutoff {c} outside the base interval")
        mask = op.grid.x > c
        if np.count_nonzero(mask) < 4:
            raise ValueError(f"cutoff {c} leaves too few grid nodes")
        sub = op.restricted(mask, label=f"S|x>{c:g}")
        est = lowest_eigenvalue(sub.matrix, sub.weights, cfg, grid_n=grid_n)
        values.append(est.lambda0)
        residuals.append(est.residual)
    mono = all(b >= a - 1e-9 * max(1.0, abs(a)) for a, b in zip(values, values[1:]))
    return TailReport(spec.name, grid_n, tuple(cutoffs), tuple(values),
                      tuple(residuals), mono)


def drift_bound_lambda0(spec: WarpedProductSpec, C: float, grid_n: int,
                        tols: Tolerances = DEFAULT,
                        cfg: SolverConfig = DEFAULT_SOLVER) -> float:
    """Lower bound (sqrt(lambda0(base)) - C/2)^2 for lambda0(S).

    Requires k |psi'/psi| <= C at every grid node (psi' by centered
    differences) and C <= 2 sqrt(lambda0 of the plain base Laplacian).
    """
    grid = base_grid(spec, grid_n)
    psi_full = warp_values(spec, grid)
    if grid.periodic:
        deriv = (np.roll(psi_full, -1) - np.roll(psi_full, 1)) / (2 * grid.h)
        psi = psi_full
        x = grid.x
    elif grid.boundary == Boundary.DIRICHLET:
        deriv = (psi_full[2:] - psi_full[:-2]) / (2 * grid.h)
        psi = psi_full[1:-1]
        x = grid.x
    else:
        deriv = np.gradient(psi_full, grid.h)
        psi = psi_full
        x = grid.x
    drift = spec.fiber_dim * np.abs(deriv / psi)
    worst = int(np.argmax(drift))
    if drift[worst] > C + tols.ineq_tol:
        raise ValueError(
            f"|H| bound violated at node {worst} (x = {x[worst]:.6g}): "
            f"{drift[worst]:.6g} > {C:.6g}")
    flat = replace(spec, warp=WarpProfile("const", (1.0,)))
    base_op = build_schrodinger(flat, grid_n)
    est = lowest_eigenvalue(base_op.matrix, base_op.weights, cfg, grid_n=grid_n)
    lam_base = max(est.lambda0, 0.0)
    if C > 2.0 * np.sqrt(lam_base) + tols.ineq_tol:
        raise ValueError(
            f"need C <= 2 sqrt(lambda0(base)) = {2*np.sqrt(lam_base):.6g}, got {C:.6g}")
    return float((np.sqrt(lam_base) - C / 2.0) ** 2)


# -- pushdown of 2D grid functions --------------------------------------------

def fiber_grid(n_theta: int):
    h_theta = 2.0 * np.pi / n_theta
    return np.arange(n_theta) * h_theta, h_theta


def pushdown(spec: WarpedProductSpec, f2d: np.ndarray, grid_n: int) -> np.ndarray:
    """h(x_i) = sqrt of the fiber integral of f^2 with the warped fiber measure."""
    grid = base_grid(spec, grid_n)
    psi_full = warp_values(spec, grid)
    psi = psi_full if grid.periodic or grid.boundary == Boundary.NEUMANN \
        else psi_full[1:-1]
    f2d = np.asarray(f2d, dtype=float)
    if f2d.shape[0] != grid.x.size:
        raise ValueError("first axis of f2d must match the base grid")
    n_theta = f2d.shape[1]
    _, h_theta = fiber_grid(n_theta)
    return np.sqrt(np.sum(f2d * f2d, axis=1) * psi * h_theta)


def rayleigh_2d(spec: WarpedProductSpec, f2d: np.ndarray, grid_n: int) -> float:
    """Discrete Rayleigh quotient of the warped metric on base x S^1."""
    grid = base_grid(spec, grid_n)
    psi_full = warp_values(spec, grid)
    if grid.periodic or grid.boundary == Boundary.NEUMANN:
        psi = psi_full
    else:
        psi = psi_full[1:-1]
    f2d = np.asarray(f2d, dtype=float)
    n, n_theta = f2d.shape
    _, h_theta = fiber_grid(n_theta)
    h = grid.h
    cond = _edge_geomean(grid, psi_full)

    # base-direction differences with the same edge layout as the operators
    if grid.periodic:
        dx = (np.roll(f2d, -1, axis=0) - f2d)
        num_x = np.sum(cond[:, None] * dx * dx) / (h * h)
    elif grid.boundary == Boundary.DIRICHLET:
        dx_in = f2d[1:] - f2d[:-1]
        num_x = (np.sum(cond[1:-1, None] * dx_in * dx_in)
                 + np.sum(cond[0] * f2d[0] * f2d[0])
                 + np.sum(cond[-1] * f2d[-1] * f2d[-1])) / (h * h)
    else:
        dx_in = f2d[1:] - f2d[:-1]
        num_x = np.sum(cond[:, None] * dx_in * dx_in) / (h * h)
    dth = np.roll(f2d, -1, axis=1) - f2d
    num_th = np.sum((dth * dth) / (psi[:, None])) / (h_theta * h_theta)
    num = (num_x + num_th) * h * h_theta
    den = float(np.sum(psi[:, None] * f2d * f2d) * h * h_theta)
    return num / den


def pushdown_slack(spec: WarpedProductSpec, f2d: np.ndarray, grid_n: int) -> float:
    """R(f) - R_S(pushdown f) - fiber_lambda0 * weighted average of psi^{-2}.

    Nonnegative up to round-off for a circle fiber by construction.
    """
    grid = base_grid(spec, grid_n)
    psi_full = warp_values(spec, grid)
    psi = psi_full if grid.periodic or grid.boundary == Boundary.NEUMANN \
        else psi_full[1:-1]
    h = pushdown(spec, f2d, grid_n)
    s_op = build_schrodinger(spec, grid_n)
    r2 = rayleigh_2d(spec, f2d, grid_n)
    rs = s_op.rayleigh(h)
    wh2 = s_op.weights * h * h
    fiber_term = spec.fiber_lambda0 * float(np.sum(wh2 / psi ** 2) / np.sum(wh2))
    return r2 - rs - fiber_term
