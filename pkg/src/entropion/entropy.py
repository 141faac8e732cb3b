"""Entropies and three independent routes to quantum relative entropy.

Sign convention, used everywhere: H(P, Q) = Tr P (ln P - ln Q), in nats,
nonnegative for density matrices and +inf when the kernel of Q is not
contained in the kernel of P.  (Some sources print the opposite sign; this
package never does.)

The three routes:

* ``relative_entropy``         - spectral: Tr P ln P - Tr P ln Q;
* ``relative_entropy_integral``- adaptive quadrature of the representation
      H(P, Q) = Tr(P - Q)
               + int_0^inf Tr[(Q-P) (L_Q + t R_P)^{-1} (Q-P)] (1+t)^{-2} dt
  where L/R are left/right multiplication;
* ``relative_entropy_spectral_kernel`` - the same integral done in closed
  form per eigenpair via ``kernel_k``.

The Tr(P - Q) correction makes all three total on PSD pairs with
compatible supports, not just on density matrices.  The substitution
t = s/(1-s) maps the half-line onto [0, 1) and absorbs the (1+t)^{-2}
weight exactly, so the quadrature never sees the infinite endpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .matcore import (
    NonConvergence,
    as_density,
    as_hermitian,
    as_psd,
    hermitian_eig,
    matrix_function,
    partial_trace,
    tensor,
    zero_band,
)
from .superop import SuperOpSpec, solve_resolvent

# Relative mass of P allowed on ker(Q) before H(P, Q) is declared +inf.
SUPPORT_MASS_TOL = 1e-10

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)
_GL_CHUNK = 4096  # nodes evaluated per batch, bounds memory at high panel counts


@dataclass(frozen=True)
class QuadratureConfig:
    """Adaptive Gauss-Legendre settings: 10-node panels on [0, 1], panel
    count doubled until two successive estimates differ by at most abs_tol."""

    abs_tol: float = 1e-10
    max_refinements: int = 30
    base_panels: int = 8

    def __post_init__(self):
        if not (self.abs_tol > 0.0):
            raise ValueError("abs_tol must be positive")
        if self.max_refinements < 1 or self.base_panels < 1:
            raise ValueError("max_refinements and base_panels must be >= 1")


_DEFAULT_QUAD = QuadratureConfig()


def composite_gl(f: Callable[[np.ndarray], np.ndarray], panels: int) -> float:
    """Composite 10-node Gauss-Legendre integral of f over [0, 1]."""
    h = 1.0 / panels
    total = 0.0
    nodes01 = (_GL_NODES + 1.0) * 0.5  # panel-local nodes in (0, 1)
    per_chunk = max(1, _GL_CHUNK // nodes01.size)
    for start in range(0, panels, per_chunk):
        stop = min(start + per_chunk, panels)
        lefts = np.arange(start, stop) * h
        s = (lefts[:, None] + nodes01[None, :] * h).ravel()
        w = np.tile(_GL_WEIGHTS * (h * 0.5), stop - start)
        total += float(np.dot(w, np.asarray(f(s), dtype=float)))
    return total


def adaptive_gl(f: Callable[[np.ndarray], np.ndarray], cfg: QuadratureConfig = _DEFAULT_QUAD) -> float:
    """Panel-doubling Gauss-Legendre on [0, 1] with an absolute stopping rule."""
    panels = cfg.base_panels
    prev = composite_gl(f, panels)
    for _ in range(cfg.max_refinements):
        panels *= 2
        cur = composite_gl(f, panels)
        if abs(cur - prev) <= cfg.abs_tol:
            return cur
        prev = cur
    raise NonConvergence(
        f"quadrature did not settle to {cfg.abs_tol:g} within "
        f"{cfg.max_refinements} panel doublings"
    )


def von_neumann_entropy(rho) -> float:
    """S(rho) = -Tr rho ln rho, in nats, over the support of rho."""
    a = as_density(rho)
    lam = np.linalg.eigvalsh(a)
    sel = lam > zero_band(lam)
    return float(-np.dot(lam[sel], np.log(lam[sel]))) + 0.0


def support_defect(p, q) -> float:
    """Weight of P carried by the kernel of Q (both PSD).

    Zero exactly when supp(P) is contained in supp(Q); this is the +inf
    detector for relative entropy.
    """
    p = as_psd(p)
    q = as_psd(q)
    if p.shape != q.shape:
        raise ValueError(f"shape mismatch {p.shape} vs {q.shape}")
    spec = hermitian_eig(q)
    lam = np.maximum(spec.eigenvalues, 0.0)
    ker = spec.eigenvectors[:, lam <= zero_band(lam)]
    if ker.shape[1] == 0:
        return 0.0
    mass = np.einsum("ij,ik,kj->", ker.conj(), p, ker)
    return max(float(mass.real), 0.0)


def _support_violated(p, q, tr_p: float) -> bool:
    return support_defect(p, q) > SUPPORT_MASS_TOL * max(1.0, tr_p)


def relative_entropy(p, q) -> float:
    """H(P, Q) = Tr P (ln P - ln Q) on PSD pairs; +inf on support violation."""
    p = as_psd(p)
    q = as_psd(q)
    if p.shape != q.shape:
        raise ValueError(f"shape mismatch {p.shape} vs {q.shape}")
    lam_p = np.maximum(np.linalg.eigvalsh(p), 0.0)
    sel_p = lam_p > zero_band(lam_p)
    tr_p_ln_p = float(np.dot(lam_p[sel_p], np.log(lam_p[sel_p])))

    spec_q = hermitian_eig(q)
    lam_q = np.maximum(spec_q.eigenvalues, 0.0)
    sel_q = lam_q > zero_band(lam_q)
    u = spec_q.eigenvectors
    p_in_q = np.einsum("ij,ik,kj->j", u.conj(), p, u).real
    ker_mass = float(p_in_q[~sel_q].sum())
    if ker_mass > SUPPORT_MASS_TOL * max(1.0, float(np.trace(p).real)):
        return math.inf
    tr_p_ln_q = float(np.dot(p_in_q[sel_q], np.log(lam_q[sel_q])))
    return tr_p_ln_p - tr_p_ln_q


class _IntegralData:
    """Shared spectral preparation for the integral and kernel routes."""

    __slots__ = ("weights", "q_eigs", "p_eigs", "trace_correction", "violated")

    def __init__(self, p, q):
        p = as_psd(p)
        q = as_psd(q)
        if p.shape != q.shape:
            raise ValueError(f"shape mismatch {p.shape} vs {q.shape}")
        sq = hermitian_eig(q)
        sp = hermitian_eig(p)
        lam_q = np.maximum(sq.eigenvalues, 0.0)
        lam_p = np.maximum(sp.eigenvalues, 0.0)
        band_q = zero_band(lam_q)
        band_p = zero_band(lam_p)
        diff = q - p
        xt = sq.eigenvectors.conj().T @ diff @ sp.eigenvectors
        w2 = (xt.conj() * xt).real

        q_support = lam_q > band_q
        u = sq.eigenvectors
        p_in_q = np.einsum("ij,ik,kj->j", u.conj(), p, u).real
        tr_p = float(np.trace(p).real)
        self.violated = float(p_in_q[~q_support].sum()) > SUPPORT_MASS_TOL * max(1.0, tr_p)

        lam_p = np.where(lam_p > band_p, lam_p, 0.0)
        # rows in ker(Q) carry no true contribution once supports are
        # compatible; drop them so denominators stay bounded away from zero
        self.weights = w2[q_support, :].ravel()
        self.q_eigs = np.repeat(lam_q[q_support], lam_p.size)
        self.p_eigs = np.tile(lam_p, int(q_support.sum()))
        self.trace_correction = tr_p - float(np.trace(q).real)

    def integrand(self, s: np.ndarray) -> np.ndarray:
        t = s / (1.0 - s)
        return (self.weights[:, None] / (self.q_eigs[:, None] + t[None, :] * self.p_eigs[:, None])).sum(axis=0)


def relative_entropy_integral(p, q, cfg: QuadratureConfig = _DEFAULT_QUAD) -> float:
    """H(P, Q) by adaptive quadrature of the resolvent quadratic form."""
    data = _IntegralData(p, q)
    if data.violated:
        return math.inf
    return data.trace_correction + adaptive_gl(data.integrand, cfg)


def relative_entropy_integral_fixed(p, q, panels: int) -> float:
    """Single-pass version at a fixed panel count, for convergence studies."""
    if panels < 1:
        raise ValueError("panel count must be >= 1")
    data = _IntegralData(p, q)
    if data.violated:
        return math.inf
    return data.trace_correction + composite_gl(data.integrand, panels)


# --------------------------------------------------------------------------
# Closed-form kernel route

# |a - b| below SWITCH_EXACT * max(a, b) returns the a = b limit 1/(2a);
# below SWITCH_SERIES it uses a short series in (b - a)/a, because the
# closed form loses ~half its digits to cancellation there.
_SWITCH_EXACT = 1e-8
_SWITCH_SERIES = 1e-5


def kernel_k(a: float, b: float) -> float:
    """k(a, b) = int_0^inf (a + t b)^{-1} (1 + t)^{-2} dt for a, b > 0.

    Closed form b ln(b/a)/(b-a)^2 + 1/(a-b), with a series takeover near
    the removable singularity at a = b (value 1/(2a)).
    """
    a = float(a)
    b = float(b)
    if not (a > 0.0) or not (b > 0.0):
        raise ValueError(f"kernel_k needs positive arguments, got ({a!r}, {b!r})")
    scale = max(a, b)
    diff = b - a
    if abs(diff) <= _SWITCH_EXACT * scale:
        return 0.5 / a
    if abs(diff) <= _SWITCH_SERIES * scale:
        delta = diff / a
        return (0.5 - delta / 6.0 + delta ** 2 / 12.0 - delta ** 3 / 20.0 + delta ** 4 / 30.0) / a
    return b * math.log(b / a) / (diff * diff) - 1.0 / diff


def _kernel_k_arrays(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorized kernel_k over positive arrays (same switch bands)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.empty(a.shape)
    scale = np.maximum(a, b)
    diff = b - a
    near = np.abs(diff) <= _SWITCH_EXACT * scale
    mid = (np.abs(diff) <= _SWITCH_SERIES * scale) & ~near
    far = ~(near | mid)
    out[near] = 0.5 / a[near]
    if mid.any():
        delta = diff[mid] / a[mid]
        out[mid] = (0.5 - delta / 6.0 + delta ** 2 / 12.0 - delta ** 3 / 20.0 + delta ** 4 / 30.0) / a[mid]
    if far.any():
        d = diff[far]
        out[far] = b[far] * np.log(b[far] / a[far]) / (d * d) - 1.0 / d
    return out


def relative_entropy_spectral_kernel(p, q) -> float:
    """H(P, Q) with the resolvent integral evaluated per eigenpair:
    H = Tr(P - Q) + sum_{mn} |(U^dag (Q-P) V)_{mn}|^2 k(q_m, p_n)."""
    data = _IntegralData(p, q)
    if data.violated:
        return math.inf
    pos = data.p_eigs > 0.0
    total = 0.0
    if pos.any():
        total += float(np.dot(data.weights[pos], _kernel_k_arrays(data.q_eigs[pos], data.p_eigs[pos])))
    if (~pos).any():
        # k(a, 0) = int (a)^{-1}(1+t)^{-2} = 1/a
        total += float(np.dot(data.weights[~pos], 1.0 / data.q_eigs[~pos]))
    return data.trace_correction + total


def scalar_log_identity(w: float, cfg: QuadratureConfig = _DEFAULT_QUAD) -> tuple[float, float, float]:
    """The 1x1 sanity chain behind the integral route.

    Returns (-ln w, quadrature of int_0^inf [1/(w+t) - 1/(1+t)] dt,
    (1-w) + quadrature of int_0^inf (w-1)^2 / ((w+t)(1+t)^2) dt); all three
    agree for w > 0.  The same t = s/(1-s) substitution is used, under
    which both integrands become smooth rational functions on [0, 1].
    """
    w = float(w)
    if not (w > 0.0) or not np.isfinite(w):
        raise ValueError(f"w must be positive and finite, got {w!r}")
    lhs = -math.log(w)

    def g1(s: np.ndarray) -> np.ndarray:
        return (1.0 - w) / (s + w * (1.0 - s))

    def g2(s: np.ndarray) -> np.ndarray:
        return (w - 1.0) ** 2 * (1.0 - s) / (w * (1.0 - s) + s)

    rhs1 = adaptive_gl(g1, cfg)
    rhs2 = (1.0 - w) + adaptive_gl(g2, cfg)
    return lhs, rhs1, rhs2


def conditional_entropy(rho_ab, dims, check_identity: bool = False) -> float:
    """Entropy of the second factor conditioned on the first:
    S(rho_AB) - S(rho_A).  Reduces to S(rho_B) on product states.

    With check_identity=True also verifies the relative-entropy form
    S(rho_AB) - S(rho_A) = ln d_B - H(rho_AB, rho_A (x) I/d_B) to 1e-9 and
    raises ArithmeticError on disagreement.
    """
    rho = as_density(rho_ab)
    if len(dims) != 2:
        raise ValueError(f"dims must list two factors, got {dims!r}")
    d_a, d_b = int(dims[0]), int(dims[1])
    rho_a = partial_trace(rho, (d_a, d_b), keep=(0,))
    value = von_neumann_entropy(rho) - von_neumann_entropy(rho_a)
    if check_identity:
        gamma = tensor(rho_a, np.eye(d_b) / d_b)
        rhs = math.log(d_b) - relative_entropy(rho, gamma)
        if abs(value - rhs) > 1e-9:
            raise ArithmeticError(
                f"conditional entropy identity broken: {value!r} vs {rhs!r}"
            )
    return value


def quadratic_relent(p, q) -> float:
    """Tr (Q-P) (L_P + R_Q)^{-1} (Q-P), the quadratic lower-order proxy of
    H(P, Q).  Joint-kernel modes of the pair carry no weight of Q - P, so
    the pseudo-inverse convention is exact here."""
    spec = SuperOpSpec(p, q, 1.0)
    diff = spec.right - spec.left  # validated copies of q, p
    y = solve_resolvent(spec, diff)
    return float(np.sum(diff.conj() * y).real)


def bures_distance(p, q) -> float:
    """Bures distance sqrt(2 (1 - Tr sqrt(sqrt(P) Q sqrt(P)))) between
    density matrices; sqrt(2) for orthogonal pure states."""
    p = as_density(p)
    q = as_density(q)
    if p.shape != q.shape:
        raise ValueError(f"shape mismatch {p.shape} vs {q.shape}")
    root_p = matrix_function(p, lambda x: math.sqrt(max(x, 0.0)))
    inner = root_p @ q @ root_p
    inner = (inner + inner.conj().T) / 2
    root = matrix_function(inner, lambda x: math.sqrt(max(x, 0.0)))
    fid_root = float(np.trace(root).real)
    return math.sqrt(max(0.0, 2.0 * (1.0 - fid_root)))
