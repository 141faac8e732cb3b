"""Two-sided multiplication superoperators and their resolvents.

The central object is the map ``X -> L X + t X R`` for PSD matrices L, R
and t >= 0.  Diagonalizing L = U diag(l) U^dag and R = V diag(r) V^dag
turns it into entrywise multiplication by ``l_m + t r_n`` on the matrix
``U^dag X V``, so both the map and its (pseudo-)resolvent cost two
eigendecompositions plus basis changes.  The dense d^2 x d^2 matrix of the
same map under row-major vec serves as an independent oracle.
"""

from __future__ import annotations

import numpy as np

from .matcore import (
    KernelObstruction,
    Spectrum,
    as_matrix,
    as_psd,
    hermitian_eig,
    max_abs,
)

# Denominators at or below this fraction of the spectral scale count as
# joint kernel; inputs may carry at most KERNEL_MASS_TOL relative weight
# there before a resolvent solve is refused.
KERNEL_BAND = 1e-12
KERNEL_MASS_TOL = 1e-10


def left_mul(p, x) -> np.ndarray:
    """Left multiplication operator applied to x."""
    p = as_matrix(p)
    x = as_matrix(x)
    if p.shape[1] != x.shape[0]:
        raise ValueError(f"incompatible shapes {p.shape} and {x.shape}")
    return p @ x


def right_mul(p, x) -> np.ndarray:
    """Right multiplication operator applied to x."""
    p = as_matrix(p)
    x = as_matrix(x)
    if x.shape[1] != p.shape[0]:
        raise ValueError(f"incompatible shapes {x.shape} and {p.shape}")
    return x @ p


class SuperOpSpec:
    """The map X -> left X + t X right, with cached spectral data.

    Both multipliers must be PSD (to 1e-10) and of the same dimension;
    eigenvalues are clipped at zero after validation so resolvent
    denominators are never spuriously negative.
    """

    __slots__ = ("left", "right", "t", "left_spectrum", "right_spectrum")

    def __init__(self, left, right, t: float = 1.0, _spectra=None):
        self.left = as_psd(left)
        self.right = as_psd(right)
        if self.left.shape != self.right.shape:
            raise ValueError(
                f"multiplier shapes differ: {self.left.shape} vs {self.right.shape}"
            )
        t = float(t)
        if not (t >= 0.0) or not np.isfinite(t):
            raise ValueError(f"t must be finite and >= 0, got {t!r}")
        self.t = t
        if _spectra is None:
            ls = hermitian_eig(self.left)
            rs = hermitian_eig(self.right)
            self.left_spectrum = Spectrum(np.maximum(ls.eigenvalues, 0.0), ls.eigenvectors)
            self.right_spectrum = Spectrum(np.maximum(rs.eigenvalues, 0.0), rs.eigenvectors)
        else:
            self.left_spectrum, self.right_spectrum = _spectra

    @property
    def dim(self) -> int:
        return self.left.shape[0]

    def with_t(self, t: float) -> "SuperOpSpec":
        """Same multipliers at a different t; reuses the spectra."""
        out = SuperOpSpec.__new__(SuperOpSpec)
        out.left = self.left
        out.right = self.right
        t = float(t)
        if not (t >= 0.0) or not np.isfinite(t):
            raise ValueError(f"t must be finite and >= 0, got {t!r}")
        out.t = t
        out.left_spectrum = self.left_spectrum
        out.right_spectrum = self.right_spectrum
        return out

    def apply(self, x) -> np.ndarray:
        x = as_matrix(x)
        if x.shape != self.left.shape:
            raise ValueError(f"operand shape {x.shape} != {self.left.shape}")
        return self.left @ x + self.t * (x @ self.right)


def solve_resolvent(spec: SuperOpSpec, x, kernel_mass_tol: float = KERNEL_MASS_TOL) -> np.ndarray:
    """Solve left Y + t Y right = X on the support of the map.

    Denominators within KERNEL_BAND of zero (relative to
    lambda_max(left) + t lambda_max(right)) are joint kernel: Y is set to
    zero there, pseudo-inverse style, provided X carries no more than
    ``kernel_mass_tol`` relative weight on those modes.  Otherwise raises
    KernelObstruction.
    """
    x = as_matrix(x)
    if x.shape != spec.left.shape:
        raise ValueError(f"operand shape {x.shape} != {spec.left.shape}")
    lvals = spec.left_spectrum.eigenvalues
    rvals = spec.right_spectrum.eigenvalues
    u = spec.left_spectrum.eigenvectors
    v = spec.right_spectrum.eigenvectors
    xt = u.conj().T @ x @ v
    denom = lvals[:, None] + spec.t * rvals[None, :]
    scale = float(lvals[-1] + spec.t * rvals[-1]) if lvals.size else 0.0
    kernel = denom <= KERNEL_BAND * scale if scale > 0.0 else np.ones_like(denom, dtype=bool)
    if kernel.any():
        mass = max_abs(xt[kernel])
        if mass > kernel_mass_tol * max(1.0, max_abs(x)):
            raise KernelObstruction(
                f"operand has weight {mass:.3e} on the joint kernel of the map"
            )
    yt = np.zeros_like(xt)
    ok = ~kernel
    yt[ok] = xt[ok] / denom[ok]
    return u @ yt @ v.conj().T


def superop_matrix(spec: SuperOpSpec) -> np.ndarray:
    """Dense matrix of the map under row-major vec:
    vec(L X + t X R) = (L (x) I + t I (x) R^T) vec(X)."""
    d = spec.dim
    eye = np.eye(d)
    return np.kron(spec.left, eye) + spec.t * np.kron(eye, spec.right.T)
