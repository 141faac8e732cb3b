"""Dense complex matrix foundations.

Conventions used throughout the package:

* matrices are numpy ``complex128`` arrays in row-major layout;
* ``tensor(A, B)`` orders factors left to right with the leftmost factor
  slowest, i.e. the row index of the product is ``i_A * d_B + i_B``;
* all logarithms are natural, so entropic quantities are in nats;
* eigenvalues within ``KERNEL_ETA`` of zero, relative to the largest
  eigenvalue magnitude, are treated as exact zeros.  Every kernel-related
  decision (support projections, pseudo-inverses, +inf detection) goes
  through this one band.

The JSON form of a matrix is
``{"d_rows": r, "d_cols": c, "re": [...], "im": [...]}`` with both entry
lists flattened row-major.  All file I/O in this package reads and writes
that format.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

# Relative width of the spectral band treated as exact zero.
KERNEL_ETA = 1e-12
# max-norm Hermiticity defect allowed at construction, relative to scale.
HERMITICITY_TOL = 1e-12
# How negative an eigenvalue may be before a matrix stops counting as PSD.
PSD_TOL = 1e-10
TRACE_TOL = 1e-10


class NonConvergence(RuntimeError):
    """An iterative numerical procedure did not reach its tolerance."""


class KernelObstruction(ValueError):
    """An input carries significant weight on a kernel where the requested
    map is undefined."""


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite complex 2-d array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def as_hermitian(m) -> np.ndarray:
    """Validate Hermiticity to tolerance and return the symmetrized matrix."""
    a = as_matrix(m)
    r, c = a.shape
    if r != c:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    defect = max_abs(a - a.conj().T)
    if defect > HERMITICITY_TOL * max(1.0, max_abs(a)):
        raise ValueError(f"matrix is not Hermitian (defect {defect:.3e})")
    return (a + a.conj().T) / 2


def as_psd(m, tol: float = PSD_TOL) -> np.ndarray:
    """Validate positive semidefiniteness to tolerance (scale-aware)."""
    a = as_hermitian(m)
    w = np.linalg.eigvalsh(a)
    lo = float(w[0])
    if lo < -tol * max(1.0, float(w[-1])):
        raise ValueError(f"matrix is not PSD (min eigenvalue {lo:.3e})")
    return a


def as_density(m) -> np.ndarray:
    """Validate a density matrix: PSD with unit trace (both to 1e-10)."""
    a = as_psd(m)
    tr = float(np.trace(a).real)
    if abs(tr - 1.0) > TRACE_TOL:
        raise ValueError(f"density matrix must have unit trace, got {tr!r}")
    return a


def zero_band(eigenvalues: np.ndarray) -> float:
    """Width of the band around zero treated as exact kernel."""
    w = np.asarray(eigenvalues)
    if w.size == 0:
        return 0.0
    return KERNEL_ETA * float(np.max(np.abs(w)))


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (real, ascending) and matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def hermitian_eig(m) -> Spectrum:
    """Full eigendecomposition of a Hermitian matrix.

    Validates Hermiticity first; raises NonConvergence if the underlying
    solver fails to converge (essentially never at these dimensions).
    """
    a = as_hermitian(m)
    try:
        w, u = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(f"eigensolver failed: {exc}") from exc
    return Spectrum(w, u)


def matrix_function(m, f: Callable[[float], float], on_kernel: str = "apply") -> np.ndarray:
    """Apply a real scalar function to a Hermitian matrix spectrally.

    Eigenvalues inside the zero band are snapped to exactly 0 first.
    ``on_kernel="apply"`` passes those zeros to ``f`` like any other
    eigenvalue; ``on_kernel="drop"`` excludes them, which turns ``f(x)=1/x``
    into the pseudo-inverse and ``log`` into its support restriction.
    Raises ValueError when ``f`` is undefined or non-finite on a (snapped)
    eigenvalue.
    """
    if on_kernel not in ("apply", "drop"):
        raise ValueError(f"on_kernel must be 'apply' or 'drop', got {on_kernel!r}")
    spec = hermitian_eig(m)
    lam = spec.eigenvalues.copy()
    band = zero_band(lam)
    in_band = np.abs(lam) <= band
    lam[in_band] = 0.0
    keep = ~in_band if on_kernel == "drop" else np.ones(lam.size, dtype=bool)
    vals = np.empty(int(keep.sum()))
    for i, x in enumerate(lam[keep]):
        try:
            y = float(f(float(x)))
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise ValueError(f"eigenvalue {x!r} outside the domain of f: {exc}") from exc
        if not np.isfinite(y):
            raise ValueError(f"f({x!r}) is not finite")
        vals[i] = y
    u = spec.eigenvectors[:, keep]
    out = (u * vals) @ u.conj().T
    return (out + out.conj().T) / 2


def hs_inner(a, b) -> complex:
    """Hilbert-Schmidt inner product Tr(A^dag B), antilinear in A."""
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return complex(np.sum(a.conj() * b))


def tensor(a, b) -> np.ndarray:
    """Kronecker product with the left factor slowest."""
    return np.kron(as_matrix(a), as_matrix(b))


def _factor_dims(dims: Sequence[int], total: int) -> list[int]:
    ds = [int(d) for d in dims]
    if not ds or any(d < 1 for d in ds):
        raise ValueError(f"factor dimensions must be positive, got {dims!r}")
    prod = 1
    for d in ds:
        prod *= d
    if prod != total:
        raise ValueError(f"factor dimensions {ds} do not multiply to {total}")
    return ds


def partial_trace(m, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out all tensor factors not listed in ``keep``.

    Kept factors stay in their original order.  ``dims`` lists every factor
    dimension, slowest first, matching the `tensor` convention.
    """
    a = as_matrix(m)
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise ValueError("partial trace needs a square matrix")
    ds = _factor_dims(dims, n)
    k = len(ds)
    keep_set = sorted(set(int(i) for i in keep))
    if len(keep_set) != len(tuple(keep)):
        raise ValueError(f"duplicate factor index in keep={keep!r}")
    if any(i < 0 or i >= k for i in keep_set):
        raise ValueError(f"keep={keep!r} out of range for {k} factors")
    t = a.reshape(ds + ds)
    nfac = k
    for ax in sorted(set(range(k)) - set(keep_set), reverse=True):
        t = np.trace(t, axis1=ax, axis2=ax + nfac)
        nfac -= 1
    d_keep = 1
    for i in keep_set:
        d_keep *= ds[i]
    return np.ascontiguousarray(t.reshape(d_keep, d_keep))


def permute_factors(m, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder the tensor factors of a square matrix.

    Factor ``s`` of the result is factor ``perm[s]`` of the input.
    """
    a = as_matrix(m)
    ds = _factor_dims(dims, a.shape[0])
    k = len(ds)
    p = [int(i) for i in perm]
    if sorted(p) != list(range(k)):
        raise ValueError(f"perm={perm!r} is not a permutation of 0..{k - 1}")
    t = a.reshape(ds + ds).transpose(p + [k + i for i in p])
    return np.ascontiguousarray(t.reshape(a.shape))


# ---------------------------------------------------------------------------
# JSON serialization


def matrix_to_json(m) -> dict:
    a = as_matrix(m)
    return {
        "d_rows": int(a.shape[0]),
        "d_cols": int(a.shape[1]),
        "re": [float(x) for x in a.real.ravel()],
        "im": [float(x) for x in a.imag.ravel()],
    }


def matrix_from_json(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise ValueError("matrix JSON must be an object")
    try:
        r = int(obj["d_rows"])
        c = int(obj["d_cols"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed matrix JSON: {exc}") from exc
    if r < 1 or c < 1:
        raise ValueError(f"matrix dimensions must be positive, got {r}x{c}")
    if re.shape != (r * c,) or im.shape != (r * c,):
        raise ValueError(
            f"re/im must be flat row-major lists of {r * c} values for a "
            f"{r}x{c} matrix, got shapes re={re.shape} im={im.shape}"
        )
    return as_matrix((re + 1j * im).reshape(r, c))


def read_matrix(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        return matrix_from_json(json.load(fh))


def write_matrix(path, m) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(matrix_to_json(m), fh)
        fh.write("\n")
