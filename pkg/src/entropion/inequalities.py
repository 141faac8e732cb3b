"""Margin-style checks for the entropy and Schwarz inequalities.

Every check returns margins with the convention

    margin = (claimed larger side) - (claimed smaller side)

so a correct inequality yields margin >= -tol and equalities show up as
margins near zero.  Agreement checks (two expressions that must coincide)
are reported as negated gaps, -|lhs - rhs|, so the same pass rule applies.
Checks never generate randomness; instances come in from outside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .channels import KrausMap, apply_channel, apply_linear, adjoint_channel, dephase
from .entropy import (
    conditional_entropy,
    relative_entropy,
    support_defect,
    von_neumann_entropy,
)
from .matcore import (
    as_density,
    as_hermitian,
    as_matrix,
    as_psd,
    hermitian_eig,
    matrix_function,
    partial_trace,
    zero_band,
)
from .superop import SuperOpSpec, solve_resolvent

SIMPLEX_TOL = 1e-12
# Weights below this are clamped to exactly zero and the rest renormalized.
WEIGHT_CLAMP = 1e-12


def _simplex_weights(weights, clamp: bool = False) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("weights must be a nonempty 1-d sequence")
    if np.any(w < -SIMPLEX_TOL):
        raise ValueError("weights must be nonnegative")
    if abs(float(w.sum()) - 1.0) > SIMPLEX_TOL:
        raise ValueError(f"weights must sum to 1, got {float(w.sum())!r}")
    if clamp:
        w = np.where(w < WEIGHT_CLAMP, 0.0, w)
        s = w.sum()
        if s <= 0.0:
            raise ValueError("all weights clamped to zero")
        w = w / s
    return w


class Failure(NamedTuple):
    trial: int
    margin: float
    digest: str


@dataclass(frozen=True)
class CheckReport:
    """Aggregated outcome of one randomized suite."""

    suite: str
    trials: int
    seed: int
    tol: float
    worst_margin: float
    skipped_infinite: int
    failures: tuple[Failure, ...] = field(default_factory=tuple)
    runtime_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json_dict(self) -> dict:
        return {
            "suite": self.suite,
            "trials": self.trials,
            "seed": self.seed,
            "tol": self.tol,
            "pass": self.passed,
            "worst_margin": self.worst_margin,
            "skipped_infinite": self.skipped_infinite,
            "failures": [
                {"trial": f.trial, "margin": f.margin, "digest": f.digest}
                for f in self.failures
            ],
            "runtime_ms": self.runtime_ms,
        }


class ConvexityInstance:
    """A convex-combination instance: simplex weights and PSD pairs with
    compatible supports (every P_j supported inside the corresponding Q_j,
    so no term of the combination is infinite by construction)."""

    __slots__ = ("weights", "pairs")

    def __init__(self, weights, pairs):
        self.weights = _simplex_weights(weights, clamp=True)
        ps = tuple((as_psd(p), as_psd(q)) for p, q in pairs)
        if len(ps) != self.weights.size:
            raise ValueError("one (P, Q) pair required per weight")
        for j, (p, q) in enumerate(ps):
            if p.shape != q.shape or p.shape != ps[0][0].shape:
                raise ValueError("all pairs must share one dimension")
            mass = support_defect(p, q)
            if mass > 1e-10 * max(1.0, float(np.trace(p).real)):
                raise ValueError(f"pair {j}: P has weight {mass:.3e} outside supp(Q)")
        self.pairs = ps


class JointConvexityMargins(NamedTuple):
    margin: float
    subadditive_margin: float
    scaling_gap: float


def check_joint_convexity(inst: ConvexityInstance) -> JointConvexityMargins:
    """Joint convexity of H plus its two appendix-route companions.

    margin             sum_j x_j H(P_j, Q_j) - H(sum x P, sum x Q)
    subadditive_margin sum_j H(P_j, Q_j)     - H(sum P, sum Q)
    scaling_gap        |sum_j H(x_j P_j, x_j Q_j) - sum_j x_j H(P_j, Q_j)|

    the last being the homogeneity step that upgrades subadditivity to
    convexity.  All three come back +inf if any term is infinite, so the
    caller can classify the trial as skipped.
    """
    terms = [relative_entropy(p, q) for p, q in inst.pairs]
    if any(math.isinf(h) for h in terms):
        return JointConvexityMargins(math.inf, math.inf, math.inf)
    x = inst.weights
    mix_p = sum(w * p for w, (p, _) in zip(x, inst.pairs))
    mix_q = sum(w * q for w, (_, q) in zip(x, inst.pairs))
    weighted = float(np.dot(x, terms))
    margin = weighted - relative_entropy(mix_p, mix_q)

    sum_p = sum(p for p, _ in inst.pairs)
    sum_q = sum(q for _, q in inst.pairs)
    subadditive = float(sum(terms)) - relative_entropy(sum_p, sum_q)

    scaled = 0.0
    for w, (p, q) in zip(x, inst.pairs):
        if w > 0.0:
            scaled += relative_entropy(w * p, w * q)
    scaling_gap = abs(scaled - weighted)
    return JointConvexityMargins(float(margin), float(subadditive), float(scaling_gap))


def check_schwarz_quadratic(a_list: Sequence, p_list: Sequence, q_list: Sequence, t: float) -> float:
    """Convexity of the resolvent quadratic form: the termwise sum
    sum_j Tr A_j^dag (L_{P_j} + t R_{Q_j})^{-1} A_j dominates the same form
    at the summed data."""
    if not (len(a_list) == len(p_list) == len(q_list)) or not a_list:
        raise ValueError("need equally many A, P, Q entries")
    total = 0.0
    for a, p, q in zip(a_list, p_list, q_list):
        a = as_matrix(a)
        y = solve_resolvent(SuperOpSpec(p, q, t), a)
        total += float(np.sum(a.conj() * y).real)
    a_sum = sum(as_matrix(a) for a in a_list)
    p_sum = sum(as_psd(p) for p in p_list)
    q_sum = sum(as_psd(q) for q in q_list)
    y = solve_resolvent(SuperOpSpec(p_sum, q_sum, t), a_sum)
    combined = float(np.sum(a_sum.conj() * y).real)
    return total - combined


def _strict_inverse(p) -> np.ndarray:
    return matrix_function(p, lambda x: 1.0 / x)


def _min_eig(m) -> float:
    h = as_matrix(m)
    h = (h + h.conj().T) / 2
    return float(np.linalg.eigvalsh(h)[0])


def check_operator_schwarz(a_list: Sequence, p_list: Sequence) -> float:
    """Operator Schwarz inequality
    sum_k A_k^dag P_k^{-1} A_k >= (sum A)^dag (sum P)^{-1} (sum A),
    reported as the smallest eigenvalue of the difference."""
    if len(a_list) != len(p_list) or not a_list:
        raise ValueError("need equally many A and P entries")
    lhs = None
    for a, p in zip(a_list, p_list):
        a = as_matrix(a)
        term = a.conj().T @ _strict_inverse(p) @ a
        lhs = term if lhs is None else lhs + term
    a_sum = sum(as_matrix(a) for a in a_list)
    p_sum = sum(as_psd(p) for p in p_list)
    rhs = a_sum.conj().T @ _strict_inverse(p_sum) @ a_sum
    return _min_eig(lhs - rhs)


def check_cp_schwarz(phi: KrausMap, a, b, p) -> tuple[float, float]:
    """Schwarz inequalities under a completely positive map: smallest
    eigenvalues of

        Phi(A^dag P^{-1} A) - Phi(A)^dag Phi(P)^{-1} Phi(A)
        Phi(A^dag A) - Phi(A^dag B) Phi(B^dag B)^{-1} Phi(B^dag A)
    """
    a = as_matrix(a)
    b = as_matrix(b)
    p = as_psd(p)
    t1 = apply_linear(phi, a.conj().T @ _strict_inverse(p) @ a)
    fa = apply_linear(phi, a)
    fp_inv = _strict_inverse(apply_channel(phi, p))
    m1 = _min_eig(t1 - fa.conj().T @ fp_inv @ fa)

    t2 = apply_linear(phi, a.conj().T @ a)
    g = apply_linear(phi, a.conj().T @ b)
    h_inv = _strict_inverse(apply_channel(phi, (b.conj().T @ b + (b.conj().T @ b).conj().T) / 2))
    m2 = _min_eig(t2 - g @ h_inv @ g.conj().T)
    return m1, m2


@dataclass(frozen=True)
class BlockContractionReport:
    """Equivalence of three positivity criteria for [[P, C], [C^dag, Q]]:
    the block matrix itself, the Schur complement Q - C^dag P^{-1} C, and
    the contraction bound on P^{-1/2} C Q^{-1/2}.  Margins within tol of
    the boundary make the verdict indeterminate rather than failed."""

    block_min_eig: float
    schur_min_eig: float
    max_singular_value: float
    tol: float

    @property
    def indeterminate(self) -> bool:
        return (
            abs(self.block_min_eig) <= self.tol
            or abs(self.schur_min_eig) <= self.tol
            or abs(self.max_singular_value - 1.0) <= self.tol
        )

    @property
    def consistent(self) -> bool:
        if self.indeterminate:
            return True
        block = self.block_min_eig > 0.0
        schur = self.schur_min_eig > 0.0
        contraction = self.max_singular_value < 1.0
        return block == schur == contraction


def check_block_contraction(p, q, c, tol: float = 1e-9) -> BlockContractionReport:
    p = as_psd(p)
    q = as_psd(q)
    c = as_matrix(c)
    if c.shape != p.shape or p.shape != q.shape:
        raise ValueError("P, Q, C must share one square shape")
    block = np.block([[p, c], [c.conj().T, q]])
    block_min = _min_eig(block)
    p_inv = _strict_inverse(p)
    schur_min = _min_eig(q - c.conj().T @ p_inv @ c)
    p_mhalf = matrix_function(p, lambda v: v ** -0.5)
    q_mhalf = matrix_function(q, lambda v: v ** -0.5)
    x = p_mhalf @ c @ q_mhalf
    smax = float(np.linalg.svd(x, compute_uv=False)[0])
    return BlockContractionReport(block_min, schur_min, smax, float(tol))


def check_monotonicity(rho, gamma, mode: str = "general", channel: KrausMap | None = None,
                       dims=None) -> float:
    """Data-processing margin H(rho, gamma) - H(Phi rho, Phi gamma).

    mode "dephase" uses the standard-basis dephasing, "partial_trace"
    keeps factor 0 of ``dims``, "general" applies the given trace
    preserving Kraus channel.  Returns +inf (trial skipped) when the input
    relative entropy is infinite, or on the off chance the output one is.
    """
    rho = as_density(rho)
    gamma = as_density(gamma)
    h_in = relative_entropy(rho, gamma)
    if math.isinf(h_in):
        return math.inf
    if mode == "dephase":
        out = (dephase(rho), dephase(gamma))
    elif mode == "partial_trace":
        if dims is None:
            raise ValueError("partial_trace mode needs dims")
        out = (partial_trace(rho, dims, (0,)), partial_trace(gamma, dims, (0,)))
    elif mode == "general":
        if channel is None:
            raise ValueError("general mode needs a channel")
        defect = channel.completeness_defect()
        if defect > 1e-10:
            raise ValueError(f"channel is not trace preserving (defect {defect:.3e})")
        out = (apply_channel(channel, rho), apply_channel(channel, gamma))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    h_out = relative_entropy(*out)
    if math.isinf(h_out):
        return math.inf
    return h_in - h_out


class SsaMargins(NamedTuple):
    primary: float
    alt: float
    f_value: float


def check_ssa(rho_abc, dims) -> SsaMargins:
    """Strong subadditivity margins for a tripartite state.

    primary = S(AB) + S(BC) - S(ABC) - S(B);
    alt     = S(AB) + S(AC) - S(B) - S(C), the concave functional F with
    the third factor in the purifying role (f_value is F itself, which is
    numerically the same expression on the input state).
    """
    rho = as_density(rho_abc)
    ds = [int(d) for d in dims]
    if len(ds) != 3:
        raise ValueError(f"dims must list three factors, got {dims!r}")
    s_abc = von_neumann_entropy(rho)
    s_ab = von_neumann_entropy(partial_trace(rho, ds, (0, 1)))
    s_bc = von_neumann_entropy(partial_trace(rho, ds, (1, 2)))
    s_ac = von_neumann_entropy(partial_trace(rho, ds, (0, 2)))
    s_b = von_neumann_entropy(partial_trace(rho, ds, (1,)))
    s_c = von_neumann_entropy(partial_trace(rho, ds, (2,)))
    primary = s_ab + s_bc - s_abc - s_b
    f_value = s_ab + s_ac - s_b - s_c
    return SsaMargins(float(primary), float(f_value), float(f_value))


def check_concavity(mode: str, states: Sequence, weights, channel: KrausMap | None = None,
                    dims=None) -> float:
    """Concavity margin f(sum w rho) - sum w f(rho) for
    f = conditional entropy (mode "conditional_entropy", needs dims) or
    f = S(rho) - S(Phi rho) (mode "entropy_diff", needs a TP channel)."""
    w = _simplex_weights(weights)
    rhos = [as_density(r) for r in states]
    if len(rhos) != w.size:
        raise ValueError("one state per weight")
    if mode == "conditional_entropy":
        if dims is None:
            raise ValueError("conditional_entropy mode needs dims")
        f = lambda r: conditional_entropy(r, dims)
    elif mode == "entropy_diff":
        if channel is None:
            raise ValueError("entropy_diff mode needs a channel")
        defect = channel.completeness_defect()
        if defect > 1e-10:
            raise ValueError(f"channel is not trace preserving (defect {defect:.3e})")
        f = lambda r: von_neumann_entropy(r) - von_neumann_entropy(apply_channel(channel, r))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    avg = sum(wi * ri for wi, ri in zip(w, rhos))
    return float(f(avg) - sum(wi * f(ri) for wi, ri in zip(w, rhos)))


def check_pure_state_lemmas(psi, dims) -> float:
    """Both reductions of a bipartite pure state share one nonzero
    spectrum; returns the max deviation between the sorted spectra
    (padded with zeros to a common length)."""
    v = np.asarray(psi, dtype=complex).ravel()
    n = float(np.linalg.norm(v))
    if abs(n - 1.0) > 1e-12:
        raise ValueError(f"state vector must be normalized, got norm {n!r}")
    ds = [int(d) for d in dims]
    if len(ds) != 2 or ds[0] * ds[1] != v.size:
        raise ValueError(f"dims {dims!r} do not match a vector of size {v.size}")
    proj = np.outer(v, v.conj())
    spectra = []
    for keep in ((0,), (1,)):
        red = partial_trace(proj, ds, keep)
        lam = np.linalg.eigvalsh(red)
        lam = np.maximum(lam, 0.0)
        spectra.append(np.sort(lam[lam > zero_band(lam)])[::-1])
    a, b = spectra
    k = max(a.size, b.size)
    a = np.pad(a, (0, k - a.size))
    b = np.pad(b, (0, k - b.size))
    return float(np.max(np.abs(a - b))) if k else 0.0


def check_adjoint_contraction(phi: KrausMap, p, q, a, t: float = 1.0) -> float:
    """Quadratic-form drop under the adjoint channel.

    With X = (L_{Phi(P)} + t R_{Phi(Q)})^{-1} Phi(A), the Schwarz step
    behind monotonicity demands

        Tr X^dag (Phi(P) X + t X Phi(Q))
          >= Tr Phi^*(X)^dag (P Phi^*(X) + t Phi^*(X) Q)

    and the margin is lhs - rhs."""
    defect = phi.completeness_defect()
    if defect > 1e-10:
        raise ValueError(f"channel is not trace preserving (defect {defect:.3e})")
    p = as_psd(p)
    q = as_psd(q)
    a = as_matrix(a)
    fp = apply_channel(phi, p)
    fq = apply_channel(phi, q)
    fa = apply_linear(phi, a)
    x = solve_resolvent(SuperOpSpec(fp, fq, t), fa)
    lhs = float(np.sum(x.conj() * (fp @ x + t * (x @ fq))).real)
    back = apply_linear(adjoint_channel(phi), x)
    rhs = float(np.sum(back.conj() * (p @ back + t * (back @ q))).real)
    return lhs - rhs
