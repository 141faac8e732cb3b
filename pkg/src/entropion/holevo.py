"""Holevo quantity, its relative-entropy identities, and measurement bounds.

For an ensemble {(pi_j, rho_j)} with average rho_av = sum_j pi_j rho_j:

    chi = S(rho_av) - sum_j pi_j S(rho_j)
        = sum_j pi_j H(rho_j, rho_av)                      (mixture identity)
        = H(gamma_QC, gamma_Q (x) gamma_C)                 (flagged-state identity)

where gamma_QC = sum_j pi_j rho_j (x) |j><j| flags each member on a
classical register (quantum leg slowest).  Measuring through a POVM can
only lower chi; the checks here quantify that as margins.
"""

from __future__ import annotations

import math

import numpy as np

from .channels import (
    KrausMap,
    Povm,
    apply_channel,
    identity_channel,
    povm_channel,
    tensor_channel,
)
from .entropy import relative_entropy, von_neumann_entropy
from .matcore import as_density, tensor


class Ensemble:
    """Finite ensemble of density matrices with strictly positive weights."""

    __slots__ = ("weights", "states")

    def __init__(self, weights, states):
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a nonempty 1-d sequence")
        if np.any(w <= 0.0):
            raise ValueError("ensemble weights must be strictly positive")
        if abs(float(w.sum()) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {float(w.sum())!r}")
        rhos = tuple(as_density(r) for r in states)
        if len(rhos) != w.size:
            raise ValueError("one state per weight")
        d = rhos[0].shape[0]
        for r in rhos[1:]:
            if r.shape != (d, d):
                raise ValueError("ensemble states must share one dimension")
        self.weights = w
        self.states = rhos

    @property
    def dim(self) -> int:
        return self.states[0].shape[0]

    def __len__(self):
        return len(self.states)

    def average(self) -> np.ndarray:
        return sum(w * r for w, r in zip(self.weights, self.states))

    def map(self, phi: KrausMap) -> "Ensemble":
        """Apply one channel to every member; weights unchanged."""
        return Ensemble(self.weights, [apply_channel(phi, r) for r in self.states])


def _shannon(probs: np.ndarray) -> float:
    p = probs[probs > 0.0]
    return float(-np.dot(p, np.log(p)))


def _exactly_diagonal(m: np.ndarray) -> bool:
    return not np.any(m - np.diag(np.diag(m)))


def chi(ensemble: Ensemble) -> float:
    """Holevo quantity S(rho_av) - sum_j pi_j S(rho_j), >= 0.

    When every member is exactly diagonal (e.g. the output of a recorded
    measurement) this reduces to mutual information of the joint
    distribution and is computed by the Shannon formula directly.
    """
    avg = ensemble.average()
    if all(_exactly_diagonal(r) for r in ensemble.states):
        members = sum(
            w * _shannon(np.maximum(np.diag(r).real, 0.0))
            for w, r in zip(ensemble.weights, ensemble.states)
        )
        return _shannon(np.maximum(np.diag(avg).real, 0.0)) - float(members)
    members = float(np.dot(ensemble.weights, [von_neumann_entropy(r) for r in ensemble.states]))
    return von_neumann_entropy(avg) - members


def yuen_ozawa_gap(ensemble: Ensemble) -> float:
    """|chi - sum_j pi_j H(rho_j, rho_av)|; zero in exact arithmetic, and
    every term is finite because supp(rho_j) lies inside supp(rho_av)."""
    avg = ensemble.average()
    mix = sum(
        w * relative_entropy(r, avg) for w, r in zip(ensemble.weights, ensemble.states)
    )
    return abs(chi(ensemble) - float(mix))


def flagged_state(ensemble: Ensemble) -> np.ndarray:
    """gamma_QC = sum_j pi_j rho_j (x) |j><j|, quantum leg slowest."""
    n = len(ensemble)
    out = None
    for j, (w, r) in enumerate(zip(ensemble.weights, ensemble.states)):
        flag = np.zeros((n, n))
        flag[j, j] = 1.0
        term = w * tensor(r, flag)
        out = term if out is None else out + term
    return out


def chi_via_qc(ensemble: Ensemble) -> float:
    """chi as H(gamma_QC, gamma_Q (x) gamma_C) on the flagged state."""
    gamma_qc = flagged_state(ensemble)
    product = tensor(ensemble.average(), np.diag(ensemble.weights))
    return relative_entropy(gamma_qc, product)


def measure_ensemble(ensemble: Ensemble, povm: Povm) -> Ensemble:
    """Push every member through the measure-and-record channel of the
    POVM; outputs are exactly diagonal on the outcome register."""
    return ensemble.map(povm_channel(povm))


def check_holevo_bound(ensemble: Ensemble, povm: Povm) -> float:
    """chi(ensemble) - chi(measured ensemble) >= 0: the classical mutual
    information extracted by any POVM is bounded by chi."""
    return chi(ensemble) - chi(measure_ensemble(ensemble, povm))


def check_partial_measurement_chain(ensemble: Ensemble, dims, povm_a: Povm,
                                    povm_b: Povm) -> tuple[float, float]:
    """Two-step data processing on a bipartite ensemble:

        chi(E) >= chi((I (x) M_B) E) >= chi((M_A (x) M_B) E)

    returned as the two successive margins."""
    d_a, d_b = (int(dims[0]), int(dims[1]))
    if d_a * d_b != ensemble.dim:
        raise ValueError(f"dims {dims!r} do not factor dimension {ensemble.dim}")
    if povm_a.dim != d_a or povm_b.dim != d_b:
        raise ValueError("POVM dimensions do not match the factors")
    measure_b = tensor_channel(identity_channel(d_a), povm_channel(povm_b))
    measure_both = tensor_channel(povm_channel(povm_a), povm_channel(povm_b))
    chi_full = chi(ensemble)
    chi_half = chi(ensemble.map(measure_b))
    chi_classical = chi(ensemble.map(measure_both))
    return chi_full - chi_half, chi_half - chi_classical
