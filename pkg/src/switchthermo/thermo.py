"""Entropy, free energy, energy-basis pinching and coherence free energy.

Thermodynamic quantities are in nats with k = 1; ``f_over_kT`` is the free
energy divided by the ambient temperature, ``β⟨H⟩ - S``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, SizeError
from .matcore import as_matrix, hermitian_eig, is_hermitian
from .states import check_beta

LN2 = math.log(2.0)
SUPPORT_TOL = 1e-12
DENSITY_TOL = 1e-8


class Base(enum.Enum):
    BITS = 2
    NATS = math.e


def _h_matrix(h) -> np.ndarray:
    return np.asarray(getattr(h, "matrix", h), dtype=complex)


def _entropy_of_eigenvalues(w: np.ndarray) -> float:
    w = w[w > 0.0]
    return float(-np.sum(w * np.log(w)))


def vn_entropy(rho, base: Base = Base.BITS) -> float:
    rho = as_matrix(rho)
    if not is_hermitian(rho, DENSITY_TOL) or abs(np.trace(rho) - 1.0) > DENSITY_TOL:
        raise ContractError("vn_entropy needs a unit-trace Hermitian matrix")
    w = hermitian_eig(rho, tol=DENSITY_TOL).eigenvalues
    if w[0] < -DENSITY_TOL:
        raise ContractError(f"vn_entropy input has negative eigenvalue {w[0]}")
    s = max(_entropy_of_eigenvalues(w), 0.0)
    return s / LN2 if Base(base) is Base.BITS else s


@dataclass(frozen=True)
class FreeEnergyReport:
    """``⟨H⟩``, entropy in nats and ``F/kT``.

    At zero temperature ``f_over_kT`` is ``+inf``; compare such reports with
    :meth:`order_key`, the lexicographic ``(⟨H⟩, -S)`` limit of ``β⟨H⟩ - S``.
    """

    mean_energy: float
    entropy_nats: float
    f_over_kT: float
    beta: float

    def order_key(self) -> tuple[float, float]:
        return (self.mean_energy, -self.entropy_nats)


def free_energy(rho, h, beta: float) -> FreeEnergyReport:
    beta = check_beta(beta)
    rho = as_matrix(rho)
    hm = _h_matrix(h)
    if rho.shape != hm.shape:
        raise SizeError(f"state {rho.shape} and Hamiltonian {hm.shape} differ in size")
    energy = float(np.real(np.trace(rho @ hm)))
    entropy = vn_entropy(rho, Base.NATS)
    f = math.inf if math.isinf(beta) else beta * energy - entropy
    return FreeEnergyReport(energy, entropy, f, beta)


def _same_level_mask(h) -> np.ndarray:
    hm = _h_matrix(h)
    energies = np.real(np.diag(hm))
    if np.max(np.abs(hm - np.diag(energies))) > 1e-10:
        raise ContractError("dephasing needs a Hamiltonian diagonal in the computational basis")
    levels = np.rint(energies).astype(int)
    if np.max(np.abs(levels - energies)) > 1e-10:
        raise ContractError("dephasing expects integer energy levels")
    return levels[:, None] == levels[None, :]


def dephase(rho, h) -> np.ndarray:
    """Pinch ``rho`` onto the eigenspaces of ``h``: ``Σ_E P_E ρ P_E``.

    Degenerate levels keep their internal coherences.
    """
    rho = as_matrix(rho)
    mask = _same_level_mask(h)
    if mask.shape != rho.shape:
        raise SizeError(f"state {rho.shape} and Hamiltonian {mask.shape} differ in size")
    return np.where(mask, rho, 0.0)


def coherence_free_energy(rho, h) -> float:
    """``(F(ρ) - F(D_H ρ)) / kT`` in nats, which reduces to ``S(D_H ρ) - S(ρ)``."""
    gap = vn_entropy(dephase(rho, h), Base.NATS) - vn_entropy(rho, Base.NATS)
    return max(gap, 0.0)


def rel_entropy(rho, sigma) -> float:
    """Quantum relative entropy ``D(ρ‖σ)`` in nats, ``inf`` off-support."""
    rho = as_matrix(rho)
    sigma = as_matrix(sigma)
    if rho.shape != sigma.shape:
        raise SizeError(f"shape mismatch {rho.shape} vs {sigma.shape}")
    sp = hermitian_eig(sigma, tol=DENSITY_TOL)
    mu, v = sp.eigenvalues, sp.eigenvectors
    # weights of rho in sigma's eigenbasis
    weights = np.real(np.einsum("ij,ik,kj->j", v.conj(), rho, v))
    kernel = mu <= SUPPORT_TOL
    if np.any(weights[kernel] > SUPPORT_TOL):
        return math.inf
    cross = float(np.sum(weights[~kernel] * np.log(mu[~kernel])))
    neg_s = -vn_entropy(rho, Base.NATS)
    return max(neg_s - cross, 0.0)


@dataclass(frozen=True)
class SecondLawReport:
    ok: bool
    delta_f_over_kT: float
    before: FreeEnergyReport
    after: FreeEnergyReport

    def __bool__(self) -> bool:
        return self.ok


def second_law_check(rho_in, rho_out, h, beta: float, tol: float = 1e-10) -> SecondLawReport:
    """Whether free energy did not increase from ``rho_in`` to ``rho_out``.

    At zero temperature the reported delta is the energy change, or minus the
    entropy change when energies tie within ``tol``.
    """
    before = free_energy(rho_in, h, beta)
    after = free_energy(rho_out, h, beta)
    if math.isinf(before.beta):
        de = after.mean_energy - before.mean_energy
        if abs(de) > tol:
            return SecondLawReport(de < 0.0, de, before, after)
        ds = before.entropy_nats - after.entropy_nats
        return SecondLawReport(ds <= tol, ds, before, after)
    delta = after.f_over_kT - before.f_over_kT
    return SecondLawReport(delta <= tol, delta, before, after)


def commutes(rho, h, tol: float = 1e-10) -> bool:
    a = as_matrix(rho)
    b = _h_matrix(h)
    return bool(np.max(np.abs(a @ b - b @ a)) <= tol)
