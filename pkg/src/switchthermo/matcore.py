"""Dense complex linear algebra for registers of up to four qubits.

Matrices are plain ``numpy`` arrays. Qubit 0 is the most significant bit of
the computational-basis index, so for the (C, M, E1, E2) register the basis
index is ``8c + 4m + 2e1 + e2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ContractError, SizeError

MAX_DIM = 16
STRUCT_TOL = 1e-10

_JACOBI_MAX_SWEEPS = 60


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise SizeError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] > MAX_DIM:
        raise SizeError(f"dimension {m.shape[0]} exceeds {MAX_DIM}")
    if not np.all(np.isfinite(m)):
        raise ContractError("matrix has non-finite entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def kron(a, b) -> np.ndarray:
    """Kronecker product ``a ⊗ b``; the result must fit in four qubits."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape[0] * b.shape[0] > MAX_DIM:
        raise SizeError(
            f"kron of {a.shape[0]}x{a.shape[0]} and {b.shape[0]}x{b.shape[0]} exceeds {MAX_DIM}"
        )
    return np.kron(a, b)


def kron_all(factors: Sequence) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = kron(out, f)
    return out


def num_qubits(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise SizeError(f"dimension {dim} is not a power of two")
    return n


def partial_trace(rho, nqubits: int, keep: Sequence[int]) -> np.ndarray:
    """Trace out every qubit not listed in ``keep``.

    Args:
        rho: ``2**nqubits`` square matrix.
        nqubits: number of qubits in ``rho``'s register.
        keep: strictly increasing qubit indices to retain.

    Returns:
        The reduced matrix on the kept qubits, in their original order.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (1 << nqubits, 1 << nqubits):
        raise SizeError(f"matrix shape {rho.shape} does not match {nqubits} qubits")
    keep = list(keep)
    for q in keep:
        if not 0 <= q < nqubits:
            raise IndexError(f"qubit index {q} out of range for {nqubits} qubits")
    if any(b <= a for a, b in zip(keep, keep[1:])):
        raise IndexError(f"keep indices must be strictly increasing, got {keep}")

    traced = [q for q in range(nqubits) if q not in keep]
    t = rho.reshape([2] * (2 * nqubits))
    # move kept row axes, traced row axes, kept col axes, traced col axes
    order = keep + traced + [nqubits + q for q in keep] + [nqubits + q for q in traced]
    dk, dt = 1 << len(keep), 1 << len(traced)
    t = t.transpose(order).reshape(dk, dt, dk, dt)
    return np.einsum("ajbj->ab", t)


def is_hermitian(a, tol: float = STRUCT_TOL) -> bool:
    a = np.asarray(a)
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol)


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues and the matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)


def _jacobi_rotation(app: float, aqq: float, apq: complex) -> tuple[float, float, complex]:
    """Rotation ``G = [[c, s], [-s·conj(φ), c·conj(φ)]]`` annihilating ``(G† A G)_pq``.

    ``φ = apq / |apq|`` makes the pivot real; ``c, s`` are the usual real Givens pair.
    """
    r = abs(apq)
    phase = apq / r
    theta = (aqq - app) / (2.0 * r)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    return c, t * c, phase.conjugate()


def hermitian_eig(a, tol: float = STRUCT_TOL) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    Pivots are visited in fixed row-major order, so the result is bit-for-bit
    reproducible. Eigenvalues are returned in ascending order.
    """
    a = as_matrix(a)
    if not is_hermitian(a, tol):
        raise ContractError("hermitian_eig requires a Hermitian matrix")
    n = a.shape[0]
    a = 0.5 * (a + dagger(a))
    v = np.eye(n, dtype=complex)
    scale = max(float(np.max(np.abs(a))), 1.0)
    offdiag = ~np.eye(n, dtype=bool)

    for _ in range(_JACOBI_MAX_SWEEPS):
        if math.sqrt(float(np.sum(np.abs(a[offdiag]) ** 2))) <= 1e-15 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = complex(a[p, q])
                if abs(apq) <= 1e-18 * scale:
                    a[p, q] = a[q, p] = 0.0
                    continue
                c, s, w = _jacobi_rotation(a[p, p].real, a[q, q].real, apq)
                # columns: A <- A G
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * w * col_q
                a[:, q] = s * col_p + c * w * col_q
                # rows: A <- G† A
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * w.conjugate() * row_q
                a[q, :] = s * row_p + c * w.conjugate() * row_q
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * w * vec_q
                v[:, q] = s * vec_p + c * w * vec_q
    else:
        raise ArithmeticError("Jacobi iteration did not converge")

    vals = np.real(np.diag(a))
    order = np.argsort(vals, kind="stable")
    return Spectrum(eigenvalues=vals[order], eigenvectors=v[:, order])


def eigvalsh(a) -> np.ndarray:
    return hermitian_eig(a).eigenvalues


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of ``rho - sigma``."""
    rho = as_matrix(rho)
    sigma = as_matrix(sigma)
    if rho.shape != sigma.shape:
        raise SizeError(f"shape mismatch {rho.shape} vs {sigma.shape}")
    d = 0.5 * float(np.sum(np.abs(eigvalsh(rho - sigma))))
    return min(max(d, 0.0), 1.0)


def state_fidelity(psi, rho) -> float:
    """Overlap ⟨ψ|ρ|ψ⟩ of a pure state with a density matrix."""
    psi = np.asarray(psi, dtype=complex).ravel()
    rho = as_matrix(rho)
    if abs(np.linalg.norm(psi) - 1.0) > STRUCT_TOL:
        raise ContractError("state vector is not normalized")
    if psi.shape[0] != rho.shape[0]:
        raise SizeError(f"vector length {psi.shape[0]} vs matrix dim {rho.shape[0]}")
    f = float(np.real(np.vdot(psi, rho @ psi)))
    if f < -1e-12 or f > 1.0 + 1e-12:
        raise ContractError(f"fidelity {f} outside [0, 1]; rho is not a density matrix")
    return min(max(f, 0.0), 1.0)


@dataclass(frozen=True)
class DensityCheck:
    """Outcome of :func:`is_density`; truthy iff every check passed."""

    ok: bool
    hermiticity_error: float
    trace_error: float
    min_eigenvalue: float

    def __bool__(self) -> bool:
        return self.ok


def is_density(rho, tol: float = STRUCT_TOL) -> DensityCheck:
    try:
        m = as_matrix(rho)
    except (SizeError, ContractError):
        return DensityCheck(False, float("inf"), float("inf"), float("-inf"))
    herm = float(np.max(np.abs(m - dagger(m))))
    tr_err = float(abs(np.trace(m) - 1.0))
    if herm > max(tol, STRUCT_TOL):
        return DensityCheck(False, herm, tr_err, float("nan"))
    lo = float(eigvalsh(0.5 * (m + dagger(m)))[0])
    ok = herm <= tol and tr_err <= tol and lo >= -tol
    return DensityCheck(ok, herm, tr_err, lo)
