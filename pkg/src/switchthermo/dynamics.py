"""Interaction unitaries, the switch unitary and scenario evolution.

The switch applies ``U2 U1`` when the control is ``|0⟩`` and ``U1 U2`` when it
is ``|1⟩``; both orders act on the same environment qubits E1, E2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ContractError
from .matcore import STRUCT_TOL, as_matrix, dagger
from .states import (
    C,
    E1,
    E2,
    M,
    NQUBITS,
    Ensemble,
    ScenarioConfig,
    U2Kind,
    assemble_initial,
    control_state,
    message_ensemble,
)

SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)


@dataclass(frozen=True)
class Unitary:
    """A unitary matrix and the register qubits it acts on.

    ``matrix`` is either local (``2**len(acts_on)`` square) or already
    embedded in the full register.
    """

    matrix: np.ndarray
    acts_on: tuple[int, ...]

    def __post_init__(self):
        m = as_matrix(self.matrix)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "acts_on", tuple(int(q) for q in self.acts_on))
        if len(set(self.acts_on)) != len(self.acts_on):
            raise ContractError(f"repeated qubit in acts_on {self.acts_on}")
        if m.shape[0] < 1 << len(self.acts_on):
            raise ContractError("matrix too small for its declared support")
        if np.max(np.abs(dagger(m) @ m - np.eye(m.shape[0]))) > STRUCT_TOL:
            raise ContractError("matrix is not unitary")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_local(self) -> bool:
        return self.dim == 1 << len(self.acts_on)

    def __matmul__(self, other: "Unitary") -> "Unitary":
        if self.dim != other.dim:
            raise ContractError("cannot compose unitaries of different size")
        support = tuple(sorted(set(self.acts_on) | set(other.acts_on)))
        return Unitary(self.matrix @ other.matrix, support)

    def conjugate(self, rho) -> np.ndarray:
        return self.matrix @ rho @ dagger(self.matrix)


def partial_swap(theta: float, qubits: Sequence[int] = (M, E1)) -> Unitary:
    """``cos θ I + i sin θ SWAP``, i.e. ``exp(iθ SWAP)``."""
    return Unitary(math.cos(theta) * np.eye(4) + 1j * math.sin(theta) * SWAP, tuple(qubits))


def partial_cnot(theta: float, qubits: Sequence[int] = (M, E2)) -> Unitary:
    """``exp(iθ CNOT)``; the first qubit of ``qubits`` is the control."""
    return Unitary(math.cos(theta) * np.eye(4) + 1j * math.sin(theta) * CNOT, tuple(qubits))


def embed(u: Unitary, nqubits: int = NQUBITS) -> Unitary:
    """Lift a local gate into an ``nqubits`` register, identity elsewhere."""
    if not u.is_local:
        if u.dim == 1 << nqubits:
            return u
        raise ContractError(f"gate of dimension {u.dim} cannot be embedded in {nqubits} qubits")
    if any(not 0 <= q < nqubits for q in u.acts_on):
        raise ContractError(f"support {u.acts_on} outside a {nqubits}-qubit register")
    rest = [q for q in range(nqubits) if q not in u.acts_on]
    full = np.kron(u.matrix, np.eye(1 << len(rest)))
    # full currently acts on axis order acts_on + rest; permute back to 0..n-1
    order = list(u.acts_on) + rest
    inverse = [order.index(q) for q in range(nqubits)]
    t = full.reshape([2] * (2 * nqubits))
    t = t.transpose(inverse + [nqubits + i for i in inverse])
    return Unitary(t.reshape(1 << nqubits, 1 << nqubits), u.acts_on)


def switch_unitary(u1: Unitary, u2: Unitary) -> Unitary:
    """Coherently controlled order: ``|0⟩⟨0|_C ⊗ U2U1 + |1⟩⟨1|_C ⊗ U1U2``."""
    if set(u1.acts_on) != {M, E1}:
        raise ContractError(f"U1 must act on (M, E1), got {u1.acts_on}")
    if set(u2.acts_on) != {M, E2}:
        raise ContractError(f"U2 must act on (M, E2), got {u2.acts_on}")
    a = embed(u1).matrix
    b = embed(u2).matrix
    p0 = np.zeros(16)
    p0[:8] = 1.0
    p1 = 1.0 - p0
    l = p0[:, None] * (b @ a) + p1[:, None] * (a @ b)
    return Unitary(l, (C, M, E1, E2))


def interactions(cfg: ScenarioConfig) -> tuple[Unitary, Unitary]:
    theta = cfg.theta
    u1 = partial_swap(theta, (M, E1))
    if cfg.u2_kind is U2Kind.PARTIAL_SWAP:
        u2 = partial_swap(theta, (M, E2))
    else:
        u2 = partial_cnot(theta, (M, E2))
    return u1, u2


def scenario_switch(cfg: ScenarioConfig) -> Unitary:
    return switch_unitary(*interactions(cfg))


def run_scenario(cfg: ScenarioConfig) -> tuple[dict, Ensemble]:
    """Evolve ``σ_C ⊗ ρ_M^a ⊗ τ ⊗ τ`` under the switch for every message ``a``.

    Returns:
        A dict mapping each label to its final 16x16 state, and the final
        cq-ensemble over (C, M, E1, E2) weighted by the message prior.
    """
    lmat = scenario_switch(cfg)
    sigma = control_state(cfg.lam)
    messages = message_ensemble(cfg.p)
    finals = {
        e.label: lmat.conjugate(assemble_initial(sigma, e.state, cfg.beta)) for e in messages
    }
    ens = Ensemble((e.prob, e.label, finals[e.label]) for e in messages)
    return finals, ens


def swap_cm() -> Unitary:
    return embed(Unitary(SWAP, (C, M)))


def local_hamiltonian() -> np.ndarray:
    return -SIGMA_Z


@dataclass(frozen=True)
class TotalHamiltonian:
    """Sum of ``-σ_z`` on every listed qubit of an ``nqubits`` register."""

    matrix: np.ndarray
    terms: tuple[int, ...]

    @property
    def energies(self) -> np.ndarray:
        return np.real(np.diag(self.matrix))


def total_hamiltonian(terms: Sequence[int] = (C, M, E1, E2), nqubits: int = NQUBITS) -> TotalHamiltonian:
    """Diagonal ``Σ_i -σ_z^(i)``; a basis state's energy is ``2·(#ones on terms) - len(terms)``."""
    dim = 1 << nqubits
    energies = np.zeros(dim)
    for n in range(dim):
        for q in terms:
            bit = (n >> (nqubits - 1 - q)) & 1
            energies[n] += 1.0 if bit else -1.0
    return TotalHamiltonian(np.diag(energies).astype(complex), tuple(terms))


def _as_array(x) -> np.ndarray:
    if isinstance(x, (Unitary, TotalHamiltonian)):
        return x.matrix
    return np.asarray(x, dtype=complex)


def commutator_norm(u, h) -> float:
    """Largest absolute entry of ``UH - HU``."""
    u = _as_array(u)
    h = _as_array(h)
    if u.shape != h.shape:
        raise ContractError(f"shape mismatch {u.shape} vs {h.shape}")
    return float(np.max(np.abs(u @ h - h @ u)))


def eigenspace_leakage(l, h) -> float:
    """Largest entry of ``P_E L P_E'`` over distinct energies ``E != E'``.

    Zero iff ``L`` maps every energy eigenspace of the diagonal ``h`` into itself.
    """
    l = _as_array(l)
    energies = np.real(np.diag(_as_array(h)))
    if np.max(np.abs(_as_array(h) - np.diag(energies))) > STRUCT_TOL:
        raise ContractError("eigenspace_leakage needs a diagonal Hamiltonian")
    levels = np.rint(energies).astype(int)
    different = levels[:, None] != levels[None, :]
    if not different.any():
        return 0.0
    return float(np.max(np.abs(l[different])))
