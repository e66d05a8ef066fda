"""State constructors for the (C, M, E1, E2) register.

Every local Hamiltonian is ``-σ_z`` with k = 1, so a qubit at inverse
temperature ``beta`` has populations proportional to ``(e^β, e^-β)``.
``beta = 0`` is infinite temperature and ``beta = math.inf`` is zero
temperature; the latter is handled as an exact limit.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Hashable

import numpy as np

from .errors import ContractError
from .matcore import as_matrix, is_density, kron_all

INFINITY = math.inf

C, M, E1, E2 = 0, 1, 2, 3
NQUBITS = 4

KET0 = np.array([1.0, 0.0], dtype=complex)
KET1 = np.array([0.0, 1.0], dtype=complex)
KET_PLUS = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)


def projector(ket) -> np.ndarray:
    ket = np.asarray(ket, dtype=complex)
    return np.outer(ket, ket.conj())


def check_beta(beta: float) -> float:
    beta = float(beta)
    if math.isnan(beta) or beta < 0.0:
        raise ContractError(f"inverse temperature must be >= 0, got {beta}")
    return beta


def _check_unit(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ContractError(f"{name} must lie in [0, 1], got {value}")
    return value


def gibbs_qubit(beta: float) -> np.ndarray:
    beta = check_beta(beta)
    if math.isinf(beta):
        return projector(KET0)
    # 1 / (1 + e^{-2β}) avoids overflow of e^β for large finite β
    ground = 1.0 / (1.0 + math.exp(-2.0 * beta))
    return np.diag([ground, 1.0 - ground]).astype(complex)


def control_state(lam: float) -> np.ndarray:
    """``lam |+⟩⟨+| + (1 - lam) |0⟩⟨0|``; ``lam`` sets how far the switch is on."""
    lam = _check_unit("lambda", lam)
    return lam * projector(KET_PLUS) + (1.0 - lam) * projector(KET0)


@dataclass(frozen=True)
class EnsembleEntry:
    prob: float
    label: Hashable
    state: np.ndarray


class Ensemble:
    """Classical-quantum state: probabilities, classical labels and member states."""

    def __init__(self, entries, tol: float = 1e-12):
        self.entries: tuple[EnsembleEntry, ...] = tuple(
            e if isinstance(e, EnsembleEntry) else EnsembleEntry(float(e[0]), e[1], as_matrix(e[2]))
            for e in entries
        )
        if not self.entries:
            raise ContractError("ensemble is empty")
        dims = {e.state.shape for e in self.entries}
        if len(dims) != 1:
            raise ContractError(f"ensemble members have mixed shapes {sorted(dims)}")
        if any(e.prob < -tol or e.prob > 1 + tol for e in self.entries):
            raise ContractError("ensemble probabilities must lie in [0, 1]")
        total = sum(e.prob for e in self.entries)
        if abs(total - 1.0) > tol:
            raise ContractError(f"ensemble probabilities sum to {total}, not 1")
        for e in self.entries:
            if not is_density(e.state, 1e-10):
                raise ContractError(f"member {e.label!r} is not a density matrix")

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def probs(self) -> list[float]:
        return [e.prob for e in self.entries]

    @property
    def labels(self) -> list:
        return [e.label for e in self.entries]

    def average(self) -> np.ndarray:
        return sum(e.prob * e.state for e in self.entries)

    def map(self, fn) -> "Ensemble":
        """Apply ``fn`` to every member state, keeping probabilities and labels."""
        return Ensemble((e.prob, e.label, fn(e.state)) for e in self.entries)


def message_ensemble(p: float) -> Ensemble:
    """Encoding of a classical bit ``a`` into ``|a⟩_M`` with ``P(a=0) = p``.

    Zero-probability messages are dropped, so ``p = 1`` yields one entry.
    """
    p = _check_unit("p", p)
    entries = [(p, 0, projector(KET0)), (1.0 - p, 1, projector(KET1))]
    return Ensemble(e for e in entries if e[0] > 0.0)


def assemble_initial(sigma_c, rho_m, beta: float) -> np.ndarray:
    """``σ_C ⊗ ρ_M ⊗ τ(β) ⊗ τ(β)`` in (C, M, E1, E2) order."""
    for name, r in (("sigma_C", sigma_c), ("rho_M", rho_m)):
        if np.shape(r) != (2, 2) or not is_density(r):
            raise ContractError(f"{name} is not a qubit density matrix")
    tau = gibbs_qubit(beta)
    return kron_all([sigma_c, rho_m, tau, tau])


def basis_state(n: int, nqubits: int = NQUBITS) -> np.ndarray:
    dim = 1 << nqubits
    if not 0 <= n < dim:
        raise IndexError(f"basis index {n} out of range for {nqubits} qubits")
    v = np.zeros(dim, dtype=complex)
    v[n] = 1.0
    return v


class U2Kind(enum.Enum):
    PARTIAL_SWAP = "pswap"
    PARTIAL_CNOT = "pcnot"


@dataclass(frozen=True)
class ScenarioConfig:
    """One point of the parameter space.

    ``s`` is the thermalization strength ``sin θ``; ``lam`` is the weight of
    ``|+⟩`` in the control state; ``p`` is the prior of message ``a = 0``.
    """

    beta: float = 0.0
    s: float = 0.0
    lam: float = 0.0
    p: float = 0.5
    u2_kind: U2Kind = U2Kind.PARTIAL_SWAP

    def __post_init__(self):
        object.__setattr__(self, "beta", check_beta(self.beta))
        object.__setattr__(self, "s", _check_unit("s", self.s))
        object.__setattr__(self, "lam", _check_unit("lambda", self.lam))
        object.__setattr__(self, "p", _check_unit("p", self.p))
        object.__setattr__(self, "u2_kind", U2Kind(self.u2_kind))

    @property
    def theta(self) -> float:
        return math.asin(self.s)

    def replace(self, **changes) -> "ScenarioConfig":
        fields = {k: getattr(self, k) for k in ("beta", "s", "lam", "p", "u2_kind")}
        fields.update(changes)
        return ScenarioConfig(**fields)
