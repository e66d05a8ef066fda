"""Figure-level drivers: parameter sweeps and diagnostic tables.

Every driver is a pure function of its arguments. ``workers > 1`` evaluates
independent grid points on a thread pool; results are always returned in the
same sorted order.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import dynamics
from .info import max_over_encoding, scenario_mutual_info
from .matcore import is_density, kron_all, partial_trace, state_fidelity, trace_distance
from .states import (
    C,
    INFINITY,
    M,
    NQUBITS,
    ScenarioConfig,
    U2Kind,
    assemble_initial,
    basis_state,
    control_state,
    gibbs_qubit,
)
from .thermo import LN2, coherence_free_energy

DEFAULT_S_GRID = tuple(round(0.1 * k, 12) for k in range(11))
DEFAULT_BETAS = (0.0, INFINITY)
EMIT_TOL = 1e-10


def beta_label(beta: float) -> str:
    return "inf" if math.isinf(beta) else format(beta, ".12g")


@dataclass(frozen=True)
class SweepRow:
    beta: float
    s: float
    lam: float
    p: float
    u2: str
    i_bits: float
    i_bits_maxp: float
    coherence_cost_bits: float
    witness_distance: Optional[float] = None
    extras: dict = field(default_factory=dict)

    @property
    def beta_label(self) -> str:
        return beta_label(self.beta)

    @property
    def notes(self) -> str:
        return ";".join(f"{k}={format(v, '.12g')}" for k, v in sorted(self.extras.items()))

    def sort_key(self):
        return (self.beta, self.s, self.lam, self.u2)


def _pmap(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _check_emitted(rho) -> None:
    check = is_density(rho, EMIT_TOL)
    if not check:
        raise ArithmeticError(f"emitted state failed the density check: {check}")


def _c_marginals(cfg: ScenarioConfig) -> dict:
    finals, _ = dynamics.run_scenario(cfg)
    out = {}
    for label, rho in finals.items():
        _check_emitted(rho)
        out[label] = partial_trace(rho, NQUBITS, [C])
    return out


def coherence_cost(cfg: ScenarioConfig) -> tuple[float, float]:
    """Free energy of coherence of C spent by the switch, in bits.

    Returns the cost against the message-averaged final C marginal and the
    message-averaged per-branch cost.
    """
    h = dynamics.local_hamiltonian()
    budget = coherence_free_energy(control_state(cfg.lam), h)
    marginals = _c_marginals(cfg)
    weights = {0: cfg.p, 1: 1.0 - cfg.p}
    avg = sum(weights[a] * r for a, r in marginals.items())
    averaged = budget - coherence_free_energy(avg, h)
    per_message = sum(weights[a] * (budget - coherence_free_energy(r, h)) for a, r in marginals.items())
    return averaged / LN2, per_message / LN2


def scenario_row(
    cfg: ScenarioConfig,
    witness: Optional[float] = None,
    i_max: Optional[float] = None,
    **extras,
) -> SweepRow:
    info = scenario_mutual_info(cfg)
    if i_max is None:
        _, i_max = max_over_encoding(cfg)
    cost, cost_pm = coherence_cost(cfg)
    extras["cost_per_message_bits"] = cost_pm
    return SweepRow(
        beta=cfg.beta,
        s=cfg.s,
        lam=cfg.lam,
        p=cfg.p,
        u2=cfg.u2_kind.value,
        i_bits=info.i_bits,
        i_bits_maxp=i_max,
        coherence_cost_bits=cost,
        witness_distance=witness,
        extras=extras,
    )


def bound_off(beta: float, s: float) -> float:
    """Encoding-maximized ``I`` with the switch off and both interactions partial swaps."""
    return max_over_encoding(ScenarioConfig(beta=beta, s=s, lam=0.0))[1]


def _sorted(rows: Iterable[SweepRow]) -> list[SweepRow]:
    return sorted(rows, key=SweepRow.sort_key)


def sweep(
    s_grid: Sequence[float] = DEFAULT_S_GRID,
    betas: Sequence[float] = DEFAULT_BETAS,
    lambdas: Sequence[float] = (1.0,),
    p: float = 0.5,
    kinds: Sequence[U2Kind] = (U2Kind.PARTIAL_SWAP,),
    workers: int = 1,
) -> list[SweepRow]:
    cfgs = [
        ScenarioConfig(beta=b, s=s, lam=lam, p=p, u2_kind=k)
        for b in betas
        for s in s_grid
        for lam in lambdas
        for k in kinds
    ]
    return _sorted(_pmap(scenario_row, cfgs, workers))


def fig2_sweep(
    betas: Sequence[float] = DEFAULT_BETAS,
    s_grid: Sequence[float] = DEFAULT_S_GRID,
    lambdas: Sequence[float] = (0.0, 1.0),
    p: float = 0.5,
    workers: int = 1,
) -> list[SweepRow]:
    """Switch off vs on over thermalization strength, with the switch-off reference bound."""
    if not betas or not s_grid or not lambdas:
        raise ValueError("fig2_sweep needs non-empty grids")

    def rows(point):
        beta, s = point
        ref = bound_off(beta, s)
        out = []
        for lam in lambdas:
            cfg = ScenarioConfig(beta=beta, s=s, lam=lam, p=p)
            out.append(scenario_row(cfg, i_max=ref if lam == 0.0 else None, bound_off=ref))
        return out

    points = [(b, s) for b in betas for s in s_grid]
    return _sorted(r for group in _pmap(rows, points, workers) for r in group)


@dataclass(frozen=True)
class EnergyCheck:
    s: float
    fidelities: tuple[float, ...]
    leakage: float
    commutator: float

    @property
    def mean_fidelity(self) -> float:
        return float(np.mean(self.fidelities))


def fig3a_energy_check(s_grid: Sequence[float] = DEFAULT_S_GRID, workers: int = 1) -> list[EnergyCheck]:
    """Basis-state fidelities ``⟨n|L|n⟩⟨n|L†|n⟩`` and eigenspace leakage of ``L``.

    Degenerate levels can mix, so individual fidelities may drop well below 1
    even though the leakage is zero.
    """
    h = dynamics.total_hamiltonian()

    def check(s):
        lmat = dynamics.scenario_switch(ScenarioConfig(s=s))
        fids = []
        for n in range(1 << NQUBITS):
            ket = basis_state(n, NQUBITS)
            fids.append(state_fidelity(ket, lmat.conjugate(np.outer(ket, ket.conj()))))
        return EnergyCheck(
            s=float(s),
            fidelities=tuple(fids),
            leakage=dynamics.eigenspace_leakage(lmat, h),
            commutator=dynamics.commutator_norm(lmat, h),
        )

    return sorted(_pmap(check, list(s_grid), workers), key=lambda r: r.s)


def gibbs_register(beta: float) -> np.ndarray:
    tau = gibbs_qubit(beta)
    return kron_all([tau] * NQUBITS)


@dataclass(frozen=True)
class GibbsCheck:
    beta: float
    s: float
    u2: str
    distance: float


def fig3b_gibbs_check(
    s: float = 1.0,
    betas: Sequence[float] = DEFAULT_BETAS,
    kind: U2Kind = U2Kind.PARTIAL_SWAP,
) -> list[GibbsCheck]:
    """Trace distance between ``L τ^⊗4 L†`` and ``τ^⊗4`` for each ``beta``."""
    out = []
    for beta in sorted(betas):
        lmat = dynamics.scenario_switch(ScenarioConfig(beta=beta, s=s, u2_kind=kind))
        tau4 = gibbs_register(beta)
        final = lmat.conjugate(tau4)
        _check_emitted(final)
        out.append(GibbsCheck(beta, float(s), U2Kind(kind).value, trace_distance(final, tau4)))
    return out


def fig3c_witness(s: float = 1.0, beta: float = 0.0, lam: float = 1.0) -> tuple[np.ndarray, float]:
    """Switch ``τ_M``, swap C with M, discard C; distance of the new M from ``τ_M``.

    A non-zero distance shows that switch-then-swap does not preserve the thermal state.
    """
    tau = gibbs_qubit(beta)
    lmat = dynamics.scenario_switch(ScenarioConfig(beta=beta, s=s))
    rho = lmat.conjugate(assemble_initial(control_state(lam), tau, beta))
    rho = dynamics.swap_cm().conjugate(rho)
    out = partial_trace(rho, NQUBITS, [M])
    _check_emitted(out)
    return out, trace_distance(out, tau)


def fig3c_row(s: float = 1.0, beta: float = 0.0) -> SweepRow:
    state, dist = fig3c_witness(s, beta)
    return scenario_row(
        ScenarioConfig(beta=beta, s=s, lam=1.0),
        witness=dist,
        m_offdiag_re=float(state[0, 1].real),
        m_offdiag_im=float(state[0, 1].imag),
    )


def fig3d_gain_vs_cost(
    s_grid: Sequence[float] = DEFAULT_S_GRID,
    beta: float = 0.0,
    p: float = 0.5,
    workers: int = 1,
) -> list[SweepRow]:
    """Capacity gain from the switch next to the coherence it spends, per ``s``."""

    def row(s):
        cfg = ScenarioConfig(beta=beta, s=s, lam=1.0, p=p)
        off = scenario_mutual_info(cfg.replace(lam=0.0)).i_bits
        r = scenario_row(cfg)
        return replace(r, extras={**r.extras, "gain_bits": r.i_bits - off, "i_bits_off": off})

    return _sorted(_pmap(row, list(s_grid), workers))


def fig4_cnot_sweep(
    s_grid: Sequence[float] = DEFAULT_S_GRID,
    beta: float = INFINITY,
    p: float = 0.5,
    workers: int = 1,
) -> list[SweepRow]:
    """Switched partial swap vs switched partial CNOT for ``U2``, switch fully on."""

    def rows(s):
        ref = bound_off(beta, s)
        return [
            scenario_row(ScenarioConfig(beta=beta, s=s, lam=1.0, p=p, u2_kind=k), bound_off=ref)
            for k in (U2Kind.PARTIAL_SWAP, U2Kind.PARTIAL_CNOT)
        ]

    return _sorted(r for group in _pmap(rows, list(s_grid), workers) for r in group)
