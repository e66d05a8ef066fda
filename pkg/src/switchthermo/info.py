"""Holevo information of the switch output and its maximization over encodings."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .dynamics import run_scenario
from .errors import ContractError
from .matcore import partial_trace
from .states import C, M, NQUBITS, Ensemble, ScenarioConfig
from .thermo import Base, vn_entropy

GOLDEN_WIDTH = 1e-8
TIE_TOL = 1e-12
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class MutualInfoResult:
    """Holevo quantity ``S(Σ p_a ρ_a) - Σ p_a S(ρ_a)`` in bits, with its two terms."""

    i_bits: float
    s_avg: float
    s_cond: float
    config: Optional[ScenarioConfig] = None


def _holevo(probs, states, entropies=None) -> tuple[float, float, float]:
    avg = sum(p * r for p, r in zip(probs, states))
    if entropies is None:
        entropies = [vn_entropy(r, Base.BITS) for r in states]
    s_avg = vn_entropy(avg, Base.BITS)
    s_cond = float(sum(p * s for p, s in zip(probs, entropies)))
    return max(s_avg - s_cond, 0.0), s_avg, s_cond


def holevo(ens: Ensemble) -> MutualInfoResult:
    if len(ens) == 0:
        raise ContractError("holevo of an empty ensemble")
    i, s_avg, s_cond = _holevo(ens.probs, [e.state for e in ens])
    return MutualInfoResult(i, s_avg, s_cond)


def output_ensemble(cfg: ScenarioConfig) -> Ensemble:
    """Final cq-state between the message label and the (C, M) output."""
    _, ens = run_scenario(cfg)
    return ens.map(lambda rho: partial_trace(rho, NQUBITS, [C, M]))


def scenario_mutual_info(cfg: ScenarioConfig) -> MutualInfoResult:
    res = holevo(output_ensemble(cfg))
    return MutualInfoResult(res.i_bits, res.s_avg, res.s_cond, cfg)


def _encoding_objective(cfg: ScenarioConfig) -> Callable[[float], float]:
    """``p -> I(A:CM)`` with the two message branches evolved once.

    The branch states do not depend on the prior, so only the mixture is redone per ``p``.
    """
    branches = output_ensemble(cfg.replace(p=0.5))
    states = [e.state for e in branches]
    entropies = [vn_entropy(r, Base.BITS) for r in states]

    def objective(p: float) -> float:
        return _holevo([p, 1.0 - p], states, entropies)[0]

    return objective


def golden_section_max(f: Callable[[float], float], lo: float, hi: float, width: float = GOLDEN_WIDTH):
    """Maximize a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    a, b = lo, hi
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > width:
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = f(x2)
    x = 0.5 * (a + b)
    return x, f(x)


def maximize_on_unit_interval(f: Callable[[float], float], grid_points: int = 101):
    """Grid argmax over ``[0, 1]`` refined by golden section.

    Near-ties (within ``TIE_TOL``) resolve toward ``p = 1/2``; the refined point
    replaces the grid winner only if it is strictly better.
    """
    if grid_points < 3:
        raise ContractError("grid_points must be >= 3")
    grid = sorted(set(np.linspace(0.0, 1.0, grid_points).tolist()) | {0.5})
    values = [f(p) for p in grid]
    best = max(values)
    candidates = [k for k, v in enumerate(values) if v >= best - TIE_TOL]
    k = min(candidates, key=lambda j: (abs(grid[j] - 0.5), grid[j]))
    p_star, i_star = grid[k], values[k]

    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]
    x, fx = golden_section_max(f, lo, hi)
    if fx > i_star + TIE_TOL:
        p_star, i_star = x, fx
    return p_star, i_star


def max_over_encoding(cfg: ScenarioConfig, grid_points: int = 101) -> tuple[float, float]:
    """Best prior ``p`` for the diagonal encoding ``p|0⟩⟨0| + (1-p)|1⟩⟨1|`` and its ``I`` in bits.

    The prior stored in ``cfg`` is ignored.
    """
    return maximize_on_unit_interval(_encoding_objective(cfg), grid_points)


def capacity_gain(cfg: ScenarioConfig) -> float:
    """``I`` with the switch fully on minus ``I`` with it off, in bits."""
    on = scenario_mutual_info(cfg.replace(lam=1.0)).i_bits
    off = scenario_mutual_info(cfg.replace(lam=0.0)).i_bits
    return on - off
