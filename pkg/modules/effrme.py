"""Effective reset master equation of an n-level target.

Each reset channel on a level pair (k, l) pulls the populations of k and l towards (τ^g, τ^e) at rate q:

    dρ/dt = Σ q (−τ^e ρ^(k) + τ^g ρ^(l)) (|k⟩⟨k| − |l⟩⟨l|)

Coherences decouple from the populations and are not tracked here. Several channels may share a pair,
e.g. an environment and a virtual qubit on the same transition; their q·τ contributions add up.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Self

import numpy as np
from loguru import logger
from pydantic import BaseModel, model_validator
from scipy import linalg
from scipy.sparse import coo_array
from scipy.sparse.csgraph import connected_components

from modules.data import (
    COFACTOR_MAX_LEVELS,
    CONDITION_LIMIT,
    FOUR_LEVEL_TREES,
    PAIR_A,
    PAIR_B,
    PAIR_C,
    POPULATION_TOLERANCE,
    THREE_LEVEL_TREES,
)
from modules.operator_core import thermal_populations
from modules.typing import ensure_pair

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping, Sequence

    from modules.typing import FloatArray, IntArray, Pair
    from modules.virtual_qubit import VirtualQubit

type PopulationPair = tuple[float, float]


def pair_graph(n: int, pairs: Sequence[Pair]) -> coo_array:
    """Undirected graph on n levels with one edge per pair."""
    rows = np.array([p[0] for p in pairs], dtype=np.intp)
    cols = np.array([p[1] for p in pairs], dtype=np.intp)
    return coo_array((np.ones(len(pairs)), (rows, cols)), shape=(n, n))


class UnderdeterminedSteadyStateError(ValueError):
    """The steady state is not fixed by the channels (disconnected levels or a singular generator)."""


class ResetChannel(BaseModel, frozen=True):
    """Reset coupling of rate `rate` on `pair` towards (pop_lower, pop_upper)."""

    pair: tuple[int, int]
    rate: float
    pop_lower: float
    pop_upper: float

    @model_validator(mode="after")
    def _check(self) -> Self:
        low, high = self.pair
        if not 0 <= low < high:
            raise ValueError(f"invalid level pair {self.pair}")

        if self.rate < 0:
            raise ValueError(f"negative rate {self.rate} on pair {self.pair}")

        if min(self.pop_lower, self.pop_upper) < 0 or abs(self.pop_lower + self.pop_upper - 1) > POPULATION_TOLERANCE:
            raise ValueError(f"invalid population pair ({self.pop_lower}, {self.pop_upper})")

        return self

    @classmethod
    def thermal(cls, pair: Pair, *, rate: float, gap: float, temperature: float) -> Self:
        """Channel relaxing the pair to its Boltzmann populations at `temperature`."""
        pop_lower, pop_upper = thermal_populations(gap, temperature)
        return cls(pair=pair, rate=rate, pop_lower=pop_lower, pop_upper=pop_upper)

    @classmethod
    def virtual(cls, pair: Pair, *, rate: float, vq: VirtualQubit) -> Self:
        """Channel relaxing the pair to the populations of a virtual qubit."""
        return cls(pair=pair, rate=rate, pop_lower=vq.pop_ground, pop_upper=vq.pop_excited)

    @property
    def populations(self) -> PopulationPair:
        return self.pop_lower, self.pop_upper


@dataclass(frozen=True, kw_only=True)
class EffRmeSpec:
    """An n-level target, its energies, and the reset channels acting on it.

    :param n: Number of levels, ≥ 2.
    :param energies: ω₀ … ω_{n−1}, non-decreasing.
    :param channels: Reset channels; several may share a pair.
    """

    n: int
    energies: tuple[float, ...]
    channels: tuple[ResetChannel, ...]
    components: IntArray = field(init=False, repr=False)
    """Connected-component label of every level in the channel graph (edges: channels with q > 0)."""

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"an effRME target needs at least two levels, got {self.n}")

        if len(self.energies) != self.n:
            raise ValueError(f"expected {self.n} energies, got {len(self.energies)}")

        if any(b < a for a, b in itertools.pairwise(self.energies)):
            raise ValueError(f"energies must be non-decreasing, got {self.energies}")

        for channel in self.channels:
            ensure_pair(channel.pair, self.n)

        active = [c.pair for c in self.channels if c.rate > 0]
        _, labels = connected_components(pair_graph(self.n, active), directed=False)
        labels.flags.writeable = False
        object.__setattr__(self, "components", labels)

    @property
    def connected(self) -> bool:
        return bool(np.all(self.components == self.components[0]))

    def disconnected_levels(self) -> list[int]:
        """Levels outside the component of level 0."""
        return [int(j) for j in np.flatnonzero(self.components != self.components[0])]

    def with_channels(self, channels: Iterable[ResetChannel]) -> EffRmeSpec:
        return EffRmeSpec(n=self.n, energies=self.energies, channels=tuple(channels))

    def scaled(self, factor: float) -> EffRmeSpec:
        """Same equation with every rate multiplied by `factor`."""
        return self.with_channels(c.model_copy(update={"rate": c.rate * factor}) for c in self.channels)


@dataclass(frozen=True, kw_only=True)
class PopulationVector:
    """Diagonal of a target state: non-negative entries summing to one."""

    probs: FloatArray

    def __post_init__(self) -> None:
        probs = np.array(self.probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size < 1:
            raise ValueError(f"populations must be a non-empty vector, got shape {probs.shape}")

        if probs.min() < -POPULATION_TOLERANCE:
            raise ValueError(f"negative population {probs.min():.3e}")

        if abs(probs.sum() - 1) > POPULATION_TOLERANCE:
            raise ValueError(f"populations sum to {probs.sum():.12g}")

        probs.flags.writeable = False
        object.__setattr__(self, "probs", probs)

    @classmethod
    def normalised(cls, weights: Sequence[float] | FloatArray) -> Self:
        w = np.asarray(weights, dtype=np.float64)
        return cls(probs=w / w.sum())

    @property
    def n(self) -> int:
        return int(self.probs.size)

    def ratio(self, upper: int, lower: int) -> float:
        """p_upper / p_lower."""
        return float(self.probs[upper] / self.probs[lower])


def _channel_arrays(spec: EffRmeSpec) -> tuple[IntArray, IntArray, FloatArray, FloatArray]:
    lows = np.array([c.pair[0] for c in spec.channels], dtype=np.intp)
    highs = np.array([c.pair[1] for c in spec.channels], dtype=np.intp)
    up = np.array([c.rate * c.pop_upper for c in spec.channels], dtype=np.float64)
    down = np.array([c.rate * c.pop_lower for c in spec.channels], dtype=np.float64)
    return lows, highs, up, down


def effrme_rhs(spec: EffRmeSpec, probs: PopulationVector) -> FloatArray:
    """Population time-derivative.

    :param spec: Target and channels.
    :param probs: Current populations.
    :return: dρ^(j)/dt for every level; entries sum to zero.
    """
    if probs.n != spec.n:
        raise ValueError(f"expected {spec.n} populations, got {probs.n}")

    lows, highs, up, down = _channel_arrays(spec)
    flow = up * probs.probs[lows] - down * probs.probs[highs]
    rhs = np.zeros(spec.n)
    np.add.at(rhs, lows, -flow)
    np.add.at(rhs, highs, flow)
    return rhs


def build_generator_matrix(spec: EffRmeSpec) -> FloatArray:
    """Rate matrix M with dρ/dt = M ρ.

    Above the diagonal M[k, l] collects q·τ^g, below it M[l, k] collects q·τ^e; the diagonal makes every
    column sum to zero.
    """
    lows, highs, up, down = _channel_arrays(spec)
    m = np.zeros((spec.n, spec.n))
    np.add.at(m, (lows, highs), down)
    np.add.at(m, (highs, lows), up)
    np.add.at(m, (lows, lows), -up)
    np.add.at(m, (highs, highs), -down)
    return m


def _row_replaced(spec: EffRmeSpec) -> FloatArray:
    if not spec.connected:
        raise UnderdeterminedSteadyStateError(
            f"underdetermined steady state: levels {spec.disconnected_levels()} are disconnected from level 0",
        )

    m = build_generator_matrix(spec)
    m[0, :] = 1.0
    cond = float(np.linalg.cond(m))
    logger.debug(f"effRME generator with {spec.n} levels: condition number {cond:.3e}")
    if not math.isfinite(cond) or cond > CONDITION_LIMIT:
        raise UnderdeterminedSteadyStateError(
            f"underdetermined steady state: generator condition number {cond:.3e} exceeds {CONDITION_LIMIT:.0e}",
        )

    return m


def _to_population_vector(x: FloatArray) -> PopulationVector:
    x = np.where(np.abs(x) < POPULATION_TOLERANCE, np.abs(x), x)
    return PopulationVector.normalised(x)


def steady_state_cramer(spec: EffRmeSpec) -> PopulationVector:
    """Steady state from the generator with its first row replaced by the normalisation condition.

    :param spec: Target and channels; the channel graph must be connected.
    :return: Steady-state populations.
    """
    m = _row_replaced(spec)
    rhs = np.zeros(spec.n)
    rhs[0] = 1.0
    return _to_population_vector(linalg.lu_solve(linalg.lu_factor(m), rhs))


def steady_state_cofactor(spec: EffRmeSpec) -> PopulationVector:
    """Same steady state by explicit cofactors: ρ^(j) ∝ (−1)^j det(M without row 0 and column j).

    Factorial cost; limited to small targets.
    """
    if spec.n > COFACTOR_MAX_LEVELS:
        raise ValueError(f"cofactor expansion limited to {COFACTOR_MAX_LEVELS} levels, got {spec.n}")

    m = _row_replaced(spec)
    minors = m[1:, :]
    cofactors = [(-1) ** j * np.linalg.det(np.delete(minors, j, axis=1)) for j in range(spec.n)]
    return _to_population_vector(np.array(cofactors) / np.linalg.det(m))


def tree_state(n: int, tree: Sequence[Pair], pops: Mapping[Pair, PopulationPair]) -> FloatArray:
    """Unnormalised state of one spanning tree of the channel graph.

    Level j collects, per tree edge (k, l), τ^g if j stays on k's side once the edge is cut, else τ^e.

    :param n: Number of levels.
    :param tree: n − 1 level pairs forming a spanning tree.
    :param pops: (τ^g, τ^e) per pair.
    :return: Length-n weights.
    """
    if len(tree) != n - 1:
        raise ValueError(f"a spanning tree on {n} levels has {n - 1} edges, got {len(tree)}")

    weights = np.ones(n)
    for cut in tree:
        rest = [p for p in tree if p != cut]
        n_parts, labels = connected_components(pair_graph(n, rest), directed=False)
        if n_parts != 2:
            raise ValueError(f"{tuple(tree)} is not a spanning tree on {n} levels")

        tau_g, tau_e = pops[cut]
        weights *= np.where(labels == labels[cut[0]], tau_g, tau_e)

    return weights


def _tree_sum(
    n: int,
    terms: Iterable[tuple[float, Sequence[Pair]]],
    pops: Mapping[Pair, PopulationPair],
) -> PopulationVector:
    total = np.zeros(n)
    for weight, tree in terms:
        if weight:
            total += weight * tree_state(n, tree, pops)

    if not total.sum() > 0:
        raise UnderdeterminedSteadyStateError("underdetermined steady state: every spanning-tree weight vanishes")

    return PopulationVector.normalised(total)


def steady_state_three(
    qA: float,
    qB: float,
    qC: float,
    tauA: PopulationPair,
    tauB: PopulationPair,
    tauC: PopulationPair,
) -> PopulationVector:
    """Closed-form qutrit steady state with channels A on (0,1), B on (0,2), C on (1,2).

    ρ_ss ∝ q_A q_B τ_AB + q_B q_C τ_BC + q_C q_A τ_CA.
    """
    if min(qA, qB, qC) < 0:
        raise ValueError(f"rates must be non-negative, got {(qA, qB, qC)}")

    rates = {PAIR_A: qA, PAIR_B: qB, PAIR_C: qC}
    pops = {PAIR_A: tauA, PAIR_B: tauB, PAIR_C: tauC}
    terms = [(rates[a] * rates[b], (a, b)) for a, b in THREE_LEVEL_TREES]
    return _tree_sum(3, terms, pops)


def steady_state_four(rates: Mapping[Pair, float], pops: Mapping[Pair, PopulationPair]) -> PopulationVector:
    """Closed-form four-level steady state as a sum over the sixteen spanning trees.

    :param rates: Rate per level pair; missing pairs have rate 0.
    :param pops: (τ^g, τ^e) per pair with a nonzero rate.
    :return: Steady-state populations.
    """
    if any(q < 0 for q in rates.values()):
        raise ValueError(f"rates must be non-negative, got {dict(rates)}")

    terms = [(math.prod(rates.get(p, 0.0) for p in tree), tree) for tree in FOUR_LEVEL_TREES]
    return _tree_sum(4, terms, pops)


def two_channel_qubit_steady(
    q_env: float,
    tau_env: PopulationPair,
    q_vir: float,
    tau_vir: PopulationPair,
) -> PopulationVector:
    """Qubit reset by an environment and a virtual qubit: (q_env τ_env + q_vir τ_vir) / (q_env + q_vir)."""
    if q_env + q_vir <= 0:
        raise ValueError(f"no thermalisation: q_env + q_vir = {q_env + q_vir}")

    channels = (
        ResetChannel(pair=(0, 1), rate=q_env, pop_lower=tau_env[0], pop_upper=tau_env[1]),
        ResetChannel(pair=(0, 1), rate=q_vir, pop_lower=tau_vir[0], pop_upper=tau_vir[1]),
    )
    return steady_state_cramer(EffRmeSpec(n=2, energies=(0.0, 0.0), channels=channels))


def qutrit_spec(
    energies: Sequence[float],
    rates: Sequence[float],
    pops: Sequence[PopulationPair],
    extra: Iterable[ResetChannel] = (),
) -> EffRmeSpec:
    """Qutrit effRME with channels A, B, C (in that order) plus any `extra` channels."""
    channels = [
        ResetChannel(pair=pair, rate=q, pop_lower=tau[0], pop_upper=tau[1])
        for pair, q, tau in zip((PAIR_A, PAIR_B, PAIR_C), rates, pops, strict=True)
    ]
    return EffRmeSpec(n=3, energies=tuple(energies), channels=(*channels, *extra))


def rate_ratios_from_populations(
    probs: PopulationVector,
    tauA: PopulationPair,
    tauB: PopulationPair,
    tauC: PopulationPair,
) -> tuple[float, float]:
    """Inverts the qutrit closed form for the rate ratios.

    The steady state is linear in (q_A q_B, q_B q_C, q_C q_A); solving for those products fixes q_A/q_B
    and q_B/q_C.

    :return: (q_A/q_B, q_B/q_C).
    """
    if probs.n != 3:
        raise ValueError(f"expected qutrit populations, got {probs.n} levels")

    pops = {PAIR_A: tauA, PAIR_B: tauB, PAIR_C: tauC}
    basis = np.column_stack([tree_state(3, tree, pops) for tree in THREE_LEVEL_TREES])
    ab, bc, ca = linalg.solve(basis, probs.probs)
    if min(ab, bc, ca) <= 0:
        raise ValueError(f"populations {probs.probs} are outside the reach of positive rates")

    return float(ca / bc), float(ab / ca)
