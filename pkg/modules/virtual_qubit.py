"""Two-qubit machines and the virtual qubits they carve out of their single-excitation manifold."""

from __future__ import annotations

import math
from typing import Any, Self

from pydantic import BaseModel, model_validator
from scipy.special import expit

from modules.operator_core import thermal_populations


class TwoQubitMachine(BaseModel, frozen=True):
    """Qubits of energies Ω₁, Ω₂ in contact with baths at T₁, T₂.

    `rate1`/`rate2` are reset rates Q or GKLS rates Γ depending on the model they are attached to. The
    ordering Ω₁ > Ω₂ is checked once the machine is attached to a target gap.
    """

    omega1: float
    omega2: float
    temp1: float
    temp2: float
    rate1: float = 0.0
    rate2: float = 0.0
    coupling: float = 0.0
    target_pair: tuple[int, int] = (0, 1)

    @model_validator(mode="after")
    def _check(self) -> Self:
        if self.omega1 <= 0 or self.omega2 <= 0:
            raise ValueError(f"machine energies must be positive, got {self.omega1}, {self.omega2}")

        if self.omega1 == self.omega2:
            raise ValueError(f"degenerate machine: omega1 = omega2 = {self.omega1}")

        if not (self.temp1 > 0 and self.temp2 > 0):
            raise ValueError(f"bath temperatures must be positive, got {self.temp1}, {self.temp2}")

        if self.rate1 < 0 or self.rate2 < 0:
            raise ValueError(f"rates must be non-negative, got {self.rate1}, {self.rate2}")

        low, high = self.target_pair
        if not 0 <= low < high:
            raise ValueError(f"invalid level pair {self.target_pair}")

        return self

    @classmethod
    def for_gap(cls, *, omega1: float, gap: float, **fields: Any) -> Self:  # noqa: ANN401
        """Machine whose second qubit is tuned to Ω₂ = Ω₁ − gap."""
        return cls(omega1=omega1, omega2=omega1 - gap, **fields)

    @property
    def gap(self) -> float:
        return self.omega1 - self.omega2

    def with_baths(self, temp1: float, temp2: float) -> Self:
        return self.model_validate(self.model_dump() | {"temp1": temp1, "temp2": temp2})

    def with_coupling(self, coupling: float) -> Self:
        return self.model_validate(self.model_dump() | {"coupling": coupling})


class VirtualQubit(BaseModel, frozen=True):
    """Populations of {|0⟩₁|1⟩₂, |1⟩₁|0⟩₂} renormalised to the manifold, plus its weight `norm`.

    `vtemp` is for display; the populations are the source of truth.
    """

    gap: float
    pop_ground: float
    pop_excited: float
    norm: float
    vtemp: float

    @property
    def populations(self) -> tuple[float, float]:
        return self.pop_ground, self.pop_excited


def inverse_temperature(temperature: float) -> float:
    """β = 1/T, with β = 0 at T = ±∞."""
    return 0.0 if math.isinf(temperature) else 1.0 / temperature


def virtual_temperature(m: TwoQubitMachine) -> float:
    """T_v = (Ω₁ − Ω₂) / (Ω₁/T₁ − Ω₂/T₂).

    :param m: Machine.
    :return: Signed virtual temperature; ±∞ when the denominator vanishes.
    """
    if m.omega1 == m.omega2:
        raise ValueError(f"degenerate machine: omega1 = omega2 = {m.omega1}")

    denominator = m.omega1 * inverse_temperature(m.temp1) - m.omega2 * inverse_temperature(m.temp2)
    if denominator == 0:
        return math.copysign(math.inf, m.gap)

    return m.gap / denominator


def virtual_qubit_of(m: TwoQubitMachine) -> VirtualQubit:
    """Virtual qubit of a machine whose qubits sit in their bath thermal states.

    The excited/ground ratio is exp(Ω₂/T₂ − Ω₁/T₁), taken straight from the bath Boltzmann factors.
    """
    tau1_g, tau1_e = thermal_populations(m.omega1, m.temp1)
    tau2_g, tau2_e = thermal_populations(m.omega2, m.temp2)
    norm = tau1_g * tau2_e + tau1_e * tau2_g

    log_ratio = m.omega2 * inverse_temperature(m.temp2) - m.omega1 * inverse_temperature(m.temp1)
    if math.isnan(log_ratio):
        raise ValueError(f"virtual qubit undefined for bath temperatures {m.temp1}, {m.temp2}")

    pop_excited = float(expit(log_ratio))
    return VirtualQubit(
        gap=m.gap,
        pop_ground=1.0 - pop_excited,
        pop_excited=pop_excited,
        norm=norm,
        vtemp=virtual_temperature(m),
    )


def effective_rate_qvir(m: TwoQubitMachine) -> float:
    """q_vir = 2g²/(rate1 + rate2) · n_vir.

    :param m: Machine with its coupling to the target.
    :return: Effective reset rate of the virtual qubit acting on the target pair.
    """
    total = m.rate1 + m.rate2
    if total <= 0:
        raise ValueError(f"no thermalisation: rate1 + rate2 = {total}")

    return 2 * m.coupling**2 / total * virtual_qubit_of(m).norm


def norm_of(m: TwoQubitMachine) -> float:
    return virtual_qubit_of(m).norm
