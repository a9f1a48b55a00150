"""Time integration and steady states of vectorised generators."""

from __future__ import annotations

from enum import StrEnum
from typing import TYPE_CHECKING

import numpy as np
from loguru import logger
from scipy import linalg
from scipy.integrate import solve_ivp

from modules.data import (
    DEFAULT_ATOL,
    DEFAULT_RTOL,
    EVOLVE_POSITIVITY_TOLERANCE,
    NULLSPACE_GAP,
    TRACE_DRIFT_TOLERANCE,
)
from modules.operator_core import DensityMatrix

if TYPE_CHECKING:
    from modules.typing import ComplexArray

    from .superoperator import Superoperator


class Integrator(StrEnum):
    RK45 = "RK45"
    """Adaptive embedded Runge–Kutta of order 5(4)."""
    DOP853 = "DOP853"
    """Adaptive embedded Runge–Kutta of order 8."""
    EXPM = "expm"
    """Exact propagator by matrix exponential."""


class StiffSystemError(RuntimeError):
    """The adaptive integrator could not keep its step size above the floating-point floor."""


class NonUniqueSteadyStateError(ValueError):
    """The generator's null space is more than one-dimensional."""


def _hermitian_state(gen: Superoperator, vector: ComplexArray, *, positivity_tolerance: float) -> DensityMatrix:
    matrix = gen.expand(vector)
    matrix = (matrix + matrix.conj().T) / 2
    trace = float(np.real(np.trace(matrix)))
    if abs(trace - 1) > TRACE_DRIFT_TOLERANCE:
        logger.warning(f"trace drifted to {trace:.12g}; renormalising")

    return DensityMatrix.from_matrix(matrix / trace, gen.layout, positivity_tolerance=positivity_tolerance)


def propagator(gen: Superoperator, t: float) -> ComplexArray:
    """exp(L t) on the generator's support."""
    return linalg.expm(gen.matrix * t)


def evolve(
    gen: Superoperator,
    rho0: DensityMatrix,
    *,
    t: float,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    integrator: Integrator = Integrator.RK45,
) -> DensityMatrix:
    """ρ(t) = exp(L t) ρ₀.

    :param gen: Generator.
    :param rho0: Initial state on the generator's layout; coherences outside an energy-restricted support
        switch the evolution to the whole operator space.
    :param t: Evolution time, ≥ 0.
    :param rtol: Relative tolerance of the adaptive integrators.
    :param atol: Absolute tolerance of the adaptive integrators.
    :param integrator: Integration method.
    :return: Symmetrised, trace-normalised state.
    :raise ValueError: When a coherent state needs the whole operator space of a layout above the dense limit.
    """
    if t < 0:
        raise ValueError(f"evolution time must be non-negative, got {t}")

    if rho0.layout.dims != gen.layout.dims:
        raise ValueError(f"state layout {rho0.layout.dims} differs from generator layout {gen.layout.dims}")

    if t == 0:
        return rho0

    if not gen.covers(rho0):
        logger.info(f"initial state leaves the {gen.dimension}-dimensional support; evolving on the whole space")
        gen = gen.widened()

    x0 = gen.restrict(rho0)
    if integrator is Integrator.EXPM:
        xt = propagator(gen, t) @ x0
    else:
        matrix = gen.matrix
        solution = solve_ivp(
            lambda _, y: matrix @ y,
            (0.0, t),
            x0,
            method=str(integrator),
            rtol=rtol,
            atol=atol,
        )
        if solution.status < 0:
            if "step size" in solution.message.lower():
                raise StiffSystemError(
                    f"stiff system; tighten rates or use steady_state_nullspace ({solution.message})",
                )

            raise RuntimeError(f"integration failed: {solution.message}")

        logger.debug(f"{integrator} integration to t = {t}: {solution.nfev} evaluations")
        xt = solution.y[:, -1]

    return _hermitian_state(gen, xt, positivity_tolerance=EVOLVE_POSITIVITY_TOLERANCE)


def steady_state_nullspace(gen: Superoperator) -> DensityMatrix:
    """Null vector of the generator by singular value decomposition.

    :param gen: Trace-preserving generator.
    :return: Symmetrised steady state with unit trace.
    :raise NonUniqueSteadyStateError: When the second-smallest singular value is below the null-space gap.
    """
    _, s, vh = linalg.svd(gen.matrix)
    logger.debug(f"generator singular values: largest {s[0]:.3e}, smallest {s[-1]:.3e}, next {s[-2]:.3e}")
    if s[-2] <= NULLSPACE_GAP * s[0]:
        raise NonUniqueSteadyStateError(
            f"non-unique steady state: second-smallest singular value {s[-2]:.3e} vs norm {s[0]:.3e}",
        )

    null = vh[-1].conj()
    matrix = gen.expand(null)
    trace = np.trace(matrix)
    return _hermitian_state(gen, gen.restrict(matrix / trace), positivity_tolerance=EVOLVE_POSITIVITY_TOLERANCE)
