"""Floating-point integration of Hamiltonian fields, as a cross-check.

This module is deliberately plain: a fixed-step classical fourth-order
integrator with deterministic Horner lowering of the symbolic components.
It exists to confirm the symbolic layer numerically (Hamiltonians must be
conserved along their own flow), not to be a production integrator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .exterior import GradedTensor
from .structures import NambuStructure, hamiltonian_vf, nambu_bracket


@dataclass(frozen=True)
class FlowConfig:
    start: tuple[float, ...]
    step: float
    steps: int
    tolerance: float = 1e-8

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("step size must be positive")
        if self.steps < 1:
            raise ValueError("step count must be at least 1")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if not math.isfinite(self.step * self.steps):
            raise ValueError("total integration time must be finite")


def _lower(field_tensor: GradedTensor):
    """Compile a symbolic vector field into a float right-hand side."""
    chart = field_tensor.chart
    components = [field_tensor.component((i,)) for i in range(chart.dimension)]

    def rhs(point: list[float]) -> list[float]:
        return [c.evaluate_float(point) if not c.is_zero() else 0.0 for c in components]

    return rhs


def integrate_hamiltonian(structure: NambuStructure, scalars, config: FlowConfig,
                          ) -> list[tuple[float, ...]]:
    """Classical fourth-order trajectory of the Hamiltonian field.

    Returns steps+1 points, the start included.  Raises on non-finite values,
    which is the honest outcome for a diverging trajectory.
    """
    scalars = list(scalars)
    rhs = _lower(hamiltonian_vf(structure, *scalars))
    m = structure.chart.dimension
    if len(config.start) != m:
        raise ValueError("start point has the wrong dimension")
    h = config.step
    point = [float(v) for v in config.start]
    trajectory = [tuple(point)]
    for _ in range(config.steps):
        k1 = rhs(point)
        k2 = rhs([p + 0.5 * h * v for p, v in zip(point, k1)])
        k3 = rhs([p + 0.5 * h * v for p, v in zip(point, k2)])
        k4 = rhs([p + h * v for p, v in zip(point, k3)])
        point = [p + h / 6.0 * (a + 2 * b + 2 * c + d)
                 for p, a, b, c, d in zip(point, k1, k2, k3, k4)]
        if not all(math.isfinite(v) for v in point):
            raise ValueError("non-finite values encountered during integration")
        trajectory.append(tuple(point))
    return trajectory


@dataclass(frozen=True)
class ConservationReport:
    """Maximum drift of each Hamiltonian and probe bracket along a trajectory."""

    tolerance: float
    hamiltonian_drifts: tuple[float, ...]
    probe_drifts: tuple[float, ...]

    @property
    def passed(self) -> bool:
        return all(d <= self.tolerance
                   for d in self.hamiltonian_drifts + self.probe_drifts)

    @property
    def worst(self) -> float:
        return max(self.hamiltonian_drifts + self.probe_drifts, default=0.0)


def conservation_report(trajectory, structure: NambuStructure, scalars,
                        probes=(), tolerance: float = 1e-8) -> ConservationReport:
    """Drift of the Hamiltonians and of probe bracket values along a trajectory.

    Hamiltonians are conserved by construction, so their drift measures the
    integrator error.  Probe tuples are re-evaluated through the bracket at
    every point; they drift whenever they are not invariants of the flow, so
    the caller chooses them accordingly.
    """
    points = list(trajectory)
    if not points:
        raise ValueError("trajectory must be non-empty")
    scalars = list(scalars)

    def max_drift(values: list[float]) -> float:
        first = values[0]
        return max(abs(v - first) for v in values)

    hamiltonian_drifts = tuple(
        max_drift([f.evaluate_float(list(p)) for p in points]) for f in scalars)
    probe_drifts = []
    for probe in probes:
        value = nambu_bracket(structure, *probe)
        probe_drifts.append(max_drift([value.evaluate_float(list(p)) for p in points]))
    return ConservationReport(tolerance, hamiltonian_drifts, tuple(probe_drifts))
