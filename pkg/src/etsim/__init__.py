"""1D transient energy-transport simulator for ballistic semiconductor diodes.

Solves the coupled electron continuity, nonlinear electron temperature, and
Poisson equations on the scaled unit interval with central finite differences
in space, the trapezoidal rule in time, and a damped Newton iteration over the
banded 3N system.
"""

from .assembly import (MmsForcing, assemble_jacobian, assemble_residual,
                       residual_continuity, residual_poisson,
                       residual_temperature)
from .driver import (IvPoint, MonitorViolationError, NoSteadyStateError,
                     StepFailureError, Trajectory, current_density,
                     flux_uniformity, initialize_state, iv_sweep,
                     run_transient, steady_state, step)
from .kernels import BACKEND
from .model import (DeviceConfig, DopingProfile, Grid1D, LatticeProfile,
                    MonitorBounds, State, doping_at, lattice_at,
                    monitor_bounds)
from .scaling import (PhysicalParams, ScaledParams, compute_scaled,
                      scale_voltage, unscale_voltage)
from .solver import (BandedJacobian, NewtonOptions, NewtonReport,
                     NoConvergenceError, SingularJacobianError, banded_solve,
                     newton_solve)
from .verify import (ConvergenceReport, ManufacturedSolution,
                     MonitorAuditReport, audit_monitors, mms_spatial_order,
                     mms_temporal_order)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BandedJacobian", "ConvergenceReport", "DeviceConfig",
    "DopingProfile", "Grid1D", "IvPoint", "LatticeProfile",
    "ManufacturedSolution", "MmsForcing", "MonitorAuditReport",
    "MonitorBounds", "MonitorViolationError", "NewtonOptions", "NewtonReport",
    "NoConvergenceError", "NoSteadyStateError", "PhysicalParams",
    "ScaledParams", "SingularJacobianError", "State", "StepFailureError",
    "Trajectory", "assemble_jacobian", "assemble_residual", "audit_monitors",
    "banded_solve", "compute_scaled", "current_density", "doping_at",
    "flux_uniformity", "initialize_state", "iv_sweep", "lattice_at",
    "mms_spatial_order", "mms_temporal_order", "monitor_bounds",
    "newton_solve", "residual_continuity", "residual_poisson",
    "residual_temperature", "run_transient", "scale_voltage", "steady_state",
    "step", "unscale_voltage",
]
