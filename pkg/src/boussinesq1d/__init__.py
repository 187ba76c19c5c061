"""Particle solver, diagnostics and blow-up certificate for a 1D Boussinesq-type model.

    d_t rho   + u d_x rho   = 0
    d_t omega + u d_x omega = d_x rho,    u = -x Omega,  Omega(x) = int_x^1 omega(y)/y dy
"""
from .biotsavart import UnreliableQuadrature, VelocityField, omega_cap, sup_velocity_gradient, velocity, velocity_gradient
from .certificate import blowup_bound_report, check_inequalities, induction_holds, recursion_iterate, track
from .config import RunConfig
from .diagnostics import accumulate, hardy_check, log_bound_check, omega_identity_residual
from .fields import InitialData, ParticleState, build_omega0, build_rho0, discretize, find_xn
from .picard import picard_solve
from .solver import StepControl, Trajectory, advance, regrid, step

__all__ = [
    "InitialData", "ParticleState", "RunConfig", "StepControl", "Trajectory", "UnreliableQuadrature", "VelocityField",
    "accumulate", "advance", "blowup_bound_report", "build_omega0", "build_rho0", "check_inequalities", "discretize", "find_xn", "hardy_check",
    "induction_holds", "log_bound_check", "omega_cap", "omega_identity_residual", "picard_solve", "recursion_iterate", "regrid", "step",
    "sup_velocity_gradient", "track", "velocity", "velocity_gradient",
]
