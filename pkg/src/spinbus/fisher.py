"""Quantum Fisher information and first-moment measurement uncertainties.

Global QFI for the pure evolved state via finite differences of the state,
local QFI of the reduced bus qubit via its Bloch vector, the Bures distance,
the Cramer-Rao bound, and the uncertainty of estimating a parameter from the
sample mean of a fixed bus observable.

Every parameter derivative uses central differences at two step sizes
(1e-8 and 1e-6, scaled by max(1, |theta|)); the relative discrepancy between
the two results is recorded so that ill-conditioned configurations are
flagged instead of silently reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dynamics import ModelSpec, propagate
from .states import StateAngles, SymmetricState

FD_STEP_PRIMARY = 1e-8
FD_STEP_CHECK = 1e-6
FD_DISCREPANCY_TOL = 1e-3
NEGATIVE_CLAMP = 1e-10
PURE_BOUNDARY_TOL = 1e-9
INSENSITIVE_TOL = 1e-14


class Param(Enum):
    """Which Hamiltonian parameter is being estimated."""

    X = "x"
    OMEGA0 = "omega0"
    OMEGA1 = "omega1"

    @property
    def field(self) -> str:
        return self.value


@dataclass(frozen=True)
class BusDensity:
    """2x2 reduced density matrix of the bus qubit."""

    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (2, 2):
            raise ValueError("bus density matrix must be 2x2")
        if abs(np.trace(rho).real - 1.0) > 1e-12 or abs(np.trace(rho).imag) > 1e-12:
            raise ValueError("bus density matrix must have unit trace")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
            raise ValueError("bus density matrix must be Hermitian")
        if np.min(np.linalg.eigvalsh(rho)) < -1e-12:
            raise ValueError("bus density matrix must be positive semidefinite")
        rho.flags.writeable = False
        object.__setattr__(self, "rho", rho)

    def bloch(self) -> np.ndarray:
        """(r_x, r_y, r_z) with rho = (I + r . sigma)/2."""
        r = self.rho
        return np.array([2.0 * r[0, 1].real, -2.0 * r[0, 1].imag,
                         (r[0, 0] - r[1, 1]).real])


@dataclass(frozen=True)
class QfiResult:
    """QFI value plus the two-step derivative-stability record.

    `value` comes from the 1e-8 step; `value_check` from the 1e-6 step.  The
    check value is better conditioned when the QFI itself is tiny (round-off
    in the state difference scales like 1/step), so residual scans against
    perturbation theory should prefer it.
    """

    value: float
    value_check: float
    fd_step_primary: float
    fd_step_check: float
    relative_discrepancy: float
    ill_conditioned: bool = False
    clamped: bool = False


@dataclass(frozen=True)
class FirstMomentResult:
    """Uncertainty of theta estimated from the sample mean of a bus observable."""

    delta: float
    inv_squared: float
    variance: float
    mean_derivative: float
    relative_discrepancy: float
    insensitive: bool = False


def _fd_steps(theta: float):
    scale = max(1.0, abs(theta))
    return FD_STEP_PRIMARY * scale, FD_STEP_CHECK * scale


def _discrepancy(a: float, b: float) -> float:
    ref = max(abs(a), abs(b))
    return 0.0 if ref == 0.0 else abs(a - b) / ref


def _pure_qfi(psi: np.ndarray, dpsi: np.ndarray) -> float:
    overlap = np.vdot(psi, dpsi)
    return 4.0 * float(np.real(np.vdot(dpsi, dpsi)) - abs(overlap) ** 2)


def global_qfi_fd(spec: ModelSpec, n: int, angles: StateAngles,
                  sel: Param) -> QfiResult:
    """QFI of the evolved pure state, I = 4(<d psi|d psi> - |<psi|d psi>|^2),
    with |d psi> from central finite differences in the selected parameter."""
    theta = getattr(spec, sel.field)
    h1, h2 = _fd_steps(theta)
    psi = propagate(spec, n, angles).amplitudes

    values = []
    for h in (h1, h2):
        plus = propagate(spec.replaced(**{sel.field: theta + h}), n, angles)
        minus = propagate(spec.replaced(**{sel.field: theta - h}), n, angles)
        dpsi = (plus.amplitudes - minus.amplitudes) / (2.0 * h)
        values.append(_pure_qfi(psi, dpsi))

    disc = _discrepancy(values[0], values[1])
    value, value_check, clamped = values[0], values[1], False
    if value < 0.0 or value_check < 0.0:
        if min(value, value_check) < -NEGATIVE_CLAMP:
            raise ArithmeticError(
                f"finite-difference QFI came out negative beyond round-off: {values}")
        value, value_check = max(value, 0.0), max(value_check, 0.0)
        clamped = True
    return QfiResult(value=value, value_check=value_check,
                     fd_step_primary=h1, fd_step_check=h2,
                     relative_discrepancy=disc,
                     ill_conditioned=disc > FD_DISCREPANCY_TOL, clamped=clamped)


def bures_distance(state_a: SymmetricState, state_b: SymmetricState) -> float:
    """Pure-state Bures distance sqrt(2) * sqrt(1 - |<a|b>|)."""
    for s in (state_a, state_b):
        norm = np.linalg.norm(s.amplitudes)
        if abs(norm - 1.0) > 1e-6:
            raise ValueError(f"state norm {norm} is off unity by more than 1e-6")
    if state_a.dim != state_b.dim:
        raise ValueError("states must share a dimension")
    fidelity = abs(np.vdot(state_a.amplitudes, state_b.amplitudes))
    return math.sqrt(2.0) * math.sqrt(max(0.0, 1.0 - fidelity))


def reduce_to_bus(state: SymmetricState) -> BusDensity:
    """Trace out the probes: rho_{s s'} = sum_m c_{m,s} conj(c_{m,s'})."""
    block = state.amplitudes.reshape(-1, 2)
    rho = np.einsum("ms,mt->st", block, block.conj())
    # symmetrize away the last bit of rounding so BusDensity validation holds
    rho = 0.5 * (rho + rho.conj().T)
    return BusDensity(rho / np.trace(rho).real)


def qubit_qfi(rho0: BusDensity, rho_plus: BusDensity, rho_minus: BusDensity,
              step: float) -> float:
    """Single-qubit QFI from the Bloch vector: |dr|^2 + (r.dr)^2/(1 - |r|^2).

    The derivative dr comes from central differences of the densities at
    theta +- step.  At the pure boundary |r| -> 1 the second term is dropped
    when the motion is tangent (|r.dr| < 1e-9 |dr|); a non-tangent derivative
    there means the parameter pushes rho off the state space and raises.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    r = rho0.bloch()
    dr = (rho_plus.bloch() - rho_minus.bloch()) / (2.0 * step)
    r_sq = float(r @ r)
    if r_sq > 1.0 + PURE_BOUNDARY_TOL:
        raise ValueError(f"|r| = {math.sqrt(r_sq)} exceeds 1: invalid density")
    dr_sq = float(dr @ dr)
    radial = float(r @ dr)
    if r_sq < 1.0 - PURE_BOUNDARY_TOL:
        return dr_sq + radial ** 2 / (1.0 - r_sq)
    if dr_sq == 0.0:
        return 0.0
    if abs(radial) < PURE_BOUNDARY_TOL * math.sqrt(dr_sq):
        return dr_sq
    raise ArithmeticError(
        "derivative is not tangent at the pure-state boundary "
        f"(|r.dr| = {abs(radial)}): QFI is singular here")


def local_qfi_fd(spec: ModelSpec, n: int, angles: StateAngles,
                 sel: Param) -> QfiResult:
    """QFI of the reduced bus state, via finite differences of the Bloch
    vector with the same two-step protocol as the global QFI."""
    theta = getattr(spec, sel.field)
    h1, h2 = _fd_steps(theta)
    rho0 = reduce_to_bus(propagate(spec, n, angles))

    values = []
    for h in (h1, h2):
        plus = reduce_to_bus(propagate(spec.replaced(**{sel.field: theta + h}), n, angles))
        minus = reduce_to_bus(propagate(spec.replaced(**{sel.field: theta - h}), n, angles))
        values.append(qubit_qfi(rho0, plus, minus, h))

    disc = _discrepancy(values[0], values[1])
    return QfiResult(value=values[0], value_check=values[1],
                     fd_step_primary=h1, fd_step_check=h2,
                     relative_discrepancy=disc,
                     ill_conditioned=disc > FD_DISCREPANCY_TOL)


def qcr_bound(i_theta: float, m_measurements: int) -> float:
    """Cramer-Rao variance bound 1/(M I); returns inf when I = 0 (the
    parameter is not encoded, so the variance is unbounded)."""
    if i_theta < 0:
        raise ValueError("QFI must be non-negative")
    if m_measurements < 1:
        raise ValueError("M must be a positive integer")
    if i_theta == 0.0:
        return math.inf
    return 1.0 / (m_measurements * i_theta)


def _check_hermitian_2x2(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.shape != (2, 2) or np.max(np.abs(a - a.conj().T)) > 1e-12:
        raise ValueError("observable must be a 2x2 Hermitian matrix")
    return a


def first_moment_uncertainty(spec: ModelSpec, n: int, angles: StateAngles,
                             sel: Param, observable: np.ndarray,
                             m_measurements: int = 1) -> FirstMomentResult:
    """Uncertainty of theta from the sample mean of I^(x)N (x) A:

        delta = sqrt(Var(A)) / (sqrt(M) |d<A>/d theta|)

    with <A> and Var(A) evaluated on the reduced bus state and the
    derivative from central differences at the two protocol steps.
    """
    a = _check_hermitian_2x2(observable)
    if m_measurements < 1:
        raise ValueError("M must be a positive integer")
    theta = getattr(spec, sel.field)
    h1, h2 = _fd_steps(theta)

    def mean_at(spec_at: ModelSpec) -> float:
        rho = reduce_to_bus(propagate(spec_at, n, angles)).rho
        return float(np.trace(rho @ a).real)

    rho0 = reduce_to_bus(propagate(spec, n, angles)).rho
    mean = float(np.trace(rho0 @ a).real)
    variance = max(0.0, float(np.trace(rho0 @ a @ a).real) - mean ** 2)

    derivs = []
    for h in (h1, h2):
        plus = mean_at(spec.replaced(**{sel.field: theta + h}))
        minus = mean_at(spec.replaced(**{sel.field: theta - h}))
        derivs.append((plus - minus) / (2.0 * h))
    disc = _discrepancy(derivs[0], derivs[1])
    deriv = derivs[0]

    # a check-step derivative below the round-off floor of the difference
    # quotient cannot be distinguished from an exactly vanishing one
    noise_floor = 64.0 * np.finfo(float).eps * float(np.linalg.norm(a, 2)) / (2.0 * h2)
    if (abs(deriv) <= INSENSITIVE_TOL * math.sqrt(variance)
            or abs(derivs[1]) <= noise_floor):
        return FirstMomentResult(delta=math.inf, inv_squared=0.0,
                                 variance=variance, mean_derivative=deriv,
                                 relative_discrepancy=disc, insensitive=True)
    if variance == 0.0:
        # zero-variance observable with a residual derivative: delta -> 0
        return FirstMomentResult(delta=0.0, inv_squared=math.inf,
                                 variance=variance, mean_derivative=deriv,
                                 relative_discrepancy=disc)
    inv_sq = m_measurements * deriv ** 2 / variance
    return FirstMomentResult(delta=1.0 / math.sqrt(inv_sq), inv_squared=inv_sq,
                             variance=variance, mean_derivative=deriv,
                             relative_discrepancy=disc)
