"""Model Hamiltonians in the symmetric sector and exact propagation.

Three spin-star models share the free part delta*(omega1 J_z + omega0/2 Z_bus)
and differ in the interaction eps*x*(K (x) B):

    ZZZZ: K = J_z, B = Z   (pure dephasing, diagonal, exactly solvable)
    ZZXX: K = J_x, B = X   (energy exchange)
    ZZZX: K = J_z, B = X   (dephasing on the probes, X drive on the bus)

All matrices are real symmetric in the (m, s) basis; the ZZZZ matrix is
diagonal and gets a fast propagation path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .states import SymmetricState, StateAngles, build_product_state, collective_jx, m_values


class ModelKind(Enum):
    ZZZZ = "ZZZZ"
    ZZXX = "ZZXX"
    ZZZX = "ZZZX"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ModelSpec:
    """Model kind plus physical parameters (hbar = 1 throughout)."""

    kind: ModelKind
    delta: float = 1.0
    epsilon: float = 1.0
    omega0: float = 1.0
    omega1: float = 1.0
    x: float = 1.0
    t: float = 1.0

    def __post_init__(self):
        if not isinstance(self.kind, ModelKind):
            raise ValueError(f"unknown model kind {self.kind!r}")
        for name in ("delta", "epsilon", "omega0", "omega1", "x", "t"):
            if not math.isfinite(float(getattr(self, name))):
                raise ValueError(f"parameter {name!r} must be finite")
        if self.t < 0:
            raise ValueError("t must be >= 0")

    def replaced(self, **kwargs) -> "ModelSpec":
        return replace(self, **kwargs)


HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class HamiltonianMatrix:
    """Real symmetric Hamiltonian of dimension 2(N+1) in the (m, s) basis."""

    n_probes: int
    matrix: np.ndarray
    diagonal: bool = False

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=float)
        dim = 2 * (self.n_probes + 1)
        if mat.shape != (dim, dim):
            raise ValueError(f"matrix must be {dim}x{dim}, got {mat.shape}")
        if np.max(np.abs(mat - mat.T)) > HERMITICITY_TOL:
            raise ValueError("matrix is not Hermitian within tolerance")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return 2 * (self.n_probes + 1)


def assemble(spec: ModelSpec, n: int) -> HamiltonianMatrix:
    """H = delta*(omega1 J_z (x) I + omega0/2 I (x) Z) + eps*x*(K (x) B).

    The collective operators absorb the 1/2 of each single-spin term:
    sum_i Z_i/2 = J_z and sum_i P_i/2 (x) B = K (x) B with x factored out.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    m = m_values(n)
    sigma = np.array([1.0, -1.0])  # Z eigenvalues over s = 0, 1
    free = spec.delta * (spec.omega1 * np.repeat(m, 2)
                         + (spec.omega0 / 2.0) * np.tile(sigma, n + 1))

    if spec.kind is ModelKind.ZZZZ:
        diag = free + spec.epsilon * spec.x * np.repeat(m, 2) * np.tile(sigma, n + 1)
        return HamiltonianMatrix(n, np.diag(diag), diagonal=True)

    bus_x = np.array([[0.0, 1.0], [1.0, 0.0]])
    if spec.kind is ModelKind.ZZXX:
        coupling = np.kron(collective_jx(n), bus_x)
    elif spec.kind is ModelKind.ZZZX:
        coupling = np.kron(np.diag(m), bus_x)
    else:  # pragma: no cover - enum is exhaustive
        raise ValueError(f"unknown model kind {spec.kind!r}")
    return HamiltonianMatrix(n, np.diag(free) + spec.epsilon * spec.x * coupling)


def eigensystem(h: HamiltonianMatrix):
    """Ascending eigenvalues and orthonormal eigenvectors of H."""
    try:
        w, v = np.linalg.eigh(h.matrix)
    except np.linalg.LinAlgError as err:  # pragma: no cover - LAPACK failure
        raise RuntimeError(
            f"eigendecomposition failed to converge for dim={h.dim}: {err}") from err
    return w, v


def evolve(h: HamiltonianMatrix, t: float, psi0: SymmetricState) -> SymmetricState:
    """exp(-i H t) |psi0> via the spectral decomposition of H."""
    if h.n_probes != psi0.n_probes:
        raise ValueError(
            f"dimension mismatch: H has N={h.n_probes}, state has N={psi0.n_probes}")
    if t == 0.0:
        return psi0
    if h.diagonal:
        amps = np.exp(-1j * np.diag(h.matrix) * t) * psi0.amplitudes
    else:
        w, v = eigensystem(h)
        amps = v @ (np.exp(-1j * w * t) * (v.T @ psi0.amplitudes))
    # unitary up to rounding; renormalize so downstream invariants hold exactly
    return SymmetricState(psi0.n_probes, amps / np.linalg.norm(amps))


def propagate(spec: ModelSpec, n: int, angles: StateAngles) -> SymmetricState:
    """Build the product state and evolve it for spec.t under spec's model."""
    return evolve(assemble(spec, n), spec.t, build_product_state(n, angles))
