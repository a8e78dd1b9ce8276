"""Fixed-size 2x2 complex linear algebra for qubit states and operators.

Every operator (density matrix, Kraus operator, effect, unitary) is a
``(2, 2)`` complex128 numpy array. Nothing here is generic over dimension.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

IDENTITY = np.eye(2, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-12
BLOCH_TOL = 1e-10


class InvalidState(ValueError):
    """Matrix does not describe a qubit density operator."""


class Observable(enum.IntEnum):
    """Pauli observable. The integer value is the code used by the kernels."""

    X = 0
    Y = 1
    Z = 2

    @property
    def matrix(self) -> np.ndarray:
        return (SIGMA_X, SIGMA_Y, SIGMA_Z)[self].copy()

    @property
    def axis(self) -> str:
        return self.name

    @classmethod
    def parse(cls, value: "Observable | str | int") -> "Observable":
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            return cls[value.strip().upper()]
        return cls(int(value))


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=np.complex128)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    return m


def mat_mul(a, b) -> np.ndarray:
    return as_matrix(a) @ as_matrix(b)


def dagger(a) -> np.ndarray:
    return as_matrix(a).conj().T


def trace(a) -> complex:
    m = as_matrix(a)
    return complex(m[0, 0] + m[1, 1])


def hermitize(a) -> np.ndarray:
    """Return ``(A + A^dagger) / 2``."""
    m = as_matrix(a)
    return 0.5 * (m + m.conj().T)


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    m = as_matrix(a)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def conjugate(u, a) -> np.ndarray:
    """``U A U^dagger``."""
    u = as_matrix(u)
    return u @ as_matrix(a) @ u.conj().T


def hermitian_eigvals(a) -> tuple[float, float]:
    """Eigenvalues (ascending) of a Hermitian 2x2 matrix, closed form."""
    m = as_matrix(a)
    p, q = m[0, 0].real, m[1, 1].real
    mid = 0.5 * (p + q)
    rad = float(np.hypot(0.5 * (p - q), abs(m[0, 1])))
    return mid - rad, mid + rad


def rabi_unitary(omega: float, dt: float) -> np.ndarray:
    """One step of the drive ``H = omega * sigma_y / 2``.

    Closed form ``cos(omega dt / 2) I - i sin(omega dt / 2) sigma_y``; it
    rotates the Bloch vector about y, taking +z toward +x.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    half = 0.5 * omega * dt
    return np.cos(half) * IDENTITY - 1j * np.sin(half) * SIGMA_Y


@dataclass(frozen=True, eq=False)
class QubitState:
    """Density operator of a qubit.

    Construction validates hermiticity, unit trace and positivity at the
    module tolerances. Use :meth:`from_bloch` for the common case.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix).copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if not np.all(np.isfinite(m)):
            raise InvalidState("non-finite entries")
        if not is_hermitian(m):
            raise InvalidState("not Hermitian")
        if abs(trace(m) - 1.0) > TRACE_TOL:
            raise InvalidState(f"trace {trace(m).real!r} != 1")
        if hermitian_eigvals(m)[0] < -POSITIVITY_TOL:
            raise InvalidState("not positive semidefinite")

    @classmethod
    def from_bloch(cls, x: float = 0.0, y: float = 0.0, z: float = 1.0) -> "QubitState":
        if np.sqrt(x * x + y * y + z * z) > 1 + BLOCH_TOL:
            raise InvalidState("Bloch vector longer than 1")
        return cls(0.5 * (IDENTITY + x * SIGMA_X + y * SIGMA_Y + z * SIGMA_Z))

    @classmethod
    def maximally_mixed(cls) -> "QubitState":
        return cls(0.5 * IDENTITY)

    @property
    def x(self) -> float:
        return 2.0 * self.matrix[0, 1].real

    @property
    def y(self) -> float:
        return -2.0 * self.matrix[0, 1].imag

    @property
    def z(self) -> float:
        return (self.matrix[0, 0] - self.matrix[1, 1]).real

    @property
    def bloch(self) -> tuple[float, float, float]:
        return self.x, self.y, self.z

    @property
    def purity(self) -> float:
        return float(np.sum(np.abs(self.matrix) ** 2))

    def __repr__(self):
        return "QubitState(x={:.6g}, y={:.6g}, z={:.6g})".format(*self.bloch)


def expectation(state: QubitState, obs: Observable) -> float:
    """``tr(rho O)``."""
    rho = state.matrix if isinstance(state, QubitState) else as_matrix(state)
    return trace(rho @ Observable.parse(obs).matrix).real
