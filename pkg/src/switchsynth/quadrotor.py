"""Quadrotor attitude model used to build a two-controller jump system.

State ``x = [phi, theta, psi, p, q, r]`` (Euler angles in rad, body rates in
rad/s); input is the four rotor speeds in rad/s. The model is linearised at
hover, closed with each supplied state-feedback gain, and discretised.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .analysis import spectral_radius
from .errors import ConfigurationError, DomainError, InputError, PreconditionError
from .system_model import JumpSystem

# rows of the state vector
PHI, THETA, PSI, P, Q, R = range(6)

_THETA_MARGIN = 1e-3


@dataclass(frozen=True)
class QuadrotorParams:
    Ixx: float
    Iyy: float
    Izz: float
    Jr: float
    b: float
    d: float
    l: float
    Omega_r: float = 0.0
    Omega_trim: tuple = (0.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        for name in ("Ixx", "Iyy", "Izz", "Jr", "b", "d", "l"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and np.isfinite(value) and value > 0):
                raise ConfigurationError(f"quadrotor.params.{name}: must be a positive number, got {value!r}")
        trim = tuple(float(w) for w in self.Omega_trim)
        if len(trim) != 4:
            raise ConfigurationError(f"quadrotor.params.Omega_trim: expected 4 rotor speeds, got {len(trim)}")
        object.__setattr__(self, "Omega_trim", trim)
        object.__setattr__(self, "Omega_r", float(self.Omega_r))

    @classmethod
    def from_dict(cls, data: dict) -> QuadrotorParams:
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"quadrotor.params: unknown field(s) {', '.join(sorted(unknown))}")
        missing = {"Ixx", "Iyy", "Izz", "Jr", "b", "d", "l"} - set(data)
        if missing:
            raise ConfigurationError(f"quadrotor.params: missing field(s) {', '.join(sorted(missing))}")
        return cls(**data)


@dataclass(frozen=True)
class QuadrotorState:
    phi: float = 0.0
    theta: float = 0.0
    psi: float = 0.0
    p: float = 0.0
    q: float = 0.0
    r: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.phi, self.theta, self.psi, self.p, self.q, self.r])


def nonlinear_rhs(state, rotor_speeds, params: QuadrotorParams) -> np.ndarray:
    """Time derivative of ``[phi, theta, psi, p, q, r]``."""
    x = state.as_array() if isinstance(state, QuadrotorState) else np.asarray(state, dtype=float)
    if x.shape != (6,):
        raise InputError(f"state must have 6 entries, got shape {x.shape}")
    w = np.asarray(rotor_speeds, dtype=float)
    if w.shape != (4,):
        raise InputError(f"rotor_speeds must have 4 entries, got shape {w.shape}")
    phi, theta, _, p, q, r = x
    if abs(theta) >= np.pi / 2 - _THETA_MARGIN:
        raise DomainError(f"pitch angle {theta:.6g} rad too close to the +-pi/2 kinematic singularity")

    P_ = params
    w1, w2, w3, w4 = w * w
    gyro = P_.Jr * P_.Omega_r
    p_dot = (q * r * (P_.Iyy - P_.Izz) + q * gyro + P_.b * P_.l * (-w2 + w4)) / P_.Ixx
    q_dot = (p * r * (P_.Izz - P_.Ixx) - p * gyro + P_.b * P_.l * (w1 - w3)) / P_.Iyy
    r_dot = (p * q * (P_.Ixx - P_.Iyy) + P_.d * (-w1 + w2 - w3 + w4)) / P_.Izz

    sp, cp = np.sin(phi), np.cos(phi)
    tt, sec = np.tan(theta), 1.0 / np.cos(theta)
    kin = np.array([
        [1.0, sp * tt, cp * tt],
        [0.0, cp, -sp],
        [0.0, sp * sec, cp * sec],
    ])
    angles_dot = kin @ np.array([p, q, r])
    return np.concatenate([angles_dot, [p_dot, q_dot, r_dot]])


def linearize_hover(params: QuadrotorParams) -> tuple[np.ndarray, np.ndarray]:
    """Analytic Jacobians ``(A, B)`` of :func:`nonlinear_rhs` at hover trim.

    ``A`` is 6x6 (state), ``B`` is 6x4 (rotor speeds).
    """
    P_ = params
    gyro = P_.Jr * P_.Omega_r
    A = np.zeros((6, 6))
    A[PHI:PSI + 1, P:R + 1] = np.eye(3)
    A[P, Q] = gyro / P_.Ixx
    A[Q, P] = -gyro / P_.Iyy

    w = np.array(P_.Omega_trim)
    B = np.zeros((6, 4))
    B[P, 1] = -2.0 * P_.b * P_.l * w[1] / P_.Ixx
    B[P, 3] = 2.0 * P_.b * P_.l * w[3] / P_.Ixx
    B[Q, 0] = 2.0 * P_.b * P_.l * w[0] / P_.Iyy
    B[Q, 2] = -2.0 * P_.b * P_.l * w[2] / P_.Iyy
    B[R] = 2.0 * P_.d * w * np.array([-1.0, 1.0, -1.0, 1.0]) / P_.Izz
    return A, B


def linearize_hover_fd(params: QuadrotorParams, step: float = 1e-6) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference Jacobians of :func:`nonlinear_rhs` at hover trim."""
    x0 = np.zeros(6)
    u0 = np.array(params.Omega_trim)
    A = np.empty((6, 6))
    for j in range(6):
        e = np.zeros(6)
        e[j] = step
        A[:, j] = (nonlinear_rhs(x0 + e, u0, params) - nonlinear_rhs(x0 - e, u0, params)) / (2 * step)
    B = np.empty((6, 4))
    for j in range(4):
        h = step * max(1.0, abs(u0[j]))
        e = np.zeros(4)
        e[j] = h
        B[:, j] = (nonlinear_rhs(x0, u0 + e, params) - nonlinear_rhs(x0, u0 - e, params)) / (2 * h)
    return A, B


def discretize(continuous_matrix, dt: float, method: str = "expm") -> np.ndarray:
    """Zero-input discretisation ``exp(A dt)``.

    ``method="euler"`` gives the first-order ``I + A dt`` instead.
    """
    A = np.asarray(continuous_matrix, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError(f"discretize needs a square matrix, got shape {A.shape}")
    if not dt > 0:
        raise InputError(f"sampling time must be positive, got {dt}")
    if method == "expm":
        return expm(A * dt)
    if method == "euler":
        return np.eye(A.shape[0]) + A * dt
    raise InputError(f"unknown discretisation method {method!r}")


def build_quadrotor_jump_system(params: QuadrotorParams, gains, dt: float, method: str = "expm") -> JumpSystem:
    """Discretised closed loops ``exp((A + B K_i) dt)``, one mode per gain."""
    A, B = linearize_hover(params)
    modes = []
    for i, K in enumerate(gains):
        K = np.asarray(K, dtype=float)
        if K.shape != (4, 6):
            raise ConfigurationError(f"gain {i + 1}: expected 4x6, got shape {K.shape}")
        closed = A + B @ K
        worst = np.max(np.linalg.eigvals(closed).real)
        if worst >= 0.0:
            raise PreconditionError(
                f"gain {i + 1} does not stabilise the hover linearisation (max eigenvalue real part {worst:.6g})"
            )
        Ad = discretize(closed, dt, method)
        rho = spectral_radius(Ad)
        if rho >= 1.0:
            raise PreconditionError(f"gain {i + 1}: discretised closed loop has spectral radius {rho:.6g} >= 1")
        modes.append(Ad)
    return JumpSystem(modes)
