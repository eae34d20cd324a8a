"""Periodic tangent fields and the closed curves they induce.

A tangent field tau: T^1 -> R^3 with zero mean and pointwise unit length
encodes a closed, unit-speed curve of length 2*pi through its mean-zero
primitive.  This module holds the two state types, the geodesic metric on the
parameter torus, curve reconstruction, Gromov distortion, Sobolev seminorms,
and the projection that maps arbitrary closed-curve data onto the constraint
manifold.
"""

from dataclasses import dataclass, field

import numpy as np

from . import spectral
from .errors import (
    ConstraintViolated,
    DegenerateChord,
    MeanNotZero,
    NoConvergence,
    ZeroVelocity,
)

TOL_CONSTRAINT = 1e-8
PROJECTION_TOL = 1e-12
PROJECTION_MAX_ITERS = 200


def chord_floor(n: int) -> float:
    """Minimum admissible chord between distinct samples."""
    return 1e-9 * (2.0 * np.pi / n)


def geodesic_distance(z):
    """Geodesic distance on T^1: min(|z mod 2pi|, 2pi - |z mod 2pi|), in [0, pi]."""
    zm = np.abs(np.mod(np.asarray(z, dtype=float), 2.0 * np.pi))
    return np.minimum(zm, 2.0 * np.pi - zm)


@dataclass(frozen=True)
class TangentField:
    """Samples and cached Fourier coefficients of a periodic R^3 field."""

    n: int
    values: np.ndarray          # (n, 3) real samples
    coeffs: np.ndarray = field(repr=False, default=None)  # (n, 3) complex

    @staticmethod
    def from_values(values: np.ndarray) -> "TangentField":
        values = np.ascontiguousarray(values, dtype=float)
        if values.ndim != 2 or values.shape[1] != 3:
            raise ValueError("tangent field samples must have shape (n, 3)")
        coeffs = spectral.forward(values)
        values.setflags(write=False)
        coeffs.setflags(write=False)
        return TangentField(values.shape[0], values, coeffs)

    @staticmethod
    def from_coeffs(coeffs: np.ndarray) -> "TangentField":
        coeffs = np.ascontiguousarray(coeffs, dtype=complex)
        values = np.ascontiguousarray(spectral.inverse(coeffs))
        values.setflags(write=False)
        coeffs.setflags(write=False)
        return TangentField(coeffs.shape[0], values, coeffs)

    @property
    def x(self) -> np.ndarray:
        return spectral.grid(self.n)

    def mean_error(self) -> float:
        """|tau_hat_0| as a vector norm."""
        return float(np.linalg.norm(self.coeffs[0]))

    def speed_error(self) -> float:
        """max_j | |tau(x_j)| - 1 |."""
        return float(np.max(np.abs(np.linalg.norm(self.values, axis=1) - 1.0)))

    def validate(self, tol: float = TOL_CONSTRAINT) -> None:
        if self.mean_error() > tol:
            raise ConstraintViolated(f"mean-zero violated: {self.mean_error():.3e} > {tol:.1e}")
        if self.speed_error() > tol:
            raise ConstraintViolated(f"unit-speed violated: {self.speed_error():.3e} > {tol:.1e}")

    def derivative_values(self) -> np.ndarray:
        """Samples of tau_x (spectral, Nyquist zeroed)."""
        return spectral.inverse(spectral.derivative_coeffs(self.coeffs))


@dataclass(frozen=True)
class CurveEmbedding:
    """Closed curve induced by a tangent field, with cached spectrum."""

    n: int
    gamma: np.ndarray            # (n, 3)
    gamma_hat: np.ndarray = field(repr=False, default=None)
    speed: float = 1.0           # constant-speed value |gamma'|

    @staticmethod
    def from_samples(gamma: np.ndarray, speed: float = None) -> "CurveEmbedding":
        gamma = np.ascontiguousarray(gamma, dtype=float)
        gamma_hat = spectral.forward(gamma)
        if speed is None:
            vel = spectral.inverse(spectral.derivative_coeffs(gamma_hat))
            speed = float(np.mean(np.linalg.norm(vel, axis=1)))
        gamma.setflags(write=False)
        gamma_hat.setflags(write=False)
        return CurveEmbedding(gamma.shape[0], gamma, gamma_hat, speed)

    @property
    def x(self) -> np.ndarray:
        return spectral.grid(self.n)

    def length(self) -> float:
        return 2.0 * np.pi * self.speed

    def velocity_values(self) -> np.ndarray:
        return spectral.inverse(spectral.derivative_coeffs(self.gamma_hat))

    def curvature_values(self) -> np.ndarray:
        """Pointwise |gamma''| / speed^2 (unit-speed curvature)."""
        acc = spectral.inverse(spectral.derivative_coeffs(self.gamma_hat, order=2))
        return np.linalg.norm(acc, axis=1) / self.speed**2


def reconstruct_curve(tau: TangentField) -> CurveEmbedding:
    """Spectral antiderivative of the tangent field, center of mass at origin."""
    if tau.mean_error() > TOL_CONSTRAINT:
        raise MeanNotZero(f"|tau_hat_0| = {tau.mean_error():.3e}")
    gamma_hat = spectral.antiderivative_coeffs(tau.coeffs)
    gamma = spectral.inverse(gamma_hat)
    speed = float(np.mean(np.linalg.norm(tau.values, axis=1)))
    gamma.setflags(write=False)
    gamma_hat.setflags(write=False)
    return CurveEmbedding(tau.n, gamma, gamma_hat, speed)


def pair_geodesics(n: int) -> np.ndarray:
    """Matrix of geodesic distances theta(x_j - x_l) on the uniform grid."""
    x = spectral.grid(n)
    return geodesic_distance(x[:, None] - x[None, :])


def chord_matrix(gamma: np.ndarray) -> np.ndarray:
    diff = gamma[:, None, :] - gamma[None, :, :]
    return np.sqrt(np.einsum("jld,jld->jl", diff, diff))


def distortion(curve: CurveEmbedding) -> float:
    """Gromov distortion: sup over sample pairs of arc distance over chord.

    The arc distance is speed * theta(x_j - x_l), correct for constant-speed
    parameterizations.  Raises DegenerateChord when some off-diagonal chord
    drops below the chord floor (loss of embeddedness).
    """
    if curve.n < 8:
        raise ValueError("distortion requires n >= 8")
    chords = chord_matrix(curve.gamma)
    theta = pair_geodesics(curve.n)
    off = ~np.eye(curve.n, dtype=bool)
    floor = chord_floor(curve.n)
    if np.any(chords[off] < floor):
        raise DegenerateChord("off-diagonal chord below chord floor")
    return float(np.max(theta[off] * curve.speed / chords[off]))


def sobolev_seminorm(curve: CurveEmbedding, s: float) -> float:
    """Homogeneous Sobolev seminorm (sum over resolved modes of |k|^2s |gamma_hat_k|^2)^(1/2)."""
    if s < 0:
        raise ValueError("exponent must be nonnegative")
    k = np.abs(spectral.modes(curve.n)).astype(float)
    weights = k ** (2.0 * s)
    power = np.sum(np.abs(curve.gamma_hat) ** 2, axis=1)
    return float(np.sqrt(np.sum(weights * power)))


def _arclength_resample(points: np.ndarray) -> np.ndarray:
    """Resample a smooth closed curve at n uniform arclength stations.

    Spectral arclength map: the speed |gamma'| is integrated through its
    Fourier series and inverted per station by Newton iteration, then the
    curve is evaluated at the preimages through its trigonometric interpolant.
    Returns unit tangent samples at the stations.
    """
    n = points.shape[0]
    gamma_hat = spectral.forward(points)
    vel_hat = spectral.derivative_coeffs(gamma_hat)
    vel = spectral.inverse(vel_hat)
    w = np.linalg.norm(vel, axis=1)
    if np.min(w) * (2.0 * np.pi / n) < chord_floor(n):
        raise ZeroVelocity("velocity magnitude below chord floor")

    w_hat = spectral.forward(w)
    wbar = float(np.real(w_hat[0]))
    total = 2.0 * np.pi * wbar

    def arclength(x):
        # s(x) = wbar*(x+pi) + P(x) - P(-pi) with P the mean-zero primitive
        prim_hat = spectral.antiderivative_coeffs(w_hat)
        vals = spectral.evaluate(prim_hat, np.append(x, -np.pi))
        return wbar * (np.asarray(x) + np.pi) + vals[:-1] - vals[-1]

    def speed_at(x):
        v = spectral.evaluate(vel_hat, x)
        return np.linalg.norm(v, axis=1)

    targets = total * np.arange(n) / n
    x = spectral.grid(n).copy()
    for _ in range(30):
        resid = arclength(x) - targets
        if np.max(np.abs(resid)) < 1e-13 * max(total, 1.0):
            break
        x = x - resid / speed_at(x)

    v_new = spectral.evaluate(vel_hat, x)
    norms = np.linalg.norm(v_new, axis=1)
    return v_new / norms[:, None]


def constant_speed_project(obj) -> TangentField:
    """Project curve data onto the mean-zero, unit-speed tangent manifold.

    Accepts a closed polyline (n, 3) of curve samples or a TangentField.
    The curve is resampled at uniform arclength, its unit tangents taken,
    and the renormalize/de-mean alternation run until both constraints hold
    to 1e-12.  Total length is fixed at 2*pi by construction.
    """
    if isinstance(obj, TangentField):
        points = reconstruct_curve_unchecked(obj)
    else:
        points = np.ascontiguousarray(obj, dtype=float)
        if points.ndim != 2 or points.shape[1] != 3:
            raise ValueError("polyline must have shape (n, 3)")
        n = points.shape[0]
        seg = np.linalg.norm(np.roll(points, -1, axis=0) - points, axis=1)
        if np.min(seg) < chord_floor(n):
            raise ZeroVelocity("closed polyline has a vanishing segment")

    tau = _arclength_resample(points)
    for _ in range(PROJECTION_MAX_ITERS):
        tau = tau / np.linalg.norm(tau, axis=1)[:, None]
        tau = tau - np.mean(tau, axis=0)[None, :]
        mean_err = np.linalg.norm(np.mean(tau, axis=0))
        speed_err = np.max(np.abs(np.linalg.norm(tau, axis=1) - 1.0))
        if mean_err <= PROJECTION_TOL and speed_err <= PROJECTION_TOL:
            return TangentField.from_values(tau)
    raise NoConvergence("constraint projection did not reach 1e-12 in 200 iterations")


def reconstruct_curve_unchecked(tau: TangentField) -> np.ndarray:
    """Curve samples from a field that may violate the mean-zero constraint.

    The linear-in-x part produced by a nonzero mean is dropped; used only as
    projection input where the subsequent iteration removes the defect.
    """
    coeffs = tau.coeffs.copy()
    coeffs[0] = 0.0
    return spectral.inverse(spectral.antiderivative_coeffs(coeffs))
