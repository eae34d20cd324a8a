"""Spectral transforms on the uniform periodic grid x_j = -pi + 2*pi*j/n.

Coefficients follow the analyst's convention

    c_k = (1/2pi) * integral( f(x) exp(-i k x) dx ),   f(x) = sum_k c_k exp(i k x),

so a pure mode a*exp(i k x) sampled on the grid yields coefficient a at k.
The forward FFT is phase-corrected for the grid origin at -pi.  The Nyquist
mode (|k| = n/2 for even n) is zeroed by differentiation and antidifferentiation.
"""

import numpy as np


def grid(n: int) -> np.ndarray:
    """Sample points x_j = -pi + 2*pi*j/n."""
    return -np.pi + 2.0 * np.pi * np.arange(n) / n


def modes(n: int) -> np.ndarray:
    """Integer wavenumbers in FFT layout (Nyquist reported as -n/2)."""
    return np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)


def _phase(n: int) -> np.ndarray:
    # exp(+i k pi) corrects for the grid starting at -pi instead of 0
    k = modes(n)
    return np.exp(1j * np.pi * k)


def forward(values: np.ndarray) -> np.ndarray:
    """Fourier coefficients of samples; works on (n,) or (n, d) arrays."""
    values = np.asarray(values)
    n = values.shape[0]
    out = np.fft.fft(values, axis=0) / n
    ph = _phase(n)
    return out * (ph if values.ndim == 1 else ph[:, None])


def inverse(coeffs: np.ndarray) -> np.ndarray:
    """Samples from Fourier coefficients; real part of the inverse transform."""
    coeffs = np.asarray(coeffs)
    n = coeffs.shape[0]
    ph = np.conj(_phase(n))
    scaled = coeffs * (ph if coeffs.ndim == 1 else ph[:, None])
    return np.real(np.fft.ifft(scaled, axis=0) * n)


def _mode_column(k: np.ndarray, ndim: int) -> np.ndarray:
    return k if ndim == 1 else k[:, None]


def derivative_coeffs(coeffs: np.ndarray, order: int = 1) -> np.ndarray:
    """Differentiate in spectral space; Nyquist mode zeroed."""
    n = coeffs.shape[0]
    k = modes(n)
    fac = (1j * k.astype(float)) ** order
    if n % 2 == 0:
        fac[n // 2] = 0.0
    return coeffs * _mode_column(fac, coeffs.ndim)


def antiderivative_coeffs(coeffs: np.ndarray) -> np.ndarray:
    """Mean-zero spectral primitive: c_k -> c_k/(ik), c_0 -> 0, Nyquist zeroed."""
    n = coeffs.shape[0]
    k = modes(n).astype(float)
    inv = np.zeros(n, dtype=complex)
    nz = k != 0
    inv[nz] = 1.0 / (1j * k[nz])
    if n % 2 == 0:
        inv[n // 2] = 0.0
    return coeffs * _mode_column(inv, coeffs.ndim)


def evaluate(coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Evaluate the trigonometric interpolant at arbitrary points.

    The Nyquist coefficient is rendered as cos(n/2 * x) so the interpolant of
    real samples stays real.  Reduction order is fixed (einsum, no BLAS
    dispatch) so results are bit-stable across thread counts.
    """
    coeffs = np.asarray(coeffs)
    n = coeffs.shape[0]
    k = modes(n)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    basis = np.exp(1j * np.outer(x, k.astype(float)))
    if n % 2 == 0:
        basis[:, n // 2] = np.cos((n // 2) * x)
    if coeffs.ndim == 1:
        out = np.einsum("xk,k->x", basis, coeffs, optimize=False)
    else:
        out = np.einsum("xk,kd->xd", basis, coeffs, optimize=False)
    return np.real(out)


def shift_coeffs(coeffs: np.ndarray, z: float) -> np.ndarray:
    """Coefficients of x -> f(x + z)."""
    n = coeffs.shape[0]
    fac = np.exp(1j * modes(n).astype(float) * z)
    return coeffs * _mode_column(fac, coeffs.ndim)
