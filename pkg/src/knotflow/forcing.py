"""Doubly-nonlocal forcing: singular fractional part plus regular remainder.

The pairwise force

    f(x) = p.v. int K_u(|gamma(x)-gamma(y)|^2, theta^2(x-y)) (gamma(x)-gamma(y)) dy

splits, for g(1) != 0 and p < 1/2, into g(1) * L_p[gamma] plus a remainder
whose integrand [g(alpha) - g(1)] (gamma(x)-gamma(y)) / theta^(2p+2) vanishes
along the diagonal.  L_p is diagonal in Fourier modes with multipliers

    lambda_{k,p} = 2 * int_0^pi (1 - cos k z) / z^(2(1+p)) dz,

computed here by cumulative adaptive quadrature over pi-length panels.
M-degenerate kernels have g(1) = 0 and use the remainder quadrature alone.
The flow consumes F, the mean-zero spectral primitive of f.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import integrate

from . import spectral
from .errors import DegenerateChord, InadmissibleExponent
from .fields import CurveEmbedding, chord_floor, chord_matrix, pair_geodesics
from .kernels import Kernel, ZERO_DEGENERATE


@dataclass(frozen=True)
class FractionalMultiplier:
    """Per-mode symbol of the periodic fractional Laplacian splitting."""

    p: float
    n: int
    lam: np.ndarray  # lam[k] for k = 0 .. n//2

    def for_modes(self, k: np.ndarray) -> np.ndarray:
        return self.lam[np.abs(k)]


def build_multiplier(p: float, n: int) -> FractionalMultiplier:
    """Multipliers lambda_{k,p} for |k| <= n/2 by adaptive panel quadrature."""
    if not 0.0 <= p < 0.5:
        raise InadmissibleExponent(f"fractional splitting requires 0 <= p < 1/2, got {p}")
    kmax = n // 2

    def integrand(u):
        # 1 - cos u written as 2 sin^2(u/2) to avoid cancellation near 0
        return 2.0 * np.sin(0.5 * u) ** 2 / u ** (2.0 + 2.0 * p)

    # lambda_k = 2 k^(1+2p) * int_0^{k pi} (1-cos u)/u^(2+2p) du; the substituted
    # integral is accumulated once over pi-length panels and reused for every k.
    cumulative = np.zeros(kmax + 1)
    for j in range(kmax):
        seg, _ = integrate.quad(
            integrand, j * np.pi, (j + 1) * np.pi, epsabs=1e-13, epsrel=1e-13, limit=200
        )
        cumulative[j + 1] = cumulative[j] + seg
    k = np.arange(kmax + 1, dtype=float)
    lam = np.zeros(kmax + 1)
    lam[1:] = 2.0 * k[1:] ** (1.0 + 2.0 * p) * cumulative[1:]
    return FractionalMultiplier(p, n, lam)


def singular_part(curve: CurveEmbedding, mult: FractionalMultiplier) -> np.ndarray:
    """Apply the fractional multiplier: gamma_hat_k -> lambda_k gamma_hat_k."""
    if curve.n != mult.n:
        raise ValueError("grid sizes of curve and multiplier differ")
    k = spectral.modes(curve.n)
    out_hat = curve.gamma_hat * mult.for_modes(k)[:, None]
    return spectral.inverse(out_hat)


def regular_force(curve: CurveEmbedding, kernel: Kernel) -> np.ndarray:
    """Trapezoid quadrature of the regular remainder integrand.

    The integrand tends to zero along the diagonal for admissible kernels, so
    the diagonal cell contributes nothing.  For M-degenerate kernels this is
    the entire force.
    """
    n = curve.n
    h = 2.0 * np.pi / n
    chords = chord_matrix(curve.gamma)
    off = ~np.eye(n, dtype=bool)
    if np.any(chords[off] < chord_floor(n)):
        raise DegenerateChord("off-diagonal chord below chord floor")
    theta = pair_geodesics(n)
    g1 = kernel.g1
    weight = np.zeros((n, n))
    alpha = np.ones((n, n))
    alpha[off] = theta[off] ** 2 / chords[off] ** 2
    weight[off] = (kernel.eval_g(alpha[off]) - g1) / theta[off] ** (2.0 * (kernel.p + 1.0))
    diff = curve.gamma[:, None, :] - curve.gamma[None, :, :]
    return h * np.einsum("jl,jld->jd", weight, diff, optimize=False)


def assemble_force(
    curve: CurveEmbedding,
    kernel: Optional[Kernel],
    mult: Optional[FractionalMultiplier] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Full force f and its mean-zero primitive F as sampled fields.

    Returns (f, F).  Kernel None yields zero fields.  Zero-degenerate kernels
    need a FractionalMultiplier built at the kernel's exponent.
    """
    if kernel is None:
        z = np.zeros((curve.n, 3))
        return z, z.copy()
    if not kernel.flow_admissible():
        raise InadmissibleExponent(f"kernel {kernel.label} fails the force hypotheses")
    f = regular_force(curve, kernel)
    if kernel.degeneracy == ZERO_DEGENERATE and kernel.g1 != 0.0:
        if mult is None or mult.p != kernel.p or mult.n != curve.n:
            raise ValueError("zero-degenerate kernel requires a matching multiplier")
        f = f + kernel.g1 * singular_part(curve, mult)
    f_hat = spectral.forward(f)
    f_hat[0] = 0.0  # mean is zero analytically; drop quadrature residue
    F = spectral.inverse(spectral.antiderivative_coeffs(f_hat))
    f = spectral.inverse(f_hat)
    return f, F
