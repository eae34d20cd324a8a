"""Linearized flow operator at circular equilibria, as per-mode 3x3 matrices.

At the unit circle the linearization block-diagonalizes over Fourier modes in
the pointwise (normal, tangent, binormal) frame.  Each block is assembled
from one-dimensional kernel moments

    lambda_k(M)        = int M(2(1-cos z), z^2) (1 - cos k z) dz
    lambda_k^{s1,s2}(M) = int M(...) (1 + s1 cos z)(1 + s2 cos k z) dz
    sigma_k(M)         = int M(...) sin z sin k z dz

for M in {K_u, u K_uu, K_u + u K_uu}.  The assembled mode matrices are upper
triangular, so their diagonals are the eigenvalues; the k = 0 and |k| = 1
blocks act on constrained coefficient spaces (mean-zero slaving) and carry
their own eigenvalue lists.  The double-covered circle under pure bending has
closed-form modal rates and needs no quadrature.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import integrate

from .errors import NonRemovableSingularity
from .kernels import Kernel, M_DEGENERATE, ZERO_DEGENERATE

MOMENT_NAMES = ("Ku", "uKuu", "Ku+uKuu")
ZERO_EIG_TOL = 1e-8


@dataclass(frozen=True)
class KernelMoments:
    kernel_label: str
    k_max: int
    lam: Dict[str, np.ndarray]                      # lam[M][k], k = 0 .. k_max+1
    lam_signed: Dict[Tuple[str, int, int], np.ndarray]  # patterns (+,-), (-,+), (-,-)
    sigma: Dict[str, np.ndarray]


@dataclass(frozen=True)
class ModeMatrix:
    """Per-mode block of the linearized operator in the (n, t, b) basis.

    eigenvalues lists the spectrum on the mean-zero coefficient space (the
    constant binormal at k = 0 is excluded and the |k| = 1 normal/tangent
    coefficients are slaved together).  tangent_eigenvalues restricts further
    to perturbations tangent to the unit-speed manifold, the directions the
    constrained flow can actually realize; simulated decay rates follow this
    sublist.
    """

    k: int
    matrix: np.ndarray                              # 3x3, (n, t, b) coefficient basis
    eigenvalues: np.ndarray
    tangent_eigenvalues: np.ndarray


def _alpha_of_z(z: np.ndarray) -> np.ndarray:
    """alpha(z) = z^2 / (2(1-cos z)), series-protected near zero."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1e-3
    out = np.empty_like(z)
    zs = z[small]
    out[small] = 1.0 + zs**2 / 12.0 + zs**4 / 240.0
    zb = z[~small]
    out[~small] = zb**2 / (4.0 * np.sin(0.5 * zb) ** 2)
    return out


def _profile(kernel: Kernel, name: str):
    """Ray profile m_M(alpha) with M(u,v) = m_M(alpha) v^-(p+1) along the diagonal ray."""
    if name == "Ku":
        return kernel.eval_g
    if name == "uKuu":
        return lambda a: -np.asarray(a) * kernel.eval_gprime(a)
    if name == "Ku+uKuu":
        return lambda a: kernel.eval_g(a) - np.asarray(a) * kernel.eval_gprime(a)
    raise KeyError(name)


def _profile_root_order(kernel: Kernel, name: str) -> int:
    # g has root order m+1 at alpha = 1 for M-degenerate kernels, so its
    # derivative profile loses one order; zero-degenerate profiles have order 0
    if kernel.degeneracy == ZERO_DEGENERATE:
        return 0
    if name == "Ku":
        return kernel.m + 1
    return kernel.m


def _check_removable(kernel: Kernel, name: str, weight_order: int) -> None:
    exponent = weight_order - 2.0 * (1.0 + kernel.p) + 2.0 * _profile_root_order(kernel, name)
    if exponent <= -1.0:
        raise NonRemovableSingularity(
            f"moment of {name} for kernel {kernel.label} diverges at z = 0 "
            f"(integrand exponent {exponent:.2f})"
        )


def _moment(kernel: Kernel, name: str, weight, weight_order: int, k: int) -> float:
    """2 * int_0^pi m_M(alpha(z)) z^(-2(p+1)) weight(z, k) dz, adaptive quadrature."""
    _check_removable(kernel, name, weight_order)
    prof = _profile(kernel, name)
    pw = 2.0 * (kernel.p + 1.0)

    def integrand(z):
        return prof(_alpha_of_z(z)) * weight(z, k) / z**pw

    val, _ = integrate.quad(
        integrand, 0.0, np.pi, epsabs=1e-12, epsrel=1e-12, limit=max(200, 20 * max(k, 1))
    )
    return 2.0 * val


def _w_lambda(z, k):
    return 2.0 * np.sin(0.5 * k * z) ** 2  # 1 - cos(kz)


def _w_signed(s1, s2):
    def w(z, k):
        return (1.0 + s1 * np.cos(z)) * (1.0 + s2 * np.cos(k * z))

    return w


def _w_sigma(z, k):
    return np.sin(z) * np.sin(k * z)


def kernel_moments(kernel: Optional[Kernel], k_max: int) -> KernelMoments:
    """All moment families for k = 0 .. k_max+1; kernel None gives zeros."""
    kk = np.arange(k_max + 2)
    patterns = ((1, -1), (-1, 1), (-1, -1))  # (+,+) diverges for 0-degenerate kernels
    if kernel is None:
        zeros = np.zeros(k_max + 2)
        lam = {name: zeros.copy() for name in MOMENT_NAMES}
        lam_signed = {(name, s1, s2): zeros.copy() for name in MOMENT_NAMES for s1, s2 in patterns}
        sigma = {name: zeros.copy() for name in MOMENT_NAMES}
        return KernelMoments("none", k_max, lam, lam_signed, sigma)

    lam = {}
    lam_signed = {}
    sigma = {}
    for name in MOMENT_NAMES:
        lam[name] = np.array([_moment(kernel, name, _w_lambda, 4 if k == 0 else 2, int(k))
                              for k in kk])
        sigma[name] = np.array([_moment(kernel, name, _w_sigma, 2, int(k)) for k in kk])
        for s1, s2 in patterns:
            order = 2 * int(s1 == -1) + 2 * int(s2 == -1)
            lam_signed[(name, s1, s2)] = np.array(
                [_moment(kernel, name, _w_signed(s1, s2), order, int(k)) for k in kk]
            )
    return KernelMoments(kernel.label, k_max, lam, lam_signed, sigma)


def frame_primitive_matrix(k: int) -> np.ndarray:
    """Action of the mean-zero primitive on frame coefficients at mode k."""
    if k == 0:
        return np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]], dtype=complex)
    if abs(k) == 1:
        s = 1.0 if k > 0 else -1.0
        return (1.0 / (s * 1j)) * np.array(
            [[0.0, 0.5, 0.0], [0.5, 0.0, 0.0], [0.0, 0.0, 1.0]], dtype=complex
        )
    k2 = float(k * k)
    return (1.0 / (1j * k * (k2 - 1.0))) * np.array(
        [[k2, -k2, 0.0], [-1.0, k2, 0.0], [0.0, 0.0, k2 - 1.0]], dtype=complex
    )


def force_frame_matrix(moments: KernelMoments, k: int) -> np.ndarray:
    """Frame-coefficient action of the linearized pairwise force at mode k."""
    ak = abs(k)
    lpm = lambda name, s1, s2: moments.lam_signed[(name, s1, s2)][ak]
    half = 0.5 * (lpm("Ku", 1, -1) + lpm("Ku", -1, 1))
    m = np.zeros((3, 3), dtype=complex)
    m[0, 0] = half + lpm("uKuu", -1, 1)
    m[1, 1] = half + lpm("uKuu", 1, -1)
    m[2, 2] = 0.5 * (lpm("Ku", 1, -1) + lpm("Ku", -1, -1))
    if k != 0:
        # sigma is odd in k, so k*sigma_k and sigma_k/k are even in k
        sig = moments.sigma["Ku+uKuu"][ak]
        m[0, 1] = ak * sig
        m[1, 0] = sig / ak
    return m


def _ab_coefficients(moments: KernelMoments, k: int) -> Tuple[float, float]:
    """Entries a_k, b_k shared by the assembled mode matrices (|k| >= 2)."""
    ak = abs(k)
    lam_s = moments.lam["Ku+uKuu"]
    lam_u = moments.lam["uKuu"]
    k2 = float(ak * ak)
    a_k = -((ak - 1.0) ** 2 * lam_s[ak + 1] + (ak + 1.0) ** 2 * lam_s[ak - 1]) / (
        2.0 * (k2 - 1.0) ** 2
    ) + (lam_u[ak] - lam_u[1]) / (k2 - 1.0)
    b_k = -ak * ((ak - 1.0) ** 2 * lam_s[ak + 1] - (ak + 1.0) ** 2 * lam_s[ak - 1]) / (
        2.0 * (k2 - 1.0) ** 2
    )
    return float(a_k), float(b_k)


def circle_linearization(kernel: Optional[Kernel], k_max: int) -> List[ModeMatrix]:
    """Assembled mode matrices of the linearized flow at the unit circle.

    Modes run over signed k with |k| <= k_max.  The k = 0 block excludes the
    constant binormal direction (not mean zero) and the |k| = 1 blocks slave
    the normal and tangent coefficients together; their eigenvalue lists are
    computed on those constrained spaces.
    """
    moments = kernel_moments(kernel, k_max)
    lam1 = moments.lam["Ku"][1]
    out = []
    for k in range(-k_max, k_max + 1):
        ak = abs(k)
        if ak == 0:
            mat = np.zeros((3, 3), dtype=complex)
            eigs = np.zeros(2)
            tangent = np.zeros(1)          # normal rotation; scaling is off-manifold
        elif ak == 1:
            mat = -np.array([[0.0, 1.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]], dtype=complex)
            eigs = np.array([-1.0, 0.0])   # slaved (n,t) direction; binormal
            tangent = np.zeros(1)          # binormal rotation only
        else:
            a_k, b_k = _ab_coefficients(moments, k)
            k2 = float(ak * ak)
            lam_k = moments.lam["Ku"][ak]
            mat = np.zeros((3, 3), dtype=complex)
            mat[0, 0] = lam1 - k2 + a_k
            mat[0, 1] = -2.0 * k2 + b_k
            mat[1, 1] = -k2
            mat[2, 2] = (1.0 + lam1) - (k2 * k2 + lam_k) / k2
            eigs = np.real(np.diag(mat)).copy()
            tangent = np.real(np.array([mat[0, 0], mat[2, 2]]))  # normal, binormal
        out.append(
            ModeMatrix(
                k=k,
                matrix=mat,
                eigenvalues=np.asarray(eigs, dtype=float),
                tangent_eigenvalues=np.asarray(tangent, dtype=float),
            )
        )
    return out


@dataclass(frozen=True)
class SpectrumReport:
    kernel_label: str
    k_max: int
    modes: List[ModeMatrix]
    zero_count: int
    spectral_gap: float
    stable: bool

    def eigenvalues(self) -> np.ndarray:
        return np.concatenate([m.eigenvalues for m in self.modes])


def spectrum_report(matrices: List[ModeMatrix], kernel_label: str = "") -> SpectrumReport:
    """Zero-mode count and spectral gap nu = -max{Re lambda : |lambda| > tol}.

    Zero eigenvalues are counted on the mean-zero space, where the kernel of
    the linearization is spanned by the rotation and scaling directions.  The
    gap is taken over the flow-tangent eigenvalues: directions that violate
    the pointwise unit-speed constraint decay in the ambient operator but are
    never excited by the constrained dynamics, so only the tangent sublist
    predicts simulated decay rates.
    """
    eigs = np.concatenate([m.eigenvalues for m in matrices])
    zero = np.abs(eigs) <= ZERO_EIG_TOL
    nonzero = eigs[~zero]
    tang = np.concatenate([m.tangent_eigenvalues for m in matrices])
    tang_nonzero = tang[np.abs(tang) > ZERO_EIG_TOL]
    gap = float(-np.max(tang_nonzero.real)) if tang_nonzero.size else float("inf")
    k_max = max(abs(m.k) for m in matrices)
    return SpectrumReport(
        kernel_label=kernel_label,
        k_max=k_max,
        modes=matrices,
        zero_count=int(np.sum(zero)),
        spectral_gap=gap,
        stable=bool(np.all(nonzero.real < 0.0)),
    )


@dataclass(frozen=True)
class DcRate:
    branch: str   # "pair2" | "tangent" | "normal" | "binormal"
    k: int
    rate: float
    coupled: bool = False


def dc_bending_rates(k_max: int) -> List[DcRate]:
    """Modal decay rates of pure bending flow at the double-covered circle.

    The |k| = 2 normal/tangent pair decays at k^2; the complement branch has
    tangent rate k^2 feeding the normal component through a 4*psi_x coupling
    (normal rate also k^2); the binormal branch decays at k^2 - 4, neutral at
    |k| = 2 and growing for |k| < 2.
    """
    rates = []
    for k in range(-k_max, k_max + 1):
        k2 = float(k * k)
        if abs(k) == 2:
            rates.append(DcRate("pair2", k, k2))
        else:
            rates.append(DcRate("tangent", k, k2))
            rates.append(DcRate("normal", k, k2, coupled=True))
        if k != 0:
            rates.append(DcRate("binormal", k, k2 - 4.0))
    return rates
