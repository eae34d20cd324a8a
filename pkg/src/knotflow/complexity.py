"""Combinatorial complexity functionals: weighted crossing integrals and
total q-curvature, with the fractional-Sobolev/distortion bound checks.

The crossing machinery is built on the space-side double integral

    I_p = iint w_p(z) |<gdot(x), gdot(x+z), g(x+z)-g(x)>| / |g(x+z)-g(x)|^3 dz dx,

with weight w_p = (2*pi/theta(z))^p for constant-speed curves.  For p = 0 the
value equals 4*pi times the average crossing number; the weighted variants
carry normalization 1/(2*pi) when read as sphere averages.  We always compute
the integral directly; projecting to the sphere and counting crossings would
only add sampling noise.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DegenerateChord, InadmissibleExponent
from .fields import (
    CurveEmbedding,
    TangentField,
    chord_floor,
    distortion,
    pair_geodesics,
    sobolev_seminorm,
)

ACN_BOUND_SLACK = 1e-8


@dataclass(frozen=True)
class CrossingReport:
    p: float
    value: float        # raw crossing integral I_p
    acn: float          # I_0 / (4 pi), the average crossing number
    bound_rhs: float
    satisfied: bool


def crossing_integral(curve: CurveEmbedding, p: float) -> float:
    """Weighted crossing double integral I_p by the trapezoid double sum.

    Requires 0 <= p < 1 and a constant-speed embedded curve; the diagonal
    cell vanishes at rate |z|^(1-p) and contributes zero.
    """
    if p < 0.0 or p >= 1.0:
        raise InadmissibleExponent(f"crossing weight requires 0 <= p < 1, got {p}")
    n = curve.n
    h = 2.0 * np.pi / n
    vel = curve.velocity_values()
    theta = pair_geodesics(n)
    floor = chord_floor(n)
    total = 0.0
    block = max(1, 131072 // n)
    for start in range(0, n, block):
        stop = min(start + block, n)
        diff = curve.gamma[None, :, :] - curve.gamma[start:stop, None, :]
        dist = np.sqrt(np.einsum("jld,jld->jl", diff, diff))
        off = np.ones_like(dist, dtype=bool)
        idx = np.arange(start, stop)
        off[np.arange(stop - start), idx] = False
        if np.any(dist[off] < floor):
            raise DegenerateChord("off-diagonal chord below chord floor")
        cross = np.cross(np.broadcast_to(vel[start:stop, None, :], diff.shape), vel[None, :, :])
        triple = np.abs(np.einsum("jld,jld->jl", cross, diff))
        th = theta[start:stop, :]
        w = np.zeros_like(dist)
        w[off] = (2.0 * np.pi / th[off]) ** p
        integrand = np.zeros_like(dist)
        integrand[off] = w[off] * triple[off] / dist[off] ** 3
        total += float(np.sum(integrand))
    return h * h * total


def average_crossing_number(curve: CurveEmbedding) -> float:
    """Sphere-averaged crossing count: I_0 / (4 pi)."""
    return crossing_integral(curve, 0.0) / (4.0 * np.pi)


def total_q_curvature(tau: TangentField, q: float) -> float:
    """Scale-invariant total q-curvature (mean of kappa^q)^(1/q), kappa = |tau_x|."""
    if q < 1.0:
        raise InadmissibleExponent(f"total q-curvature requires q >= 1, got {q}")
    kappa = np.linalg.norm(tau.derivative_values(), axis=1)
    return float(np.mean(kappa**q) ** (1.0 / q))


def weight_constant(p: float) -> float:
    """Constant C_p of the weighted crossing bound, by quadrature of its formula.

    C_p = 2*sqrt(2)*(2 pi)^(p+1) * sqrt(int_0^inf (1-cos u)/u^(2+p) du)
                                 * sqrt(int_0^inf ((1-cos u)^2+(sin u - u)^2)/u^(4+p) du),
    finite for -1 < p < 1.  C_0 evaluates to 4*pi^2/sqrt(3).
    """
    if not -1.0 < p < 1.0:
        raise InadmissibleExponent(f"weight constant defined for -1 < p < 1, got {p}")

    def head(f):
        # substitute u = w^2 to absorb the u^-p endpoint behavior on [0, 1]
        val, _ = integrate.quad(
            lambda w: f(w * w) * 2.0 * w, 0.0, 1.0, epsabs=1e-10, epsrel=1e-10, limit=400
        )
        return val

    # tails of the pure power parts are analytic: int_1^inf u^-s du = 1/(s-1)
    i1 = head(lambda u: 2.0 * np.sin(0.5 * u) ** 2 / u ** (2.0 + p))
    i1 += 1.0 / (1.0 + p)
    osc, _ = integrate.quad(lambda u: 1.0 / u ** (2.0 + p), 1.0, np.inf, weight="cos", wvar=1.0)
    i1 -= osc

    def second_integrand(u):
        # (1-cos u)^2 + (sin u - u)^2 = 2 - 2cos(u) - 2u sin(u) + u^2; the
        # closed form cancels catastrophically near 0, so switch to its series
        if u < 1e-2:
            num = u**4 / 4.0 - u**6 / 72.0 + u**8 / 2880.0
        else:
            num = 2.0 - 2.0 * np.cos(u) - 2.0 * u * np.sin(u) + u**2
        return num / u ** (4.0 + p)

    i2 = head(second_integrand)
    i2 += 2.0 / (3.0 + p) + 1.0 / (1.0 + p)
    osc_c, _ = integrate.quad(lambda u: 2.0 / u ** (4.0 + p), 1.0, np.inf, weight="cos", wvar=1.0)
    osc_s, _ = integrate.quad(lambda u: 2.0 / u ** (3.0 + p), 1.0, np.inf, weight="sin", wvar=1.0)
    i2 -= osc_c + osc_s
    return 2.0 * math.sqrt(2.0) * (2.0 * np.pi) ** (p + 1.0) * math.sqrt(i1) * math.sqrt(i2)


def acn_bound_check(curve: CurveEmbedding) -> CrossingReport:
    """Average-crossing-number bound: acn <= (pi/sqrt(3)) (2pi/len)^2 |g|_{H^{3/2}}^2 d^3."""
    i0 = crossing_integral(curve, 0.0)
    acn = i0 / (4.0 * np.pi)
    delta = distortion(curve)
    seminorm = sobolev_seminorm(curve, 1.5)
    scale = (2.0 * np.pi / curve.length()) ** 2
    rhs = (np.pi / math.sqrt(3.0)) * scale * seminorm**2 * delta**3
    return CrossingReport(
        p=0.0, value=i0, acn=acn, bound_rhs=rhs, satisfied=bool(acn <= rhs + ACN_BOUND_SLACK)
    )


def weighted_bound_check(curve: CurveEmbedding, p: float) -> CrossingReport:
    """Weighted crossing bound: I_p <= C_p (2pi/len)^2 |g|_{H^{(3+p)/2}}^2 d^3."""
    ip = crossing_integral(curve, p)
    acn = crossing_integral(curve, 0.0) / (4.0 * np.pi)
    delta = distortion(curve)
    seminorm = sobolev_seminorm(curve, (3.0 + p) / 2.0)
    scale = (2.0 * np.pi / curve.length()) ** 2
    rhs = weight_constant(p) * scale * seminorm**2 * delta**3
    return CrossingReport(
        p=p, value=ip, acn=acn, bound_rhs=rhs, satisfied=bool(ip <= rhs + ACN_BOUND_SLACK)
    )
