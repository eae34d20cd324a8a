"""Bi-variate interaction kernels K(u, v) with ray-profile metadata.

Arguments are squared distances: u the squared chord, v the squared geodesic
parameter separation.  Every built-in family collapses along rays through the
scaling law K(v/a, v) = h(a) * v**(-p), and the profile g(a) = -a^2 h'(a)
controls integrability of the induced force near the diagonal.  Degeneracy is
either ZERO (g(1) may be nonzero; force splitting needs p < 1/2) or M(m)
(g has a root of order m+1 at a = 1, force by pure quadrature).
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .errors import InadmissibleParameters, ParseError

ZERO_DEGENERATE = "zero"
M_DEGENERATE = "m"


@dataclass(frozen=True)
class Kernel:
    """Closed-form kernel record.

    h_root_order is the vanishing order of h at a = 1 (0 when h(1) != 0);
    it selects the diagonal limit used by the energy quadrature.
    """

    label: str
    p: float
    degeneracy: str               # ZERO_DEGENERATE or M_DEGENERATE
    m: Optional[int]              # root order of g at 1 is m+1 (M-degenerate only)
    h_root_order: int
    eval_K: Callable
    eval_Ku: Callable
    eval_uKuu: Callable
    eval_h: Callable
    eval_g: Callable
    eval_gprime: Callable
    eval_gdoubleprime: Callable

    @property
    def g1(self) -> float:
        return float(self.eval_g(1.0))

    def flow_admissible(self) -> bool:
        """Whether the nonlocal force hypotheses hold for this kernel."""
        if self.degeneracy == ZERO_DEGENERATE:
            return self.p < 0.5
        return self.m > 4.0 * self.p - 2.0

    def __repr__(self) -> str:
        return f"Kernel({self.label})"


def _verify_degeneracy(kernel: Kernel) -> None:
    """Numerically confirm the declared root order of g at alpha = 1."""
    if kernel.degeneracy == M_DEGENERATE:
        if abs(kernel.g1) > 1e-12:
            raise InadmissibleParameters(f"{kernel.label}: g(1) = {kernel.g1:.3e}, expected 0")
        # forward differences of g at 1 vanish through order m
        h = 1e-3
        for order in range(1, kernel.m + 1):
            nodes = 1.0 + h * np.arange(order + 1)
            w = np.array([(-1) ** (order - i) * math.comb(order, i) for i in range(order + 1)])
            fd = float(np.dot(w, kernel.eval_g(nodes))) / h**order
            if abs(fd) > 1e-4:
                raise InadmissibleParameters(
                    f"{kernel.label}: g^({order})(1) = {fd:.3e}, expected 0"
                )


def make_distortion_kernel(q: int) -> Kernel:
    """K = (v/u)^q, the even-exponent distortion approximation family."""
    if q < 1 or int(q) != q:
        raise InadmissibleParameters("distortion kernel requires integer q >= 1")
    q = int(q)
    kernel = Kernel(
        label=f"distortion:q={q}",
        p=0.0,
        degeneracy=ZERO_DEGENERATE,
        m=None,
        h_root_order=0,
        eval_K=lambda u, v: (v / u) ** q,
        eval_Ku=lambda u, v: -q * v**q * u ** (-q - 1),
        eval_uKuu=lambda u, v: q * (q + 1) * v**q * u ** (-q - 1),
        eval_h=lambda a: np.asarray(a, dtype=float) ** q,
        eval_g=lambda a: -q * np.asarray(a, dtype=float) ** (q + 1),
        eval_gprime=lambda a: -q * (q + 1) * np.asarray(a, dtype=float) ** q,
        eval_gdoubleprime=lambda a: -(q**2) * (q + 1) * np.asarray(a, dtype=float) ** (q - 1),
    )
    return kernel


def make_mobius_kernel() -> Kernel:
    """K = 1/u - 1/v.  Energy-side only: the force hypotheses fail (p = 1)."""
    return Kernel(
        label="mobius",
        p=1.0,
        degeneracy=ZERO_DEGENERATE,
        m=None,
        h_root_order=1,
        eval_K=lambda u, v: 1.0 / u - 1.0 / v,
        eval_Ku=lambda u, v: -1.0 / u**2,
        eval_uKuu=lambda u, v: 2.0 / u**2,
        eval_h=lambda a: np.asarray(a, dtype=float) - 1.0,
        eval_g=lambda a: -np.asarray(a, dtype=float) ** 2,
        eval_gprime=lambda a: -2.0 * np.asarray(a, dtype=float),
        eval_gdoubleprime=lambda a: -2.0 * np.ones_like(np.asarray(a, dtype=float)),
    )


def make_ohara_kernel(j: float, q: int) -> Kernel:
    """K = (u^-j - v^-j)^q with p = j*q; M(q-2)-degenerate for q >= 2."""
    if q < 1 or int(q) != q:
        raise InadmissibleParameters("ohara kernel requires integer q >= 1")
    q = int(q)
    j = float(j)
    if j <= 0:
        raise InadmissibleParameters("ohara kernel requires j > 0")
    if j * q < 1.0:
        raise InadmissibleParameters(f"ohara kernel requires j*q >= 1, got {j * q}")

    def K(u, v):
        base = np.maximum(np.asarray(u, dtype=float) ** (-j) - np.asarray(v, dtype=float) ** (-j), 0.0)
        return base**q

    def Ku(u, v):
        u = np.asarray(u, dtype=float)
        base = np.maximum(u ** (-j) - np.asarray(v, dtype=float) ** (-j), 0.0)
        return -j * q * u ** (-j - 1) * base ** (q - 1)

    def uKuu(u, v):
        u = np.asarray(u, dtype=float)
        base = np.maximum(u ** (-j) - np.asarray(v, dtype=float) ** (-j), 0.0)
        out = j * q * (j + 1) * u ** (-j - 1) * base ** (q - 1)
        if q >= 2:
            out = out + j**2 * q * (q - 1) * u ** (-2 * j - 1) * base ** (q - 2)
        return out

    def h(a):
        return (np.asarray(a, dtype=float) ** j - 1.0) ** q

    def g(a):
        a = np.asarray(a, dtype=float)
        return -q * j * a ** (j + 1) * (a**j - 1.0) ** (q - 1)

    def gprime(a):
        a = np.asarray(a, dtype=float)
        out = -q * j * (j + 1) * a**j * (a**j - 1.0) ** (q - 1)
        if q >= 2:
            out = out - q * (q - 1) * j**2 * a ** (2 * j) * (a**j - 1.0) ** (q - 2)
        return out

    def gdoubleprime(a):
        a = np.asarray(a, dtype=float)
        out = -q * j**2 * (j + 1) * a ** (j - 1) * (a**j - 1.0) ** (q - 1)
        if q >= 2:
            out = out - q * (q - 1) * j**2 * (3 * j + 1) * a ** (2 * j - 1) * (a**j - 1.0) ** (q - 2)
        if q >= 3:
            out = out - q * (q - 1) * (q - 2) * j**3 * a ** (3 * j - 1) * (a**j - 1.0) ** (q - 3)
        return out

    kernel = Kernel(
        label=f"ohara:j={j},q={q}",
        p=j * q,
        degeneracy=M_DEGENERATE if q >= 2 else ZERO_DEGENERATE,
        m=q - 2 if q >= 2 else None,
        h_root_order=q,
        eval_K=K,
        eval_Ku=Ku,
        eval_uKuu=uKuu,
        eval_h=h,
        eval_g=g,
        eval_gprime=gprime,
        eval_gdoubleprime=gdoubleprime,
    )
    _verify_degeneracy(kernel)
    return kernel


def parse_kernel(spec: str) -> Optional[Kernel]:
    """Parse a kernel spec string: distortion:q=<int> | mobius | ohara:j=<rat>,q=<int> | none."""
    spec = spec.strip()
    if spec == "none":
        return None
    if spec == "mobius":
        return make_mobius_kernel()
    name, _, args = spec.partition(":")
    kv = {}
    if args:
        for item in args.split(","):
            key, _, val = item.partition("=")
            if not val:
                raise ParseError(f"malformed kernel argument {item!r}")
            kv[key.strip()] = val.strip()
    try:
        if name == "distortion":
            return make_distortion_kernel(int(kv["q"]))
        if name == "ohara":
            return make_ohara_kernel(float(Fraction(kv["j"])), int(kv["q"]))
    except (KeyError, ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad kernel spec {spec!r}: {exc}") from exc
    raise ParseError(f"unknown kernel spec {spec!r}")


def monotonicity_report(kernel: Kernel, z_samples=None, u_samples=None) -> dict:
    """Finite-difference check of u -> K(u, z^2): monotone direction and convexity.

    All built-in kernels are repulsive, so the expected direction is
    non-increasing in u; the report records which branch was observed.
    """
    if z_samples is None:
        z_samples = np.linspace(0.3, np.pi, 7)
    if u_samples is None:
        u_samples = np.geomspace(1e-2, 20.0, 40)
    decreasing = True
    convex = True
    for z in np.asarray(z_samples, dtype=float):
        vals = kernel.eval_K(np.asarray(u_samples), z**2)
        d1 = np.diff(vals)
        d2 = np.diff(vals, 2)
        decreasing &= bool(np.all(d1 <= 1e-12 * np.maximum(1.0, np.abs(vals[:-1]))))
        convex &= bool(np.all(d2 >= -1e-9 * np.maximum(1.0, np.abs(vals[:-2]))))
    return {"monotone_in_u": "non-increasing" if decreasing else "mixed", "convex_in_u": convex}
