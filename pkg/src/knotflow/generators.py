"""Generators for every initial tangent field used by the experiments.

All generators end by projecting onto the exact constraint manifold, even
when the defining formula satisfies the constraints only to leading order in
the perturbation size: starting the flow off the manifold would conflate
constraint drift with scheme error.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import spectral
from .errors import DegenerateChord, ParameterOutOfRange, ParseError, SelfIntersection
from .fields import (
    CurveEmbedding,
    TangentField,
    constant_speed_project,
    distortion,
    reconstruct_curve,
)

GENERATOR_NAMES = ("circle", "double_covered", "dc_perturbation", "trefoil_torus", "supercoil", "file")


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    parameters: Dict[str, float]
    n: int


def _dc_frame(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tangent, normal, binormal frame fields of the double-covered circle."""
    tau = np.stack([-np.sin(2 * x), np.cos(2 * x), np.zeros_like(x)], axis=1)
    nrm = np.stack([-np.cos(2 * x), -np.sin(2 * x), np.zeros_like(x)], axis=1)
    binrm = np.zeros_like(tau)
    binrm[:, 2] = 1.0
    return tau, nrm, binrm


def gen_circle(n: int) -> TangentField:
    """Unit circle tangent field (-sin x, cos x, 0)."""
    _check_n(n)
    x = spectral.grid(n)
    return TangentField.from_values(
        np.stack([-np.sin(x), np.cos(x), np.zeros_like(x)], axis=1)
    )


def gen_double_covered(n: int) -> TangentField:
    """Twice-traversed circle of radius 1/2: tau = (-sin 2x, cos 2x, 0)."""
    _check_n(n)
    x = spectral.grid(n)
    tau, _, _ = _dc_frame(x)
    return TangentField.from_values(tau)


def gen_dc_perturbation(n: int, eps1: float, eps2: float) -> TangentField:
    """Unknotted perturbation of the double-covered circle.

    tau = tau_dc - eps1 sin(x) n_dc + eps2 cos(5x) b_dc, then projected.  The
    height separation of the single planar crossing needs |eps1| <= 1/4.
    """
    _check_n(n)
    if abs(eps1) > 0.25:
        raise ParameterOutOfRange(f"|eps1| <= 1/4 required, got {eps1}")
    x = spectral.grid(n)
    tau, nrm, binrm = _dc_frame(x)
    raw = tau - eps1 * np.sin(x)[:, None] * nrm + eps2 * np.cos(5 * x)[:, None] * binrm
    if eps1 == 0.0 and eps2 == 0.0:
        return TangentField.from_values(raw)
    return constant_speed_project(raw_field(raw))


def gen_trefoil_torus(n: int, eps: float) -> TangentField:
    """Trefoil on the torus of tube radius eps around the half-radius circle."""
    _check_n(n)
    if not 0.0 < eps <= 0.2:
        raise ParameterOutOfRange(f"trefoil needs 0 < eps <= 0.2, got {eps}")
    x = spectral.grid(n)
    tau, nrm, binrm = _dc_frame(x)
    psi = (
        np.cos(3 * x)[:, None] * tau
        + 1.5 * np.sin(3 * x)[:, None] * nrm
        - 3.0 * np.cos(3 * x)[:, None] * binrm
    )
    return constant_speed_project(raw_field(tau + eps * psi))


def gen_supercoil(
    n: int,
    amp1: float = 0.28,
    freq1: int = 8,
    amp2: float = 0.035,
    freq2: int = 32,
    squash: float = 1.0,
) -> TangentField:
    """Supercoiled unknot: a base circle carrying two superposed coils.

    The coils wind in the local radial/vertical frame at frequencies freq1
    (large amplitude) and freq2 (small amplitude); squash scales the vertical
    excursions.  Embeddedness is verified through the chord scan.
    """
    _check_n(n)
    if freq1 < 1 or freq2 < 1 or int(freq1) != freq1 or int(freq2) != freq2:
        raise ParameterOutOfRange("coil frequencies must be positive integers")
    if amp1 < 0 or amp2 < 0:
        raise ParameterOutOfRange("coil amplitudes must be nonnegative")
    x = spectral.grid(n)
    radial = np.stack([np.cos(x), np.sin(x), np.zeros_like(x)], axis=1)
    vertical = np.zeros_like(radial)
    vertical[:, 2] = 1.0
    r_off = amp1 * np.cos(freq1 * x) + amp2 * np.cos(freq2 * x)
    z_off = squash * (amp1 * np.sin(freq1 * x) + amp2 * np.sin(freq2 * x))
    points = radial * (1.0 + r_off)[:, None] + vertical * z_off[:, None]
    tau = constant_speed_project(points)
    try:
        distortion(reconstruct_curve(tau))
    except DegenerateChord as exc:
        raise SelfIntersection("supercoil parameters produce a self-intersecting curve") from exc
    return tau


def raw_field(values: np.ndarray) -> TangentField:
    """Wrap raw samples without validation (projection input)."""
    return TangentField.from_values(values)


def perturbed_circle(n: int, eps: float, seed: int, modes: int = 6) -> TangentField:
    """Circle plus a seeded random mean-zero field of size eps, projected.

    The perturbation is a low-mode trigonometric field with unit normalized
    L2 norm before scaling; used by stability experiments and test corpora.
    """
    _check_n(n)
    rng = np.random.default_rng(seed)
    x = spectral.grid(n)
    psi = np.zeros((n, 3))
    for k in range(1, modes + 1):
        amp_c = rng.standard_normal(3) / k
        amp_s = rng.standard_normal(3) / k
        psi += np.cos(k * x)[:, None] * amp_c[None, :] + np.sin(k * x)[:, None] * amp_s[None, :]
    psi -= psi.mean(axis=0)[None, :]
    norm = np.sqrt(np.mean(np.sum(psi**2, axis=1)))
    psi /= norm
    base = gen_circle(n).values + eps * psi
    return constant_speed_project(raw_field(base))


def random_embedded_curve(n: int, seed: int, eps: float = 0.25) -> CurveEmbedding:
    """Seeded random unit-speed embedding for test corpora (distortion checked)."""
    tau = perturbed_circle(n, eps, seed)
    curve = reconstruct_curve(tau)
    distortion(curve)  # raises DegenerateChord if not embedded
    return curve


def planar_double_points(curve: CurveEmbedding) -> List[Tuple[float, float, float]]:
    """Self-intersections of the xy-projection of the sampled polyline.

    Returns one (x_param_a, x_param_b, dz) triple per crossing, where dz is
    the height separation of the two preimages.  Adjacent segments are
    skipped; intersections are located by segment-segment tests on the closed
    polyline.
    """
    pts = curve.gamma
    n = curve.n
    xy = pts[:, :2]
    seg_a = xy
    seg_b = np.roll(xy, -1, axis=0)
    found = []
    params = spectral.grid(n)
    for i in range(n):
        p, r = seg_a[i], seg_b[i] - seg_a[i]
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            q, s = seg_a[j], seg_b[j] - seg_a[j]
            denom = r[0] * s[1] - r[1] * s[0]
            if abs(denom) < 1e-14:
                continue
            qp = q - p
            t = (qp[0] * s[1] - qp[1] * s[0]) / denom
            u = (qp[0] * r[1] - qp[1] * r[0]) / denom
            if 0.0 <= t < 1.0 and 0.0 <= u < 1.0:
                za = pts[i, 2] + t * (pts[(i + 1) % n, 2] - pts[i, 2])
                zb = pts[j, 2] + u * (pts[(j + 1) % n, 2] - pts[j, 2])
                xa = params[i] + t * 2.0 * np.pi / n
                xb = params[j] + u * 2.0 * np.pi / n
                found.append((float(xa), float(xb), float(za - zb)))
    return found


def _check_n(n: int) -> None:
    if n < 16:
        raise ParameterOutOfRange(f"grid size must be at least 16, got {n}")
    if n & (n - 1) != 0:
        raise ParameterOutOfRange(f"grid size must be a power of two, got {n}")


def parse_generator(spec: str, n: int):
    """Build a TangentField from a generator spec string.

    Accepted forms: circle | dc | dc-pert:e1=<f>,e2=<f> | trefoil:eps=<f> |
    supercoil:a1=<f>,f1=<int>,a2=<f>,f2=<int>[,sq=<f>] | file:<path>.
    """
    spec = spec.strip()
    if spec == "circle":
        return gen_circle(n)
    if spec == "dc":
        return gen_double_covered(n)
    name, _, args = spec.partition(":")
    if name == "file":
        from .curvefile import load_curve_file

        if not args:
            raise ParseError("file generator needs a path: file:<path>")
        return load_curve_file(args)
    kv = {}
    if args:
        for item in args.split(","):
            key, _, val = item.partition("=")
            if not val:
                raise ParseError(f"malformed generator argument {item!r}")
            kv[key.strip()] = val.strip()
    try:
        if name == "dc-pert":
            return gen_dc_perturbation(n, float(kv["e1"]), float(kv["e2"]))
        if name == "trefoil":
            return gen_trefoil_torus(n, float(kv["eps"]))
        if name == "supercoil":
            kwargs = {}
            if "a1" in kv:
                kwargs["amp1"] = float(kv["a1"])
            if "f1" in kv:
                kwargs["freq1"] = int(kv["f1"])
            if "a2" in kv:
                kwargs["amp2"] = float(kv["a2"])
            if "f2" in kv:
                kwargs["freq2"] = int(kv["f2"])
            if "sq" in kv:
                kwargs["squash"] = float(kv["sq"])
            return gen_supercoil(n, **kwargs)
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad generator spec {spec!r}: {exc}") from exc
    raise ParseError(f"unknown generator spec {spec!r}")
