"""Membership tests for the curvature cones: Garding cones, 2-convexity,
the pinching cone (delta+1)H <= alpha*gamma, uniform 2-convexity, and the
cylindrical rays."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ParameterError
from .speeds import SpeedSpec, _as_lambda, _sigma_all, eval_speed, in_support

__all__ = [
    "ConeSpec",
    "gamma_k",
    "two_convex",
    "gamma_alpha_delta",
    "uniform_two_convex",
    "contains",
    "cyl_ray",
    "cone_separation",
    "EmptyConeError",
]


class EmptyConeError(RuntimeError):
    """Rejection sampling found no point inside the cone."""


@dataclass(frozen=True)
class ConeSpec:
    """One of the cones used for curvature pinching.

    kind: ``gamma_k`` (S_l > 0 for l <= k, open), ``two_convex`` (all pair
    sums positive, open), ``gamma_alpha_delta`` ((delta+1)H <= alpha*gamma
    inside the speed's cone, closed), ``uniform_two_convex`` (pair sums
    >= beta*H with H > 0, closed).
    """

    kind: str
    n: int
    k: Optional[int] = None
    alpha: Optional[float] = None
    delta: Optional[float] = None
    beta: Optional[float] = None
    speed: Optional[SpeedSpec] = None

    def __post_init__(self):
        if self.kind == "gamma_k":
            if self.k is None or not 1 <= self.k <= self.n:
                raise ParameterError("gamma_k requires 1 <= k <= n")
        elif self.kind == "two_convex":
            if self.n < 2:
                raise ParameterError("two_convex requires n >= 2")
        elif self.kind == "gamma_alpha_delta":
            if self.alpha is None or self.alpha <= 0 or self.delta is None or self.delta <= 0:
                raise ParameterError("gamma_alpha_delta requires alpha > 0 and delta > 0")
            if self.speed is None or self.speed.n != self.n:
                raise ParameterError("gamma_alpha_delta requires a speed with matching n")
        elif self.kind == "uniform_two_convex":
            if self.beta is None or not 0 < self.beta < 1:
                raise ParameterError("uniform_two_convex requires beta in (0,1)")
        else:
            raise ParameterError(f"unknown cone kind {self.kind!r}")


def gamma_k(k: int, n: int) -> ConeSpec:
    return ConeSpec(kind="gamma_k", n=n, k=k)


def two_convex(n: int) -> ConeSpec:
    return ConeSpec(kind="two_convex", n=n)


def gamma_alpha_delta(alpha: float, delta: float, speed: SpeedSpec) -> ConeSpec:
    return ConeSpec(kind="gamma_alpha_delta", n=speed.n, alpha=alpha, delta=delta, speed=speed)


def uniform_two_convex(beta: float, n: int) -> ConeSpec:
    return ConeSpec(kind="uniform_two_convex", n=n, beta=beta)


def contains(cone: ConeSpec, lam) -> tuple[bool, Optional[str]]:
    """Membership test.  Returns (inside, witness); the witness names the
    violated condition when outside.  Open cones use strict inequalities,
    the pinching and uniform-2-convexity conditions are closed; exact
    boundary values are classified by the stated inequality with no
    tolerance."""
    lam = _as_lambda(lam)
    if lam.size != cone.n:
        raise ParameterError(f"dimension mismatch: len(lambda)={lam.size}, cone n={cone.n}")
    if cone.kind == "gamma_k":
        e = _sigma_all(np.sort(lam), cone.k)
        for l in range(1, cone.k + 1):
            if not e[l] > 0.0:
                return False, f"S_{l}(lambda) = {e[l]:.6g} <= 0"
        return True, None
    if cone.kind == "two_convex":
        s = np.sort(lam)
        ps = s[0] + s[1]
        if not ps > 0.0:
            return False, f"min pair sum = {ps:.6g} <= 0"
        return True, None
    if cone.kind == "gamma_alpha_delta":
        if not in_support(cone.speed, lam):
            return False, "lambda outside the speed's support cone"
        H = float(np.sum(lam))
        g = eval_speed(cone.speed, lam)
        if not (cone.delta + 1.0) * H <= cone.alpha * g:
            return False, f"(delta+1)H = {(cone.delta + 1) * H:.6g} > alpha*gamma = {cone.alpha * g:.6g}"
        return True, None
    # uniform_two_convex
    H = float(np.sum(lam))
    if not H > 0.0:
        return False, f"H = {H:.6g} <= 0"
    s = np.sort(lam)
    ps = float(s[0] + s[1])
    if not ps >= cone.beta * H:
        return False, f"min pair sum = {ps:.6g} < beta*H = {cone.beta * H:.6g}"
    return True, None


def cyl_ray(n: int, j: int) -> np.ndarray:
    """Unit generator of the cylindrical ray with n-j leading ones and j
    trailing zeros."""
    if not 0 <= j <= n - 1:
        raise ParameterError(f"j={j} out of range 0..{n - 1}")
    v = np.zeros(n)
    v[: n - j] = 1.0
    return v / np.linalg.norm(v)


def _distance_to_cyl_rays(lam: np.ndarray) -> float:
    """Euclidean distance from ``lam`` to the nearest ray spanned by a
    coordinate axis (the permutations of the most degenerate cylindrical
    generator)."""
    best = float(np.linalg.norm(lam))
    for i in range(lam.size):
        t = lam[i]
        if t > 0.0:
            d = float(np.sqrt(max(np.dot(lam, lam) - t * t, 0.0)))
        else:
            d = float(np.linalg.norm(lam))
        best = min(best, d)
    return best


def _distance_to_support_boundary(speed: SpeedSpec, lam: np.ndarray) -> float:
    """Distance from ``lam`` to the boundary of the speed's support cone.

    Exact for pair-sum cones (linear constraints); first-order margin
    min_l S_l/|grad S_l| for Garding cones.
    """
    if speed.kind == "harmonic_pairs":
        s = np.sort(lam)
        return float((s[0] + s[1]) / np.sqrt(2.0))
    if speed.kind == "quotient":
        return float(np.min(lam))
    if speed.kind == "sigma_k_root":
        from .speeds import _sigma_partials
        best = np.inf
        for l in range(1, speed.k + 1):
            e = _sigma_all(np.sort(lam), l)[l]
            grad = _sigma_partials(lam, l)
            gn = float(np.linalg.norm(grad))
            if gn > 0:
                best = min(best, e / gn)
        return float(best)
    return min(_distance_to_support_boundary(f, lam) for f in speed.factors)


def cone_separation(cone: ConeSpec, samples: int, seed: int = 0) -> float:
    """Sampled lower estimate of the separation of the pinching cone from
    the cylindrical rays and from the boundary of the speed's cone, over
    unit vectors.  Positive output supports (does not certify) the
    compact-support hypothesis of the convexity estimate."""
    if samples < 1:
        raise ParameterError("samples must be >= 1")
    if cone.kind != "gamma_alpha_delta":
        raise ParameterError("cone_separation applies to gamma_alpha_delta cones")
    rng = np.random.default_rng(seed)
    best = np.inf
    found = 0
    for _ in range(samples):
        x = rng.standard_normal(cone.n)
        nx = np.linalg.norm(x)
        if nx == 0.0:
            continue
        x /= nx
        inside, _ = contains(cone, x)
        if not inside:
            continue
        found += 1
        d = min(_distance_to_cyl_rays(x), _distance_to_support_boundary(cone.speed, x))
        best = min(best, d)
    if found == 0:
        raise EmptyConeError(
            f"no unit vector of {samples} samples lies in the cone "
            f"(alpha={cone.alpha}, delta={cone.delta} may be incompatible)")
    return float(best)
