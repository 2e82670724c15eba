"""End-to-end verification reports: soliton residual sweeps, barrier
orderings, the pointwise convexity estimate lambda_1 >= H - alpha*gamma,
cylindrical-type sign conditions, and sampled derivative-pinching
constants."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt
from typing import Optional

import numpy as np

from .cones import ConeSpec, contains
from .errors import DegenerateEigenvalueError, DomainError, ParameterError
from .profiles import (ProfileSolution, barrier, closed_form_cyl,
                       solve_cyl_profile)
from .rotgeom import CylJet, RadialJet, cylinder_curvatures, graph_curvatures, tilt
from .speeds import (SpeedSpec, eval_derivatives, eval_speed,
                     hessian_quadratic_form, in_support, support_violation)

__all__ = [
    "CheckEntry",
    "VerificationReport",
    "check_soliton",
    "check_convexity_estimate",
    "fit_convexity_params",
    "check_barriers",
    "check_sigma2_cylinder",
    "estimate_pinching_constants",
    "PinchingEstimate",
]


@dataclass
class CheckEntry:
    name: str
    status: str                   # pass | fail | skipped
    tolerance: float
    worst_violation: float = 0.0
    witness: Optional[dict] = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "tolerance": self.tolerance,
                "worst_violation": self.worst_violation, "witness": self.witness,
                "detail": self.detail}


@dataclass
class VerificationReport:
    checks: list[CheckEntry] = field(default_factory=list)
    context: dict = field(default_factory=dict)

    def add(self, entry: CheckEntry) -> CheckEntry:
        self.checks.append(entry)
        return entry

    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def to_dict(self) -> dict:
        return {"profile": self.context, "checks": [c.to_dict() for c in self.checks]}


def _profile_curvatures(profile: ProfileSolution):
    for r, u, du, ddu in profile.samples:
        yield (r, graph_curvatures(RadialJet(r=r, u=u, du=du, ddu=ddu), profile.n), du)


def check_soliton(profile: ProfileSolution, tol: float) -> CheckEntry:
    """Maximum absolute soliton residual gamma(lambda) - <nu, e_{n+1}> over
    the samples; a sample with curvatures outside the speed's cone fails
    immediately with a witness."""
    if profile.status == "step_failure":
        raise ParameterError("cannot verify a profile that ended in step_failure")
    worst = 0.0
    witness = None
    for r, lam, du in _profile_curvatures(profile):
        violation = support_violation(profile.speed, lam)
        if violation is not None:
            return CheckEntry(name="soliton_residual", status="fail", tolerance=tol,
                              worst_violation=float("inf"),
                              witness={"r": r, "lambda": list(lam.lam)},
                              detail=f"curvatures left the cone: {violation}")
        res = abs(eval_speed(profile.speed, lam) - tilt(du))
        if res > worst:
            worst = res
            witness = {"r": r, "residual": res}
    status = "pass" if worst <= tol else "fail"
    return CheckEntry(name="soliton_residual", status=status, tolerance=tol,
                      worst_violation=worst, witness=witness)


def fit_convexity_params(profile: ProfileSolution, delta: float = 0.05,
                         alpha_safety: float = 1.05,
                         beta_safety: float = 0.9) -> tuple[float, float]:
    """Fit (alpha, beta) from the profile with safety factors so that the
    pinching and uniform-2-convexity hypotheses hold at every sample."""
    alpha = 0.0
    beta_bound = np.inf
    for _r, lam, _du in _profile_curvatures(profile):
        if not in_support(profile.speed, lam):
            continue
        g = eval_speed(profile.speed, lam)
        H = lam.H
        alpha = max(alpha, (delta + 1.0) * H / g)
        if H > 0.0:
            beta_bound = min(beta_bound, lam.min_pair_sum() / H)
    if alpha == 0.0 or not np.isfinite(beta_bound):
        raise DomainError("no in-cone samples with positive mean curvature to fit from")
    return alpha_safety * alpha, beta_safety * float(beta_bound)


def check_convexity_estimate(profile: ProfileSolution, alpha: float, delta: float,
                             beta: float, slack_tol: float = 1e-10) -> CheckEntry:
    """Pointwise convexity estimate on the hypothesis-satisfying samples:
    where (delta+1)H <= alpha*gamma and every pair sum >= beta*H, assert
    lambda_1 >= H - alpha*gamma - slack_tol.  Samples failing a hypothesis
    are skipped, never failed."""
    admissible = 0
    skipped = 0
    min_slack = np.inf
    witness = None
    for r, lam, _du in _profile_curvatures(profile):
        if not in_support(profile.speed, lam):
            skipped += 1
            continue
        g = eval_speed(profile.speed, lam)
        H = lam.H
        hyp_a = (delta + 1.0) * H <= alpha * g
        hyp_b = H > 0.0 and lam.min_pair_sum() >= beta * H
        if not (hyp_a and hyp_b):
            skipped += 1
            continue
        admissible += 1
        slack = lam.lambda1 - (H - alpha * g)
        if slack < min_slack:
            min_slack = slack
            witness = {"r": r, "slack": slack, "lambda1": lam.lambda1, "H": H, "gamma": g}
    if admissible == 0:
        return CheckEntry(name="convexity_estimate", status="skipped", tolerance=slack_tol,
                          detail="no sample satisfies both hypotheses")
    worst = max(0.0, -float(min_slack))
    status = "pass" if worst <= slack_tol else "fail"
    total = admissible + skipped
    return CheckEntry(name="convexity_estimate", status=status, tolerance=slack_tol,
                      worst_violation=worst, witness=witness,
                      detail=f"admissible {admissible}/{total}, min slack {min_slack:.3e}")


def _ordering_entry(name: str, rel_viol: float, tol: float, witness, detail="") -> CheckEntry:
    status = "pass" if rel_viol <= tol else "fail"
    return CheckEntry(name=name, status=status, tolerance=tol,
                      worst_violation=rel_viol, witness=witness, detail=detail)


def _relative_excess(bound: np.ndarray, value: np.ndarray) -> tuple[float, int]:
    """Largest relative amount by which ``value`` exceeds ``bound`` (for
    upper bounds pass bound-value reversed); 0 when the ordering holds."""
    scale = np.maximum(1.0, np.maximum(np.abs(bound), np.abs(value)))
    excess = (bound - value) / scale
    i = int(np.argmax(excess))
    return max(0.0, float(excess[i])), i


def check_barriers(profile: ProfileSolution, tol: float = 1e-9) -> list[CheckEntry]:
    """Pointwise sub/super-solution orderings for the profile's barrier
    family, each reported as its own entry."""
    entries: list[CheckEntry] = []
    r = profile.r
    du = profile.du
    n = profile.n
    if profile.speed.kind == "sigma_k_root":
        k = profile.speed.k
        v1 = barrier("v1", n, k=k)
        viol, i = _relative_excess(v1(r), du)
        entries.append(_ordering_entry("v1_below_du", viol, tol, {"r": r[i]}))
        if 2 <= k <= n - 1:
            v2 = barrier("v2", n, k=k)
            viol, i = _relative_excess(du, v2(r))
            entries.append(_ordering_entry("du_below_v2", viol, tol, {"r": r[i]}))
        else:
            entries.append(CheckEntry(name="du_below_v2", status="skipped", tolerance=tol,
                                      detail=f"v2 not applicable for k={k}, n={n}"))
        v3 = barrier("v3", n, k=k)
        mask = r < v3.r_end
        if np.any(mask):
            viol, i = _relative_excess(du[mask], v3(r[mask]))
            entries.append(_ordering_entry("du_below_v3", viol, tol,
                                           {"r": r[mask][i]}))
        return entries
    if profile.speed.kind != "harmonic_pairs":
        raise ParameterError(f"no barrier family for speed kind {profile.speed.kind!r}")
    w1 = barrier("w1", n)
    viol, i = _relative_excess(w1(r), du)
    entries.append(_ordering_entry("w1_below_du", viol, tol, {"r": r[i]}))
    w2 = barrier("w2", n)
    mask = r <= w2.r_end
    if np.any(mask):
        viol, i = _relative_excess(du[mask], w2(r[mask]))
        entries.append(_ordering_entry("du_below_w2", viol, tol, {"r": r[mask][i]}))
    w3 = barrier("w3", n)
    mask = r < w3.r_end
    if np.any(mask):
        viol, i = _relative_excess(du[mask], w3(r[mask]))
        entries.append(_ordering_entry("du_below_w3", viol, tol, {"r": r[mask][i]}))
    if profile.blowup_radius is None:
        entries.append(CheckEntry(
            name="w5_below_du_near_blowup", status="skipped", tolerance=tol,
            detail="no blow-up detected: the profile equation's solutions stay below n*r "
                   "(upper numerator zero), so the square-root comparison window never opens"))
        return entries
    w5 = barrier("w5", n)
    lo = 0.9 * profile.blowup_radius
    mask = (r >= lo) & (r < w5.r_end)
    if not np.any(mask):
        entries.append(CheckEntry(name="w5_below_du_near_blowup", status="skipped",
                                  tolerance=tol, detail="no samples in the final window"))
        return entries
    viol, i = _relative_excess(w5(r[mask]), du[mask])
    entries.append(_ordering_entry("w5_below_du_near_blowup", viol, tol, {"r": r[mask][i]}))
    return entries


def check_sigma2_cylinder(z_samples, tol: float = 1e-9, a: float = 0.0) -> CheckEntry:
    """Sign conditions H < 0, K > 0 and the soliton identity
    |sqrt(K) - |<nu, e_3>|| <= tol along the cylindrical-type closed form;
    heights outside the solvable range are skipped."""
    worst = 0.0
    witness = None
    checked = 0
    skipped = 0
    for z in z_samples:
        try:
            r = solve_cyl_profile(a, float(z))
            f = closed_form_cyl(a, r)
        except DomainError:
            skipped += 1
            continue
        ddr = -(1.0 + f * f) * r * f * f
        lam = cylinder_curvatures(CylJet(r=r, dr=f, ddr=ddr))
        H = lam.H
        K = float(lam.array[0] * lam.array[1])
        normal = f / sqrt(1.0 + f * f)
        res = abs(sqrt(K) - normal) if K > 0.0 else float("inf")
        bad = max(res, 0.0 if H < 0.0 else float("inf"), 0.0 if K > 0.0 else float("inf"))
        checked += 1
        if bad > worst:
            worst = bad
            witness = {"z": float(z), "r": r, "H": H, "K": K, "residual": res}
    if checked == 0:
        return CheckEntry(name="sigma2_cylinder", status="skipped", tolerance=tol,
                          detail="no solvable heights")
    status = "pass" if worst <= tol else "fail"
    return CheckEntry(name="sigma2_cylinder", status=status, tolerance=tol,
                      worst_violation=worst, witness=witness,
                      detail=f"checked {checked}, skipped {skipped}")


@dataclass
class PinchingEstimate:
    gradient_pinching: float     # sup over samples of max_a grad_a / min_a grad_a
    hessian_sup: float           # sup of (quadratic form) * H / |T|^2, expected < 0
    samples_used: int


def estimate_pinching_constants(spec: SpeedSpec, cone: ConeSpec, samples: int,
                                seed: int = 0) -> PinchingEstimate:
    """Sampled extremal derivative ratios on a compact cone: the gradient
    pinching constant and the supremum of the matrix-Hessian quadratic form
    scaled by H/|T|^2 over random symmetric directions."""
    if samples < 1:
        raise ParameterError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    grad_ratio = 1.0
    hess_sup = -np.inf
    used = 0
    for _ in range(samples):
        x = rng.standard_normal(spec.n)
        nx = np.linalg.norm(x)
        if nx == 0.0:
            continue
        x /= nx
        inside, _ = contains(cone, x)
        if not inside:
            continue
        used += 1
        d = eval_derivatives(spec, x)
        grad_ratio = max(grad_ratio, float(np.max(d.gradient) / np.min(d.gradient)))
        T = rng.standard_normal((spec.n, spec.n))
        T = 0.5 * (T + T.T)
        try:
            q = hessian_quadratic_form(spec, x, T)
        except DegenerateEigenvalueError:
            continue
        hess_sup = max(hess_sup, q * float(np.sum(x)) / float(np.sum(T * T)))
    if used == 0:
        raise DomainError("no samples inside the cone; widen alpha or delta")
    return PinchingEstimate(gradient_pinching=grad_ratio, hessian_sup=float(hess_sup),
                            samples_used=used)
