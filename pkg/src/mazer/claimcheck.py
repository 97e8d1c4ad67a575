"""Numerical checks of the dressed-state identities and of the claim that the
derivative couplings vanish once the trigonometric formulas are inserted.

Each check returns a :class:`ClaimReport` holding the measured worst residual,
its tolerance, the verdict and a witness (the worst-case input). Reports
carry their seed, so a rerun reproduces them exactly.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import minimize_scalar

from .dressed import dressed_vectors, mixing_angle, splitting, theta_derivatives, trig_pair
from .modefn import eval012, parse
from .scatter import (
    ScatterConfig,
    Variant,
    bare_richardson,
    dressed_path,
    mesa_scatter,
    numeric_scatter_bare,
    numeric_scatter_dressed,
)

VANISHING_CONDITION = "u constant or delta = 0"


class Verdict(str, Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    HOLDS_ONLY_WHEN = "HoldsOnlyWhen"


@dataclass
class ClaimReport:
    claim_id: str
    samples: int
    max_abs_residual: float
    tolerance: float
    verdict: Verdict
    witness: dict
    condition: str = None
    seed: int = None
    excluded: int = 0
    notes: dict = field(default_factory=dict)

    CSV_HEADER = ("claim_id", "samples", "excluded", "max_abs_residual", "tolerance",
                  "verdict", "condition", "seed", "witness")

    @property
    def label(self):
        if self.verdict is Verdict.HOLDS_ONLY_WHEN:
            return f"HoldsOnlyWhen({self.condition})"
        return self.verdict.value

    def csv_row(self):
        witness = ";".join(f"{k}={_fmt(v)}" for k, v in self.witness.items())
        return [
            self.claim_id, str(self.samples), str(self.excluded), _fmt(self.max_abs_residual),
            _fmt(self.tolerance), self.verdict.value, self.condition or "",
            "" if self.seed is None else str(self.seed), witness,
        ]

    def to_text(self, color=False):
        paint = {
            Verdict.HOLDS: "\033[32m",
            Verdict.FAILS: "\033[31m",
            Verdict.HOLDS_ONLY_WHEN: "\033[33m",
        }
        label = f"{paint[self.verdict]}{self.label}\033[0m" if color else self.label
        lines = [
            f"[{self.claim_id}] {label}",
            f"  samples={self.samples} excluded={self.excluded} seed={self.seed}",
            f"  max_abs_residual={_fmt(self.max_abs_residual)} tolerance={_fmt(self.tolerance)}",
        ]
        lines += [f"  witness.{k} = {_fmt(v)}" for k, v in self.witness.items()]
        lines += [f"  note.{k} = {_fmt(v)}" for k, v in self.notes.items()]
        return "\n".join(lines)


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (complex, np.complexfloating)):
        return repr(complex(value))
    return str(value)


def _plain(verdict_ok):
    return Verdict.HOLDS if verdict_ok else Verdict.FAILS


def verify_trig_identities(params, sample_count=10_000, seed=0):
    """cos 2theta and sin 2theta from the angle against the closed radical forms, u in (0, 2]."""
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    u = 2.0 - rng.uniform(0.0, 2.0, sample_count)
    keep = np.hypot(0.5 * params.delta, params.beta * u) > 0
    excluded = int(np.count_nonzero(~keep))
    tol = 1e-12
    if not np.any(keep):
        return ClaimReport("c1_trig_identities", 0, 0.0, tol, Verdict.HOLDS, {}, seed=seed,
                           excluded=excluded)
    u = u[keep]
    theta = mixing_angle(params, u)
    cos2t, sin2t = trig_pair(params, u)
    residual = np.maximum(np.abs(np.cos(2 * theta) - cos2t), np.abs(np.sin(2 * theta) - sin2t))
    i = int(np.argmax(residual))
    worst = float(residual[i])
    witness = {"u": float(u[i]), "theta": float(theta[i]), "cos2t": float(cos2t[i]),
               "sin2t": float(sin2t[i])}
    return ClaimReport("c1_trig_identities", int(u.size), worst, tol, _plain(worst <= tol),
                       witness, seed=seed, excluded=excluded)


def _vectors(theta):
    plus, minus = dressed_vectors(theta)
    return np.array(plus), np.array(minus)


def verify_derivative_relations(params, mode, sample_count=1000, seed=0):
    """z-derivatives of the dressed vectors by central differences against the rotation relations.

    Residuals are scaled by the largest magnitude of the exact derivative over
    the sample (a scale of 1 is used when it vanishes identically).
    """
    L = mode.length
    h = 1e-5 * L
    rng = np.random.default_rng(seed)
    z = rng.uniform(0.01 * L, 0.99 * L, sample_count)
    tol = 1e-6
    u0, du0, d2u0 = eval012(mode, z)
    up = eval012(mode, z + h)[0]
    um = eval012(mode, z - h)[0]
    lam = np.minimum.reduce([splitting(params, x) for x in (u0, up, um)])
    keep = lam > 1e-6 * max(params.beta, 1e-300)
    excluded = int(np.count_nonzero(~keep))
    if not np.any(keep):
        return ClaimReport("c2_derivative_relations", 0, 0.0, tol, Verdict.HOLDS, {},
                           seed=seed, excluded=excluded)
    z, u0, du0, d2u0, up, um = (a[keep] for a in (z, u0, du0, d2u0, up, um))
    th0, thp, thm = (mixing_angle(params, x) for x in (u0, up, um))
    t1, t2 = theta_derivatives(params, u0, du0, d2u0)
    p0, m0 = _vectors(th0)
    pp, mp = _vectors(thp)
    pm, mm = _vectors(thm)
    fd1 = np.stack([(pp - pm) / (2 * h), (mp - mm) / (2 * h)])
    fd2 = np.stack([(pp - 2 * p0 + pm) / h**2, (mp - 2 * m0 + mm) / h**2])
    ex1 = np.stack([m0 * t1, -p0 * t1])
    ex2 = np.stack([m0 * t2 - p0 * t1**2, -p0 * t2 - m0 * t1**2])
    scale1 = np.max(np.abs(ex1)) or 1.0
    scale2 = np.max(np.abs(ex2)) or 1.0
    r1 = np.max(np.abs(fd1 - ex1), axis=(0, 1)) / scale1
    r2 = np.max(np.abs(fd2 - ex2), axis=(0, 1)) / scale2
    residual = np.maximum(r1, r2)
    i = int(np.argmax(residual))
    worst = float(residual[i])
    witness = {"z": float(z[i]), "u": float(u0[i]), "dtheta": float(t1[i]),
               "d2theta": float(t2[i]), "first_relation": float(r1[i]),
               "second_relation": float(r2[i])}
    return ClaimReport("c2_derivative_relations", int(z.size), worst, tol, _plain(worst <= tol),
                       witness, seed=seed, excluded=excluded, notes={"step": h})


def verify_mesa_decoupling(params, L, mode=None, points=1000):
    """theta' and theta'' on interior points of a flat profile; both must be zero."""
    if not L > 0:
        raise ValueError("L must be positive")
    mode = parse("mesa", L) if mode is None else mode
    tol = 1e-14
    z = L * (np.arange(points) + 0.5) / points
    u, du, d2u = eval012(mode, z)
    keep = np.hypot(0.5 * params.delta, params.beta * u) > 0
    excluded = int(np.count_nonzero(~keep))
    if not np.any(keep):
        return ClaimReport("c3_mesa_decoupling", 0, 0.0, tol, Verdict.HOLDS, {},
                           excluded=excluded, notes={"mode": str(mode)})
    z, u, du, d2u = z[keep], u[keep], du[keep], d2u[keep]
    t1, t2 = theta_derivatives(params, u, du, d2u)
    residual = np.maximum(np.abs(t1), np.abs(t2))
    i = int(np.argmax(residual))
    worst = float(residual[i])
    witness = {"z": float(z[i]), "dtheta": float(t1[i]), "d2theta": float(t2[i])}
    return ClaimReport("c3_mesa_decoupling", int(z.size), worst, tol, _plain(worst <= tol),
                       witness, excluded=excluded, notes={"mode": str(mode)})


def _max_abs_dtheta(params, mode, z_candidates):
    """Largest |theta'| over the candidates, polished by a bounded 1-D search."""
    u, du, d2u = mode.interior012(z_candidates)
    t1 = np.abs(theta_derivatives(params, u, du, d2u)[0])
    i = int(np.argmax(t1))
    best_z, best = float(z_candidates[i]), float(t1[i])
    order = np.sort(z_candidates)
    j = int(np.searchsorted(order, best_z))
    lo, hi = order[max(j - 1, 0)], order[min(j + 1, order.size - 1)]
    if hi > lo:
        def neg(z):
            a, b, c = mode.interior012(z)
            return -abs(theta_derivatives(params, a, b, c)[0])
        res = minimize_scalar(neg, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12 * mode.length})
        if -res.fun > best:
            best_z, best = float(res.x), float(-res.fun)
    return best_z, best


def verify_vanishing_claim(params, mode, sample_count=1000, seed=0, k=0.5, grid_step=None):
    """Size of the derivative-coupling terms along a dressed solution.

    Terms are evaluated as they enter the stationary equations (energy units):
    ``(2 theta' phi')/2m`` and ``(theta'' phi)/2m`` for the derived form,
    ``2 theta' phi'`` and ``theta'^2 phi`` for the literal form. They are
    compared with ``1e-10`` times the largest kinetic term ``|phi''|/2m``.
    """
    config = ScatterConfig(params, mode, k, grid_step=grid_step)
    result, path = dressed_path(config)
    two_m = 2.0 * params.mass
    t1 = path.dtheta[:, None]
    t2 = path.d2theta[:, None]
    terms = {
        "derived_2dtheta_dphi": np.abs(2 * t1 * path.dphi).max(axis=1) / two_m,
        "derived_d2theta_phi": np.abs(t2 * path.phi).max(axis=1) / two_m,
        "literal_2dtheta_dphi": np.abs(2 * t1 * path.dphi).max(axis=1),
        "literal_dtheta2_phi": np.abs(t1**2 * path.phi).max(axis=1),
    }
    kinetic = float(np.max(np.abs(path.d2phi)) / two_m)
    tol = 1e-10 * kinetic
    name = max(terms, key=lambda key: terms[key].max())
    i = int(np.argmax(terms[name]))
    worst = float(terms[name][i])

    rng = np.random.default_rng(seed)
    extra = rng.uniform(0.0, mode.length, sample_count)
    candidates = np.concatenate([path.z, extra])
    if params.delta == 0:
        z_star, dtheta_max = float(path.z[0]), 0.0
    else:
        z_star, dtheta_max = _max_abs_dtheta(params, mode, candidates)

    witness = {"z": float(path.z[i]), "term": name, "max_abs_dtheta": dtheta_max,
               "z_max_abs_dtheta": z_star}
    notes = {key: float(v.max()) for key, v in terms.items()}
    notes.update(kinetic_scale=kinetic, k=k, flux_error=result.flux_error)
    if worst <= tol:
        verdict, condition = Verdict.HOLDS, None
    elif params.delta != 0 and not mode.is_constant:
        verdict, condition = Verdict.HOLDS_ONLY_WHEN, VANISHING_CONDITION
    else:
        verdict, condition = Verdict.FAILS, None
    return ClaimReport("c4_vanishing_claim", int(path.z.size + sample_count), worst, tol,
                       verdict, witness, condition=condition, seed=seed, notes=notes)


PROB_KEYS = ("P_refl_e", "P_refl_g", "P_trans_e", "P_trans_g")


def verify_solver_equivalence(params, mode, k, L=None, slices=2048, grid_step=None):
    """Derived dressed solver against the bare slicing oracle (all four probabilities).

    A flat profile is exactly one slice, so the oracle is then ``N = 1`` and the
    analytic mesa solution is compared as well. The literal-form variant is run
    alongside; its deviations and flux error are reported as notes.
    """
    L = mode.length if L is None else L
    tol = 1e-6
    base = ScatterConfig(params, mode, k, L=L, slices=1 if mode.is_constant else slices,
                         grid_step=grid_step)
    notes = {}
    if mode.is_constant:
        bare = numeric_scatter_bare(base)
        oracle = bare.probs
        exact = mesa_scatter(params, L, k)
        amp = max(abs(getattr(exact, a) - getattr(bare, a)) for a in ("r_e", "r_g", "t_e", "t_g"))
        notes["analytic_vs_bare_amplitude"] = amp
    else:
        oracle = bare_richardson(base)
        amp = 0.0
    derived = numeric_scatter_dressed(base)
    literal = numeric_scatter_dressed(ScatterConfig(
        params, mode, k, L=L, grid_step=base.grid_step, variant=Variant.COMMENT_LITERAL))
    diffs = {key: abs(derived.probs[key] - oracle[key]) for key in PROB_KEYS}
    worst_key = max(diffs, key=diffs.get)
    worst = max(diffs[worst_key], amp)
    notes.update(
        derived_flux_error=derived.flux_error,
        literal_flux_error=literal.flux_error,
        literal_max_prob_deviation=max(abs(literal.probs[key] - oracle[key]) for key in PROB_KEYS),
        derived_p_emission=derived.p_emission,
        literal_p_emission=literal.p_emission,
        oracle_p_emission=oracle["P_refl_g"] + oracle["P_trans_g"],
    )
    witness = {"k": k, "delta": params.delta, "probability": worst_key}
    return ClaimReport("c5_solver_equivalence", len(PROB_KEYS), worst, tol, _plain(worst <= tol),
                       witness, notes=notes)


def run_all_claims(params, mode, k=0.5, seed=0, sample_count=1000, grid_step=None):
    """All five checks, ordered by claim id. The mesa check always uses the flat profile."""
    L = mode.length
    reports = [
        verify_trig_identities(params, max(sample_count, 1), seed),
        verify_derivative_relations(params, mode, sample_count, seed),
        verify_mesa_decoupling(params, L),
        verify_vanishing_claim(params, mode, sample_count, seed, k=k, grid_step=grid_step),
        verify_solver_equivalence(params, mode, k, grid_step=grid_step),
    ]
    return sorted(reports, key=lambda r: r.claim_id)
