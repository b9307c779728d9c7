"""Heat content with killing, the largest bounded subharmonic profile, and
the mass-conservation (SC) versus mass-loss (SI) verdict.

On a section K the heat content is

    M_t = e^{-t L_K} 1 + integral_0^t e^{-s L_K} (c/m) ds,

computed exactly through the eigendecomposition: the integral term uses
(1 - e^{-t lambda}) / lambda coefficientwise with the lambda -> 0 limit t,
so no time-stepping error enters the verdict.  The companion quantity

    v_K = (L_K + a)^{-1} g_K

solves (L + a) v = 0 inside K with v = 1 outside; it is entrywise
nonincreasing as K grows and its limit w = integral a e^{-a t} (1 - M_t) dt
is the largest function with 0 <= w <= 1 and (L + a) w <= 0.  The process
conserves mass iff w = 0.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad

from .graph import GraphError
from .sections import DirichletSection, Exhaustion

_LAM_SMALL = 1e-12


def _phi(lam, t):
    """(1 - e^{-t lam}) / lam with the lam -> 0 limit t."""
    lam = np.asarray(lam)
    safe = np.maximum(lam, _LAM_SMALL)
    return np.where(lam > _LAM_SMALL, -np.expm1(-t * safe) / safe, t)


def heat_parts(sec: DirichletSection, t):
    """(surviving mass e^{-tL}1, killed-mass integral term) at all of K."""
    lam, U = sec.eigensystem()
    s = np.sqrt(sec.m)
    semi = (U @ (np.exp(-t * lam) * (U.T @ s))) / s
    integ = (U @ (_phi(lam, t) * (U.T @ (s * sec.cm)))) / s
    return semi, integ


def heat_content(family, exhaustion: Exhaustion, times, probes=None):
    """HeatContentCurve per section: M_t at the probe vertices, with the two
    summands stored separately."""
    times = [float(t) for t in times]
    if any(t < 0 for t in times):
        raise GraphError("times must be nonnegative")
    curves = []
    for i in range(len(exhaustion)):
        sec = exhaustion.section(i)
        pr = [x for x in (probes if probes is not None else [exhaustion.root]) if x in sec.index]
        pidx = [sec.root_index(x) for x in pr]
        semi_rows, integ_rows = [], []
        for t in times:
            semi, integ = heat_parts(sec, t)
            semi_rows.append(semi[pidx])
            integ_rows.append(integ[pidx])
        semi_m = np.array(semi_rows)
        integ_m = np.array(integ_rows)
        curves.append(
            {
                "section_index": i,
                "radius": exhaustion.radii[i],
                "size": sec.size,
                "probes": pr,
                "times": times,
                "semigroup_term": semi_m,
                "killed_term": integ_m,
                "M": semi_m + integ_m,
            }
        )
    return curves


def v_section(sec: DirichletSection, alpha):
    """v_K = (L_K + alpha)^{-1} g_K, the section approximation of the
    largest bounded profile with (L + alpha) v = 0 and v = 1 at infinity."""
    return sec.resolvent_apply(alpha, sec.g)


def largest_alpha_harmonic(family, alpha, exhaustion: Exhaustion):
    """Per-section v_K sequence (nonincreasing in K) and summary values."""
    if alpha <= 0:
        raise GraphError("alpha must be positive")
    out = []
    for i in range(len(exhaustion)):
        sec = exhaustion.section(i)
        v = v_section(sec, alpha)
        out.append(
            {
                "section_index": i,
                "radius": exhaustion.radii[i],
                "size": sec.size,
                "v_root": float(v[sec.root_index(exhaustion.root)]),
                "v_max": float(v.max()),
                "v": v,
            }
        )
    return out


def stochastic_verdict(
    family,
    alpha,
    exhaustion: Exhaustion,
    tol=1e-6,
    stabilization_window=3,
    stabilization_rtol=1e-2,
    second_alpha=None,
):
    """Mass-conservation verdict from the nonincreasing v_K(root) sequence.

    SC when the final value falls below ``tol``; SI when it stays above
    ``tol`` and the last ``stabilization_window`` successive relative
    decrements are below ``stabilization_rtol`` (the sequence has visibly
    plateaued); UNDECIDED otherwise.  A single positive alpha decides the
    dichotomy in principle; ``second_alpha`` repeats the computation and
    flags disagreement as a numerical red flag.
    """
    seq = largest_alpha_harmonic(family, alpha, exhaustion)
    roots = [s["v_root"] for s in seq]
    verdict, stabilized = _classify(roots, tol, stabilization_window, stabilization_rtol)
    report = {
        "alpha": float(alpha),
        "tol": float(tol),
        "stabilization_window": int(stabilization_window),
        "stabilization_rtol": float(stabilization_rtol),
        "radii": list(exhaustion.radii),
        "v_root_sequence": roots,
        "v_max_sequence": [s["v_max"] for s in seq],
        "stabilized": stabilized,
        "verdict": verdict,
    }
    if second_alpha is not None:
        seq2 = largest_alpha_harmonic(family, second_alpha, exhaustion)
        roots2 = [s["v_root"] for s in seq2]
        verdict2, _ = _classify(roots2, tol, stabilization_window, stabilization_rtol)
        report["second_alpha"] = float(second_alpha)
        report["second_alpha_verdict"] = verdict2
        report["alpha_disagreement"] = verdict2 != verdict
    return report


def _classify(roots, tol, window, rtol):
    last = roots[-1]
    decs = []
    for a, b in zip(roots[:-1], roots[1:]):
        decs.append((a - b) / a if a > 0 else 0.0)
    stabilized = len(decs) >= window and all(d < rtol for d in decs[-window:])
    if last < tol:
        return "SC", stabilized
    if stabilized:
        return "SI", stabilized
    return "UNDECIDED", stabilized


def w_quadrature_crosscheck(family, alpha, exhaustion: Exhaustion, t_max=None, probes=None):
    """Checks w = integral_0^inf a e^{-a t} (1 - M_t) dt against v_K on the
    largest section, by adaptive quadrature of the exact section curve."""
    if t_max is None:
        t_max = max(40.0, 25.0 / alpha)
    if np.exp(-alpha * t_max) > 1e-10:
        raise GraphError("t_max too small: e^{-alpha t_max} must be below 1e-10")
    sec = exhaustion.section(len(exhaustion) - 1)
    pr = [x for x in (probes or [exhaustion.root])]
    pidx = [sec.root_index(x) for x in pr]
    v = v_section(sec, alpha)

    lam, U = sec.eigensystem()
    s = np.sqrt(sec.m)
    coef1 = U.T @ s
    coefc = U.T @ (s * sec.cm)
    rows = U[pidx, :] / s[pidx, None]

    out = []
    for r, i, x in zip(rows, pidx, pr):
        def one_minus_m(t):
            m_val = r @ (np.exp(-t * lam) * coef1 + _phi(lam, t) * coefc)
            return alpha * np.exp(-alpha * t) * (1.0 - m_val)

        integral, err = quad(one_minus_m, 0.0, t_max, limit=200, epsabs=1e-12, epsrel=1e-12)
        out.append(
            {
                "probe": x,
                "quadrature": float(integral),
                "quad_error_estimate": float(err),
                "v": float(v[i]),
                "discrepancy": float(abs(integral - v[i])),
            }
        )
    return out


def semigroup_identity_check(family, sec: DirichletSection, t, s):
    """Max-norm discrepancy of M_{t+s} = e^{-sL} M_t + integral_0^s
    e^{-rL}(c/m) dr on the section."""
    if t < 0 or s < 0:
        raise GraphError("t and s must be nonnegative")
    semi_ts, integ_ts = heat_parts(sec, t + s)
    lhs = semi_ts + integ_ts
    semi_t, integ_t = heat_parts(sec, t)
    m_t = semi_t + integ_t
    prop = sec.semigroup_apply(s, m_t)
    _, integ_s = heat_parts(sec, s)
    rhs = prop + integ_s
    return float(np.max(np.abs(lhs - rhs)))


def loss_propagation_check(family, exhaustion: Exhaustion, probes, tol=1e-6):
    """If any probe (x, t) shows stabilized mass loss, every probe with
    t > 0 must show strictly positive loss as well (connected graphs leak
    everywhere or nowhere).  Refuses disconnected inputs."""
    if family.is_finite and not family.graph.is_connected():
        raise GraphError("loss propagation requires a connected graph")
    sec = exhaustion.section(len(exhaustion) - 1)
    results = []
    any_loss = False
    for x, t in probes:
        semi, integ = heat_parts(sec, float(t))
        mval = float((semi + integ)[sec.root_index(x)])
        loss = mval < 1.0 - tol
        any_loss = any_loss or (loss and t > 0)
        results.append({"probe": x, "t": float(t), "M": mval, "loss": loss})
    violations = []
    if any_loss:
        for r in results:
            if r["t"] > 0 and r["M"] >= 1.0 - 1e-12:
                violations.append(r)
    return {
        "any_loss": any_loss,
        "results": results,
        "violations": violations,
        "ok": not violations,
    }
