"""Spectra of sections, boundedness, isoperimetric sandwich bounds and
essential-spectrum estimation by exhaustion.

The sandwich bounds: with a_n the isoperimetric constant against the
n-volume and a_m the one against the m-volume on U, every point of the
section spectrum lies in

    [ d_U (1 - sqrt(1 - a_n^2)),  D_U (1 + sqrt(1 - a_n^2)) ]

and, when D_U = sup_U d is finite, also in

    [ D_U - sqrt(D_U^2 - a_m^2),  D_U + sqrt(D_U^2 - a_m^2) ].

The infimum of the spectrum after deleting a finite set K is approximated
from above by inf spec on annuli B_R \\ K; the R-sequence is nonincreasing
and converges to the true infimum, so reports always carry the whole
sequence rather than an extrapolated limit.
"""

from __future__ import annotations

import math

import numpy as np

from .graph import GraphError
from .isoperimetry import alpha_exact, alpha_upper
from .kernels import SUBSET_SCAN_MAX
from .sections import DirichletSection


def eigenvalues(sec: DirichletSection):
    return sec.eigenvalues()


def boundedness_report(family, probe):
    """Sup of the averaged degree d = n/m over the probe set, the operator
    bound 2*sup d, and a verdict on global boundedness."""
    probe = list(probe)
    if not probe:
        raise GraphError("probe set is empty")
    dvals = np.array([family.d(x) for x in probe])
    sup_probe = float(dvals.max())
    exact = family.d_sup_exact()
    if exact is not None:
        return {
            "sup_d": exact,
            "bound_2C": 2.0 * exact,
            "verdict": "BOUNDED-WITNESSED",
            "probe_sup_d": sup_probe,
        }
    diffs = np.diff(dvals)
    if len(dvals) >= 3 and np.all(diffs >= -1e-12) and dvals[-1] > 2.0 * dvals[0]:
        verdict = "UNBOUNDED-TREND"
    else:
        verdict = "INCONCLUSIVE"
    return {
        "sup_d": None,
        "bound_2C": None,
        "verdict": verdict,
        "probe_sup_d": sup_probe,
    }


def cheeger_sandwich(sec: DirichletSection, alpha_n, alpha_m, D_U=None):
    """Two-sided spectral bands from exact isoperimetric constants.

    ``D_U`` overrides the section's max degree (pass math.inf when U is an
    infinite set whose degrees are unbounded; the m-band is then omitted).
    """
    d_U = float(sec.d.min())
    if D_U is None:
        D_U = float(sec.d.max())
    if not 0.0 <= alpha_n <= 1.0 + 1e-12:
        raise GraphError(f"alpha_n must lie in [0,1], got {alpha_n}")
    alpha_n = min(float(alpha_n), 1.0)
    root_n = math.sqrt(max(0.0, 1.0 - alpha_n * alpha_n))
    upper_n = None if math.isinf(D_U) else D_U * (1.0 + root_n)
    out = {
        "d_U": d_U,
        "D_U": None if math.isinf(D_U) else float(D_U),
        "alpha_n": alpha_n,
        "alpha_m": float(alpha_m),
        "sandwich_n": [d_U * (1.0 - root_n), upper_n],
        "sandwich_m": None,
    }
    if not math.isinf(D_U):
        if alpha_m > D_U + 1e-12:
            raise GraphError(f"alpha_m={alpha_m} exceeds D_U={D_U}")
        am = min(float(alpha_m), D_U)
        root_m = math.sqrt(max(0.0, D_U * D_U - am * am))
        out["sandwich_m"] = [D_U - root_m, D_U + root_m]
    return out


def spectrum_report(family, U, measure_note=True):
    """Assembled report: spectrum of the section on U, isoperimetric
    constants (exact when enumeration is feasible, labeled upper bounds
    otherwise) and both sandwich bands."""
    sec = DirichletSection(family, U)
    lam = sec.eigenvalues()
    if len(U) <= SUBSET_SCAN_MAX:
        a_n, W_n = alpha_exact(family, U, "n")
        a_m, W_m = alpha_exact(family, U, "m")
        alpha_label = "EXACT"
    else:
        rep_n = alpha_upper(family, U, "n")
        rep_m = alpha_upper(family, U, "m")
        a_n, W_n = rep_n["alpha_upper"], rep_n["argmin_candidate"]
        a_m, W_m = rep_m["alpha_upper"], rep_m["argmin_candidate"]
        alpha_label = "UPPER-BOUND"
    sandwich = cheeger_sandwich(sec, min(a_n, 1.0), a_m)
    return {
        "U": [str(x) for x in U],
        "eigenvalues": lam.tolist(),
        "bottom": float(lam[0]),
        "alpha_label": alpha_label,
        "alpha_n": a_n,
        "alpha_n_argmin": [str(x) for x in W_n],
        "alpha_m": a_m,
        "alpha_m_argmin": [str(x) for x in W_m],
        **sandwich,
    }


def essential_spectrum_estimate(family, delete_radius, outer_radii, root=None):
    """inf spec of the operator with a ball deleted, along growing annuli.

    Returns the nonincreasing sequence inf spec(L on B_R \\ ball(delete_radius))
    over R; its limit is the infimum after deleting the ball, which squeezes
    the bottom of the essential spectrum as the deleted ball grows.
    """
    if family.is_finite:
        return {
            "flag": "EMPTY-ESSENTIAL",
            "detail": "finite-dimensional operator has empty essential spectrum",
        }
    root = family.root if root is None else root
    inner = set(family.ball(root, delete_radius)) if delete_radius >= 0 else set()
    seq = []
    sizes = []
    for R in outer_radii:
        if R <= delete_radius:
            raise GraphError("outer radius must exceed the deleted radius")
        K = [x for x in family.ball(root, R) if x not in inner]
        if not K:
            raise GraphError("annulus is empty")
        sec = DirichletSection(family, K)
        seq.append(float(sec.eigenvalues()[0]))
        sizes.append(len(K))
    return {
        "flag": "SEQUENCE",
        "delete_radius": int(delete_radius),
        "outer_radii": [int(r) for r in outer_radii],
        "section_sizes": sizes,
        "inf_spectrum_sequence": seq,
        "detail": "nonincreasing in R; limit is inf spec after deleting the ball",
    }


def emptiness_diagnostic(family, radii, root=None):
    """Trend diagnostic for emptiness of the essential spectrum.

    Examines inf d over shells ball(r_i) \\ ball(r_{i-1}): degrees growing
    without bound suggest an empty essential spectrum, a bounded plateau the
    opposite.  Finite data cannot certify either limit, so the verdict is a
    trend, never a proof.
    """
    if family.is_finite:
        return {"verdict-trend": "ESSENTIAL-LIKELY-EMPTY", "detail": "finite graph"}
    root = family.root if root is None else root
    radii = [int(r) for r in radii]
    shells_min_d = []
    prev = set()
    for r in radii:
        ball = family.ball(root, r)
        shell = [x for x in ball if x not in prev]
        prev = set(ball)
        if shell:
            shells_min_d.append(min(family.d(x) for x in shell))
    arr = np.array(shells_min_d)
    if len(arr) >= 3 and np.all(np.diff(arr) >= -1e-12) and arr[-1] > 4.0 * arr[0]:
        verdict = "ESSENTIAL-LIKELY-EMPTY"
    elif len(arr) >= 3 and arr.max() <= 2.0 * arr.min():
        verdict = "ESSENTIAL-LIKELY-NONEMPTY"
    else:
        verdict = "INCONCLUSIVE"
    return {
        "radii": radii,
        "shell_min_d": arr.tolist(),
        "verdict-trend": verdict,
        "detail": "based on the growth of averaged degrees along shells",
    }
