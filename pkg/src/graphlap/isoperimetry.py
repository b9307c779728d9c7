"""Boundary measures, isoperimetric constants and the co-area identities.

Two boundary conventions coexist and every result names the one it used:

* ``full``   : |dW| = sum_{x in W, y not in W} b(x,y) + sum_{x in W} c(x)
               (killing counts as boundary);
* ``edge``   : only the b-part (used by the co-area identity and by the
               beta constant).

Exact constants are minima over all nonempty subsets of U, enumerated in
Gray-code order (cap ``SUBSET_SCAN_MAX`` vertices); ``alpha_upper`` covers
larger U with honest upper bounds from structured candidate families.
"""

from __future__ import annotations

import numpy as np

from .graph import GraphError
from .kernels import SUBSET_SCAN_MAX, mask_to_vertices, run_subset_scan


def _subset_arrays(family, U):
    """Dense in-U weight matrix plus exact full-graph degree data."""
    U = list(U)
    idx = {x: i for i, x in enumerate(U)}
    k = len(U)
    bd = np.zeros((k, k))
    for i, x in enumerate(U):
        for y, b in family.neighbors(x):
            j = idx.get(y)
            if j is not None:
                bd[i, j] = b
    c = np.array([family.c(x) for x in U])
    m = np.array([family.m(x) for x in U])
    nvec = np.array([family.n(x) for x in U])
    degb = nvec - c  # full b-degree, including edges leaving U
    return U, bd, degb, c, m, nvec


def boundary_measure(family, W, convention="full"):
    """|dW| for finite W; exact even when edges leave any finite enclosure,
    thanks to the closed-form degrees n(x)."""
    _, bd, degb, c, _, _ = _subset_arrays(family, W)
    cut_b = float(degb.sum() - bd.sum())  # bd.sum() counts internal edges twice
    if convention == "edge":
        return cut_b
    if convention == "full":
        return cut_b + float(c.sum())
    raise GraphError(f"unknown boundary convention {convention!r}")


def boundary_spec(family, W):
    U, bd, degb, c, m, nvec = _subset_arrays(family, W)
    cut_b = float(degb.sum() - bd.sum())
    return {
        "W": sorted(U),
        "boundary_measure": cut_b + float(c.sum()),
        "edge_boundary": cut_b,
        "killing": float(c.sum()),
        "volume_m": float(m.sum()),
        "volume_n": float(nvec.sum()),
    }


def _scan(family, U):
    U, bd, degb, c, m, nvec = _subset_arrays(family, U)
    if len(U) > SUBSET_SCAN_MAX:
        raise GraphError(
            f"exact enumeration capped at {SUBSET_SCAN_MAX} vertices, got {len(U)}"
        )
    ratios, masks = run_subset_scan(bd, degb, c, m, nvec)
    ratios = np.maximum(ratios, 0.0)  # incremental sums can leave -1e-17 noise
    return U, ratios, masks


def alpha_exact(family, U, measure_choice="m"):
    """Exact isoperimetric constant over U with the full boundary.

    Returns (alpha, W) with W one minimizer (smallest cardinality, then
    lexicographically first).  ``measure_choice`` selects the volume:
    'm' -> sum of m over W, 'n' -> sum of n over W.
    """
    if measure_choice not in ("m", "n"):
        raise GraphError(f"measure_choice must be 'm' or 'n', got {measure_choice!r}")
    U, ratios, masks = _scan(family, U)
    q = 1 if measure_choice == "m" else 0
    W = [U[i] for i in mask_to_vertices(masks[q])]
    return float(ratios[q]), sorted(W)


def beta_gamma(family, U):
    """Exact split of the isoperimetric constant over U: the c-free
    edge-boundary ratio
    and the killing ratio, both against the n-volume.  Reported results note
    the boundary convention; the measure m plays no role in either ratio.
    """
    U, ratios, masks = _scan(family, U)
    Wb = sorted(U[i] for i in mask_to_vertices(masks[2]))
    Wg = sorted(U[i] for i in mask_to_vertices(masks[3]))
    return {
        "beta": float(ratios[2]),
        "beta_argmin": Wb,
        "gamma": float(ratios[3]),
        "gamma_argmin": Wg,
        "boundary_convention": "edge (c-free) over n-volume",
    }


def _ratio(family, W, measure_choice, arrays=None):
    spec = boundary_spec(family, W)
    vol = spec["volume_m"] if measure_choice == "m" else spec["volume_n"]
    return spec["boundary_measure"] / vol if vol > 0 else np.inf


def alpha_upper(family, U, measure_choice="m", budget=100, root=None):
    """Upper bound on alpha(U) from structured candidates: nested prefixes
    of U (ball growth when U is ball-ordered), sweep cuts of the lowest
    eigenvector of the section on U, and singletons.  Always >= alpha(U).
    """
    from .sections import DirichletSection  # local import to avoid a cycle

    U = list(U)
    if not U:
        raise GraphError("U is empty")
    idx = {x: i for i, x in enumerate(U)}
    _, bd, degb, c, m, nvec = _subset_arrays(family, U)

    def ratio_of_mask(sel):
        cut = float(degb[sel].sum() - bd[np.ix_(sel, sel)].sum())
        bound = cut + float(c[sel].sum())
        vol = float(m[sel].sum()) if measure_choice == "m" else float(nvec[sel].sum())
        return bound / vol if vol > 0 else np.inf

    best = np.inf
    best_W = None

    def consider(sel):
        nonlocal best, best_W
        r = ratio_of_mask(sel)
        if r < best:
            best = r
            best_W = [U[i] for i in np.flatnonzero(sel)]

    k = len(U)
    # singletons (a few spread through U)
    for i in range(0, k, max(1, k // max(1, budget // 4))):
        sel = np.zeros(k, dtype=bool)
        sel[i] = True
        consider(sel)
    # nested prefixes in the given order
    step = max(1, k // max(1, budget // 2))
    sel = np.zeros(k, dtype=bool)
    for i in range(k):
        sel[i] = True
        if (i + 1) % step == 0 or i == k - 1:
            consider(sel)
    # sweep cuts of the two lowest eigenvectors of the section on U
    if k >= 3:
        try:
            sec = DirichletSection(family, U)
            lam, V = sec.eigensystem()
            for col in range(min(2, k)):
                order = np.argsort(V[:, col])
                sel = np.zeros(k, dtype=bool)
                for i in order[:-1]:
                    sel[i] = True
                    consider(sel)
        except GraphError:
            pass
    return {
        "alpha_upper": float(best),
        "argmin_candidate": sorted(best_W),
        "label": "UPPER-BOUND",
        "measure": measure_choice,
    }


# ----------------------------------------------------------------------
# co-area identities


def _as_function(family, f, K=None):
    """Normalize f (dict vertex -> value) and an enclosure K covering the
    support together with all its neighbors."""
    if not isinstance(f, dict):
        raise GraphError("f must be a dict {vertex: value}")
    supp = [x for x, v in f.items() if v != 0.0]
    if any(v < 0 for v in f.values()):
        raise GraphError("f must be nonnegative")
    needed = set(supp)
    for x in supp:
        for y, _ in family.neighbors(x):
            needed.add(y)
    if K is None:
        K = sorted(needed)
    else:
        missing = needed - set(K)
        if missing:
            raise GraphError(f"enclosure misses support neighbors: {sorted(missing)}")
        K = list(K)
    vals = np.array([float(f.get(x, 0.0)) for x in K])
    return K, vals


def coarea_first(family, f, K=None):
    """Both sides of: (1/2) sum b(x,y)|f(x)-f(y)| = integral of |dOmega_t| dt
    with the c-free edge boundary; the integral is an exact finite sum over
    the sorted distinct values of f (the level sets are step functions)."""
    K, vals = _as_function(family, f, K)
    _, bd, degb, c, m, nvec = _subset_arrays(family, K)
    iu, ju = np.triu_indices(len(K), 1)
    lhs = float(np.sum(bd[iu, ju] * np.abs(vals[iu] - vals[ju])))
    levels = np.unique(vals[vals > 0])
    prev = 0.0
    rhs = 0.0
    for t in levels:
        sel = vals >= t  # Omega_s = {f > s} for s in [prev, t)
        cut = float(degb[sel].sum() - bd[np.ix_(sel, sel)].sum())
        rhs += (t - prev) * cut
        prev = t
    return lhs, rhs


def coarea_second(family, f, K=None):
    """Both sides of the layer-cake identity sum m f = integral m(Omega_t) dt."""
    K, vals = _as_function(family, f, K)
    m = np.array([family.m(x) for x in K])
    lhs = float(np.sum(m * vals))
    levels = np.unique(vals[vals > 0])
    prev = 0.0
    rhs = 0.0
    for t in levels:
        rhs += (t - prev) * float(m[vals >= t].sum())
        prev = t
    return lhs, rhs
