"""Property-verification suite over random instances.

Each check draws random finite graphs (and random functions / sections on
them) and tests an identity or inequality that must hold exactly up to a
stated tolerance.  Results are data: (property, instances, max discrepancy,
verdict); the CLI turns any failure into exit code 1.
"""

from __future__ import annotations

import numpy as np

from .families import ExplicitFamily
from .graph import WeightedGraph, validate
from .heat import heat_parts
from .isoperimetry import alpha_exact, coarea_first, coarea_second
from .sections import DirichletSection
from .simulate import jump_parameters
from .spectral import cheeger_sandwich

TOL_STRICT = 1e-12
TOL_LINALG = 1e-10
TOL_EIG = 1e-9


def random_graph(rng, n_min=2, n_max=12, p_edge=0.45, with_killing=True):
    n = int(rng.integers(n_min, n_max + 1))
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p_edge:
                edges.append((u, v, float(rng.uniform(1e-3, 2.0))))
    # keep at least a spanning path so sections are usually connected
    for u in range(n - 1):
        if not any(e[0] == u and e[1] == u + 1 for e in edges):
            if rng.random() < 0.7:
                edges.append((u, u + 1, float(rng.uniform(1e-3, 2.0))))
    c = np.where(rng.random(n) < 0.5, rng.uniform(0.0, 1.0, n), 0.0) if with_killing else np.zeros(n)
    m = rng.uniform(0.1, 2.0, n)
    return WeightedGraph(n, edges, c, m)


def _random_subset(rng, n, lo=1):
    k = int(rng.integers(lo, n + 1))
    return sorted(rng.choice(n, size=k, replace=False).tolist())


class _Prop:
    def __init__(self, name, instances):
        self.name = name
        self.instances = instances
        self.max_disc = 0.0
        self.failures = 0

    def record(self, disc, ok):
        self.max_disc = max(self.max_disc, float(disc))
        if not ok:
            self.failures += 1

    def result(self):
        return {
            "property": self.name,
            "instances": self.instances,
            "max_discrepancy": self.max_disc,
            "verdict": "PASS" if self.failures == 0 else f"FAIL({self.failures})",
            "passed": self.failures == 0,
        }


def _check_coarea(rng, n_inst):
    p = _Prop("coarea", n_inst)
    for _ in range(n_inst):
        g = random_graph(rng)
        fam = ExplicitFamily(g)
        f = {i: float(v) for i, v in enumerate(np.where(rng.random(g.n) < 0.8, rng.uniform(0, 3, g.n), 0.0))}
        l1, r1 = coarea_first(fam, f, list(range(g.n)))
        l2, r2 = coarea_second(fam, f, list(range(g.n)))
        scale = max(1.0, abs(l1), abs(l2))
        disc = max(abs(l1 - r1), abs(l2 - r2)) / scale
        p.record(disc, disc < TOL_STRICT)
    return p.result()


def _check_form_symmetry(rng, n_inst):
    p = _Prop("form_symmetry", n_inst)
    for _ in range(n_inst):
        g = random_graph(rng)
        u = rng.normal(size=g.n)
        v = rng.normal(size=g.n)
        d = abs(g.quadratic_form_pair(u, v) - g.quadratic_form_pair(v, u))
        p.record(d, d < TOL_LINALG)
    return p.result()


def _check_form_operator_consistency(rng, n_inst):
    p = _Prop("form_operator_consistency", n_inst)
    for _ in range(n_inst):
        g = random_graph(rng)
        u = rng.normal(size=g.n)
        q = g.quadratic_form(u)
        ip = g.inner_m(g.apply_formal_laplacian(u), u)
        d = abs(q - ip) / max(1.0, abs(q))
        p.record(d, d < TOL_STRICT)
    return p.result()


def _check_normal_contraction(rng, n_inst):
    p = _Prop("normal_contraction", n_inst)
    for _ in range(n_inst):
        g = random_graph(rng)
        u = rng.normal(size=g.n) * 2.0
        q = g.quadratic_form(u)
        for cu in (np.clip(u, 0.0, 1.0), np.abs(u)):
            d = g.quadratic_form(cu) - q
            p.record(max(d, 0.0), d <= TOL_LINALG)
    return p.result()


def _check_chain_inequality(rng, n_inst):
    p = _Prop("chain_inequality", n_inst)
    for _ in range(n_inst):
        g = random_graph(rng, n_max=10)
        fam = ExplicitFamily(g)
        U = _random_subset(rng, g.n)
        sec = DirichletSection(fam, U)
        bottom = float(sec.eigenvalues()[0])
        a_m, _ = alpha_exact(fam, U, "m")
        d_U = float(sec.d.min())
        d = max(bottom - a_m, a_m - d_U)
        p.record(max(d, 0.0), d <= TOL_LINALG)
    return p.result()


def _check_sandwich(rng, n_inst):
    p = _Prop("cheeger_sandwich", n_inst)
    for _ in range(n_inst):
        g = random_graph(rng, n_max=10)
        fam = ExplicitFamily(g)
        U = _random_subset(rng, g.n)
        sec = DirichletSection(fam, U)
        lam = sec.eigenvalues()
        a_n, _ = alpha_exact(fam, U, "n")
        a_m, _ = alpha_exact(fam, U, "m")
        sw = cheeger_sandwich(sec, min(a_n, 1.0), a_m)
        lo_n, hi_n = sw["sandwich_n"]
        lo_m, hi_m = sw["sandwich_m"]
        slack = max(
            lo_n - lam[0], lam[-1] - hi_n, lo_m - lam[0], lam[-1] - hi_m
        )
        p.record(max(slack, 0.0), slack <= TOL_EIG)
    return p.result()


def _check_positivity_improving(rng, n_inst):
    p = _Prop("positivity_improving", n_inst)
    done = 0
    while done < n_inst:
        g = random_graph(rng, n_max=10)
        if not g.is_connected():
            continue
        fam = ExplicitFamily(g)
        U = list(range(g.n))
        sec = DirichletSection(fam, U)
        lam, V = sec.eigensystem()
        s = np.sqrt(sec.m)
        res = (V / s[:, None]) @ np.diag(1.0 / (lam + 1.0)) @ (V.T * s[None, :])
        semi = (V / s[:, None]) @ np.diag(np.exp(-lam)) @ (V.T * s[None, :])
        worst = min(res.min(), semi.min())
        p.record(max(-worst, 0.0), worst > 0.0)
        done += 1
    return p.result()


def _check_resolvent_identity(rng, n_inst):
    p = _Prop("resolvent_identity", n_inst)
    for _ in range(n_inst):
        g = random_graph(rng)
        fam = ExplicitFamily(g)
        U = _random_subset(rng, g.n)
        sec = DirichletSection(fam, U)
        alpha = float(rng.uniform(0.2, 3.0))
        lhs = alpha * sec.resolvent_apply(alpha, sec.ones()) + sec.resolvent_apply(
            alpha, sec.g + sec.cm
        )
        d = np.max(np.abs(lhs - 1.0))
        p.record(d, d < TOL_LINALG)
    return p.result()


def _check_domain_monotonicity(rng, n_inst):
    p = _Prop("domain_monotonicity", n_inst)
    for _ in range(n_inst):
        g = random_graph(rng)
        fam = ExplicitFamily(g)
        U2 = _random_subset(rng, g.n, lo=2)
        k1 = int(rng.integers(1, len(U2)))
        U1 = sorted(rng.choice(U2, size=k1, replace=False).tolist())
        s1 = DirichletSection(fam, U1)
        s2 = DirichletSection(fam, U2)
        f1 = rng.uniform(0.0, 2.0, len(U1))
        f2 = np.zeros(len(U2))
        pos = [U2.index(x) for x in U1]
        f2[pos] = f1
        alpha = float(rng.uniform(0.2, 2.0))
        t = float(rng.uniform(0.1, 1.5))
        r1 = s1.resolvent_apply(alpha, f1)
        r2 = s2.resolvent_apply(alpha, f2)[pos]
        e1 = s1.semigroup_apply(t, f1)
        e2 = s2.semigroup_apply(t, f2)[pos]
        viol = max(np.max(r1 - r2), np.max(e1 - e2))
        p.record(max(viol, 0.0), viol <= TOL_LINALG)
    return p.result()


def _check_semigroup_property(rng, n_inst):
    p = _Prop("semigroup_property", n_inst)
    for _ in range(n_inst):
        g = random_graph(rng)
        fam = ExplicitFamily(g)
        sec = DirichletSection(fam, list(range(g.n)))
        f = rng.normal(size=g.n)
        t, s = float(rng.uniform(0.05, 1.0)), float(rng.uniform(0.05, 1.0))
        d = np.max(
            np.abs(sec.semigroup_apply(t + s, f) - sec.semigroup_apply(t, sec.semigroup_apply(s, f)))
        )
        p.record(d, d < TOL_LINALG)
    return p.result()


def _check_detailed_balance(rng, n_inst):
    p = _Prop("detailed_balance", n_inst)
    for _ in range(n_inst):
        g = random_graph(rng)
        fam = ExplicitFamily(g)
        params = jump_parameters(fam, range(g.n))
        worst = 0.0
        for x in range(g.n):
            px = params[x]
            for y, q in px["jump_prob"].items():
                flux_xy = g.m[x] * px["rate"] * q
                worst = max(worst, abs(flux_xy - g.b(x, y)))
        p.record(worst, worst < TOL_LINALG)
    return p.result()


def _check_boundedness(rng, n_inst):
    p = _Prop("operator_norm_bound", n_inst)
    for _ in range(n_inst):
        g = random_graph(rng)
        H = g.symmetrized_matrix()
        norm = float(np.linalg.norm(H, 2))
        bound = 2.0 * float(g.degree_vector().max())
        d = norm - bound
        p.record(max(d, 0.0), d <= TOL_LINALG)
    return p.result()


def _check_heat_bounds(rng, n_inst):
    p = _Prop("heat_content_bounds", n_inst)
    for _ in range(n_inst):
        g = random_graph(rng)
        fam = ExplicitFamily(g)
        U = _random_subset(rng, g.n)
        sec = DirichletSection(fam, U)
        t = float(rng.uniform(0.0, 2.0))
        semi, integ = heat_parts(sec, t)
        M = semi + integ
        d = max(float(np.max(M - 1.0)), float(np.max(-M)))
        p.record(max(d, 0.0), d <= TOL_LINALG)
    return p.result()


CHECKS = {
    "coarea": _check_coarea,
    "form_symmetry": _check_form_symmetry,
    "form_operator_consistency": _check_form_operator_consistency,
    "normal_contraction": _check_normal_contraction,
    "chain_inequality": _check_chain_inequality,
    "cheeger_sandwich": _check_sandwich,
    "positivity_improving": _check_positivity_improving,
    "resolvent_identity": _check_resolvent_identity,
    "domain_monotonicity": _check_domain_monotonicity,
    "semigroup_property": _check_semigroup_property,
    "detailed_balance": _check_detailed_balance,
    "operator_norm_bound": _check_boundedness,
    "heat_content_bounds": _check_heat_bounds,
}


def run_verify(seed=0, instances=200, only=None, graph_data=None):
    """Run the suite; optionally also validate a user-supplied raw graph
    (axiom violations there are reported as failures)."""
    rng = np.random.default_rng(seed)
    results = []
    if graph_data is not None:
        violations = validate(graph_data)
        results.append(
            {
                "property": "input_axioms",
                "instances": 1,
                "max_discrepancy": float(len(violations)),
                "verdict": "PASS" if not violations else "FAIL(" + "; ".join(map(str, violations)) + ")",
                "passed": not violations,
            }
        )
    names = list(CHECKS)
    if only:
        unknown = [n for n in only if n not in CHECKS]
        if unknown:
            raise ValueError(f"unknown properties: {unknown}; known: {names}")
        names = [n for n in names if n in only]
    for name in names:
        results.append(CHECKS[name](rng, instances))
    return results
