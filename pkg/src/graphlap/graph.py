"""Finite weighted graphs (V, b, c, m) and the formal Laplacian.

Vertices are dense integer indices 0..n-1 with an optional string-label map.
Edge weights are stored as an upper-triangle adjacency structure; symmetry is
enforced at construction, never trusted from input.  A zero-weight edge means
"no edge" and is normalized away.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

TOL = 1e-12


class GraphError(Exception):
    pass


class GraphValidationError(GraphError):
    def __init__(self, violations):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str
    vertices: tuple = ()

    def __str__(self):
        return f"{self.kind}{self.vertices}: {self.detail}"


@dataclass
class GraphData:
    """Raw graph description as parsed from input, before normalization.

    ``edges`` is a list of (u, v, b) index triples exactly as given; it may
    contain self-loops, duplicates or asymmetric pairs, which ``validate``
    reports as violations.
    """

    labels: list
    c: np.ndarray
    m: np.ndarray
    edges: list = field(default_factory=list)

    @property
    def n_vertices(self):
        return len(self.labels)


def validate(data) -> list:
    """Check the weighted-graph axioms; violations are data, not failures.

    Accepts a GraphData (raw) or a WeightedGraph (already normalized, in
    which case only the measure/positivity axioms can still fail).
    """
    if isinstance(data, WeightedGraph):
        data = data.to_data()
    out = []
    seen = {}
    directed = {}
    for u, v, b in data.edges:
        if u == v:
            out.append(Violation("SelfLoop", f"b({u},{u})={b}", (u,)))
            continue
        if b < 0:
            out.append(Violation("NegativeWeight", f"b({u},{v})={b}", (u, v)))
        key = (min(u, v), max(u, v))
        if key in seen:
            seen[key] += 1
            if seen[key] == 2:
                out.append(Violation("DuplicateEdge", "edge listed more than once", key))
        else:
            seen[key] = 1
        directed[(u, v)] = b
    for (u, v), b in directed.items():
        b2 = directed.get((v, u))
        if b2 is not None and b2 != b:
            if u < v:
                out.append(
                    Violation("SymmetryViolation", f"b({u},{v})={b} != b({v},{u})={b2}", (u, v))
                )
    for x in range(data.n_vertices):
        if not data.m[x] > 0:
            out.append(Violation("MeasureViolation", f"m({x})={data.m[x]} not > 0", (x,)))
        if data.c[x] < 0:
            out.append(Violation("KillingViolation", f"c({x})={data.c[x]} < 0", (x,)))
    return out


class WeightedGraph:
    """Immutable finite weighted graph.

    Attributes
    ----------
    n : number of vertices
    c, m : killing term and measure, arrays of length n
    edges : (u, v, b) with u < v and b > 0, each pair once
    """

    def __init__(self, n_vertices, edges, c=None, m=None, labels=None):
        self.n = int(n_vertices)
        self.c = np.zeros(self.n) if c is None else np.asarray(c, dtype=float).copy()
        self.m = np.ones(self.n) if m is None else np.asarray(m, dtype=float).copy()
        self.labels = list(labels) if labels is not None else [str(i) for i in range(self.n)]
        acc = {}
        for u, v, b in edges:
            u, v = int(u), int(v)
            if u == v or b == 0.0:
                continue  # zero weight means no edge
            key = (min(u, v), max(u, v))
            acc[key] = float(b)
        self._edges = sorted((u, v, b) for (u, v), b in acc.items())
        self._adj = [[] for _ in range(self.n)]
        for u, v, b in self._edges:
            self._adj[u].append((v, b))
            self._adj[v].append((u, b))
        for lst in self._adj:
            lst.sort()
        self._n_weighted = np.array(
            [sum(b for _, b in self._adj[x]) + self.c[x] for x in range(self.n)]
        )
        data = self.to_data()
        bad = [v for v in validate(data) if v.kind in ("MeasureViolation", "KillingViolation")]
        if bad:
            raise GraphValidationError(bad)
        self.c.setflags(write=False)
        self.m.setflags(write=False)
        self._n_weighted.setflags(write=False)

    # -- construction -------------------------------------------------

    @classmethod
    def build(cls, data: GraphData, allow_invalid=False):
        violations = validate(data)
        if violations and not allow_invalid:
            raise GraphValidationError(violations)
        return cls(data.n_vertices, data.edges, data.c, data.m, data.labels)

    @classmethod
    def from_json(cls, obj, allow_invalid=False):
        data = graph_data_from_json(obj)
        return cls.build(data, allow_invalid=allow_invalid)

    @classmethod
    def from_file(cls, path, allow_invalid=False):
        with open(path) as f:
            return cls.from_json(json.load(f), allow_invalid=allow_invalid)

    def to_data(self) -> GraphData:
        return GraphData(list(self.labels), self.c.copy(), self.m.copy(), list(self._edges))

    def to_json(self):
        return {
            "vertices": [
                {"id": self.labels[i], "c": float(self.c[i]), "m": float(self.m[i])}
                for i in range(self.n)
            ],
            "edges": [
                {"u": self.labels[u], "v": self.labels[v], "b": b} for u, v, b in self._edges
            ],
        }

    # -- basic queries ------------------------------------------------

    @property
    def edges(self):
        return list(self._edges)

    def neighbors(self, x):
        return list(self._adj[x])

    def b(self, x, y):
        for z, w in self._adj[x]:
            if z == y:
                return w
        return 0.0

    def weighted_degree(self, x):
        """Return (n(x), d(x)) with n(x) = sum_y b(x,y) + c(x), d = n/m."""
        if not 0 <= x < self.n:
            raise GraphError(f"unknown vertex {x}")
        n = self._n_weighted[x]
        return n, n / self.m[x]

    def degree_vector(self):
        return self._n_weighted / self.m

    def n_vector(self):
        return self._n_weighted.copy()

    def connected_components(self):
        """Partition of vertices into b-positive path components."""
        seen = np.full(self.n, -1, dtype=int)
        comps = []
        for s in range(self.n):
            if seen[s] >= 0:
                continue
            comp = [s]
            seen[s] = len(comps)
            stack = [s]
            while stack:
                x = stack.pop()
                for y, _ in self._adj[x]:
                    if seen[y] < 0:
                        seen[y] = len(comps)
                        comp.append(y)
                        stack.append(y)
            comps.append(sorted(comp))
        return comps

    def is_connected(self):
        return len(self.connected_components()) <= 1

    # -- operator and form --------------------------------------------

    def apply_formal_laplacian(self, u):
        """L~ u(x) = (1/m) sum_y b(x,y)(u(x)-u(y)) + (c/m) u(x)."""
        u = np.asarray(u, dtype=float)
        out = self.c * u
        for x in range(self.n):
            s = 0.0
            for y, b in self._adj[x]:
                s += b * (u[x] - u[y])
            out[x] += s
        return out / self.m

    def quadratic_form(self, u):
        """Q(u) = 1/2 sum b(x,y)(u(x)-u(y))^2 + sum c u^2 (>= 0)."""
        u = np.asarray(u, dtype=float)
        q = float(np.sum(self.c * u * u))
        for x, y, b in self._edges:
            d = u[x] - u[y]
            q += b * d * d
        return q

    def quadratic_form_pair(self, u, v):
        """Q(u, v) by polarization."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return 0.25 * (self.quadratic_form(u + v) - self.quadratic_form(u - v))

    def inner_m(self, u, v):
        return float(np.sum(self.m * np.asarray(u) * np.asarray(v)))

    def laplacian_matrix(self):
        """Dense matrix of L~ (rows scaled by 1/m)."""
        L = np.zeros((self.n, self.n))
        for x in range(self.n):
            L[x, x] = self._n_weighted[x]
            for y, b in self._adj[x]:
                L[x, y] = -b
        return L / self.m[:, None]

    def symmetrized_matrix(self):
        """D_m^{1/2} L D_m^{-1/2}, symmetric PSD."""
        s = np.sqrt(self.m)
        return self.laplacian_matrix() * s[:, None] / s[None, :]

    # -- killing fold -------------------------------------------------

    def fold_killing(self):
        """Move the killing term onto edges to a fresh point at infinity.

        Returns a graph on V + {inf} with c' = 0, b'(x, inf) = c(x) and
        m(inf) = 1; the quadratic form on functions vanishing at inf is
        unchanged.
        """
        inf = self.n
        edges = list(self._edges)
        for x in range(self.n):
            if self.c[x] > 0:
                edges.append((x, inf, float(self.c[x])))
        m = np.append(self.m, 1.0)
        c = np.zeros(self.n + 1)
        return WeightedGraph(self.n + 1, edges, c, m, list(self.labels) + ["inf"])


def graph_data_from_json(obj) -> GraphData:
    verts = obj["vertices"]
    labels = [str(v["id"]) for v in verts]
    index = {}
    for i, lab in enumerate(labels):
        if lab in index:
            raise GraphError(f"duplicate vertex id {lab!r}")
        index[lab] = i
    c = np.array([float(v.get("c", 0.0)) for v in verts])
    m = np.array([float(v.get("m", 1.0)) for v in verts])
    edges = []
    for e in obj.get("edges", []):
        try:
            u, v = index[str(e["u"])], index[str(e["v"])]
        except KeyError as exc:
            raise GraphError(f"edge references unknown vertex {exc}") from exc
        edges.append((u, v, float(e["b"])))
    return GraphData(labels, c, m, edges)
