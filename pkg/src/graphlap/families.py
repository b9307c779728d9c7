"""Graph families: explicit finite graphs and infinite generators.

A family can produce, for any finite vertex set K, all weights inside K and
the exact full weighted degree n(x) for x in K.  Built-in infinite families
are locally finite, so n(x) is a finite closed-form sum.

Built-in kinds:
  * explicit-finite        -- wraps a WeightedGraph
  * ray                    -- vertex set N, edges (k, k+1) with weight w(k)
  * spherically-symmetric-tree -- branching numbers per generation (cyclic)

Weight/measure/killing laws: const, poly (scale*(k+1)^power), geom
(scale*ratio^k), evaluated at the edge or vertex index (ray) or at the
generation (tree).
"""

from __future__ import annotations

import json

import numpy as np

from .graph import GraphError, WeightedGraph


class FamilyError(GraphError):
    pass


# ----------------------------------------------------------------------
# scalar laws


class Law:
    def __init__(self, kind, **params):
        self.kind = kind
        self.params = params
        if kind == "const":
            self.value = float(params["value"])
        elif kind == "poly":
            self.power = float(params["power"])
            self.scale = float(params.get("scale", 1.0))
        elif kind == "geom":
            self.ratio = float(params["ratio"])
            self.scale = float(params.get("scale", 1.0))
        else:
            raise FamilyError(f"unknown law kind {kind!r}")

    def __call__(self, k):
        if self.kind == "const":
            return self.value
        if self.kind == "poly":
            return self.scale * (k + 1.0) ** self.power
        return self.scale * self.ratio**k

    def lower_bound(self):
        """Infimum over k >= 0, when finite and positive; else None."""
        if self.kind == "const":
            return self.value if self.value > 0 else None
        if self.kind == "poly":
            return self.scale if self.power >= 0 and self.scale > 0 else None
        if self.ratio >= 1.0 and self.scale > 0:
            return self.scale
        return None

    def upper_bound(self):
        if self.kind == "const":
            return self.value
        if self.kind == "poly":
            return self.scale if self.power <= 0 else None
        if self.ratio <= 1.0:
            return self.scale
        return None

    def to_json(self):
        return {"type": self.kind, **{k: v for k, v in self.params.items()}}

    @classmethod
    def from_json(cls, obj, default=None):
        if obj is None:
            return default
        params = {k: v for k, v in obj.items() if k != "type"}
        return cls(obj["type"], **params)


CONST_ZERO = Law("const", value=0.0)
CONST_ONE = Law("const", value=1.0)


# ----------------------------------------------------------------------
# families


class GraphFamily:
    """Base interface; vertices are integers."""

    is_finite = False
    kind = "abstract"

    def contains(self, x) -> bool:
        raise NotImplementedError

    def neighbors(self, x):
        """List of (y, b(x,y)) with b > 0; finite by local finiteness."""
        raise NotImplementedError

    def c(self, x) -> float:
        raise NotImplementedError

    def m(self, x) -> float:
        raise NotImplementedError

    def n(self, x) -> float:
        """Exact full weighted degree sum_y b(x,y) + c(x)."""
        return sum(b for _, b in self.neighbors(x)) + self.c(x)

    def d(self, x) -> float:
        return self.n(x) / self.m(x)

    @property
    def root(self):
        return 0

    def measure_lower_bound(self):
        """Declared uniform lower bound on m, or None."""
        return None

    def d_sup_exact(self):
        """sup_x d(x) when known in closed form, else None."""
        return None

    def ball(self, root, radius):
        """Combinatorial ball along b-positive edges, sorted by (dist, id)."""
        dist = {root: 0}
        order = [root]
        frontier = [root]
        for r in range(1, radius + 1):
            nxt = []
            for x in frontier:
                for y, _ in self.neighbors(x):
                    if y not in dist:
                        dist[y] = r
                        nxt.append(y)
            nxt.sort()
            order.extend(nxt)
            frontier = nxt
            if not frontier:
                break
        return order

    def ball_exhaustion(self, root, radii):
        radii = list(radii)
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise FamilyError("radii must be strictly increasing")
        return [self.ball(root, r) for r in radii]

    def finite_graph(self, K):
        """Induced subgraph on K as a WeightedGraph (boundary edges dropped).

        Used for isoperimetry bookkeeping; the exact outside flux is always
        recovered through n(x), never from this object.
        """
        idx = {x: i for i, x in enumerate(K)}
        edges = []
        for x in K:
            for y, b in self.neighbors(x):
                if y in idx and x < y:
                    edges.append((idx[x], idx[y], b))
        c = np.array([self.c(x) for x in K])
        m = np.array([self.m(x) for x in K])
        return WeightedGraph(len(K), edges, c, m, [str(x) for x in K])

    def to_json(self):
        raise NotImplementedError


class ExplicitFamily(GraphFamily):
    """A finite explicit graph viewed through the family interface."""

    is_finite = True
    kind = "explicit-finite"

    def __init__(self, graph: WeightedGraph):
        self.graph = graph

    def contains(self, x):
        return 0 <= x < self.graph.n

    def neighbors(self, x):
        return self.graph.neighbors(x)

    def c(self, x):
        return float(self.graph.c[x])

    def m(self, x):
        return float(self.graph.m[x])

    def n(self, x):
        return float(self.graph.n_vector()[x])

    def vertices(self):
        return list(range(self.graph.n))

    def measure_lower_bound(self):
        return float(self.graph.m.min())

    def d_sup_exact(self):
        return float(self.graph.degree_vector().max())

    def to_json(self):
        return {"kind": "explicit-finite", "graph": self.graph.to_json()}


class RayFamily(GraphFamily):
    """Half-line graph: vertices 0,1,2,... and edges (k, k+1) with b = w(k)."""

    kind = "ray"

    def __init__(self, weight_law, measure_law=None, killing_law=None):
        self.weight_law = weight_law
        self.measure_law = measure_law or CONST_ONE
        self.killing_law = killing_law or CONST_ZERO

    def contains(self, x):
        return x >= 0

    def neighbors(self, x):
        out = [(x + 1, self.weight_law(x))]
        if x > 0:
            out.append((x - 1, self.weight_law(x - 1)))
        return sorted(out)

    def c(self, x):
        return self.killing_law(x)

    def m(self, x):
        return self.measure_law(x)

    def measure_lower_bound(self):
        return self.measure_law.lower_bound()

    def d_sup_exact(self):
        wb = self.weight_law.upper_bound()
        cb = self.killing_law.upper_bound()
        mb = self.measure_law.lower_bound()
        if wb is None or cb is None or mb is None:
            return None
        return (2.0 * wb + cb) / mb

    def ball(self, root, radius):
        lo = max(0, root - radius)
        return list(range(lo, root + radius + 1))

    # radial chain view (used by the simulator): identical to the ray itself
    def radial_chain(self, nmax):
        ks = np.arange(nmax, dtype=float)
        w = np.array([self.weight_law(k) for k in range(nmax)])
        up = w.copy()
        down = np.concatenate([[0.0], w[:-1]])
        c = np.array([self.killing_law(k) for k in range(nmax)])
        m = np.array([self.measure_law(k) for k in range(nmax)])
        del ks
        return up, down, c, m

    def to_json(self):
        return {
            "kind": "ray",
            "weight_law": self.weight_law.to_json(),
            "measure_law": self.measure_law.to_json(),
            "killing_law": self.killing_law.to_json(),
        }


class TreeFamily(GraphFamily):
    """Spherically symmetric rooted tree.

    Generation g has ``k(g)`` children per vertex, with k cyclically extended
    from the given branching list.  Edge weights, measures and killing depend
    only on the generation.  Vertices are indexed breadth-first.
    """

    kind = "spherically-symmetric-tree"

    def __init__(self, branching, weight_law=None, measure_law=None, killing_law=None):
        self.branching = [int(k) for k in branching]
        if not self.branching or any(k < 1 for k in self.branching):
            raise FamilyError("branching numbers must be >= 1")
        self.weight_law = weight_law or CONST_ONE
        self.measure_law = measure_law or CONST_ONE
        self.killing_law = killing_law or CONST_ZERO
        self._gen_size = [1]
        self._gen_offset = [0]

    def _k(self, g):
        return self.branching[g % len(self.branching)]

    def _extend(self, g):
        while len(self._gen_size) <= g + 1:
            gg = len(self._gen_size) - 1
            self._gen_size.append(self._gen_size[-1] * self._k(gg))
            self._gen_offset.append(self._gen_offset[-1] + self._gen_size[-2])

    def generation(self, x):
        g = 0
        self._extend(g)
        while x >= self._gen_offset[g] + self._gen_size[g]:
            g += 1
            self._extend(g)
        return g

    def contains(self, x):
        return x >= 0

    def parent(self, x):
        g = self.generation(x)
        if g == 0:
            return None
        pos = x - self._gen_offset[g]
        return self._gen_offset[g - 1] + pos // self._k(g - 1)

    def children(self, x):
        g = self.generation(x)
        self._extend(g + 1)
        pos = x - self._gen_offset[g]
        k = self._k(g)
        base = self._gen_offset[g + 1] + pos * k
        return list(range(base, base + k))

    def neighbors(self, x):
        g = self.generation(x)
        out = [(ch, self.weight_law(g)) for ch in self.children(x)]
        p = self.parent(x)
        if p is not None:
            out.append((p, self.weight_law(g - 1)))
        return sorted(out)

    def c(self, x):
        return self.killing_law(self.generation(x))

    def m(self, x):
        return self.measure_law(self.generation(x))

    def n(self, x):
        g = self.generation(x)
        n = self._k(g) * self.weight_law(g) + self.killing_law(g)
        if g > 0:
            n += self.weight_law(g - 1)
        return n

    def measure_lower_bound(self):
        return self.measure_law.lower_bound()

    def d_sup_exact(self):
        if (
            self.weight_law.kind == "const"
            and self.measure_law.kind == "const"
            and self.killing_law.kind == "const"
        ):
            kmax = max(self.branching)
            return (
                (kmax + 1) * self.weight_law.value + self.killing_law.value
            ) / self.measure_law.value
        return None

    def radial_chain(self, nmax):
        """Generator rates of the radial (generation) process, exact by
        spherical symmetry."""
        gs = np.arange(nmax)
        w = np.array([self.weight_law(g) for g in gs], dtype=float)
        k = np.array([self._k(g) for g in gs], dtype=float)
        m = np.array([self.measure_law(g) for g in gs], dtype=float)
        c = np.array([self.killing_law(g) for g in gs], dtype=float)
        up = k * w
        down = np.concatenate([[0.0], w[:-1]])
        return up, down, c, m

    def to_json(self):
        return {
            "kind": "spherically-symmetric-tree",
            "branching": list(self.branching),
            "weight_law": self.weight_law.to_json(),
            "measure_law": self.measure_law.to_json(),
            "killing_law": self.killing_law.to_json(),
        }


def family_from_json(obj) -> GraphFamily:
    kind = obj.get("kind")
    if kind in ("explicit-finite", "explicit"):
        return ExplicitFamily(WeightedGraph.from_json(obj["graph"]))
    if kind == "ray":
        return RayFamily(
            Law.from_json(obj["weight_law"]),
            Law.from_json(obj.get("measure_law"), CONST_ONE),
            Law.from_json(obj.get("killing_law"), CONST_ZERO),
        )
    if kind == "spherically-symmetric-tree":
        return TreeFamily(
            obj["branching"],
            Law.from_json(obj.get("weight_law"), CONST_ONE),
            Law.from_json(obj.get("measure_law"), CONST_ONE),
            Law.from_json(obj.get("killing_law"), CONST_ZERO),
        )
    raise FamilyError(f"unknown family kind {kind!r}")


def family_from_file(path) -> GraphFamily:
    with open(path) as f:
        obj = json.load(f)
    # allow a bare graph file as an explicit family
    if "kind" not in obj and "vertices" in obj:
        return ExplicitFamily(WeightedGraph.from_json(obj))
    return family_from_json(obj)
