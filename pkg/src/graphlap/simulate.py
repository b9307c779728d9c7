"""Jump-process simulation with killing and explosion detection.

The process attached to (b, c, m): at x it waits an exponential time with
rate d(x) = n(x)/m(x), then jumps to y with probability b(x,y)/n(x) or dies
with probability c(x)/n(x).  Explosion (infinitely many jumps in finite
time) is operationalized as "jump count reaches the threshold before the
horizon"; the threshold is configurable and always reported.

Ray and spherically symmetric tree families reduce exactly to a birth-death
chain on the distance from the root (rates depend only on the generation
and the radial process is itself Markov), which is what the chain kernel
simulates.  Explicit finite graphs run on the CSR kernel.

For explosive chains most of the compute is burned after the outcome is
already determined: once the walker sits deep in the graph with enough time
left, the probability of ever returning is negligible.  The fast path
declares explosion at checkpoint levels N with safe times s*(N) calibrated
so that the survival probability of the section started at N over s*(N) is
below 1e-4; it is only enabled when the killing term vanishes at and beyond
the first checkpoint, and can be disabled with method="exact".
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .graph import GraphError
from .kernels import ALIVE, EXPLODED, KILLED, run_chain, run_csr

_U64_MAX = np.uint64(0xFFFFFFFFFFFFFFFF)
_CHAIN_NMAX = 1 << 14
_SAFE_SECTION = 4096
_SAFE_EPS = 1e-4
_CHECKPOINTS = np.array([128, 192, 256, 384, 512, 768, 1024, 1536, 2048, 3072], dtype=np.int64)

OUTCOME_NAMES = {ALIVE: "ALIVE", KILLED: "KILLED", EXPLODED: "EXPLODED"}


def _to_u64(p):
    """Map probabilities to uint64 thresholds; p >= 1 maps to the exact
    maximum (a clamp below the maximum would inject spurious events)."""
    v = np.clip(np.asarray(p, dtype=float), 0.0, 1.0) * 2.0**64
    out = np.full(v.shape, _U64_MAX)
    ok = v < 2.0**64
    out[ok] = v[ok].astype(np.uint64)
    return out


def jump_parameters(family, K):
    """Holding rates and jump/kill distributions on K, plus absorbing flags.

    Satisfies detailed balance m(x) rate(x) jump(x->y) = m(y) rate(y)
    jump(y->x) because both sides reduce to b(x,y).
    """
    out = {}
    for x in K:
        n = family.n(x)
        m = family.m(x)
        c = family.c(x)
        if n <= 0:
            out[x] = {"rate": 0.0, "jump_prob": {}, "kill_prob": 0.0, "absorbing": True}
            continue
        jp = {y: b / n for y, b in family.neighbors(x)}
        out[x] = {
            "rate": n / m,
            "jump_prob": jp,
            "kill_prob": c / n,
            "absorbing": False,
        }
    return out


@dataclass
class TrajectoryBatch:
    seed: int
    n_samples: int
    t_horizon: float
    x0: object
    explosion_threshold: int
    method: str
    state_space: str  # "vertices" or "radial"
    outcomes: np.ndarray = field(repr=False)
    final_states: np.ndarray = field(repr=False)
    jump_counts: np.ndarray = field(repr=False)

    def counts(self):
        return {
            name: int(np.count_nonzero(self.outcomes == code))
            for code, name in OUTCOME_NAMES.items()
        }

    def fractions(self):
        return {k: v / self.n_samples for k, v in self.counts().items()}

    def summary(self):
        return {
            "seed": int(self.seed),
            "n_samples": int(self.n_samples),
            "t_horizon": float(self.t_horizon),
            "x0": self.x0,
            "explosion_threshold": int(self.explosion_threshold),
            "method": self.method,
            "state_space": self.state_space,
            "counts": self.counts(),
            "fractions": self.fractions(),
            "mean_jumps": float(self.jump_counts.mean()),
        }


def _chain_arrays(family, nmax):
    up, down, c, m = family.radial_chain(nmax)
    n = up + down + c
    with np.errstate(divide="ignore"):
        inv_rate = np.where(n > 0, m / np.where(n > 0, n, 1.0), np.inf)
    pu = np.where(n > 0, up / np.where(n > 0, n, 1.0), 0.0)
    pud = np.where(n > 0, (up + down) / np.where(n > 0, n, 1.0), 0.0)
    a_u64 = _to_u64(pu)
    b_u64 = _to_u64(pud)
    b_u64[c == 0.0] = _U64_MAX  # no killing: never fall through to the kill branch
    return a_u64, b_u64, inv_rate, c, m, up, down


def _chain_safe_times(up, down, c, m, horizon):
    """s*(N): time after which the survival probability of the truncated
    chain started at N is below _SAFE_EPS, per checkpoint level."""
    sk = _SAFE_SECTION
    n = up[:sk] + down[:sk] + c[:sk]
    diag = n / m[:sk]
    s = np.sqrt(m[:sk])
    off = -up[: sk - 1] / (s[: sk - 1] * s[1:sk])
    lam, V = eigh_tridiagonal(diag, off)
    coef = V.T @ s
    sgrid = np.linspace(horizon / 500.0, horizon, 500)
    safe = np.full(len(_CHECKPOINTS), np.inf)
    for i, N in enumerate(_CHECKPOINTS):
        surv = (V[N] * coef) @ np.exp(-np.outer(lam, sgrid)) / s[N]
        ok = surv <= _SAFE_EPS
        if ok.any():
            safe[i] = sgrid[np.argmax(ok)]
    return safe


def simulate(
    family,
    x0=0,
    t_horizon=1.0,
    n_samples=10000,
    seed=0,
    explosion_threshold=10**6,
    method="auto",
):
    """Run a trajectory batch; reproducible byte-for-byte from the seed.

    method: "exact" simulates every jump; "fast" additionally uses the
    checkpoint shortcut on radial chains; "auto" picks "fast" when it is
    admissible (radial chain, no killing beyond the first checkpoint).
    """
    if explosion_threshold < 10**4:
        raise GraphError("explosion threshold must be at least 10^4")
    if t_horizon < 0:
        raise GraphError("horizon must be nonnegative")
    if method not in ("auto", "exact", "fast"):
        raise GraphError(f"unknown method {method!r}")

    if hasattr(family, "radial_chain"):
        if hasattr(family, "generation"):
            start = family.generation(x0)
        else:
            start = int(x0)
        a_u64, b_u64, inv_rate, c, m, up, down = _chain_arrays(family, _CHAIN_NMAX)
        no_kill_tail = bool(np.all(c[_CHECKPOINTS[0] :] == 0.0))
        use_fast = method == "fast" or (method == "auto" and no_kill_tail)
        if method == "fast" and not no_kill_tail:
            raise GraphError("fast method needs a killing-free tail beyond the checkpoints")
        cp_pos = cp_safe = None
        if use_fast and t_horizon > 0:
            cp_safe = _chain_safe_times(up, down, c, m, t_horizon)
            cp_pos = _CHECKPOINTS
        outcomes, states, jumps = run_chain(
            n_samples,
            start,
            t_horizon,
            explosion_threshold,
            a_u64,
            b_u64,
            inv_rate,
            seed,
            cp_pos=cp_pos,
            cp_safe=cp_safe,
        )
        return TrajectoryBatch(
            seed=seed,
            n_samples=n_samples,
            t_horizon=t_horizon,
            x0=x0,
            explosion_threshold=explosion_threshold,
            method="fast" if use_fast else "exact",
            state_space="radial",
            outcomes=outcomes,
            final_states=states,
            jump_counts=jumps,
        )

    # explicit finite graph: CSR representation
    g = family.graph
    indptr = [0]
    indices = []
    probs = []
    nvec = g.n_vector()
    for x in range(g.n):
        row = g.neighbors(x)
        acc = 0.0
        for y, b in row:
            acc += b / nvec[x] if nvec[x] > 0 else 0.0
            indices.append(y)
            probs.append(acc)
        indptr.append(len(indices))
    thresh = _to_u64(np.array(probs)) if probs else np.zeros(0, dtype=np.uint64)
    for x in range(g.n):
        if g.c[x] == 0.0 and indptr[x + 1] > indptr[x]:
            thresh[indptr[x + 1] - 1] = _U64_MAX
    with np.errstate(divide="ignore"):
        inv_rate = np.where(nvec > 0, g.m / np.where(nvec > 0, nvec, 1.0), np.inf)
    start = int(x0)
    if not 0 <= start < g.n:
        raise GraphError(f"start vertex {x0} not in graph")
    outcomes, states, jumps = run_csr(
        n_samples, start, t_horizon, explosion_threshold, indptr, indices, thresh, inv_rate, seed
    )
    return TrajectoryBatch(
        seed=seed,
        n_samples=n_samples,
        t_horizon=t_horizon,
        x0=x0,
        explosion_threshold=explosion_threshold,
        method="exact",
        state_space="vertices",
        outcomes=outcomes,
        final_states=states,
        jump_counts=jumps,
    )


def estimate_heat_quantities(batch: TrajectoryBatch):
    """Monte Carlo estimates of the heat-content split at (x0, horizon).

    M_hat = 1 - exploded fraction; the outcome partition makes
    M_hat = alive_hat + killed_hat exact.  ci is three binomial standard
    errors of the exploded fraction.
    """
    if batch.n_samples == 0:
        raise GraphError("empty batch")
    fr = batch.fractions()
    p = fr["EXPLODED"]
    se = float(np.sqrt(max(p * (1.0 - p), 1.0 / batch.n_samples) / batch.n_samples))
    return {
        "M_hat": 1.0 - p,
        "alive_hat": fr["ALIVE"],
        "killed_hat": fr["KILLED"],
        "exploded_hat": p,
        "ci": 3.0 * se,
        "se": se,
        "n_samples": batch.n_samples,
    }


def transition_estimate(family, K, x, y, t, n_samples, seed):
    """Monte Carlo estimate of the transition kernel P_t(x,y) =
    P(X_t = y | X_0 = x) / m(y), with a 3-sigma binomial half-width."""
    del K  # the walk runs on the full finite graph
    batch = simulate(family, x0=x, t_horizon=t, n_samples=n_samples, seed=seed)
    hits = np.count_nonzero((batch.outcomes == ALIVE) & (batch.final_states == int(y)))
    p = hits / n_samples
    my = family.m(y)
    se = float(np.sqrt(max(p * (1.0 - p), 1.0 / n_samples) / n_samples))
    return {
        "P_t": p / my,
        "prob": p,
        "ci": 3.0 * se / my,
        "n_samples": n_samples,
    }
