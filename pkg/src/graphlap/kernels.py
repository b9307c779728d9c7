"""Hot numerical kernels with numba and pure-numpy implementations.

Two kernel groups live here:

* jump-process simulation (birth-death chains and general finite graphs in
  CSR form), driven by a counter-based RNG so every sample is reproducible
  from (seed, sample index) alone, independent of batch size or backend;
* exhaustive subset enumeration for isoperimetric ratios, walking subsets in
  Gray-code order so each step is O(degree).

Each group has a numba ``@njit`` version and a pure-Python/numpy fallback
producing bit-identical results; ``GRAPHLAP_NO_NUMBA=1`` selects the
fallback.  The public entry points ``run_chain``, ``run_csr`` and
``run_subset_scan`` dispatch automatically.

RNG: per-sample xorshift128+ streams seeded by splitmix64 from
(seed, index); Exp(1) holding times via a 256-layer ziggurat.
"""

from __future__ import annotations

import math

import numpy as np

from .accel import NUMBA_ENABLED, njit

# outcome codes shared with simulate.py
ALIVE = 0
KILLED = 1
EXPLODED = 2

_M64 = (1 << 64) - 1
_GOLD = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_STREAM2 = 0x5851F42D4C957F2D

_ZIG_R = 7.69711747013104972
_ZIG_V = 0.0039496598225815571993
_U01 = 1.1102230246251565e-16  # 2^-53
_TINY = 5e-324


def _build_ziggurat():
    """Layer tables for the Exp(1) ziggurat (256 layers)."""
    nz = 256
    x = np.zeros(nz + 1)
    x[0] = _ZIG_V / math.exp(-_ZIG_R)
    x[1] = _ZIG_R
    for i in range(2, nz):
        x[i] = -math.log(_ZIG_V / x[i - 1] + math.exp(-x[i - 1]))
    x[nz] = 0.0
    ki = np.zeros(nz, dtype=np.uint64)
    for i in range(nz):
        ki[i] = np.uint64((x[i + 1] / x[i]) * 2.0**63) if x[i] > 0 else np.uint64(0)
    wi = x[:nz] * 2.0**-63
    fi = np.exp(-x[:nz])
    return ki, wi, fi


ZIG_KI, ZIG_WI, ZIG_FI = _build_ziggurat()


# ======================================================================
# numba implementations


@njit(cache=True, inline="always")
def _nb_next(s0, s1):
    x = s0
    y = s1
    s0 = y
    x ^= x << np.uint64(23)
    s1 = x ^ y ^ (x >> np.uint64(17)) ^ (y >> np.uint64(26))
    return s0, s1, s1 + y


@njit(cache=True, inline="always")
def _nb_seed(seed, i):
    z = np.uint64(seed) + np.uint64(i) * np.uint64(_GOLD)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    s0 = z ^ (z >> np.uint64(31))
    z = (np.uint64(seed) ^ np.uint64(_STREAM2)) + np.uint64(i) * np.uint64(_GOLD)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    s1 = z ^ (z >> np.uint64(31))
    if s0 == np.uint64(0) and s1 == np.uint64(0):
        s1 = np.uint64(1)
    return s0, s1


@njit(cache=True, inline="always")
def _nb_exp(s0, s1, ki, wi, fi):
    e = 0.0
    while True:
        s0, s1, r = _nb_next(s0, s1)
        idx = r & np.uint64(255)
        ux = r >> np.uint64(1)
        xv = np.float64(ux) * wi[idx]
        if ux < ki[idx]:
            e += xv
            break
        if idx == np.uint64(0):
            s0, s1, r2 = _nb_next(s0, s1)
            u = (r2 >> np.uint64(11)) * _U01 + _TINY
            e += _ZIG_R - np.log(u)
            break
        s0, s1, r2 = _nb_next(s0, s1)
        u = (r2 >> np.uint64(11)) * _U01
        if fi[idx] + u * (fi[idx - np.uint64(1)] - fi[idx]) < np.exp(-xv):
            e += xv
            break
    return s0, s1, e


@njit(cache=True)
def _nb_chain(
    n_samples, start, horizon, jmax, a_u64, b_u64, inv_rate, cp_pos, cp_safe, seed, use_cp, ki, wi, fi
):
    nmax = a_u64.shape[0]
    ncp = cp_pos.shape[0]
    outcome = np.zeros(n_samples, dtype=np.int8)
    state = np.zeros(n_samples, dtype=np.int64)
    jumps = np.zeros(n_samples, dtype=np.int64)
    for i in range(n_samples):
        s0, s1 = _nb_seed(seed, i)
        n = start
        t = 0.0
        j = 0
        ic = 0
        out = ALIVE
        while True:
            if t >= horizon:
                out = ALIVE
                break
            if j >= jmax or n >= nmax - 1:
                out = EXPLODED
                break
            if use_cp:
                hit = False
                while ic < ncp and n >= cp_pos[ic]:
                    if horizon - t >= cp_safe[ic]:
                        hit = True
                        break
                    ic += 1
                if hit:
                    out = EXPLODED
                    break
            if inv_rate[n] == np.inf:
                out = ALIVE
                break
            s0, s1, r1 = _nb_next(s0, s1)
            s0, s1, e = _nb_exp(s0, s1, ki, wi, fi)
            t += e * inv_rate[n]
            if t >= horizon:  # event lands past the horizon: still alive at n
                out = ALIVE
                break
            if r1 < a_u64[n]:
                n += 1
            elif r1 < b_u64[n]:
                if n > 0:
                    n -= 1
            else:
                j += 1
                out = KILLED
                break
            j += 1
        outcome[i] = out
        state[i] = n
        jumps[i] = j
    return outcome, state, jumps


@njit(cache=True)
def _nb_csr(n_samples, start, horizon, jmax, indptr, indices, thresh, inv_rate, seed, ki, wi, fi):
    outcome = np.zeros(n_samples, dtype=np.int8)
    state = np.zeros(n_samples, dtype=np.int64)
    jumps = np.zeros(n_samples, dtype=np.int64)
    for i in range(n_samples):
        s0, s1 = _nb_seed(seed, i)
        x = start
        t = 0.0
        j = 0
        out = ALIVE
        while True:
            if t >= horizon:
                out = ALIVE
                break
            if j >= jmax:
                out = EXPLODED
                break
            if inv_rate[x] == np.inf:
                out = ALIVE
                break
            s0, s1, r1 = _nb_next(s0, s1)
            s0, s1, e = _nb_exp(s0, s1, ki, wi, fi)
            t += e * inv_rate[x]
            if t >= horizon:  # event lands past the horizon: still alive at x
                out = ALIVE
                break
            lo = indptr[x]
            hi = indptr[x + 1]
            nxt = -1
            for k in range(lo, hi):
                if r1 < thresh[k]:
                    nxt = indices[k]
                    break
            j += 1
            if nxt < 0:
                out = KILLED
                break
            x = nxt
        outcome[i] = out
        state[i] = x
        jumps[i] = j
    return outcome, state, jumps


@njit(cache=True, inline="always")
def _nb_upd(r, mask, pc, br, bm, bpc):
    if bm == 0:
        return r, mask, pc
    hi = r if r > br else br
    # absolute floor keeps ties at ratio zero stable under float noise
    tol = 1e-12 * hi if hi > 1.0 else 1e-12
    if r < br - tol:
        return r, mask, pc
    if r > br + tol:
        return br, bm, bpc
    rr = r if r < br else br
    if pc < bpc:
        return rr, mask, pc
    if pc > bpc:
        return rr, bm, bpc
    d = mask ^ bm
    low = d & (-d)
    if mask & low:
        return rr, mask, pc
    return rr, bm, bpc


@njit(cache=True)
def _nb_subset_scan(bd, degb, c, m, nvec):
    n = bd.shape[0]
    in_set = np.zeros(n, dtype=np.bool_)
    cut = 0.0
    volm = 0.0
    voln = 0.0
    csum = 0.0
    pc = 0
    mask = np.int64(0)
    ratios = np.full(4, np.inf)  # alpha_n, alpha_m, beta, gamma
    masks = np.zeros(4, dtype=np.int64)
    pcs = np.zeros(4, dtype=np.int64)
    for s in range(1, 1 << n):
        ss = s
        j = 0
        while ss & 1 == 0:
            ss >>= 1
            j += 1
        cross = 0.0
        for i in range(n):
            if in_set[i]:
                cross += bd[j, i]
        delta = degb[j] - 2.0 * cross
        if in_set[j]:
            cut -= delta
            volm -= m[j]
            voln -= nvec[j]
            csum -= c[j]
            in_set[j] = False
            mask ^= np.int64(1) << j
            pc -= 1
        else:
            cut += delta
            volm += m[j]
            voln += nvec[j]
            csum += c[j]
            in_set[j] = True
            mask |= np.int64(1) << j
            pc += 1
        boundary = cut + csum
        ratios[1], masks[1], pcs[1] = _nb_upd(
            boundary / volm, mask, pc, ratios[1], masks[1], pcs[1]
        )
        if voln > 0.0:
            ratios[0], masks[0], pcs[0] = _nb_upd(
                boundary / voln, mask, pc, ratios[0], masks[0], pcs[0]
            )
            ratios[2], masks[2], pcs[2] = _nb_upd(
                cut / voln, mask, pc, ratios[2], masks[2], pcs[2]
            )
            ratios[3], masks[3], pcs[3] = _nb_upd(
                csum / voln, mask, pc, ratios[3], masks[3], pcs[3]
            )
    return ratios, masks


# ======================================================================
# pure-Python / numpy fallbacks (bit-identical RNG semantics)


def _py_next(s0, s1):
    x, y = s0, s1
    s0 = y
    x = (x ^ (x << 23)) & _M64
    s1 = x ^ y ^ (x >> 17) ^ (y >> 26)
    return s0, s1, (s1 + y) & _M64


def _py_seed(seed, i):
    z = (seed + i * _GOLD) & _M64
    z = ((z ^ (z >> 30)) * _MIX1) & _M64
    z = ((z ^ (z >> 27)) * _MIX2) & _M64
    s0 = z ^ (z >> 31)
    z = (((seed ^ _STREAM2) & _M64) + i * _GOLD) & _M64
    z = ((z ^ (z >> 30)) * _MIX1) & _M64
    z = ((z ^ (z >> 27)) * _MIX2) & _M64
    s1 = z ^ (z >> 31)
    if s0 == 0 and s1 == 0:
        s1 = 1
    return s0, s1


def _py_exp(s0, s1, ki, wi, fi):
    while True:
        s0, s1, r = _py_next(s0, s1)
        idx = r & 255
        ux = r >> 1
        xv = float(ux) * wi[idx]
        if ux < int(ki[idx]):
            return s0, s1, xv
        if idx == 0:
            s0, s1, r2 = _py_next(s0, s1)
            u = (r2 >> 11) * _U01 + _TINY
            return s0, s1, _ZIG_R - math.log(u)
        s0, s1, r2 = _py_next(s0, s1)
        u = (r2 >> 11) * _U01
        if fi[idx] + u * (fi[idx - 1] - fi[idx]) < math.exp(-xv):
            return s0, s1, xv


def _py_chain(
    n_samples, start, horizon, jmax, a_u64, b_u64, inv_rate, cp_pos, cp_safe, seed, use_cp, ki, wi, fi
):
    nmax = a_u64.shape[0]
    ncp = cp_pos.shape[0]
    a = [int(v) for v in a_u64]
    b = [int(v) for v in b_u64]
    outcome = np.zeros(n_samples, dtype=np.int8)
    state = np.zeros(n_samples, dtype=np.int64)
    jumps = np.zeros(n_samples, dtype=np.int64)
    for i in range(n_samples):
        s0, s1 = _py_seed(seed, i)
        n = start
        t = 0.0
        j = 0
        ic = 0
        out = ALIVE
        while True:
            if t >= horizon:
                out = ALIVE
                break
            if j >= jmax or n >= nmax - 1:
                out = EXPLODED
                break
            if use_cp:
                hit = False
                while ic < ncp and n >= cp_pos[ic]:
                    if horizon - t >= cp_safe[ic]:
                        hit = True
                        break
                    ic += 1
                if hit:
                    out = EXPLODED
                    break
            if inv_rate[n] == np.inf:
                out = ALIVE
                break
            s0, s1, r1 = _py_next(s0, s1)
            s0, s1, e = _py_exp(s0, s1, ki, wi, fi)
            t += e * inv_rate[n]
            if t >= horizon:  # event lands past the horizon: still alive at n
                out = ALIVE
                break
            if r1 < a[n]:
                n += 1
            elif r1 < b[n]:
                if n > 0:
                    n -= 1
            else:
                j += 1
                out = KILLED
                break
            j += 1
        outcome[i] = out
        state[i] = n
        jumps[i] = j
    return outcome, state, jumps


def _py_csr(n_samples, start, horizon, jmax, indptr, indices, thresh, inv_rate, seed, ki, wi, fi):
    th = [int(v) for v in thresh]
    outcome = np.zeros(n_samples, dtype=np.int8)
    state = np.zeros(n_samples, dtype=np.int64)
    jumps = np.zeros(n_samples, dtype=np.int64)
    for i in range(n_samples):
        s0, s1 = _py_seed(seed, i)
        x = start
        t = 0.0
        j = 0
        out = ALIVE
        while True:
            if t >= horizon:
                out = ALIVE
                break
            if j >= jmax:
                out = EXPLODED
                break
            if inv_rate[x] == np.inf:
                out = ALIVE
                break
            s0, s1, r1 = _py_next(s0, s1)
            s0, s1, e = _py_exp(s0, s1, ki, wi, fi)
            t += e * inv_rate[x]
            if t >= horizon:  # event lands past the horizon: still alive at x
                break
            nxt = -1
            for k in range(indptr[x], indptr[x + 1]):
                if r1 < th[k]:
                    nxt = int(indices[k])
                    break
            j += 1
            if nxt < 0:
                out = KILLED
                break
            x = nxt
        outcome[i] = out
        state[i] = x
        jumps[i] = j
    return outcome, state, jumps


def _py_upd(r, mask, pc, br, bm, bpc):
    if bm == 0:
        return r, mask, pc
    hi = max(r, br)
    tol = 1e-12 * hi if hi > 1.0 else 1e-12
    if r < br - tol:
        return r, mask, pc
    if r > br + tol:
        return br, bm, bpc
    rr = min(r, br)
    if pc < bpc:
        return rr, mask, pc
    if pc > bpc:
        return rr, bm, bpc
    d = mask ^ bm
    low = d & (-d)
    if mask & low:
        return rr, mask, pc
    return rr, bm, bpc


def _np_subset_scan(bd, degb, c, m, nvec):
    """Chunked bitmask enumeration; same ratios and tie-breaking as the
    Gray-code kernel."""
    n = bd.shape[0]
    eu, ev = np.nonzero(np.triu(bd) > 0)
    eb = bd[eu, ev]
    bits = np.arange(n)
    revw = (np.int64(1) << (n - 1 - bits)).astype(np.int64)  # lex-order key
    best = [[np.inf, 0, 0] for _ in range(4)]  # ratio, mask, popcount
    chunk = 1 << 15
    for lo in range(1, 1 << n, chunk):
        masks = np.arange(lo, min(lo + chunk, 1 << n), dtype=np.int64)
        mem = ((masks[:, None] >> bits) & 1).astype(float)
        volm = mem @ m
        voln = mem @ nvec
        csum = mem @ c
        inner = (mem[:, eu] * mem[:, ev]) @ eb if len(eb) else np.zeros(len(masks))
        cut = mem @ degb - 2.0 * inner
        boundary = cut + csum
        pcounts = mem.sum(axis=1).astype(np.int64)
        revvals = (mem @ revw).astype(np.int64)
        quantities = [
            np.where(voln > 0, boundary, np.inf) / np.where(voln > 0, voln, 1.0),
            boundary / volm,
            np.where(voln > 0, cut, np.inf) / np.where(voln > 0, voln, 1.0),
            np.where(voln > 0, csum, np.inf) / np.where(voln > 0, voln, 1.0),
        ]
        for q, ratios in enumerate(quantities):
            rmin = ratios.min()
            if not np.isfinite(rmin):
                continue
            tie = ratios <= rmin + max(1e-12 * abs(rmin), 1e-12)
            pmin = pcounts[tie].min()
            tie &= pcounts == pmin
            k = np.flatnonzero(tie)[np.argmax(revvals[tie])]
            best[q] = list(
                _py_upd(float(ratios[k]), int(masks[k]), int(pcounts[k]), *best[q])
            )
    ratios = np.array([b[0] for b in best])
    out_masks = np.array([b[1] for b in best], dtype=np.int64)
    return ratios, out_masks


# ======================================================================
# dispatch


def run_chain(
    n_samples,
    start,
    horizon,
    jmax,
    a_u64,
    b_u64,
    inv_rate,
    seed,
    cp_pos=None,
    cp_safe=None,
):
    """Simulate the birth-death jump chain; returns (outcome, state, jumps).

    ``a_u64``/``b_u64`` are cumulative uint64 direction thresholds (up,
    up+down; remainder = killing).  ``cp_pos``/``cp_safe`` enable the
    early-explosion shortcut: once the chain sits at level >= cp_pos[i] with
    at least cp_safe[i] time left, it is declared exploded.
    """
    use_cp = cp_pos is not None and len(cp_pos) > 0
    if not use_cp:
        cp_pos = np.zeros(0, dtype=np.int64)
        cp_safe = np.zeros(0)
    cp_pos = np.asarray(cp_pos, dtype=np.int64)
    cp_safe = np.asarray(cp_safe, dtype=float)
    fn = _nb_chain if NUMBA_ENABLED else _py_chain
    return fn(
        int(n_samples),
        int(start),
        float(horizon),
        int(jmax),
        np.asarray(a_u64, dtype=np.uint64),
        np.asarray(b_u64, dtype=np.uint64),
        np.asarray(inv_rate, dtype=float),
        cp_pos,
        cp_safe,
        np.uint64(seed) if NUMBA_ENABLED else int(seed) & _M64,
        use_cp,
        ZIG_KI,
        ZIG_WI,
        ZIG_FI,
    )


def run_csr(n_samples, start, horizon, jmax, indptr, indices, thresh, inv_rate, seed):
    """Simulate the jump process on a finite graph in CSR form.

    ``thresh`` holds cumulative uint64 direction thresholds per row; a draw
    beyond the last entry of the row is a killing event.
    """
    fn = _nb_csr if NUMBA_ENABLED else _py_csr
    return fn(
        int(n_samples),
        int(start),
        float(horizon),
        int(jmax),
        np.asarray(indptr, dtype=np.int64),
        np.asarray(indices, dtype=np.int64),
        np.asarray(thresh, dtype=np.uint64),
        np.asarray(inv_rate, dtype=float),
        np.uint64(seed) if NUMBA_ENABLED else int(seed) & _M64,
        ZIG_KI,
        ZIG_WI,
        ZIG_FI,
    )


SUBSET_SCAN_MAX = 24


def run_subset_scan(bd, degb, c, m, nvec):
    """Exact minima over all nonempty subsets of four isoperimetric ratios.

    Returns (ratios, masks) for [boundary/vol_n, boundary/vol_m,
    b-boundary/vol_n, killing/vol_n]; masks are the minimizing subsets with
    ties broken by cardinality then lexicographic vertex order.
    """
    n = bd.shape[0]
    if n > SUBSET_SCAN_MAX:
        raise ValueError(f"subset enumeration capped at {SUBSET_SCAN_MAX} vertices, got {n}")
    bd = np.ascontiguousarray(bd, dtype=float)
    args = (
        bd,
        np.asarray(degb, dtype=float),
        np.asarray(c, dtype=float),
        np.asarray(m, dtype=float),
        np.asarray(nvec, dtype=float),
    )
    if NUMBA_ENABLED:
        return _nb_subset_scan(*args)
    return _np_subset_scan(*args)


def mask_to_vertices(mask):
    out = []
    j = 0
    mask = int(mask)
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return out
