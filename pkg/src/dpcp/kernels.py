"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

Every kernel exists in two forms:

* ``_<name>_loop``   -- scalar loops, compiled with ``numba.njit`` when jit
  is enabled;
* ``_<name>_numpy``  -- vectorized numpy, used as the fallback.

The module-level name ``<name>`` is bound to whichever form is active.
Selection happens once at import time: setting the environment variable
``DPCP_DISABLE_NUMBA=1`` (or numba failing to import) picks the numpy
fallback.  Both forms are kept importable so the test suite can assert they
produce bit-identical results.

All randomness in the package is counter based.  A draw is a pure function
of ``(seed, trial, node, pass, kind, rep)`` built from the splitmix64
finalizer, so the compiled path, the numpy path and the pure-python session
layer in :mod:`dpcp.rng` produce the same bits in the same places.
"""

from __future__ import annotations

import os

import numpy as np

ENV_DISABLE = "DPCP_DISABLE_NUMBA"


def _jit_requested() -> bool:
    return os.environ.get(ENV_DISABLE, "").strip().lower() not in ("1", "true", "yes")


NUMBA_ENABLED = False
if _jit_requested():
    try:
        from numba import njit as _njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False

if not NUMBA_ENABLED:
    def _njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(fn):
            return fn

        return deco


# Draw-site labels.  The python session layer and the kernels must use the
# same constants so that transcripts line up bit for bit.
KIND_BLR_X = 0
KIND_BLR_Y = 1
KIND_POINT = 2          # correction mask for the fixed-point check (e_i)
KIND_PARITY = 3         # correction mask for the all-ones parity check
KIND_PUNCTURE = 4       # punctured random point, read directly
KIND_EBLR_SELF_X = 5
KIND_EBLR_SELF_Y = 6
KIND_EBLR_PAR_X = 7
KIND_EBLR_PAR_Y = 8
KIND_EPOINT_SELF = 9
KIND_EPOINT_PAR = 10
KIND_EPUNCTURE = 11

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_ONE = np.uint64(1)


def _mix64_raw(z):
    """splitmix64 finalizer; uint64 wraparound semantics (jit-friendly)."""
    z = (z ^ (z >> _U30)) * _MIX1
    z = (z ^ (z >> _U27)) * _MIX2
    return z ^ (z >> _U31)


def _mix64_impl(z):
    """Interpreted form; silences numpy's scalar-overflow chatter."""
    with np.errstate(over="ignore"):
        return _mix64_raw(z)


def _fold_impl(s, v):
    """Fold one index into a seed: ``mix64(s + (v + 1) * golden)``."""
    with np.errstate(over="ignore"):
        return _mix64_raw(s + (v + _ONE) * _GOLDEN)


def _draw_key_impl(node_seed, pass_idx, kind, rep):
    """64 random bits for one labelled draw site."""
    return _fold_impl(_fold_impl(_fold_impl(node_seed, pass_idx), kind), rep)


# The vectorized fallbacks always use the interpreted implementations; the
# loop kernels call whatever the module-level names are bound to (compiled
# when jit is on, interpreted otherwise).
if NUMBA_ENABLED:
    mix64 = _njit(_mix64_raw)

    @_njit
    def fold(s, v):
        return mix64(s + (v + _ONE) * _GOLDEN)

    @_njit
    def draw_key(node_seed, pass_idx, kind, rep):
        return fold(fold(fold(node_seed, pass_idx), kind), rep)
else:
    mix64 = _mix64_impl
    fold = _fold_impl
    draw_key = _draw_key_impl


def hadamard_table(alpha_bits: np.ndarray) -> np.ndarray:
    """Truth table of v -> alpha.v over GF(2)^n, doubling construction.

    Index convention: coordinate j of the query point is bit j of the table
    index (coordinate 0 least significant).
    """
    n = alpha_bits.shape[0]
    t = np.zeros(1 << n, dtype=np.uint8)
    w = 1
    for j in range(n):
        if alpha_bits[j]:
            t[w:2 * w] = t[:w] ^ 1
        else:
            t[w:2 * w] = t[:w]
        w <<= 1
    return t


# ---------------------------------------------------------------------------
# Exact enumeration counts
# ---------------------------------------------------------------------------

def _blr_fail_count_loop(table: np.ndarray) -> int:
    size = table.shape[0]
    fails = 0
    for x in range(size):
        tx = table[x]
        for y in range(size):
            if tx ^ table[y] != table[x ^ y]:
                fails += 1
    return fails


def _blr_fail_count_numpy(table: np.ndarray) -> int:
    size = table.shape[0]
    idx = np.arange(size)
    fails = 0
    block = max(1, (1 << 22) // size)
    for start in range(0, size, block):
        rows = idx[start:start + block]
        xor_idx = rows[:, None] ^ idx[None, :]
        bad = (table[rows][:, None] ^ table[None, :]) != table[xor_idx]
        fails += int(bad.sum())
    return fails


def _corrected_one_count_loop(table: np.ndarray, v: int) -> int:
    size = table.shape[0]
    ones = 0
    for r in range(size):
        ones += table[v ^ r] ^ table[r]
    return ones


def _corrected_one_count_numpy(table: np.ndarray, v: int) -> int:
    idx = np.arange(table.shape[0])
    return int((table[idx ^ v] ^ table).sum())


def punctured_points(n: int, i: int) -> np.ndarray:
    """All points of {0,1}^n with coordinate i fixed to zero, as ints."""
    raw = np.arange(1 << (n - 1), dtype=np.int64) if n > 1 else np.zeros(1, dtype=np.int64)
    low = raw & ((1 << i) - 1)
    high = raw >> i
    return low | (high << (i + 1))


def _fwht_min_distance_loop(table: np.ndarray):
    size = table.shape[0]
    w = np.empty(size, dtype=np.int64)
    for k in range(size):
        w[k] = 1 - 2 * int(table[k])
    h = 1
    while h < size:
        for start in range(0, size, 2 * h):
            for k in range(start, start + h):
                a = w[k]
                b = w[k + h]
                w[k] = a + b
                w[k + h] = a - b
        h *= 2
    best_alpha = 0
    best_w = w[0]
    for k in range(1, size):
        if w[k] > best_w:
            best_w = w[k]
            best_alpha = k
    return (size - best_w) // 2, best_alpha


def _fwht_min_distance_numpy(table: np.ndarray):
    size = table.shape[0]
    w = (1 - 2 * table.astype(np.int64))
    h = 1
    while h < size:
        w = w.reshape(-1, 2, h)
        top = w[:, 0, :] + w[:, 1, :]
        bot = w[:, 0, :] - w[:, 1, :]
        w = np.stack((top, bot), axis=1).reshape(-1)
        h *= 2
    best_alpha = int(np.argmax(w))
    best_w = int(w[best_alpha])
    return (size - best_w) // 2, best_alpha


# ---------------------------------------------------------------------------
# Monte Carlo protocol kernels
#
# Each kernel replays `trials` independent protocol runs and returns the
# per-trial global verdict (1 = every node accepted).  The run with trial
# index t uses exactly the same draws as the session-based reference path
# seeded with fold(seed, t), which the tests assert.
# ---------------------------------------------------------------------------

def _mc_nonbipartite_loop(table, n, indptr, indices, blr_reps, passes, trials, seed):
    verdicts = np.zeros(trials, dtype=np.uint8)
    mask = np.uint64((1 << n) - 1)
    node_seeds = np.empty(n, dtype=np.uint64)
    a = np.empty(n, dtype=np.uint8)
    pre_ok = np.empty(n, dtype=np.uint8)
    useed = np.uint64(seed)
    for t in range(trials):
        run_seed = np.uint64(fold(useed, np.uint64(t)))
        for i in range(n):
            node_seeds[i] = np.uint64(fold(run_seed, np.uint64(i)))
        accepted = True
        for p in range(passes):
            up = np.uint64(p)
            for i in range(n):
                ns = node_seeds[i]
                blr_ok = True
                for j in range(blr_reps):
                    x = int(draw_key(ns, up, np.uint64(KIND_BLR_X), np.uint64(j)) & mask)
                    y = int(draw_key(ns, up, np.uint64(KIND_BLR_Y), np.uint64(j)) & mask)
                    if table[x] ^ table[y] != table[x ^ y]:
                        blr_ok = False
                r = int(draw_key(ns, up, np.uint64(KIND_POINT), np.uint64(0)) & mask)
                a[i] = table[(1 << i) ^ r] ^ table[r]
                rp = int(draw_key(ns, up, np.uint64(KIND_PARITY), np.uint64(0)) & mask)
                parity = table[int(mask) ^ rp] ^ table[rp]
                pre_ok[i] = 1 if (blr_ok and parity == 1) else 0
            for i in range(n):
                if pre_ok[i] == 0:
                    accepted = False
                if a[i] == 1:
                    cnt = 0
                    for e in range(indptr[i], indptr[i + 1]):
                        if a[indices[e]] == 1:
                            cnt += 1
                    if cnt != 2:
                        accepted = False
            if not accepted:
                break
        verdicts[t] = 1 if accepted else 0
    return verdicts


def _mc_nonbipartite_numpy(table, n, indptr, indices, blr_reps, passes, trials, seed):
    mask = np.uint64((1 << n) - 1)
    run_seeds = _fold_impl(np.uint64(seed), np.arange(trials, dtype=np.uint64))
    ok = np.ones(trials, dtype=bool)
    for p in range(passes):
        up = np.uint64(p)
        a = np.empty((n, trials), dtype=np.uint8)
        for i in range(n):
            ns = _fold_impl(run_seeds, np.uint64(i))
            blr_ok = np.ones(trials, dtype=bool)
            for j in range(blr_reps):
                x = (_draw_key_impl(ns, up, np.uint64(KIND_BLR_X), np.uint64(j)) & mask).astype(np.int64)
                y = (_draw_key_impl(ns, up, np.uint64(KIND_BLR_Y), np.uint64(j)) & mask).astype(np.int64)
                blr_ok &= (table[x] ^ table[y]) == table[x ^ y]
            r = (_draw_key_impl(ns, up, np.uint64(KIND_POINT), np.uint64(0)) & mask).astype(np.int64)
            a[i] = table[(1 << i) ^ r] ^ table[r]
            rp = (_draw_key_impl(ns, up, np.uint64(KIND_PARITY), np.uint64(0)) & mask).astype(np.int64)
            parity = table[int(mask) ^ rp] ^ table[rp]
            ok &= blr_ok & (parity == 1)
        for i in range(n):
            nbrs = indices[indptr[i]:indptr[i + 1]]
            if nbrs.shape[0]:
                cnt = a[nbrs].astype(np.int64).sum(axis=0)
            else:
                cnt = np.zeros(trials, dtype=np.int64)
            ok &= (a[i] == 0) | (cnt == 2)
    return ok.astype(np.uint8)


def _expand_punctured(raw, i):
    """Insert a zero bit at coordinate i (scalar or array form)."""
    low = raw & ((1 << i) - 1)
    high = raw >> i
    return low | (high << (i + 1))


def _mc_leader_loop(table, n, xbits, blr_reps, passes, trials, seed):
    verdicts = np.zeros(trials, dtype=np.uint8)
    mask = np.uint64((1 << n) - 1)
    pmask = np.uint64((1 << (n - 1)) - 1) if n > 1 else np.uint64(0)
    useed = np.uint64(seed)
    for t in range(trials):
        run_seed = np.uint64(fold(useed, np.uint64(t)))
        accepted = True
        for p in range(passes):
            up = np.uint64(p)
            for i in range(n):
                ns = np.uint64(fold(run_seed, np.uint64(i)))
                for j in range(blr_reps):
                    x = int(draw_key(ns, up, np.uint64(KIND_BLR_X), np.uint64(j)) & mask)
                    y = int(draw_key(ns, up, np.uint64(KIND_BLR_Y), np.uint64(j)) & mask)
                    if table[x] ^ table[y] != table[x ^ y]:
                        accepted = False
                r = int(draw_key(ns, up, np.uint64(KIND_POINT), np.uint64(0)) & mask)
                if table[(1 << i) ^ r] ^ table[r] != xbits[i]:
                    accepted = False
                if xbits[i] == 1:
                    raw = int(draw_key(ns, up, np.uint64(KIND_PUNCTURE), np.uint64(0)) & pmask)
                    low = raw & ((1 << i) - 1)
                    point = low | ((raw >> i) << (i + 1))
                    if table[point] != 0:
                        accepted = False
                else:
                    rp = int(draw_key(ns, up, np.uint64(KIND_PARITY), np.uint64(0)) & mask)
                    if table[int(mask) ^ rp] ^ table[rp] != 1:
                        accepted = False
            if not accepted:
                break
        verdicts[t] = 1 if accepted else 0
    return verdicts


def _mc_leader_numpy(table, n, xbits, blr_reps, passes, trials, seed):
    mask = np.uint64((1 << n) - 1)
    pmask = np.uint64((1 << (n - 1)) - 1) if n > 1 else np.uint64(0)
    run_seeds = _fold_impl(np.uint64(seed), np.arange(trials, dtype=np.uint64))
    ok = np.ones(trials, dtype=bool)
    for p in range(passes):
        up = np.uint64(p)
        for i in range(n):
            ns = _fold_impl(run_seeds, np.uint64(i))
            for j in range(blr_reps):
                x = (_draw_key_impl(ns, up, np.uint64(KIND_BLR_X), np.uint64(j)) & mask).astype(np.int64)
                y = (_draw_key_impl(ns, up, np.uint64(KIND_BLR_Y), np.uint64(j)) & mask).astype(np.int64)
                ok &= (table[x] ^ table[y]) == table[x ^ y]
            r = (_draw_key_impl(ns, up, np.uint64(KIND_POINT), np.uint64(0)) & mask).astype(np.int64)
            ok &= (table[(1 << i) ^ r] ^ table[r]) == xbits[i]
            if xbits[i] == 1:
                raw = (_draw_key_impl(ns, up, np.uint64(KIND_PUNCTURE), np.uint64(0)) & pmask).astype(np.int64)
                point = _expand_punctured(raw, i)
                ok &= table[point] == 0
            else:
                rp = (_draw_key_impl(ns, up, np.uint64(KIND_PARITY), np.uint64(0)) & mask).astype(np.int64)
                ok &= (table[int(mask) ^ rp] ^ table[rp]) == 1
    return ok.astype(np.uint8)


def _mc_span_loop(parts, n, parent, syntax_ok, blr_reps, passes, trials, seed):
    verdicts = np.zeros(trials, dtype=np.uint8)
    mask = np.uint64((1 << n) - 1)
    pmask = np.uint64((1 << (n - 1)) - 1) if n > 1 else np.uint64(0)
    useed = np.uint64(seed)
    for t in range(trials):
        run_seed = np.uint64(fold(useed, np.uint64(t)))
        accepted = True
        for p in range(passes):
            up = np.uint64(p)
            for i in range(n):
                ns = np.uint64(fold(run_seed, np.uint64(i)))
                xr = 1 if parent[i] == -1 else 0
                for j in range(blr_reps):
                    x = int(draw_key(ns, up, np.uint64(KIND_BLR_X), np.uint64(j)) & mask)
                    y = int(draw_key(ns, up, np.uint64(KIND_BLR_Y), np.uint64(j)) & mask)
                    if parts[0, x] ^ parts[0, y] != parts[0, x ^ y]:
                        accepted = False
                r = int(draw_key(ns, up, np.uint64(KIND_POINT), np.uint64(0)) & mask)
                if parts[0, (1 << i) ^ r] ^ parts[0, r] != xr:
                    accepted = False
                if xr == 1:
                    raw = int(draw_key(ns, up, np.uint64(KIND_PUNCTURE), np.uint64(0)) & pmask)
                    low = raw & ((1 << i) - 1)
                    point = low | ((raw >> i) << (i + 1))
                    if parts[0, point] != 0:
                        accepted = False
                else:
                    rp = int(draw_key(ns, up, np.uint64(KIND_PARITY), np.uint64(0)) & mask)
                    if parts[0, int(mask) ^ rp] ^ parts[0, rp] != 1:
                        accepted = False
                if syntax_ok[i] == 0:
                    accepted = False
                if parent[i] >= 0:
                    ps = 1 + i
                    pp = 1 + parent[i]
                    for j in range(blr_reps):
                        x = int(draw_key(ns, up, np.uint64(KIND_EBLR_SELF_X), np.uint64(j)) & mask)
                        y = int(draw_key(ns, up, np.uint64(KIND_EBLR_SELF_Y), np.uint64(j)) & mask)
                        if parts[ps, x] ^ parts[ps, y] != parts[ps, x ^ y]:
                            accepted = False
                        x = int(draw_key(ns, up, np.uint64(KIND_EBLR_PAR_X), np.uint64(j)) & mask)
                        y = int(draw_key(ns, up, np.uint64(KIND_EBLR_PAR_Y), np.uint64(j)) & mask)
                        if parts[pp, x] ^ parts[pp, y] != parts[pp, x ^ y]:
                            accepted = False
                    r1 = int(draw_key(ns, up, np.uint64(KIND_EPOINT_SELF), np.uint64(0)) & mask)
                    r2 = int(draw_key(ns, up, np.uint64(KIND_EPOINT_PAR), np.uint64(0)) & mask)
                    c1 = parts[ps, (1 << i) ^ r1] ^ parts[ps, r1]
                    c2 = parts[pp, (1 << i) ^ r2] ^ parts[pp, r2]
                    if c1 ^ c2 != 1:
                        accepted = False
                    raw = int(draw_key(ns, up, np.uint64(KIND_EPUNCTURE), np.uint64(0)) & pmask)
                    low = raw & ((1 << i) - 1)
                    point = low | ((raw >> i) << (i + 1))
                    if parts[ps, point] ^ parts[pp, point] != 0:
                        accepted = False
            if not accepted:
                break
        verdicts[t] = 1 if accepted else 0
    return verdicts


def _mc_span_numpy(parts, n, parent, syntax_ok, blr_reps, passes, trials, seed):
    mask = np.uint64((1 << n) - 1)
    pmask = np.uint64((1 << (n - 1)) - 1) if n > 1 else np.uint64(0)
    run_seeds = _fold_impl(np.uint64(seed), np.arange(trials, dtype=np.uint64))
    ok = np.ones(trials, dtype=bool)
    p0 = parts[0]
    for p in range(passes):
        up = np.uint64(p)
        for i in range(n):
            ns = _fold_impl(run_seeds, np.uint64(i))
            xr = 1 if parent[i] == -1 else 0
            for j in range(blr_reps):
                x = (_draw_key_impl(ns, up, np.uint64(KIND_BLR_X), np.uint64(j)) & mask).astype(np.int64)
                y = (_draw_key_impl(ns, up, np.uint64(KIND_BLR_Y), np.uint64(j)) & mask).astype(np.int64)
                ok &= (p0[x] ^ p0[y]) == p0[x ^ y]
            r = (_draw_key_impl(ns, up, np.uint64(KIND_POINT), np.uint64(0)) & mask).astype(np.int64)
            ok &= (p0[(1 << i) ^ r] ^ p0[r]) == xr
            if xr == 1:
                raw = (_draw_key_impl(ns, up, np.uint64(KIND_PUNCTURE), np.uint64(0)) & pmask).astype(np.int64)
                ok &= p0[_expand_punctured(raw, i)] == 0
            else:
                rp = (_draw_key_impl(ns, up, np.uint64(KIND_PARITY), np.uint64(0)) & mask).astype(np.int64)
                ok &= (p0[int(mask) ^ rp] ^ p0[rp]) == 1
            if syntax_ok[i] == 0:
                ok &= False
            if parent[i] >= 0:
                ts = parts[1 + i]
                tp = parts[1 + parent[i]]
                for j in range(blr_reps):
                    x = (_draw_key_impl(ns, up, np.uint64(KIND_EBLR_SELF_X), np.uint64(j)) & mask).astype(np.int64)
                    y = (_draw_key_impl(ns, up, np.uint64(KIND_EBLR_SELF_Y), np.uint64(j)) & mask).astype(np.int64)
                    ok &= (ts[x] ^ ts[y]) == ts[x ^ y]
                    x = (_draw_key_impl(ns, up, np.uint64(KIND_EBLR_PAR_X), np.uint64(j)) & mask).astype(np.int64)
                    y = (_draw_key_impl(ns, up, np.uint64(KIND_EBLR_PAR_Y), np.uint64(j)) & mask).astype(np.int64)
                    ok &= (tp[x] ^ tp[y]) == tp[x ^ y]
                r1 = (_draw_key_impl(ns, up, np.uint64(KIND_EPOINT_SELF), np.uint64(0)) & mask).astype(np.int64)
                r2 = (_draw_key_impl(ns, up, np.uint64(KIND_EPOINT_PAR), np.uint64(0)) & mask).astype(np.int64)
                c1 = ts[(1 << i) ^ r1] ^ ts[r1]
                c2 = tp[(1 << i) ^ r2] ^ tp[r2]
                ok &= (c1 ^ c2) == 1
                raw = (_draw_key_impl(ns, up, np.uint64(KIND_EPUNCTURE), np.uint64(0)) & pmask).astype(np.int64)
                point = _expand_punctured(raw, i)
                ok &= (ts[point] ^ tp[point]) == 0
    return ok.astype(np.uint8)


if NUMBA_ENABLED:
    blr_fail_count = _njit(_blr_fail_count_loop)
    corrected_one_count = _njit(_corrected_one_count_loop)
    fwht_min_distance = _njit(_fwht_min_distance_loop)
    mc_nonbipartite = _njit(_mc_nonbipartite_loop)
    mc_leader = _njit(_mc_leader_loop)
    mc_span = _njit(_mc_span_loop)
else:
    blr_fail_count = _blr_fail_count_numpy
    corrected_one_count = _corrected_one_count_numpy
    fwht_min_distance = _fwht_min_distance_numpy
    mc_nonbipartite = _mc_nonbipartite_numpy
    mc_leader = _mc_leader_numpy
    mc_span = _mc_span_numpy
