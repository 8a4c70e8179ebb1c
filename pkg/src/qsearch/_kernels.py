"""Branch-and-bound enumeration kernels over global/local operator strings.

Every alternating block schedule corresponds to a string over {G, L}, so the
search is a depth-first walk of the string tree carrying the reduced
3-amplitude state.  Nodes are cut by:

  * the enumeration caps (max globals, locals budget, block count, and the
    full-rotation cap on consecutive locals),
  * a static depth cap,
  * a completion bound: appending k_g globals and k_l locals can raise the
    target angle asin|a_t| by at most 2θ·k_g + 2θ₂·k_l and the block angle
    arccos|a_u| by at most 2γ·k_g (locals never move |u>), so the best total
    any completion can reach is bounded below over the (k_g, k_l) grid.

The kernels are written against primitive arrays only so they compile under
numba's nopython mode; setting QSEARCH_NUMBA=0 (or uninstalling numba) runs
the identical source uncompiled.
"""

from __future__ import annotations

import os

import numpy as np

USE_NUMBA = os.environ.get("QSEARCH_NUMBA", "1").lower() not in ("0", "false", "no")
if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - environment without numba
        USE_NUMBA = False
if not USE_NUMBA:

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda func: func


HALF_PI = np.pi / 2.0

# objective codes
OBJ_SUCCESS = 0
OBJ_BLOCK = 1


@njit(cache=True)
def _env_eval(env_x, env_a, env_b, d):
    """Evaluate the piecewise-linear pairing envelope at depth d."""
    lo, hi = 0, len(env_x) - 1
    while lo < hi:  # rightmost piece with env_x <= d
        mid = (lo + hi + 1) // 2
        if env_x[mid] <= d:
            lo = mid
        else:
            hi = mid - 1
    return env_a[lo] * d + env_b[lo]


@njit(cache=True)
def _completion_bound_ok(
    depth,
    phi,
    beta,
    kg_left,
    kl_left,
    cost_g,
    cost_l,
    rot_g,
    rot_l,
    rot_block,
    objective,
    prob_cap,
    env_x,
    env_a,
    env_b,
    cutoff,
):
    """True if some completion of this node might still beat `cutoff`."""
    kg = 0
    while True:
        block_ang = beta + rot_block * kg
        if block_ang > HALF_PI:
            block_ang = HALF_PI
        d_g = depth + cost_g * kg
        if _env_eval(env_x, env_a, env_b, d_g) >= cutoff:
            return False  # deeper kg only grows the envelope value
        if objective == OBJ_BLOCK:
            p = np.sin(block_ang) ** 2
            if p > prob_cap:
                p = prob_cap
            if p > 0.0 and _env_eval(env_x, env_a, env_b, d_g) / p < cutoff:
                return True
        else:
            kl = 0
            while True:
                ang = phi + rot_l * kl + rot_g * kg
                if ang > block_ang:
                    ang = block_ang
                p = np.sin(ang) ** 2
                if p > prob_cap:
                    p = prob_cap
                d = d_g + cost_l * kl
                if p > 0.0 and _env_eval(env_x, env_a, env_b, d) / p < cutoff:
                    return True
                if ang >= block_ang or kl >= kl_left:
                    break
                kl += 1
        if block_ang >= HALF_PI or kg >= kg_left:
            return False
        kg += 1


@njit(cache=True)
def enumerate_schedules(
    g_mat,  # (3,3) reduced global generator
    loc_c,
    loc_s,  # cos/sin of the local rotation angle 2θ₂
    state0,  # (3,) initial reduced state
    cost_g,
    cost_l,
    jg_cap,
    jl_abs,
    jl_slack,
    jl_ratio,  # locals allowed: min(jl_abs, floor((jl_slack - n_g) * jl_ratio))
    q_cap,
    run_cap_l,
    min_global,  # schedules with fewer globals are explored but not collected
    rot_g,
    rot_l,
    rot_block,
    objective,
    prob_cap,  # candidates must have p <= prob_cap (pass 2.0 to disable)
    prob_floor,  # candidates must have p >= prob_floor (pass -1.0 to disable)
    env_x,
    env_a,
    env_b,  # pairing envelope; trivial envelope = identity line
    best_init,
    depth_cap,
    update_best,  # frontier runs keep the bound frozen at best_init
    stop_on_improve,
    tie_rel,  # relative tie window
    collect_frontier,
    front_depth,
    front_prob,
    front_path,
    front_len,  # preallocated frontier storage
    tie_path,
    tie_len,  # preallocated tie storage; row 0 holds the incumbent path
    max_ops,
):
    """DFS over operator strings.  Returns
    (best_total, best_depth, best_prob, n_tied, front_count, nodes, overflow)."""
    # stack frames, one per tree level
    st_state = np.empty((max_ops + 1, 3), dtype=np.float64)
    st_depth = np.empty(max_ops + 1, dtype=np.float64)
    st_ng = np.empty(max_ops + 1, dtype=np.int64)
    st_nl = np.empty(max_ops + 1, dtype=np.int64)
    st_blocks = np.empty(max_ops + 1, dtype=np.int64)
    st_run = np.empty(max_ops + 1, dtype=np.int64)  # consecutive same-kind count
    st_child = np.empty(max_ops + 1, dtype=np.int64)  # next child branch to try
    st_order0 = np.empty(max_ops + 1, dtype=np.int64)  # first child op (0=G, 1=L)
    path = np.empty(max_ops, dtype=np.uint8)

    st_state[0, 0] = state0[0]
    st_state[0, 1] = state0[1]
    st_state[0, 2] = state0[2]
    st_depth[0] = 0.0
    st_ng[0] = 0
    st_nl[0] = 0
    st_blocks[0] = 0
    st_run[0] = 0
    st_child[0] = 0
    st_order0[0] = 1  # try the local child first by default

    best_total = best_init
    best_depth = np.inf
    best_prob = 0.0
    best_len = -1
    n_tied = 0
    front_count = 0
    nodes = 0
    overflow = 0
    found_improvement = False

    level = 0
    while level >= 0:
        branch = st_child[level]
        if branch >= 2 or (stop_on_improve and found_improvement):
            level -= 1
            continue
        st_child[level] = branch + 1
        op = st_order0[level] if branch == 0 else 1 - st_order0[level]

        if level >= max_ops:
            continue
        # ---- feasibility caps -------------------------------------------
        last_op = path[level - 1] if level > 0 else 2
        ng = st_ng[level]
        nl = st_nl[level]
        blocks = st_blocks[level]
        run = st_run[level]
        if op == 0:
            if ng + 1 > jg_cap:
                continue
            new_ng, new_nl = ng + 1, nl
        else:
            allowed = (jl_slack - ng) * jl_ratio
            lim = jl_abs if jl_abs < allowed else int(allowed)
            if nl + 1 > lim:
                continue
            new_ng, new_nl = ng, nl + 1
            if op == last_op and run + 1 > run_cap_l:
                continue
        new_blocks = blocks if op == last_op else blocks + 1
        if new_blocks > q_cap:
            continue
        new_run = run + 1 if op == last_op else 1
        # locals budget shrinks when globals are appended later; recheck
        if op == 0 and new_nl > (jl_slack - new_ng) * jl_ratio:
            continue

        new_depth = st_depth[level] + (cost_g if op == 0 else cost_l)
        if new_depth > depth_cap:
            continue

        # ---- apply the operator -----------------------------------------
        x0 = st_state[level, 0]
        x1 = st_state[level, 1]
        x2 = st_state[level, 2]
        if op == 0:
            y0 = g_mat[0, 0] * x0 + g_mat[0, 1] * x1 + g_mat[0, 2] * x2
            y1 = g_mat[1, 0] * x0 + g_mat[1, 1] * x1 + g_mat[1, 2] * x2
            y2 = g_mat[2, 0] * x0 + g_mat[2, 1] * x1 + g_mat[2, 2] * x2
        else:
            y0 = loc_c * x0 + loc_s * x1
            y1 = -loc_s * x0 + loc_c * x1
            y2 = x2
        nodes += 1

        # ---- candidate collection ---------------------------------------
        p = y0 * y0 + (y1 * y1 if objective == OBJ_BLOCK else 0.0)
        tie_window = tie_rel * (1.0 + abs(best_total)) if np.isfinite(best_total) else 0.0
        if new_ng >= min_global and prob_floor <= p <= prob_cap and p > 0.0:
            total = _env_eval(env_x, env_a, env_b, new_depth) / p
            if total < best_total + tie_window:
                if total < best_total - tie_window and update_best:
                    best_total = total
                    tie_window = tie_rel * (1.0 + abs(best_total))
                    n_tied = 0
                    best_depth = new_depth
                    best_prob = p
                    best_len = level + 1
                if n_tied < tie_path.shape[0]:
                    for i in range(level):
                        tie_path[n_tied, i] = path[i]
                    tie_path[n_tied, level] = op
                    tie_len[n_tied] = level + 1
                    n_tied += 1
                else:
                    overflow |= 2
                if total < best_init:
                    found_improvement = True
            if collect_frontier:
                front_count = _frontier_insert(
                    front_depth,
                    front_prob,
                    front_path,
                    front_len,
                    front_count,
                    new_depth,
                    p,
                    path,
                    level,
                    op,
                )
                if front_count < 0:
                    front_count = -front_count
                    overflow |= 1

        # ---- bound and descend ------------------------------------------
        at = abs(y0)
        if at > 1.0:
            at = 1.0
        bl = np.sqrt(y0 * y0 + y1 * y1)
        if bl > 1.0:
            bl = 1.0
        phi = np.arcsin(at)
        beta = np.arcsin(bl)
        allowed_l = (jl_slack - new_ng) * jl_ratio
        kl_left = jl_abs - new_nl
        if kl_left > allowed_l - new_nl:
            kl_left = int(allowed_l - new_nl)
        if kl_left < 0:
            kl_left = 0
        bound_ref = best_total if update_best else best_init
        if _completion_bound_ok(
            new_depth,
            phi,
            beta,
            jg_cap - new_ng,
            kl_left,
            cost_g,
            cost_l,
            rot_g,
            rot_l,
            rot_block,
            objective,
            prob_cap if prob_cap < 1.0 else 1.0,
            env_x,
            env_a,
            env_b,
            bound_ref + tie_window,
        ):
            level += 1
            path[level - 1] = op
            st_state[level, 0] = y0
            st_state[level, 1] = y1
            st_state[level, 2] = y2
            st_depth[level] = new_depth
            st_ng[level] = new_ng
            st_nl[level] = new_nl
            st_blocks[level] = new_blocks
            st_run[level] = new_run
            st_child[level] = 0
            # greedy child ordering: try the op whose immediate objective is larger
            gl0 = g_mat[0, 0] * y0 + g_mat[0, 1] * y1 + g_mat[0, 2] * y2
            ll0 = loc_c * y0 + loc_s * y1
            if objective == OBJ_BLOCK:
                gl1 = g_mat[1, 0] * y0 + g_mat[1, 1] * y1 + g_mat[1, 2] * y2
                pg = gl0 * gl0 + gl1 * gl1
                pl = ll0 * ll0 + (-loc_s * y0 + loc_c * y1) ** 2
            else:
                pg = gl0 * gl0
                pl = ll0 * ll0
            st_order0[level] = 0 if pg >= pl else 1

    return best_total, best_depth, best_prob, best_len, n_tied, front_count, nodes, overflow


@njit(cache=True)
def _frontier_insert(fd, fp, fpath, flen, count, depth, prob, path, level, op):
    """Insert (depth, prob) into the Pareto staircase (depth and prob ascending).

    Returns the new count, negated once on capacity overflow (entry dropped).
    """
    lo, hi = 0, count - 1
    while lo <= hi:  # rightmost entry with fd <= depth
        mid = (lo + hi) // 2
        if fd[mid] <= depth:
            lo = mid + 1
        else:
            hi = mid - 1
    pos = lo  # entries [0, pos) have depth <= `depth`
    if pos > 0 and fp[pos - 1] >= prob:
        return count  # dominated
    # entries [pos, drop) are dominated by the new point and vanish
    drop = pos
    while drop < count and fp[drop] <= prob:
        drop += 1
    tail = count - drop
    new_count = pos + 1 + tail
    if new_count > fd.shape[0]:
        return -count
    if drop > pos + 1:  # shift the tail left
        for i in range(tail):
            fd[pos + 1 + i] = fd[drop + i]
            fp[pos + 1 + i] = fp[drop + i]
            flen[pos + 1 + i] = flen[drop + i]
            fpath[pos + 1 + i] = fpath[drop + i]
    elif drop == pos:  # shift the tail right by one, back to front
        for i in range(tail - 1, -1, -1):
            fd[pos + 1 + i] = fd[drop + i]
            fp[pos + 1 + i] = fp[drop + i]
            flen[pos + 1 + i] = flen[drop + i]
            fpath[pos + 1 + i] = fpath[drop + i]
    fd[pos] = depth
    fp[pos] = prob
    for i in range(level):
        fpath[pos, i] = path[i]
    fpath[pos, level] = op
    flen[pos] = level + 1
    return new_count


@njit(cache=True)
def max_locals_schedule(
    g_mat,
    loc_c,
    loc_s,
    state0,
    cost_g,
    cost_l,
    jg_cap,
    jl_abs,
    jl_slack,
    jl_ratio,
    q_cap,
    run_cap_l,
    rot_block,
    prob_floor,
    best_path,
    max_ops,
):
    """Among schedules with block probability >= prob_floor, maximize the local
    operator count, breaking ties by lowest depth.  Returns
    (best_locals, best_depth, best_prob, best_len, nodes)."""
    st_state = np.empty((max_ops + 1, 3), dtype=np.float64)
    st_depth = np.empty(max_ops + 1, dtype=np.float64)
    st_ng = np.empty(max_ops + 1, dtype=np.int64)
    st_nl = np.empty(max_ops + 1, dtype=np.int64)
    st_blocks = np.empty(max_ops + 1, dtype=np.int64)
    st_run = np.empty(max_ops + 1, dtype=np.int64)
    st_child = np.empty(max_ops + 1, dtype=np.int64)
    path = np.empty(max_ops, dtype=np.uint8)

    st_state[0] = state0
    st_depth[0] = 0.0
    st_ng[0] = 0
    st_nl[0] = 0
    st_blocks[0] = 0
    st_run[0] = 0
    st_child[0] = 0

    best_locals = -1
    best_depth = np.inf
    best_prob = 0.0
    best_len = -1
    nodes = 0

    level = 0
    while level >= 0:
        branch = st_child[level]
        if branch >= 2:
            level -= 1
            continue
        st_child[level] = branch + 1
        op = 1 - branch  # locals first: they are the objective
        if level >= max_ops:
            continue
        last_op = path[level - 1] if level > 0 else 2
        ng, nl = st_ng[level], st_nl[level]
        run = st_run[level]
        if op == 0:
            if ng + 1 > jg_cap:
                continue
            new_ng, new_nl = ng + 1, nl
        else:
            allowed = (jl_slack - ng) * jl_ratio
            lim = jl_abs if jl_abs < allowed else int(allowed)
            if nl + 1 > lim:
                continue
            if op == last_op and run + 1 > run_cap_l:
                continue
            new_ng, new_nl = ng, nl + 1
        new_blocks = st_blocks[level] + (0 if op == last_op else 1)
        if new_blocks > q_cap:
            continue
        if op == 0 and new_nl > (jl_slack - new_ng) * jl_ratio:
            continue
        new_run = run + 1 if op == last_op else 1
        new_depth = st_depth[level] + (cost_g if op == 0 else cost_l)

        x0, x1, x2 = st_state[level, 0], st_state[level, 1], st_state[level, 2]
        if op == 0:
            y0 = g_mat[0, 0] * x0 + g_mat[0, 1] * x1 + g_mat[0, 2] * x2
            y1 = g_mat[1, 0] * x0 + g_mat[1, 1] * x1 + g_mat[1, 2] * x2
            y2 = g_mat[2, 0] * x0 + g_mat[2, 1] * x1 + g_mat[2, 2] * x2
        else:
            y0 = loc_c * x0 + loc_s * x1
            y1 = -loc_s * x0 + loc_c * x1
            y2 = x2
        nodes += 1

        p_block = y0 * y0 + y1 * y1
        if p_block >= prob_floor:
            better = new_nl > best_locals or (new_nl == best_locals and new_depth < best_depth)
            if better:
                best_locals = new_nl
                best_depth = new_depth
                best_prob = p_block
                best_len = level + 1
                for i in range(level):
                    best_path[i] = path[i]
                best_path[level] = op

        # prune: remaining locals potential and block-probability reachability
        allowed_l = (jl_slack - new_ng) * jl_ratio
        rem = jl_abs - new_nl
        if rem > allowed_l - new_nl:
            rem = int(allowed_l - new_nl)
        if rem < 0:
            rem = 0
        potential = new_nl + rem
        if potential < best_locals:
            continue
        if potential == best_locals and new_depth + rem * cost_l >= best_depth:
            continue
        bl = np.sqrt(p_block)
        if bl > 1.0:
            bl = 1.0
        max_block_ang = np.arcsin(bl) + rot_block * (jg_cap - new_ng)
        if max_block_ang < HALF_PI and np.sin(max_block_ang) ** 2 < prob_floor:
            continue
        level += 1
        path[level - 1] = op
        st_state[level, 0] = y0
        st_state[level, 1] = y1
        st_state[level, 2] = y2
        st_depth[level] = new_depth
        st_ng[level] = new_ng
        st_nl[level] = new_nl
        st_blocks[level] = new_blocks
        st_run[level] = new_run
        st_child[level] = 0
    return best_locals, best_depth, best_prob, best_len, nodes
