"""numba kernels for the per-step hot loops.

Status codes, direction order and the order of random draws match the pure
Python functions in ``behavior``, ``movement`` and ``intervention``; the test
suite checks the two paths draw-for-draw.
"""

import numba as nb
import numpy as np

HEALTHY = 0
INCUBATING = 1
ZOMBIE = 2
DEAD = 3

POLICY_NONE = 0
POLICY_STRICT = 1
POLICY_LEAKY = 2

DX = np.array([1, 1, 0, -1, -1, -1, 0, 1], dtype=np.int64)
DY = np.array([0, 1, 1, 1, 0, -1, -1, -1], dtype=np.int64)


def zombie_cdf_table() -> np.ndarray:
    """Cumulative uniform weights over the available directions, per 8-bit mask."""
    table = np.zeros((256, 8), dtype=np.float64)
    for mask in range(256):
        n = bin(mask).count("1")
        if n == 0:
            continue
        w = [1.0 / n if mask >> k & 1 else 0.0 for k in range(8)]
        table[mask] = np.cumsum(w)
    return table


@nb.njit(cache=True)
def _find(parent, j):
    root = j
    while parent[root] != root:
        root = parent[root]
    while parent[j] != root:
        nxt = parent[j]
        parent[j] = root
        j = nxt
    return root


@nb.njit(cache=True)
def _encounter(rng, beh):
    """0 zombie killed, 1 human infected, 2 human escaped."""
    u = rng.random()
    if u < beh[0]:
        won = rng.random() < beh[3]
    elif u < beh[0] + beh[1]:
        if rng.random() < beh[4]:
            return 2
        won = rng.random() < beh[5]
    else:
        won = rng.random() < beh[6]
    return 0 if won else 1


@nb.njit(cache=True)
def promote(status, infected_at, hour, incubation_steps):
    n_promoted = 0
    for i in range(status.shape[0]):
        if status[i] == INCUBATING and hour - infected_at[i] >= incubation_steps:
            status[i] = ZOMBIE
            n_promoted += 1
    return n_promoted


@nb.njit(cache=True)
def interaction_phase(rng, status, infected_at, px, py, width, n_cells, hour, beh):
    """Resolve every zombie-occupied cell.  Returns (zombies_killed, humans_infected).

    Within a cell each zombie, in agent-id order, meets each still-healthy
    human in agent-id order until the zombie dies or runs out of humans.
    """
    n = status.shape[0]
    zc = np.zeros(n_cells + 1, dtype=np.int64)
    n_z = 0
    for i in range(n):
        if status[i] == ZOMBIE:
            zc[py[i] * width + px[i]] += 1
            n_z += 1
    if n_z == 0:
        return 0, 0
    hc = np.zeros(n_cells + 1, dtype=np.int64)
    n_h = 0
    for i in range(n):
        if status[i] == HEALTHY:
            c = py[i] * width + px[i]
            if zc[c] > 0:
                hc[c] += 1
                n_h += 1
    if n_h == 0:
        return 0, 0

    # exclusive prefix sums -> bucket starts
    zstart = np.empty(n_cells + 1, dtype=np.int64)
    hstart = np.empty(n_cells + 1, dtype=np.int64)
    zs = 0
    hs = 0
    for c in range(n_cells + 1):
        zstart[c] = zs
        hstart[c] = hs
        zs += zc[c]
        hs += hc[c]
    zfill = zstart.copy()
    hfill = hstart.copy()
    zlist = np.empty(n_z, dtype=np.int64)
    hlist = np.empty(n_h, dtype=np.int64)
    for i in range(n):
        s = status[i]
        if s == ZOMBIE:
            c = py[i] * width + px[i]
            zlist[zfill[c]] = i
            zfill[c] += 1
        elif s == HEALTHY:
            c = py[i] * width + px[i]
            if zc[c] > 0:
                hlist[hfill[c]] = i
                hfill[c] += 1

    # parent[j] == j while hlist[j] is healthy; infected slots link to j + 1
    parent = np.arange(n_h + 1)
    killed = 0
    infected = 0
    for c in range(n_cells):
        if zc[c] == 0 or hc[c] == 0:
            continue
        h_end = hstart[c] + hc[c]
        for zi in range(zstart[c], zstart[c] + zc[c]):
            z = zlist[zi]
            j = _find(parent, hstart[c])
            while j < h_end:
                outcome = _encounter(rng, beh)
                if outcome == 0:
                    status[z] = DEAD
                    killed += 1
                    break
                if outcome == 1:
                    h = hlist[j]
                    status[h] = INCUBATING
                    infected_at[h] = hour
                    infected += 1
                    parent[j] = j + 1
                j = _find(parent, j + 1)
    return killed, infected


@nb.njit(cache=True)
def _pick(cdf_row, u):
    # first k with u < cdf[k]; that k always has positive weight
    k = 0
    for j in range(8):
        k += cdf_row[j] <= u
    if k == 8:
        # u fell in the rounding slack above the total: take the last positive weight
        prev = 0.0
        for j in range(8):
            if cdf_row[j] > prev:
                k = j
            prev = cdf_row[j]
    return k


@nb.njit(cache=True)
def _isqrt(v):
    r = np.int64(np.sqrt(np.float64(v)))
    while r * r > v:
        r -= 1
    while (r + 1) * (r + 1) <= v:
        r += 1
    return r


@nb.njit(cache=True)
def _central(dx, dy):
    best = 0
    best_d2 = -1
    for k in range(8):
        ex = dx - DX[k]
        ey = dy - DY[k]
        d2 = ex * ex + ey * ey
        if best_d2 < 0 or d2 < best_d2:
            best = k
            best_d2 = d2
    return best


@nb.njit(cache=True)
def _human_cdf(dx, dy, mask, mp, out):
    """Cumulative substep weights for arbitrary offset and mask (slow path)."""
    n_avail = 0
    for k in range(8):
        if mask >> k & 1:
            n_avail += 1
    w = np.zeros(8)
    uniform = True
    if dx != 0 or dy != 0:
        c = _central(dx, dy)
        h = 0
        for k in (c, (c + 7) % 8, (c + 1) % 8):
            if mask >> k & 1:
                h += 1
        a = n_avail - h
        x = _isqrt(dx * dx + dy * dy)
        if h > 0:
            if x >= mp[3]:
                uniform = False
                for k in (c, (c + 7) % 8, (c + 1) % 8):
                    if mask >> k & 1:
                        w[k] = 1.0 / h
            elif a > 0:
                uniform = False
                xe = min(x, mp[2])
                p_home = (3 * mp[0] + xe * mp[1]) / h
                p_away = (5 * mp[0] - xe * mp[1]) / a
                for k in range(8):
                    if mask >> k & 1:
                        w[k] = p_away
                for k in (c, (c + 7) % 8, (c + 1) % 8):
                    if mask >> k & 1:
                        w[k] = p_home
    if uniform:
        for k in range(8):
            if mask >> k & 1:
                w[k] = 1.0 / n_avail
    acc = 0.0
    for k in range(8):
        acc += w[k]
        out[k] = acc


@nb.njit(cache=True)
def _crossing(rng, inside_src, inside_dst, is_zombie, policy_kind, leak):
    """0 allow, 1 stop, 2 kill; only called when the policy is active."""
    if inside_src == inside_dst:
        return 0
    if not inside_src:
        return 1
    if policy_kind == POLICY_LEAKY and rng.random() < leak:
        return 0
    return 2 if is_zombie else 1


@nb.njit(cache=True)
def movement_phase(rng, status, px, py, hx, hy, width, masks, quar, zcdf, hcdf, radius, mp,
                   policy_kind, policy_active, leak, counts):
    """Move every live agent in id order.

    ``counts`` receives (healthy, incubating, zombies, dead, infected_outside).
    Returns the number of zombies killed at the border.
    """
    n = status.shape[0]
    scratch = np.empty(8)
    border_kills = 0
    for k in range(5):
        counts[k] = 0
    for i in range(n):
        s = status[i]
        if s == DEAD:
            counts[DEAD] += 1
            continue
        if s == HEALTHY:
            for _sub in range(2):
                x = np.int64(px[i])
                y = np.int64(py[i])
                c = y * width + x
                mask = masks[c]
                if mask == 0:
                    continue
                dx = np.int64(hx[i]) - x
                dy = np.int64(hy[i]) - y
                u = rng.random()
                if mask == 255 and -radius <= dx <= radius and -radius <= dy <= radius:
                    k = _pick(hcdf[dx + radius, dy + radius], u)
                else:
                    _human_cdf(dx, dy, mask, mp, scratch)
                    k = _pick(scratch, u)
                nx = x + DX[k]
                ny = y + DY[k]
                if policy_active:
                    nc = ny * width + nx
                    if quar[c] != quar[nc]:
                        if _crossing(rng, quar[c], quar[nc], False, policy_kind, leak) != 0:
                            continue
                px[i] = nx
                py[i] = ny
            counts[HEALTHY] += 1
            continue

        x = np.int64(px[i])
        y = np.int64(py[i])
        c = y * width + x
        mask = masks[c]
        if mask != 0:
            k = _pick(zcdf[mask], rng.random())
            nx = x + DX[k]
            ny = y + DY[k]
            verdict = 0
            if policy_active:
                nc = ny * width + nx
                if quar[c] != quar[nc]:
                    verdict = _crossing(rng, quar[c], quar[nc], s == ZOMBIE, policy_kind, leak)
            if verdict == 0:
                px[i] = nx
                py[i] = ny
                c = ny * width + nx
            elif verdict == 2:
                status[i] = DEAD
                border_kills += 1
                counts[DEAD] += 1
                continue
        counts[s] += 1
        if not quar[c]:
            counts[4] += 1
    return border_kills


@nb.njit(cache=True)
def cell_counts(status, px, py, width, n_cells, out_h, out_z):
    """Per-cell healthy and live-zombie (zombie + incubating) occupancy."""
    for c in range(n_cells):
        out_h[c] = 0
        out_z[c] = 0
    for i in range(status.shape[0]):
        s = status[i]
        if s == DEAD:
            continue
        c = py[i] * width + px[i]
        if s == HEALTHY:
            out_h[c] += 1
        else:
            out_z[c] += 1
