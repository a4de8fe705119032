"""Numba kernels for bulk Monte Carlo.

These reproduce walker.generate_walk / percolation.generate_interface
bit-for-bit (same splitmix64 streams, same draw order) and are tested
against the pure-Python implementations sample-by-sample.  Hitting runs
use a stamped bitmap for the visited set (the walk is confined to the
stop disc); step-count runs use a stamped open-addressing hash table,
since the walk's range is unbounded.

Hash slots pack everything into one uint64 so a probe costs one load:
21-bit offset coordinates (so N0 is capped at 2^20 - 4 steps), 22-bit
sample stamp (21 + color bit for the explorer).  Stale entries are
invalidated by the stamp; the driver re-zeroes the table when the stamp
counter would wrap.

All uint64 arithmetic stays in uint64 (numba promotes mixed int64/uint64
to float64, which would corrupt the RNG).
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

U64 = np.uint64
GOLDEN = U64(0x9E3779B97F4A7C15)
MIX1 = U64(0xBF58476D1CE4E5B9)
MIX2 = U64(0x94D049BB133111EB)
ONE64 = U64(1)
INV_2_53 = 1.1102230246251565e-16  # 2^-53

COORD_OFF = 1 << 20  # packed coords are offsets from the pole
COORD_LIMIT = COORD_OFF - 4
STAMP_BITS = 22
STAMP_MASK = U64((1 << STAMP_BITS) - 1)
STAMP_MAX = (1 << STAMP_BITS) - 2
ESTAMP_BITS = 21  # explorer: one bit of the stamp field holds the color
ESTAMP_MASK = U64((1 << ESTAMP_BITS) - 1)
ESTAMP_MAX = (1 << ESTAMP_BITS) - 2
ECOLOR_BIT = U64(1 << ESTAMP_BITS)

# counters layout shared by all kernels
N_COUNTERS = 6
C_TRAPS = 0
C_REDRAWS = 1
C_REJECTS = 2
C_STEPS = 3
C_STAMP = 4
C_OVERFLOW = 5

SQRT3_2 = math.sqrt(3.0) / 2.0


@njit(cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> U64(30))) * MIX1
    z = (z ^ (z >> U64(27))) * MIX2
    return z ^ (z >> U64(31))


@njit(cache=True, inline="always")
def _stream_init(master, index):
    return _mix(master + (index + ONE64) * GOLDEN)


@njit(cache=True, inline="always")
def _next_word(state):
    state = state + GOLDEN
    return state, _mix(state)


@njit(cache=True, inline="always")
def _uniform(state):
    state, z = _next_word(state)
    return state, (z >> U64(11)) * INV_2_53


@njit(cache=True, inline="always")
def _is_boundary(code, bx0, x, y):
    if code == 0:  # slit plane: dashed line on row 1 from column bx0
        return y == 1 and x >= bx0
    if code == 1:  # 90 degree wedge: interior is {x >= 2, y >= 2}
        return x <= 1 or y <= 1
    return x >= 1 and y >= 1  # 270 degree wedge: forbidden closed quadrant


@njit(cache=True, inline="always")
def _pack21(dx, dy):
    """42-bit key from coordinates relative to the pole, |d| < 2^20."""
    return (U64(dx + COORD_OFF) << U64(21)) | U64(dy + COORD_OFF)


@njit(cache=True, inline="always")
def _probe(table, shift, mask, key42, cur):
    """(found, slot): found if key42 is live under stamp cur, else the
    free slot where it would be inserted."""
    idx = np.int64((key42 * GOLDEN) >> shift)
    key_shift = key42 << U64(STAMP_BITS)
    while True:
        v = table[idx]
        if (v & STAMP_MASK) != cur:
            return False, idx
        if (v >> U64(STAMP_BITS)) << U64(STAMP_BITS) == key_shift:
            return True, idx
        idx = (idx + 1) & mask


@njit(cache=True)
def hitting_kernel(
    code,
    bx0,
    cx,
    cy,
    sx,
    sy,
    r_lo,
    r_hi,
    n_samples,
    start_index,
    master_seed,
    hist,
    grid_bins,
    theta_min,
    theta_span,
    stamp,
    side,
    half,
    counters,
):
    """First-hit histogram for `n_samples` walks; R ~ U[r_lo, r_hi] per
    sample (r_lo == r_hi gives fixed R).  hist has grid_bins+1 slots."""
    two_pi = 2.0 * math.pi
    wrap_lo = theta_span > math.pi  # ranges past pi wrap atan2 results
    inv_bin = (grid_bins + 1) / theta_span
    master = U64(master_seed)
    for i in range(n_samples):
        state = _stream_init(master, U64(start_index + i))
        bits = U64(0)
        nbits = 0
        done = False
        while not done:
            state, u = _uniform(state)
            radius = r_lo + (r_hi - r_lo) * u
            r2 = radius * radius
            counters[C_STAMP] += 1
            cur = np.int32(counters[C_STAMP])
            x = sx
            y = sy
            stamp[(x - cx + half) * side + (y - cy + half)] = cur
            redraw = False
            while True:
                hx = 1 - ((y & 1) << 1)
                vy = 1 - ((x & 1) << 1)
                x1 = x + hx
                x2 = x
                y2 = y + vy
                ok1 = (not _is_boundary(code, bx0, x1, y)) and stamp[
                    (x1 - cx + half) * side + (y - cy + half)
                ] != cur
                ok2 = (not _is_boundary(code, bx0, x2, y2)) and stamp[
                    (x2 - cx + half) * side + (y2 - cy + half)
                ] != cur
                if ok1 and ok2:
                    if nbits == 0:
                        state, bits = _next_word(state)
                        nbits = 64
                    take1 = (bits & ONE64) == U64(0)
                    bits >>= ONE64
                    nbits -= 1
                elif ok1:
                    take1 = True
                elif ok2:
                    take1 = False
                else:
                    counters[C_TRAPS] += 1
                    counters[C_REJECTS] += 1
                    done = True
                    break
                if take1:
                    nx = x1
                    ny = y
                else:
                    nx = x2
                    ny = y2
                stamp[(nx - cx + half) * side + (ny - cy + half)] = cur
                counters[C_STEPS] += 1
                dx = nx - cx
                dy = ny - cy
                d2 = np.float64(dx * dx + dy * dy)
                if d2 > r2:
                    bx = np.float64(x - cx)
                    by = np.float64(y - cy)
                    ex = np.float64(nx - x)
                    ey = np.float64(ny - y)
                    bdot = bx * ex + by * ey
                    t = -bdot + math.sqrt(
                        bdot * bdot - (bx * bx + by * by - r2)
                    )
                    theta = math.atan2(by + t * ey, bx + t * ex)
                    if wrap_lo and theta <= 0.0:
                        theta += two_pi
                    k = np.int64((theta - theta_min) * inv_bin)
                    if k < 0:
                        k = 0
                    elif k > grid_bins:
                        k = grid_bins
                    hist[k] += 1
                    done = True
                    break
                if d2 == r2:
                    counters[C_REDRAWS] += 1
                    redraw = True
                    break
                x = nx
                y = ny
            if redraw:
                continue


@njit(cache=True, inline="always")
def _record_crossings(
    bx, by, ex, ey, prev_out, new_out, r2, theta_min, wrap_lo,
    cross_angle, cross_step, ncross, step,
):
    """Append 0, 1 or 2 crossings of one unit edge; returns the new count
    or -1 on buffer overflow.  Angles are stored relative to theta_min."""
    two_pi = 2.0 * math.pi
    bdot = bx * ex + by * ey
    nroots = 0
    t0 = 0.0
    t1 = 0.0
    if prev_out != new_out:
        disc = math.sqrt(bdot * bdot - (bx * bx + by * by - r2))
        t0 = (-bdot - disc) if prev_out else (-bdot + disc)
        nroots = 1
    elif prev_out:
        # both endpoints outside: a near-tangent edge can cross twice
        if -1.0 < bdot < 0.0:
            b2 = bx * bx + by * by
            if b2 - bdot * bdot < r2:
                disc = math.sqrt(bdot * bdot - (b2 - r2))
                t0 = -bdot - disc
                t1 = -bdot + disc
                nroots = 2
    for k in range(nroots):
        t = t0 if k == 0 else t1
        theta = math.atan2(by + t * ey, bx + t * ex)
        if wrap_lo and theta <= 0.0:
            theta += two_pi
        if ncross >= cross_angle.shape[0]:
            return -1
        cross_angle[ncross] = theta - theta_min
        cross_step[ncross] = step
        ncross += 1
    return ncross


@njit(cache=True)
def _parity_accumulate(grid_rel, out_counts, fi, angles):
    """out_counts[fi, g] += parity of #(crossing angles below grid_rel[g])."""
    angles.sort()
    j = 0
    m = angles.shape[0]
    for g in range(grid_rel.shape[0]):
        while j < m and angles[j] < grid_rel[g]:
            j += 1
        out_counts[fi, g] += j & 1


@njit(cache=True)
def passright_kernel(
    code,
    bx0,
    cx,
    cy,
    sx,
    sy,
    r_lo,
    r_hi,
    n_steps,
    f_steps,
    n_samples,
    start_index,
    master_seed,
    grid_rel,
    out_counts,
    table,
    log2size,
    cross_angle,
    cross_step,
    theta_min,
    theta_span,
    counters,
):
    """Pass-right counts on the grid for every usable fraction at once."""
    wrap_lo = theta_span > math.pi
    mask = np.int64((1 << log2size) - 1)
    shift = U64(64 - log2size)
    master = U64(master_seed)
    nf = f_steps.shape[0]
    # any edge crossing the circle has both endpoints within r_hi + 1
    far2 = np.int64(math.ceil((r_hi + 1.0) * (r_hi + 1.0))) + 1
    for i in range(n_samples):
        state = _stream_init(master, U64(start_index + i))
        bits = U64(0)
        nbits = 0
        done = False
        while not done:
            state, u = _uniform(state)
            radius = r_lo + (r_hi - r_lo) * u
            r2 = radius * radius
            counters[C_STAMP] += 1
            if counters[C_STAMP] > STAMP_MAX:
                table[:] = U64(0)
                counters[C_STAMP] = 1
            cur = U64(counters[C_STAMP])
            x = sx
            y = sy
            found, slot = _probe(table, shift, mask, _pack21(x - cx, y - cy), cur)
            table[slot] = (_pack21(x - cx, y - cy) << U64(STAMP_BITS)) | cur
            dxp = np.int64(x - cx)
            dyp = np.int64(y - cy)
            d2p = dxp * dxp + dyp * dyp
            prev_out = np.float64(d2p) > r2
            ncross = 0
            redraw = False
            failed = False
            for step in range(n_steps):
                hx = 1 - ((y & 1) << 1)
                vy = 1 - ((x & 1) << 1)
                x1 = x + hx
                x2 = x
                y2 = y + vy
                ok1 = False
                slot1 = np.int64(-1)
                if not _is_boundary(code, bx0, x1, y):
                    f1, slot1 = _probe(
                        table, shift, mask, _pack21(x1 - cx, y - cy), cur
                    )
                    ok1 = not f1
                ok2 = False
                slot2 = np.int64(-1)
                if not _is_boundary(code, bx0, x2, y2):
                    f2, slot2 = _probe(
                        table, shift, mask, _pack21(x2 - cx, y2 - cy), cur
                    )
                    ok2 = not f2
                if ok1 and ok2:
                    if nbits == 0:
                        state, bits = _next_word(state)
                        nbits = 64
                    take1 = (bits & ONE64) == U64(0)
                    bits >>= ONE64
                    nbits -= 1
                elif ok1:
                    take1 = True
                elif ok2:
                    take1 = False
                else:
                    counters[C_TRAPS] += 1
                    failed = True
                    break
                if take1:
                    nx = x1
                    ny = y
                    table[slot1] = (_pack21(nx - cx, ny - cy) << U64(STAMP_BITS)) | cur
                else:
                    nx = x2
                    ny = y2
                    table[slot2] = (_pack21(nx - cx, ny - cy) << U64(STAMP_BITS)) | cur
                counters[C_STEPS] += 1
                dx = np.int64(nx - cx)
                dy = np.int64(ny - cy)
                d2 = dx * dx + dy * dy
                if d2 <= far2 or d2p <= far2:
                    if np.float64(d2) == r2:
                        counters[C_REDRAWS] += 1
                        redraw = True
                        break
                    new_out = np.float64(d2) > r2
                    res = _record_crossings(
                        np.float64(dxp),
                        np.float64(dyp),
                        np.float64(nx - x),
                        np.float64(ny - y),
                        prev_out,
                        new_out,
                        r2,
                        theta_min,
                        wrap_lo,
                        cross_angle,
                        cross_step,
                        ncross,
                        step,
                    )
                    if res == -1:
                        counters[C_OVERFLOW] += 1
                        failed = True
                        break
                    ncross = res
                    prev_out = new_out
                else:
                    prev_out = True
                x = nx
                y = ny
                dxp = dx
                dyp = dy
                d2p = d2
            if redraw:
                continue
            done = True
            if failed:
                counters[C_REJECTS] += 1
                continue
            for fi in range(nf):
                m = np.searchsorted(cross_step[:ncross], f_steps[fi])
                _parity_accumulate(grid_rel, out_counts, fi, cross_angle[:m].copy())


@njit(cache=True)
def walk_property_kernel(
    code, bx0, cx, cy, sx, sy, n_steps, n_samples, master_seed, stamp, side, half
):
    """Bulk non-trapping / validity check: returns (traps, bad_steps,
    boundary_hits, min_len, max_len) over n_samples StepCount walks.
    Walks leaving the scratch window are truncated (counted complete)."""
    traps = 0
    bad = 0
    bhits = 0
    min_len = np.int64(1 << 60)
    max_len = np.int64(0)
    master = U64(master_seed)
    stamp_val = np.int32(0)
    for i in range(n_samples):
        state = _stream_init(master, U64(i))
        bits = U64(0)
        nbits = 0
        stamp_val += 1
        x = sx
        y = sy
        stamp[(x - cx + half) * side + (y - cy + half)] = stamp_val
        length = 1
        for _ in range(n_steps):
            hx = 1 - ((y & 1) << 1)
            vy = 1 - ((x & 1) << 1)
            x1 = x + hx
            x2 = x
            y2 = y + vy
            if abs(x1 - cx) >= half or abs(y2 - cy) >= half:
                break
            ok1 = (not _is_boundary(code, bx0, x1, y)) and stamp[
                (x1 - cx + half) * side + (y - cy + half)
            ] != stamp_val
            ok2 = (not _is_boundary(code, bx0, x2, y2)) and stamp[
                (x2 - cx + half) * side + (y2 - cy + half)
            ] != stamp_val
            if ok1 and ok2:
                if nbits == 0:
                    state, bits = _next_word(state)
                    nbits = 64
                take1 = (bits & ONE64) == U64(0)
                bits >>= ONE64
                nbits -= 1
            elif ok1:
                take1 = True
            elif ok2:
                take1 = False
            else:
                traps += 1
                break
            if take1:
                nx = x1
                ny = y
            else:
                nx = x2
                ny = y2
            if _is_boundary(code, bx0, nx, ny):
                bhits += 1
            if abs(nx - x) + abs(ny - y) != 1:
                bad += 1
            stamp[(nx - cx + half) * side + (ny - cy + half)] = stamp_val
            x = nx
            y = ny
            length += 1
        if length < min_len:
            min_len = length
        if length > max_len:
            max_len = length
    return traps, bad, bhits, min_len, max_len


# ---------------------------------------------------------------------------
# percolation explorer


@njit(cache=True, inline="always")
def _hex_color(q, r, table, shift, mask, cur, state, bits, nbits):
    """Color of hexagon (q, r); row 0 is fixed by the boundary condition,
    higher rows are drawn lazily from the sample stream and frozen.
    The color occupies the bit above the (21-bit) stamp field."""
    if r == 0:
        return np.int64(1 if q >= 0 else 0), state, bits, nbits
    key42 = _pack21(q, r)
    idx = np.int64((key42 * GOLDEN) >> shift)
    key_shift = key42 << U64(STAMP_BITS)
    while True:
        v = table[idx]
        if (v & ESTAMP_MASK) != cur:
            if nbits == 0:
                state, bits = _next_word(state)
                nbits = 64
            c = np.int64(bits & ONE64)
            bits >>= ONE64
            nbits -= 1
            table[idx] = key_shift | (U64(c) << U64(ESTAMP_BITS)) | cur
            return c, state, bits, nbits
        if (v >> U64(STAMP_BITS)) << U64(STAMP_BITS) == key_shift:
            return np.int64((v & ECOLOR_BIT) >> U64(ESTAMP_BITS)), state, bits, nbits
        idx = (idx + 1) & mask


@njit(cache=True, inline="always")
def _explorer_move(pa, pb, a, b, color):
    """Next vertex of the interface given the between-hex color (1=white).
    Vertex coordinates are integers with position (A*sqrt(3)/2, B/2)."""
    da = a - pa
    db = b - pb
    if db == -2:  # top-class vertex, arrived travelling down
        return (a + 1, b - 1) if color else (a - 1, b - 1)
    if db == 2:  # bottom-class vertex, arrived travelling up
        return (a - 1, b + 1) if color else (a + 1, b + 1)
    if b % 3 == 0:  # top-class vertex, diagonal arrival
        if da == 1:  # travelling up-right
            return (a, b + 2) if color else (a + 1, b - 1)
        return (a - 1, b - 1) if color else (a, b + 2)
    if da == 1:  # bottom-class vertex, travelling down-right
        return (a + 1, b + 1) if color else (a, b - 2)
    return (a, b - 2) if color else (a - 1, b + 1)


@njit(cache=True, inline="always")
def _between_hex(pa, pb, a, b):
    """Hexagon wedged between the two candidate exits at vertex (a, b)."""
    da = a - pa
    db = b - pb
    if b % 3 == 0:
        r = b // 3 - 1
        q = (a - 1 - r) // 2
        if db == -2:
            return q, r
        if da == 1:
            return q, r + 1
        return q - 1, r + 1
    r = (b + 1) // 3
    q = (a - 1 - r) // 2
    if db == 2:
        return q, r
    if da == 1:
        return q + 1, r - 1
    return q, r - 1


@njit(cache=True)
def explorer_passright_kernel(
    r_lo,
    r_hi,
    n_steps,
    f_steps,
    n_samples,
    start_index,
    master_seed,
    grid_rel,
    out_counts,
    table,
    log2size,
    cross_angle,
    cross_step,
    counters,
):
    """Pass-right counts for the half-plane percolation explorer."""
    mask = np.int64((1 << log2size) - 1)
    shift = U64(64 - log2size)
    master = U64(master_seed)
    nf = f_steps.shape[0]
    far2 = math.ceil(4.0 * (r_hi + 1.0) * (r_hi + 1.0)) + 1.0  # on 3A^2+B^2
    for i in range(n_samples):
        state = _stream_init(master, U64(start_index + i))
        bits = U64(0)
        nbits = 0
        done = False
        while not done:
            state, u = _uniform(state)
            radius = r_lo + (r_hi - r_lo) * u
            r2 = radius * radius
            counters[C_STAMP] += 1
            if counters[C_STAMP] > ESTAMP_MAX:
                table[:] = U64(0)
                counters[C_STAMP] = 1
            cur = U64(counters[C_STAMP])
            # first edge is forced: (0,0) -> (0,2) in vertex coordinates
            pa = 0
            pb = 0
            a = 0
            b = 2
            prev_out = False  # the start vertex is the pole
            pq2 = 0.0  # quarter distance numerator 3A^2+B^2 of prev vertex
            ncross = 0
            redraw = False
            failed = False
            step = 0
            while True:
                q2 = np.float64(3 * a * a + b * b)
                if q2 <= far2 or pq2 <= far2:
                    d2 = 0.25 * q2
                    if d2 == r2:
                        counters[C_REDRAWS] += 1
                        redraw = True
                        break
                    new_out = d2 > r2
                    res = _record_crossings(
                        np.float64(pa) * SQRT3_2,
                        np.float64(pb) * 0.5,
                        np.float64(a - pa) * SQRT3_2,
                        np.float64(b - pb) * 0.5,
                        prev_out,
                        new_out,
                        r2,
                        0.0,
                        False,
                        cross_angle,
                        cross_step,
                        ncross,
                        step,
                    )
                    if res == -1:
                        counters[C_OVERFLOW] += 1
                        failed = True
                        break
                    ncross = res
                    prev_out = new_out
                else:
                    prev_out = True
                counters[C_STEPS] += 1
                step += 1
                if step == n_steps:
                    break
                q, r = _between_hex(pa, pb, a, b)
                if r < 0:
                    counters[C_TRAPS] += 1  # must never happen
                    failed = True
                    break
                color, state, bits, nbits = _hex_color(
                    q, r, table, shift, mask, cur, state, bits, nbits
                )
                na, nb = _explorer_move(pa, pb, a, b, color)
                pa = a
                pb = b
                a = na
                b = nb
                pq2 = q2
            if redraw:
                continue
            done = True
            if failed:
                counters[C_REJECTS] += 1
                continue
            for fi in range(nf):
                m = np.searchsorted(cross_step[:ncross], f_steps[fi])
                _parity_accumulate(grid_rel, out_counts, fi, cross_angle[:m].copy())
