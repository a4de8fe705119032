import math
from fractions import Fraction

import numpy as np
import pytest

from manhattan_sle import estimators
from manhattan_sle.lattice import HALF_PLANE
from manhattan_sle.percolation import (
    BLACK,
    WHITE,
    HexColoring,
    InterfacePath,
    generate_interface,
    interface_crossings,
    validate_interface,
    _between_hex,
    _explorer_move,
)
from manhattan_sle.rng import SampleStream
from manhattan_sle.walker import FirstCircleHit, StepCount, segment_crossings


def test_first_step_forced_upward():
    for seed in range(8):
        p = generate_interface(StepCount(5), SampleStream(seed, 0))
        assert p.vertices[0] == (0, 0)
        assert p.vertices[1] == (0, 2)  # (0, 1) in real coordinates


def test_degenerate_colorings_hug_the_boundary():
    w = generate_interface(StepCount(40), HexColoring(forced=WHITE))
    assert all(b <= 3 for _, b in w.vertices)  # stays on the boundary row
    assert w.vertices[-1][0] < -30  # walks off to the left
    b = generate_interface(StepCount(40), HexColoring(forced=BLACK))
    assert all(bb <= 3 for _, bb in b.vertices)
    assert b.vertices[-1][0] > 30
    validate_interface(w)
    validate_interface(b)


def test_color_queries_frozen():
    col = HexColoring(source=SampleStream(4, 0))
    values = [col.query(3, 2) for _ in range(10)]
    assert len(set(values)) == 1
    assert col.query(-5, 1) == col.query(-5, 1)
    # boundary row never sampled
    assert col.query(7, 0) == WHITE and col.query(-7, 0) == BLACK
    assert (7, 0) not in col.colors
    with pytest.raises(ValueError):
        col.query(0, -1)


def test_generated_interfaces_valid():
    for seed in range(40):
        p = generate_interface(StepCount(600), SampleStream(13, seed))
        validate_interface(p)
        assert all(b >= 0 for _, b in p.vertices)


def test_interface_edges_unit_length():
    p = generate_interface(StepCount(200), SampleStream(2, 0))
    pos = p.positions()
    for (x0, y0), (x1, y1) in zip(pos, pos[1:]):
        assert math.hypot(x1 - x0, y1 - y0) == pytest.approx(1.0, abs=1e-12)


def test_straight_segment_crossing():
    p = generate_interface(StepCount(3), SampleStream(1, 1))
    rec = interface_crossings(p, 0.5)
    assert rec.first_hit_angle == pytest.approx(math.pi / 2)
    assert rec.crossings[0] == pytest.approx(math.pi / 2)


def test_crossing_parity_against_endpoint_side():
    R = 5.3
    for seed in range(60):
        p = generate_interface(StepCount(300), SampleStream(21, seed))
        rec = interface_crossings(p, R)
        a, b = p.vertices[-1]
        outside = 0.25 * (3 * a * a + b * b) > R * R
        assert (len(rec.crossings) % 2 == 1) == outside
        for ang in rec.crossings:
            assert 0 < ang < math.pi


def _enumerate_explorer_exact(radius):
    """Oracle: exhaustive enumeration over the colours of every hexagon
    reachable before the first circle hit."""
    r2 = radius * radius
    out = {}

    def pos(v):
        return (v[0] * math.sqrt(3) / 2, v[1] * 0.5)

    def rec(prev, cur, colors, prob):
        a, b = cur
        if 0.25 * (3 * a * a + b * b) > r2:
            rec_cross = segment_crossings([pos(prev), pos(cur)], radius, (0, 0), lambda t: t)
            ang = rec_cross.first_hit_angle
            out[round(ang, 12)] = out.get(round(ang, 12), Fraction(0)) + prob
            return
        q, r = _between_hex(prev[0], prev[1], a, b)
        if r == 0:
            choices = [(WHITE if q >= 0 else BLACK, prob)]
        elif (q, r) in colors:
            choices = [(colors[(q, r)], prob)]
        else:
            choices = [(WHITE, prob / 2), (BLACK, prob / 2)]
        for color, pr in choices:
            colors2 = dict(colors)
            colors2[(q, r)] = color
            nxt = _explorer_move(prev[0], prev[1], a, b, color)
            rec((a, b), nxt, colors2, pr)

    rec((0, 0), (0, 2), {}, Fraction(1))
    return out


def test_exact_enumeration_matches_monte_carlo():
    radius = 3.3
    exact = _enumerate_explorer_exact(radius)
    assert sum(exact.values()) == 1
    angles = np.array(sorted(exact))
    probs = np.array([float(exact[a]) for a in angles])
    M = 8000
    counts = np.zeros(len(angles))
    for i in range(M):
        p = generate_interface(FirstCircleHit(radius), SampleStream(31, i))
        rec = interface_crossings(p, radius)
        j = int(np.argmin(np.abs(angles - rec.first_hit_angle)))
        assert abs(angles[j] - rec.first_hit_angle) < 1e-9
        counts[j] += 1
    sig = np.sqrt(probs * (1 - probs) / M)
    z = (counts / M - probs) / np.maximum(sig, 1e-12)
    assert np.abs(z).max() < 4.0


def test_explorer_kernel_matches_reference():
    rp = estimators.RunParams(N0=300, f=(1.0,), r=(1.2, 1.2), samples=120, master_seed=77)
    curves = estimators.run_passright("halfplane", rp, workers=1, grid_size=48)
    R = 1.2 * 300 ** (4 / 7)
    acc = estimators.PassrightAccumulator(HALF_PLANE, 48, max_step=300)
    for i in range(120):
        s = SampleStream(77, i)
        s.uniform()
        path = generate_interface(StepCount(300), s)
        acc.add(interface_crossings(path, R))
    ref = acc.to_curve()
    assert np.array_equal(np.round(curves[0].value * 120), np.round(ref.value * 120))


def test_validate_interface_rejects_corruption():
    p = generate_interface(StepCount(50), SampleStream(3, 3))
    bad = InterfacePath(list(p.vertices), p.coloring)
    bad.vertices[10] = (bad.vertices[10][0] + 2, bad.vertices[10][1])
    with pytest.raises(ValueError):
        validate_interface(bad)
