import random

import pytest
from hypothesis import given, settings, strategies as st

from balshift.grid2d import H, V, Z, Pattern2D, Rect, flat_xh, flat_xv, trace_vertical
from balshift.spacer2d import (
    AlphabetClashError,
    ConsistencyError,
    MoveError,
    alphabet_b,
    base_pattern,
    frame_equal,
    from_text,
    is_consistent,
    locally_consistent,
    meander_move,
    project_f2,
    random_instance,
    superimpose,
    to_text,
)

FLAT = Rect(0, 0, 24, 24)


def _flat(t=None):
    return superimpose(flat_xh(FLAT), flat_xv(FLAT), t)


def test_alphabet_sizes():
    assert len(alphabet_b("a")) == 5
    assert len(alphabet_b("ab")) == 6
    assert len(alphabet_b("")) == 4
    with pytest.raises(AlphabetClashError):
        alphabet_b("H")


def test_flat_superimpose():
    w = _flat({(1, 2): "a", (3, 1): "b"})
    assert w[(8, 4)] == (H, V, "a")
    assert w[(4, 12)] == (H, V, "b")
    assert sum(1 for a in w.cells.values() if a[2] != Z) == 2
    _, _, t = project_f2(w)
    assert t == {(1, 2): "a", (3, 1): "b"}
    assert base_pattern(t) == Pattern2D({(2, 1): "a", (1, 3): "b"})
    assert from_text(to_text(w)) == w


def test_empty_letters():
    w = _flat()
    assert all(a[2] == Z for a in w.cells.values())
    assert project_f2(w)[2] == {}


def test_project_errors():
    w = _flat({(1, 1): "a"})
    cells = dict(w.cells)
    # a letter on a second site of a crossing cannot happen on flat ribbons,
    # so put one off any crossing instead
    cells[(5, 5)] = (Z, Z, "a")
    with pytest.raises(ConsistencyError):
        project_f2(Pattern2D(cells))
    cells = dict(w.cells)
    cells[(4, 1)] = (Z, V, "b")
    with pytest.raises(ConsistencyError):
        project_f2(Pattern2D(cells))
    with pytest.raises(ConsistencyError):
        superimpose(flat_xh(FLAT), flat_xv(FLAT), {(40, 40): "a"})


def test_letter_at_non_least_site():
    # a diagonal ribbon step makes a two-site crossing
    w = _flat({(2, 2): "a"})
    m = meander_move(w, "horizontal", 1, Rect(8, 8, 8, 12))
    both = sorted(c for c, a in m.cells.items() if a[0] == H and a[1] == V and 7 <= c[0] <= 10 and 7 <= c[1] <= 9)
    assert len(both) >= 2
    lettered = [c for c in both if m[c][2] != Z]
    assert lettered == [min(both)] or not lettered
    cells = dict(m.cells)
    first = min(both)
    cells[first] = (H, V, Z)
    cells[both[1]] = (H, V, "a")
    assert not is_consistent(Pattern2D(cells))


def test_meander_example():
    w = _flat({(2, 2): "a", (1, 1): "b"})
    m = meander_move(w, "horizontal", 1, Rect(8, 8, 8, 12))
    xh, xv, t = project_f2(m)
    assert t == {(2, 2): "a", (1, 1): "b"}
    gaps = trace_vertical(xv).gaps
    assert {g for row in gaps.values() for g in row} == {2, 3, 4}
    assert frame_equal(w, m, 5)
    # moving the left neighbour away opens a gap of five
    with pytest.raises(MoveError):
        meander_move(m, "horizontal", -1, Rect(4, 8, 4, 12))
    # a second move next to the first is allowed
    meander_move(m, "horizontal", 1, Rect(12, 8, 12, 12))


def test_meander_edge_cases():
    w = _flat({(1, 1): "a"})
    assert meander_move(w, "vertical", 1, None) == w
    assert meander_move(w, "vertical", 1, Rect(8, 8, 7, 8)) == w
    with pytest.raises(MoveError):
        meander_move(w, "vertical", 1, Rect(0, 0, 3, 3))
    with pytest.raises(ValueError):
        meander_move(w, "diagonal", 1, Rect(8, 8, 9, 9))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["horizontal", "vertical"]), st.sampled_from([1, -1]))
def test_moves_keep_frame_and_letters(seed, axis, sign):
    rng = random.Random(seed)
    rect = Rect(0, 0, 19, 19)
    xh, xv, t = random_instance(rng, rect)
    w = superimpose(xh, xv, t)
    x, y = rng.randint(5, 12), rng.randint(5, 12)
    try:
        m = meander_move(w, axis, sign, Rect(x, y, x + rng.randint(0, 2), y + rng.randint(0, 2)))
    except MoveError:
        return
    assert frame_equal(w, m, 5)
    _, _, t2 = project_f2(m)
    assert sorted(t2.values()) == sorted(t.values())
    assert is_consistent(m)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_distinct_bases_give_distinct_images(seed):
    rng = random.Random(seed)
    xh, xv, t = random_instance(rng, Rect(0, 0, 15, 15), density=1.0)
    if not t:
        return
    k = sorted(t)[0]
    t2 = dict(t)
    t2[k] = "b" if t[k] == "a" else "a"
    w1, w2 = superimpose(xh, xv, t), superimpose(xh, xv, t2)
    assert w1 != w2
    assert base_pattern(project_f2(w1)[2]) != base_pattern(project_f2(w2)[2])


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6), st.booleans())
def test_local_and_global_consistency_agree(seed, corrupt):
    rng = random.Random(seed)
    xh, xv, t = random_instance(rng, Rect(0, 0, 11, 11))
    w = superimpose(xh, xv, t)
    if corrupt:
        cells = dict(w.cells)
        c = rng.choice(sorted(cells))
        h, v, a = cells[c]
        cells[c] = (h, v, "a" if a == Z else Z)
        w = Pattern2D(cells)
    assert is_consistent(w) == locally_consistent(w)
