"""The spacer transform in two dimensions.

A point of the image carries three coordinates per site: a horizontal ribbon
flag (``H`` or ``0``), a vertical ribbon flag (``V`` or ``0``) and a letter.
Letters of the base alphabet sit only where a horizontal and a vertical
ribbon cross, at the lexicographically least site of the crossing.  Ribbon
pair (i, j) carries the base letter at position (j, i) of the base point.
"""

from __future__ import annotations

import random
from typing import Iterable, Optional

from .grid2d import (
    H,
    V,
    Z,
    LegalityError,
    Pattern2D,
    Rect,
    RibbonPath,
    _components8,
    _steps_ok,
    crossing_map,
    random_ribbon_stack,
    render_stack,
    ribbon_trace,
    trace_vertical,
    xh_rules,
    xv_rules,
)

BLetter = tuple[str, str, str]
EMPTY: BLetter = (Z, Z, Z)


class AlphabetClashError(ValueError):
    pass


class ConsistencyError(ValueError):
    pass


class MoveError(ValueError):
    """A meander move that would leave the shift; ``gap`` names the offending gap."""

    def __init__(self, msg: str, gap: Optional[int] = None, where=None):
        super().__init__(msg)
        self.gap = gap
        self.where = where


def _check_base(A: Iterable[str]) -> list[str]:
    A = sorted(set(A))
    bad = [a for a in A if a in (Z, H, V) or len(a) != 1]
    if bad:
        raise AlphabetClashError(f"base letters {bad} clash with the flag symbols or are not single characters")
    return A


def alphabet_b(A: Iterable[str]) -> set[BLetter]:
    A = _check_base(A)
    out = {(Z, Z, Z), (Z, V, Z), (H, Z, Z)}
    out.update((H, V, c) for c in A + [Z])
    return out


def _as_keyed(t) -> dict:
    if t is None:
        return {}
    if isinstance(t, Pattern2D):
        return dict(t.cells)
    return dict(t)


def superimpose(xh: Pattern2D, xv: Pattern2D, t=None) -> Pattern2D:
    """Stack two flag windows and write ``t[(i, j)]`` at the crossing of ribbons i and j."""
    if xh.shape != xv.shape:
        raise ConsistencyError("flag windows must have the same shape")
    if not xh_rules().validate(xh) or not xv_rules().validate(xv):
        raise LegalityError("flag windows must be legal")
    t = _as_keyed(t)
    _check_base(t.values())
    sites = crossing_map(xh, xv) if t else {}
    missing = [k for k in t if k not in sites]
    if missing:
        raise ConsistencyError(f"no fully visible crossing for ribbon pairs {sorted(missing)}")
    at = {sites[k]: a for k, a in t.items()}
    return Pattern2D({c: (xh[c], xv[c], at.get(c, Z)) for c in xh.cells})


def split_layers(w: Pattern2D) -> tuple[Pattern2D, Pattern2D, Pattern2D]:
    xh = w.map_letters(lambda a: a[0])
    xv = w.map_letters(lambda a: a[1])
    letters = w.map_letters(lambda a: a[2])
    return xh, xv, letters


def project_f2(w: Pattern2D) -> tuple[Pattern2D, Pattern2D, dict]:
    """Flag layers and the base letters read off the fully visible crossings.

    Letters are keyed by ribbon pair (horizontal index, vertical index).
    """
    xh, xv, letters = split_layers(w)
    for c, a in w.cells.items():
        if a[0] not in (Z, H) or a[1] not in (Z, V):
            raise ConsistencyError(f"bad flag at {c}")
        if a[2] != Z and (a[0], a[1]) != (H, V):
            raise ConsistencyError(f"letter {a[2]!r} off a crossing at {c}")
    if not xh_rules().validate(xh) or not xv_rules().validate(xv):
        raise ConsistencyError("flag layers are not legal ribbon windows")
    sites = crossing_map(xh, xv)
    least = {c: k for k, c in sites.items()}
    both = {c for c, a in w.cells.items() if a[0] == H and a[1] == V}
    t = {}
    for comp in _components8(both):
        lettered = [c for c in comp if letters[c] != Z]
        first = min(comp)
        if first not in least:
            continue  # crossing runs off the window
        for c in lettered:
            if c != first:
                raise ConsistencyError(f"letter at {c}, not the least site {first} of its crossing")
        if lettered:
            t[least[first]] = letters[first]
    return xh, xv, t


def base_pattern(t: dict) -> Pattern2D:
    """Ribbon-pair letters laid out as a base pattern: pair (i, j) goes to (j, i)."""
    return Pattern2D({(j, i): a for (i, j), a in t.items()})


def to_text(w: Pattern2D) -> str:
    xh, xv, letters = split_layers(w)
    head, *g1 = xh.to_text().splitlines()
    g2 = xv.to_text().splitlines()[1:]
    g3 = letters.to_text().splitlines()[1:]
    return "\n".join([head, "# H", *g1, "# V", *g2, "# letters", *g3]) + "\n"


def from_text(text: str) -> Pattern2D:
    lines = text.strip().splitlines()
    head, blocks = lines[0], []
    for ln in lines[1:]:
        if ln.startswith("# "):
            blocks.append([])
        else:
            blocks[-1].append(ln)
    if len(blocks) != 3:
        raise ConsistencyError("expected H, V and letter grids")
    ps = [Pattern2D.from_text("\n".join([head] + b)) for b in blocks]
    return Pattern2D({c: (ps[0][c], ps[1][c], ps[2][c]) for c in ps[0].cells})


# generation


def random_flag_windows(rng: random.Random, rect: Rect) -> tuple[Pattern2D, Pattern2D]:
    """Independent random legal horizontal and vertical flag windows on ``rect``."""
    pad = 6

    def one(r: Rect) -> Pattern2D:
        count = (r.height + 2 * pad) // 2 + 4
        stack = random_ribbon_stack(rng, r.x0 - pad, r.x1 + pad, count, base=r.y0 - pad - 8)
        return render_stack(stack, r)

    xh = one(rect)
    tr = one(Rect(rect.y0, rect.x0, rect.y1, rect.x1))
    xv = tr.transpose().map_letters(lambda a: V if a == H else a)
    return xh, xv


def random_instance(rng: random.Random, rect: Rect, A=("a", "b"), density: float = 0.7):
    xh, xv = random_flag_windows(rng, rect)
    keys = sorted(crossing_map(xh, xv))
    t = {k: rng.choice(list(A)) for k in keys if rng.random() < density}
    return xh, xv, t


# the meander move


def _h_picture(flags: Pattern2D, letter: str) -> Pattern2D:
    """The flag layer as horizontal ribbons over {0, H}."""
    if letter == H:
        return flags
    return flags.transpose().map_letters(lambda a: H if a == V else a)


def _from_h_picture(p: Pattern2D, letter: str) -> Pattern2D:
    if letter == H:
        return p
    return p.transpose().map_letters(lambda a: V if a == H else a)


def _boundaries(spans: dict, cols: range) -> Optional[list[int]]:
    """Boundary heights h[x0-1 .. x1] of a ribbon visible on every column."""
    if any(x not in spans for x in cols):
        return None
    h = []
    for x in list(cols)[:-1]:
        a = set(range(spans[x][0], spans[x][1] + 1)) & set(range(spans[x + 1][0], spans[x + 1][1] + 1))
        if len(a) != 1:
            return None
        h.append(a.pop())
    def other_end(span, known):
        lo, hi = span
        return hi if known == lo else lo

    if not h:
        left, right = spans[cols[0]]
    else:
        left = other_end(spans[cols[0]], h[0])
        right = other_end(spans[cols[-1]], h[-1])
    return [left] + h + [right]


def _move_h(p: Pattern2D, region: Rect, sign: int) -> Pattern2D:
    """Shift horizontal ribbons meeting ``region`` up or down by one across its columns."""
    b = p.bbox()
    dec = ribbon_trace(p)
    cols = range(b.x0, b.x1 + 1)
    movers = [r for r in dec.ribbons if any(c in region for c in r.cells)]
    cells = dict(p.cells)
    for r in movers:
        h = _boundaries(r.spans, cols)
        if h is None:
            raise MoveError("a designated ribbon is not fully visible in the window")
        # h[k] is the boundary after column b.x0 - 1 + k
        new = list(h)
        for x in range(region.x0, region.x1):
            new[x - b.x0 + 1] += sign
        if not _steps_ok(new):
            raise MoveError("the move makes a ribbon meander twice in a row")
        for c in r.cells:
            cells[c] = Z
        path = RibbonPath(b.x0 - 1, new)
        for x in cols:
            lo, hi = path.span(x)
            for y in range(lo, hi + 1):
                if (x, y) not in b:
                    raise MoveError("a moved ribbon leaves the window")
                if cells[(x, y)] == H:
                    raise MoveError("ribbons collide", gap=0, where=(x, y))
                cells[(x, y)] = H
    out = Pattern2D(cells)
    gaps = ribbon_trace(out, check=False).gaps
    for x, runs in sorted(gaps.items()):
        for g in runs:
            if g not in (2, 3, 4):
                raise MoveError(f"gap {g} in column {x}", gap=g, where=x)
    if not xh_rules().validate(out):
        raise MoveError("moved window breaks the ribbon rules")
    return out


def _index_map(old, new) -> dict:
    """Old ribbon index -> new index, matching ribbons by shared cells."""
    out = {}
    for r in old.ribbons:
        best = max(new.ribbons, key=lambda s: len(r.cells & s.cells))
        if not r.cells & best.cells:
            raise MoveError("lost track of a ribbon")
        out[r.index] = best.index
    return out


def meander_move(w: Pattern2D, axis: str, sign: int, region: Optional[Rect], frame: int = 5) -> Pattern2D:
    """Move the ribbons meeting ``region`` one unit along ``axis``.

    ``axis="horizontal"`` moves vertical ribbons sideways, ``"vertical"``
    moves horizontal ribbons up or down.  The region must keep clear of the
    outer frame, which is therefore left unchanged; letters follow their
    crossings.
    """
    if axis not in ("horizontal", "vertical") or sign not in (1, -1):
        raise ValueError("axis is 'horizontal' or 'vertical' and sign is +1 or -1")
    xh, xv, t = project_f2(w)
    if region is None or region.width <= 0 or region.height <= 0:
        return w
    b = w.bbox()
    inner = Rect(b.x0 + frame, b.y0 + frame, b.x1 - frame, b.y1 - frame)
    if not (inner.x0 <= region.x0 and region.x1 <= inner.x1 and inner.y0 <= region.y0 and region.y1 <= inner.y1):
        raise MoveError(f"region must stay inside the thickness-{frame} frame")
    letter = V if axis == "horizontal" else H
    flags = xv if letter == V else xh
    pic = _h_picture(flags, letter)
    reg = region if letter == H else Rect(region.y0, region.x0, region.y1, region.x1)
    moved = _from_h_picture(_move_h(pic, reg, sign), letter)
    nh, nv = (xh, moved) if letter == V else (moved, xv)
    hmap = _index_map(ribbon_trace(xh, check=False), ribbon_trace(nh, check=False))
    vmap = _index_map(trace_vertical(xv, check=False), trace_vertical(nv, check=False))
    t2 = {(hmap[i], vmap[j]): a for (i, j), a in t.items()}
    try:
        out = superimpose(nh, nv, t2)
    except (ConsistencyError, LegalityError) as e:
        raise MoveError(f"move breaks a crossing: {e}") from None
    if not frame_equal(w, out, frame):
        raise MoveError(f"a moved ribbon reaches the thickness-{frame} frame")
    return out


def frame_equal(a: Pattern2D, b: Pattern2D, thickness: int = 5) -> bool:
    box = a.bbox()
    if box != b.bbox():
        return False
    return all(a[c] == b[c] for c in a.cells if box.on_frame(c, thickness))


def is_consistent(w: Pattern2D, complete: bool = False) -> bool:
    """Flags legal and letters only at least crossing sites.

    With ``complete`` every fully visible crossing must also carry a letter,
    as in the image of a point (every base site holds a letter).
    """
    try:
        xh, xv, t = project_f2(w)
    except (ConsistencyError, LegalityError):
        return False
    if complete:
        return len(t) == len(crossing_map(xh, xv))
    return True


def locally_consistent(w: Pattern2D, radius: int = 7, complete: bool = False) -> bool:
    """:func:`is_consistent` on every radius x radius sub-window (or the whole window if smaller)."""
    b = w.bbox()
    rw, rh = min(radius, b.width), min(radius, b.height)
    for y in range(b.y0, b.y1 - rh + 2):
        for x in range(b.x0, b.x1 - rw + 2):
            sub = w.restrict(Rect(x, y, x + rw - 1, y + rh - 1).cells())
            if not is_consistent(sub, complete):
                return False
    return True
