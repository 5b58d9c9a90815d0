"""Two-dimensional patterns, SFTs, backtracking fill and the ribbon shifts.

Coordinates are ``(x, y)`` with x growing to the right and y growing upward.
Text grids print the top row first.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Dict, Hashable, Iterable, Optional, Sequence

import networkx as nx

Coord = tuple[int, int]
Letter = Hashable


class PatternError(ValueError):
    pass


class LegalityError(ValueError):
    pass


class GrowthError(RuntimeError):
    pass


@dataclass(frozen=True)
class Rect:
    """Inclusive integer rectangle ``[x0, x1] x [y0, y1]``."""

    x0: int
    y0: int
    x1: int
    y1: int

    @property
    def width(self) -> int:
        return self.x1 - self.x0 + 1

    @property
    def height(self) -> int:
        return self.y1 - self.y0 + 1

    def cells(self) -> list[Coord]:
        return [(x, y) for y in range(self.y0, self.y1 + 1) for x in range(self.x0, self.x1 + 1)]

    def __contains__(self, c) -> bool:
        x, y = c
        return self.x0 <= x <= self.x1 and self.y0 <= y <= self.y1

    def grow(self, dx: int, dy: Optional[int] = None) -> "Rect":
        dy = dx if dy is None else dy
        return Rect(self.x0 - dx, self.y0 - dy, self.x1 + dx, self.y1 + dy)

    def on_frame(self, c: Coord, thickness: int) -> bool:
        x, y = c
        return (
            x < self.x0 + thickness
            or x > self.x1 - thickness
            or y < self.y0 + thickness
            or y > self.y1 - thickness
        )


class Pattern2D:
    """Finite map from sites to letters; the shape is the key set."""

    def __init__(self, cells: Optional[Dict[Coord, Letter]] = None):
        self.cells: Dict[Coord, Letter] = dict(cells or {})

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], origin: Coord = (0, 0)) -> "Pattern2D":
        """Build from rows listed top first; ``origin`` is the bottom-left site."""
        x0, y0 = origin
        h = len(rows)
        cells = {}
        for r, row in enumerate(rows):
            y = y0 + h - 1 - r
            for c, a in enumerate(row):
                if a != ".":
                    cells[(x0 + c, y)] = a
        return cls(cells)

    @classmethod
    def fill(cls, rect: Rect, fn: Callable[[int, int], Letter]) -> "Pattern2D":
        return cls({(x, y): fn(x, y) for x, y in rect.cells()})

    @property
    def shape(self) -> frozenset:
        return frozenset(self.cells)

    def __len__(self):
        return len(self.cells)

    def __getitem__(self, c: Coord):
        return self.cells[c]

    def get(self, c: Coord, default=None):
        return self.cells.get(c, default)

    def __contains__(self, c):
        return c in self.cells

    def __eq__(self, other):
        return isinstance(other, Pattern2D) and self.cells == other.cells

    def __hash__(self):
        return hash(frozenset(self.cells.items()))

    def __repr__(self):
        return f"Pattern2D({len(self.cells)} cells, bbox={self.bbox()})"

    def bbox(self) -> Optional[Rect]:
        if not self.cells:
            return None
        xs = [x for x, _ in self.cells]
        ys = [y for _, y in self.cells]
        return Rect(min(xs), min(ys), max(xs), max(ys))

    def is_rectangle(self) -> bool:
        b = self.bbox()
        return b is None or len(self.cells) == b.width * b.height

    def translate(self, dx: int, dy: int) -> "Pattern2D":
        return Pattern2D({(x + dx, y + dy): a for (x, y), a in self.cells.items()})

    def normalized(self) -> "Pattern2D":
        b = self.bbox()
        return self if b is None else self.translate(-b.x0, -b.y0)

    def restrict(self, shape: Iterable[Coord]) -> "Pattern2D":
        return Pattern2D({c: self.cells[c] for c in shape if c in self.cells})

    def map_letters(self, fn: Callable[[Letter], Letter]) -> "Pattern2D":
        return Pattern2D({c: fn(a) for c, a in self.cells.items()})

    def transpose(self) -> "Pattern2D":
        return Pattern2D({(y, x): a for (x, y), a in self.cells.items()})

    def rotate90(self) -> "Pattern2D":
        """Counterclockwise quarter turn about the origin."""
        return Pattern2D({(-y, x): a for (x, y), a in self.cells.items()})

    def letters(self) -> set:
        return set(self.cells.values())

    def overlay(self, other: "Pattern2D") -> "Pattern2D":
        out = dict(self.cells)
        out.update(other.cells)
        return Pattern2D(out)

    def to_text(self, show: Callable[[Letter], str] = str) -> str:
        b = self.bbox()
        if b is None:
            return "@0,0 0x0\n"
        lines = [f"@{b.x0},{b.y0} {b.width}x{b.height}"]
        for y in range(b.y1, b.y0 - 1, -1):
            lines.append(
                "".join(show(self.cells[(x, y)]) if (x, y) in self.cells else "." for x in range(b.x0, b.x1 + 1))
            )
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Pattern2D":
        lines = [ln.rstrip() for ln in text.strip().splitlines()]
        head = lines[0]
        if not head.startswith("@"):
            raise PatternError("pattern text needs an '@x,y WxH' header")
        pos, _, size = head[1:].partition(" ")
        x0, y0 = (int(v) for v in pos.split(","))
        rows = lines[1:]
        if size:
            w, h = (int(v) for v in size.split("x"))
            if len(rows) != h or any(len(r) != w for r in rows):
                raise PatternError("pattern text does not match its header size")
        return cls.from_rows(rows, (x0, y0))


def _shape_key(p: Pattern2D) -> tuple[tuple[Coord, ...], tuple]:
    q = p.normalized()
    offs = tuple(sorted(q.cells))
    return offs, tuple(q.cells[o] for o in offs)


class Sft2D:
    def __init__(self, alphabet: Iterable[Letter], forbidden: Iterable[Pattern2D], type_t: Optional[int] = None):
        self.alphabet = tuple(alphabet)
        self.forbidden = [p.normalized() for p in forbidden]
        for p in self.forbidden:
            if not p.cells:
                raise PatternError("forbidden patterns must be nonempty")
            if not p.letters() <= set(self.alphabet):
                raise PatternError("forbidden pattern uses letters outside the alphabet")
        boxes = [p.bbox() for p in self.forbidden]
        derived = max((max(b.width, b.height) for b in boxes), default=1)
        self.type_t = derived if type_t is None else type_t
        if self.type_t < derived:
            raise PatternError(f"type {self.type_t} is smaller than a forbidden shape ({derived})")
        self.by_shape: dict[tuple[Coord, ...], set[tuple]] = {}
        for p in self.forbidden:
            offs, vals = _shape_key(p)
            self.by_shape.setdefault(offs, set()).add(vals)

    def forbidden_keys(self) -> set:
        return {_shape_key(p) for p in self.forbidden}

    def _check_alphabet(self, p: Pattern2D):
        extra = p.letters() - set(self.alphabet)
        if extra:
            raise PatternError(f"letters {sorted(map(str, extra))} are not in the alphabet")

    def violations(self, p: Pattern2D) -> list[tuple[Coord, tuple[Coord, ...]]]:
        """Anchors and shapes of forbidden occurrences inside ``p``."""
        self._check_alphabet(p)
        cells = p.cells
        out = []
        for offs, bad in self.by_shape.items():
            ox, oy = offs[0]
            for (cx, cy) in cells:
                ax, ay = cx - ox, cy - oy
                vals = []
                for dx, dy in offs:
                    v = cells.get((ax + dx, ay + dy))
                    if v is None:
                        break
                    vals.append(v)
                else:
                    if tuple(vals) in bad:
                        out.append(((ax, ay), offs))
        return out

    def validate(self, p: Pattern2D) -> bool:
        return not self.violations(p)

    def placements(self, target: Rect) -> list[tuple[tuple[Coord, ...], set, list[Coord]]]:
        out = []
        for offs, bad in self.by_shape.items():
            w = max(dx for dx, _ in offs)
            h = max(dy for _, dy in offs)
            for ay in range(target.y0, target.y1 - h + 1):
                for ax in range(target.x0, target.x1 - w + 1):
                    out.append((offs, bad, [(ax + dx, ay + dy) for dx, dy in offs]))
        return out


def validate_pattern(X: Sft2D, p: Pattern2D) -> bool:
    return X.validate(p)


def full_shift_2d(alphabet: Iterable[Letter]) -> Sft2D:
    return Sft2D(alphabet, [])


def fill_rectangle(
    X: Sft2D,
    partial: Pattern2D,
    target: Rect,
    domains: Optional[Dict[Coord, Sequence[Letter]]] = None,
    prefer: Optional[Callable[[Coord], Letter]] = None,
    order: Optional[Sequence[Coord]] = None,
    max_steps: int = 2_000_000,
) -> Optional[Pattern2D]:
    """Complete ``partial`` to a locally legal pattern on ``target``.

    Backtracking over the cells in ``order`` (row-major by default).  Every
    forbidden placement inside the target is checked as soon as its last cell
    is assigned.  ``domains`` restricts the letters per cell and ``prefer``
    names a letter to try first.  Returns None when no completion exists
    (or when ``max_steps`` is exhausted, which raises instead).
    """
    if not partial.shape <= set(target.cells()):
        raise PatternError("partial pattern sticks out of the target rectangle")
    X._check_alphabet(partial)
    cells = list(order) if order is not None else target.cells()
    if set(cells) != set(target.cells()):
        raise PatternError("order must list every target cell once")
    pos = {c: i for i, c in enumerate(cells)}
    checks: list[list] = [[] for _ in cells]
    for offs, bad, sites in X.placements(target):
        last = max(sites, key=pos.__getitem__)
        checks[pos[last]].append((sites, bad))

    def options(c):
        if c in partial.cells:
            return [partial.cells[c]]
        opts = list(domains[c]) if domains and c in domains else list(X.alphabet)
        if prefer is not None:
            p = prefer(c)
            if p in opts:
                opts.remove(p)
                opts.insert(0, p)
        return opts

    assign: dict = {}
    opts = [None] * len(cells)
    ptr = [0] * len(cells)
    i = 0
    steps = 0
    while 0 <= i < len(cells):
        c = cells[i]
        if opts[i] is None:
            opts[i] = options(c)
            ptr[i] = 0
        placed = False
        while ptr[i] < len(opts[i]):
            steps += 1
            if steps > max_steps:
                raise GrowthError(f"fill search exceeded {max_steps} steps")
            a = opts[i][ptr[i]]
            ptr[i] += 1
            assign[c] = a
            if all(tuple(assign[s] for s in sites) not in bad for sites, bad in checks[i]):
                placed = True
                break
        if placed:
            i += 1
        else:
            assign.pop(c, None)
            opts[i] = None
            i -= 1
    if i < 0:
        return None
    return Pattern2D(assign)


# the ribbon shifts

H, V, Z = "H", "V", "0"


def _plus(center, n, e, s, w) -> Pattern2D:
    cells = {(1, 1): center}
    for c, a in zip([(1, 2), (2, 1), (1, 0), (0, 1)], (n, e, s, w)):
        cells[c] = a
    return Pattern2D(cells)


def _column(word: str) -> Pattern2D:
    # word listed bottom to top
    return Pattern2D({(0, k): a for k, a in enumerate(word)})


def xh_rules() -> Sft2D:
    """Forbidden list of the horizontal ribbon shift over {0, H}."""
    F = []
    # column gaps in {2,3,4}, no vertical H triples
    F.append(_column("H0H"))
    F.append(_column("00000"))
    F.append(_column("HHH"))
    # every H has exactly two H among its four neighbours
    for bits in range(16):
        nbrs = [H if bits >> k & 1 else Z for k in range(4)]
        if nbrs.count(H) != 2:
            F.append(_plus(H, *nbrs))
    # diagonal H pairs share exactly one H neighbour
    for other in (Z, H):
        F.append(Pattern2D({(0, 0): H, (1, 1): H, (1, 0): other, (0, 1): other}))
        F.append(Pattern2D({(0, 1): H, (1, 0): H, (0, 0): other, (1, 1): other}))
    # the middle of a diagonal H triple has H on both sides
    for up in (True, False):
        diag = [(0, 0), (1, 1), (2, 2)] if up else [(0, 2), (1, 1), (2, 0)]
        for left, right in ((Z, Z), (Z, H), (H, Z)):
            cells = {c: H for c in diag}
            cells[(0, 1)] = left
            cells[(2, 1)] = right
            F.append(Pattern2D(cells))
    return Sft2D((Z, H), F, type_t=5)


def xv_rules() -> Sft2D:
    h = xh_rules()
    F = [p.rotate90().map_letters(lambda a: V if a == H else a) for p in h.forbidden]
    return Sft2D((Z, V), F, type_t=h.type_t)


def flat_xh(rect: Rect, period: int = 4) -> Pattern2D:
    """The point with flat horizontal ribbons on rows y = 0 mod 4, on ``rect``."""
    return Pattern2D.fill(rect, lambda x, y: H if y % period == 0 else Z)


def flat_xv(rect: Rect, period: int = 4) -> Pattern2D:
    return Pattern2D.fill(rect, lambda x, y: V if x % period == 0 else Z)


def x0_letter(c: Coord) -> str:
    return H if c[1] % 4 == 0 else Z


# ribbon model
#
# A horizontal ribbon is described by boundary heights h[x]: the row at which
# it passes from column x to column x+1.  Column x holds the cells between
# h[x-1] and h[x]; consecutive boundaries differ by at most one, and two
# neighbouring columns may not both change height.


@dataclass
class RibbonPath:
    """Boundary heights ``h[x]`` for ``x`` in ``[start, start + len(h) - 1]``."""

    start: int
    h: list[int]

    @property
    def first_col(self) -> int:
        return self.start + 1

    @property
    def last_col(self) -> int:
        return self.start + len(self.h) - 1

    def height(self, x: int) -> int:
        """Boundary height, extended flat beyond the stored range."""
        k = x - self.start
        if k < 0:
            return self.h[0]
        if k >= len(self.h):
            return self.h[-1]
        return self.h[k]

    def span(self, x: int) -> tuple[int, int]:
        a, b = self.height(x - 1), self.height(x)
        return min(a, b), max(a, b)

    def step(self, x: int) -> int:
        return self.height(x) - self.height(x - 1)

    def is_flat(self) -> bool:
        return len(set(self.h)) == 1

    def reversed(self) -> "RibbonPath":
        # mirror x -> -x: column x becomes column -x, boundary x becomes -x-1
        n = len(self.h)
        return RibbonPath(-(self.start + n - 1) - 1, list(reversed(self.h)))


def _steps_ok(h: Sequence[int]) -> bool:
    steps = [b - a for a, b in zip(h, h[1:])]
    if any(abs(s) > 1 for s in steps):
        return False
    return not any(s and t for s, t in zip(steps, steps[1:]))


def _gap(lower: tuple[int, int], upper: tuple[int, int]) -> int:
    return upper[0] - lower[1] - 1


def stack_ok(stack: Sequence[RibbonPath], cols: Iterable[int]) -> bool:
    for r in stack:
        if not _steps_ok(r.h):
            return False
    for x in cols:
        spans = [r.span(x) for r in stack]
        if any(_gap(a, b) not in (2, 3, 4) for a, b in zip(spans, spans[1:])):
            return False
    return True


def render_stack(
    stack: Sequence[RibbonPath], rect: Rect, below: Optional[int] = None, above: Optional[int] = None
) -> Pattern2D:
    """Draw ribbons on ``rect``; rows outside the stack are flat every 4 rows
    starting from ``below - 4`` downward and ``above + 4`` upward."""
    cells = {c: Z for c in rect.cells()}
    for x in range(rect.x0, rect.x1 + 1):
        for r in stack:
            lo, hi = r.span(x)
            for y in range(lo, hi + 1):
                if (x, y) in rect:
                    cells[(x, y)] = H
        if below is not None:
            for y in range(below - 4, rect.y0 - 1, -4):
                if y <= rect.y1:
                    cells[(x, y)] = H
        if above is not None:
            for y in range(above + 4, rect.y1 + 1, 4):
                if y >= rect.y0:
                    cells[(x, y)] = H
    return Pattern2D(cells)


def random_ribbon_stack(rng: random.Random, x0: int, x1: int, count: int, base: int = 0) -> list[RibbonPath]:
    """Random legal stack of ``count`` ribbons covering columns ``x0..x1``."""
    n = x1 - x0 + 2  # boundaries x0-1 .. x1
    for _ in range(1000):
        stack: list[RibbonPath] = []
        ok = True
        for k in range(count):
            r = _random_ribbon(rng, x0 - 1, n, stack[-1] if stack else None, base)
            if r is None:
                ok = False
                break
            stack.append(r)
        if ok:
            return stack
    raise GrowthError("could not sample a ribbon stack")


def _random_ribbon(rng, start, n, below: Optional[RibbonPath], base):
    for _ in range(200):
        if below is None:
            h = [base]
        else:
            top = below.height(start)
            h = [top + rng.choice((3, 4, 5))]
        last = 0
        ok = True
        for k in range(1, n):
            x = start + k
            choices = [0] if last else [-1, 0, 1]
            rng.shuffle(choices)
            good = []
            for s in choices:
                cand = h[-1] + s
                if below is not None:
                    span = (min(h[-1], cand), max(h[-1], cand))
                    if _gap(below.span(x), span) not in (2, 3, 4):
                        continue
                good.append(s)
            if not good:
                ok = False
                break
            s = good[0]
            h.append(h[-1] + s)
            last = s
        if ok:
            return RibbonPath(start, h)
    return None


def random_xh_window(rng: random.Random, max_w: int = 10, max_h: int = 10) -> Pattern2D:
    """A random locally legal X_H window cut from a random ribbon stack.

    The stack extends well beyond the window, so the window lies in the
    language of X_H (the stack extends flat forever on both sides).
    """
    w = rng.randint(1, max_w)
    h = rng.randint(1, max_h)
    pad = 6
    x0 = rng.randint(-5, 5)
    y0 = rng.randint(-5, 5)
    count = (h + 2 * pad) // 2 + 4
    stack = random_ribbon_stack(rng, x0 - pad, x0 + w + pad, count, base=y0 - pad - 8)
    rect = Rect(x0, y0, x0 + w - 1, y0 + h - 1)
    return render_stack(stack, rect)


# tracing


@dataclass
class Ribbon:
    index: Optional[int]
    cells: frozenset
    spans: dict  # column -> (lo, hi)
    boundaries: dict  # x -> boundary height between columns x and x+1
    steps: dict  # column -> step, where both boundaries are visible

    def displacements(self) -> list[int]:
        return [self.steps[x] for x in sorted(self.steps)]


@dataclass
class RibbonDecomposition:
    ribbons: list[Ribbon]
    gaps: dict  # column -> list of interior zero-run lengths
    ambiguous: bool = False

    def by_index(self) -> dict:
        return {r.index: r for r in self.ribbons if r.index is not None}

    def ribbon_of(self, c: Coord) -> Optional[Ribbon]:
        for r in self.ribbons:
            if c in r.cells:
                return r
        return None


def _components4(sites: set) -> list[set]:
    g = nx.Graph()
    g.add_nodes_from(sites)
    for x, y in sites:
        for d in ((1, 0), (0, 1)):
            n = (x + d[0], y + d[1])
            if n in sites:
                g.add_edge((x, y), n)
    return [set(c) for c in nx.connected_components(g)]


def ribbon_trace(window: Pattern2D, letter: str = H, check: bool = True) -> RibbonDecomposition:
    """Split the ``letter`` cells of a legal horizontal-ribbon window into ribbons.

    Indices follow the origin convention: ribbon 0 is the first met moving up
    from height 0 in the reference column (x = 0 if visible, else the leftmost
    column); indices grow upward.
    """
    if check:
        rules = xh_rules() if letter == H else Sft2D((Z, letter), [p.map_letters(lambda a: letter if a == H else a) for p in xh_rules().forbidden])
        if not rules.validate(window):
            raise LegalityError("window is not legal for the ribbon rules")
    sites = {c for c, a in window.cells.items() if a == letter}
    comps = _components4(sites)
    ribbons = []
    for comp in comps:
        spans = {}
        for x in sorted({c[0] for c in comp}):
            ys = sorted(y for (cx, y) in comp if cx == x)
            spans[x] = (ys[0], ys[-1])
        bnd = {}
        for x in spans:
            if x + 1 in spans:
                shared = set(range(spans[x][0], spans[x][1] + 1)) & set(range(spans[x + 1][0], spans[x + 1][1] + 1))
                shared = [y for y in shared if (x, y) in comp and (x + 1, y) in comp]
                if len(shared) == 1:
                    bnd[x] = shared[0]
        steps = {x: bnd[x] - bnd[x - 1] for x in spans if x in bnd and x - 1 in bnd}
        ribbons.append(Ribbon(None, frozenset(comp), spans, bnd, steps))
    ambiguous = _assign_indices(window, ribbons)
    gaps = {}
    b = window.bbox()
    if b is not None:
        for x in range(b.x0, b.x1 + 1):
            col = [y for y in range(b.y0, b.y1 + 1) if (x, y) in window.cells]
            runs = []
            last_h = None
            for y in col:
                if window.cells[(x, y)] == letter:
                    if last_h is not None and y - last_h > 1:
                        runs.append(y - last_h - 1)
                    last_h = y
            gaps[x] = runs
    dec = RibbonDecomposition(ribbons, gaps, ambiguous)
    if check:
        for r in ribbons:
            d = r.displacements()
            if any(abs(s) > 1 for s in d) or any(s and t for s, t in zip(d, d[1:])):
                raise LegalityError("ribbon meanders twice in a row")
        for runs in gaps.values():
            if any(g not in (2, 3, 4) for g in runs):
                raise LegalityError("column gap outside {2,3,4}")
    return dec


def _assign_indices(window: Pattern2D, ribbons: list[Ribbon]) -> bool:
    if not ribbons:
        return False
    g = nx.DiGraph()
    g.add_nodes_from(range(len(ribbons)))
    for i, a in enumerate(ribbons):
        for j, b in enumerate(ribbons):
            if i != j and any(x in b.spans and a.spans[x][1] < b.spans[x][0] for x in a.spans):
                g.add_edge(i, j)
    # fragments sharing no column are ordered by mean height, then lowest cell,
    # so the numbering does not depend on how the window was built
    def key(k):
        r = ribbons[k]
        mid = sum(lo + hi for lo, hi in r.spans.values()) / (2 * len(r.spans))
        return (mid, min(r.cells))

    order = list(nx.lexicographical_topological_sort(g, key=key))
    ambiguous = any(not g.has_edge(a, b) and not nx.has_path(g, a, b) for a, b in zip(order, order[1:]))
    bb = window.bbox()
    ref = 0 if bb.x0 <= 0 <= bb.x1 else bb.x0
    at_ref = [k for k in order if ref in ribbons[k].spans and ribbons[k].spans[ref][1] >= 0]
    if at_ref:
        zero_rank = order.index(at_ref[0])
    else:
        # nothing at or above height 0 in the reference column
        below = [k for k in order if ref in ribbons[k].spans]
        zero_rank = order.index(below[-1]) + 1 if below else 0
    for rank, k in enumerate(order):
        ribbons[k].index = rank - zero_rank
    return ambiguous


# homoclinic embedding into the flat point


def _path_search(
    w: Pattern2D,
    wr: Rect,
    start: int,
    n: int,
    prev: Optional[RibbonPath],
    heights: Iterable[int],
    must_reach: bool = False,
    avoid_w: bool = False,
) -> Iterable[RibbonPath]:
    """Ribbon paths over boundaries ``start .. start+n-1`` consistent with ``w``.

    Cells of the path inside ``w`` must be H, and the cells of ``w`` between
    ``prev`` (or the bottom of ``w`` when there is no ``prev``) and the path
    must be 0.  ``avoid_w`` asks for a path with no cell in ``w``'s rows
    within ``w``'s columns; ``must_reach`` asks for one that meets those rows.
    """

    def col_ok(x, lo, hi):
        if prev is not None and _gap(prev.span(x), (lo, hi)) not in (2, 3, 4):
            return False
        if not wr.x0 <= x <= wr.x1:
            return True
        if avoid_w and lo <= wr.y1 and hi >= wr.y0:
            return False
        floor = prev.span(x)[1] if prev is not None else wr.y0 - 1
        for y in range(max(wr.y0, floor + 1), min(wr.y1, hi) + 1):
            a = w.cells.get((x, y))
            if a is None:
                continue
            if (a == H) != (lo <= y <= hi):
                return False
        return True

    def rec(h, moved, reached):
        k = len(h)
        if k == n:
            if must_reach and not reached:
                return
            yield RibbonPath(start, list(h))
            return
        x = start + k
        for d in ((0,) if moved else (0, 1, -1)):
            v = h[-1] + d
            lo, hi = min(h[-1], v), max(h[-1], v)
            if col_ok(x, lo, hi):
                r = reached or (wr.x0 <= x <= wr.x1 and hi >= wr.y0)
                h.append(v)
                yield from rec(h, d != 0, r)
                h.pop()

    for h0 in heights:
        yield from rec([h0], False, False)


def _complete_through(w: Pattern2D, max_nodes: int = 200000) -> list[RibbonPath]:
    """A stack of ribbons over w's columns plus one on each side that
    reproduces ``w``; the lowest and highest ribbons avoid ``w``'s rows."""
    wr = w.bbox()
    start = wr.x0 - 2
    n = wr.width + 4
    budget = [max_nodes]

    def above_all(r):
        return all(r.span(x)[0] > wr.y1 for x in range(wr.x0, wr.x1 + 1))

    def grow(stack):
        budget[0] -= 1
        if budget[0] < 0:
            raise GrowthError("ribbon completion search exhausted its budget")
        top = stack[-1]
        if above_all(top):
            return stack
        lo = min(top.h) + 2
        hi = max(top.h) + 7
        pref = sorted(range(lo, hi + 1), key=lambda v: (abs(v - top.h[0] - 4), v))
        for q in _path_search(w, wr, start, n, top, pref):
            got = grow(stack + [q])
            if got is not None:
                return got
        return None

    first_heights = sorted(range(wr.y0 - 6, wr.y1 + 1), key=lambda v: (abs(v - wr.y0), v))
    for r1 in _path_search(w, wr, start, n, None, first_heights, must_reach=True):
        neg = _negate(r1)
        below = None
        pref = sorted(range(min(neg.h) + 2, max(neg.h) + 7), key=lambda v: (abs(v - neg.h[0] - 4), v))
        for q in _path_search(Pattern2D(), Rect(0, 0, -1, -1), start, n, neg, pref):
            cand = _negate(q)
            if all(cand.span(x)[1] < wr.y0 for x in range(wr.x0, wr.x1 + 1)):
                below = cand
                break
        if below is None:
            continue
        got = grow([below, r1])
        if got is not None:
            return got
    raise LegalityError("pattern cannot be completed to a ribbon configuration")


def _settle(stack: list[RibbonPath], targets: list[int], max_nodes: int = 400000) -> list[RibbonPath]:
    """Append boundaries, shortest first, until every ribbon is flat at its target."""
    import heapq
    from itertools import product as _product

    hs = [list(r.h) for r in stack]
    off0 = tuple(h[-1] - t for h, t in zip(hs, targets))
    mv0 = tuple(len(h) >= 2 and h[-1] != h[-2] for h in hs)

    def est(off, mv):
        return max((2 * abs(o) - (0 if m else 1) for o, m in zip(off, mv) if o), default=0)

    start = (off0, mv0)
    came = {start: None}
    dist = {start: 0}
    heap = [(est(*start), 0, start)]
    goal = None
    expanded = 0
    while heap:
        _, g, state = heapq.heappop(heap)
        if g > dist[state]:
            continue
        off, mv = state
        if not any(off) and not any(mv):
            goal = state
            break
        expanded += 1
        if expanded > max_nodes:
            break
        opts = [(0,) if m else (0, 1, -1) for m in mv]
        for ds in _product(*opts):
            spans = [(min(o, o + d), max(o, o + d)) for o, d in zip(off, ds)]
            spans = [(a + t, b + t) for (a, b), t in zip(spans, targets)]
            if any(_gap(a, b) not in (2, 3, 4) for a, b in zip(spans, spans[1:])):
                continue
            nxt = (tuple(o + d for o, d in zip(off, ds)), tuple(d != 0 for d in ds))
            if any(abs(o) > 12 for o in nxt[0]):
                continue
            if g + 1 < dist.get(nxt, 1 << 30):
                dist[nxt] = g + 1
                came[nxt] = (state, ds)
                heapq.heappush(heap, (g + 1 + est(*nxt), g + 1, nxt))
    if goal is None:
        raise GrowthError("ribbons could not be flattened at the sides")
    moves = []
    s = goal
    while came[s] is not None:
        s, ds = came[s]
        moves.append(ds)
    for ds in reversed(moves):
        for h, d in zip(hs, ds):
            h.append(h[-1] + d)
    for h in hs:
        h.append(h[-1])
    return [RibbonPath(stack[0].start, h) for h in hs]


def _extend_both(stack: list[RibbonPath], targets: list[int]) -> list[RibbonPath]:
    right = _settle(stack, targets)
    left = _settle([r.reversed() for r in right], targets)
    return [r.reversed() for r in left]


def _ribbon_above(below: RibbonPath, target: int) -> RibbonPath:
    """Least-deviation ribbon over ``below`` that is flat at ``target`` at both ends."""
    s, n = below.start, len(below.h)
    lo = min(below.h) - 1
    hi = max(below.h) + 7
    INF = float("inf")
    # state: (height, moved last step) -> (cost, back pointer)
    layers = [{(target, False): (0, None)}]
    for k in range(1, n):
        x = s + k
        nxt = {}
        for (u, moved), (cost, _) in layers[-1].items():
            for d in ((0,) if moved else (0, 1, -1)):
                v = u + d
                if not lo <= v <= hi:
                    continue
                if _gap(below.span(x), (min(u, v), max(u, v))) not in (2, 3, 4):
                    continue
                key = (v, d != 0)
                c = cost + abs(v - target)
                if c < nxt.get(key, (INF,))[0]:
                    nxt[key] = (c, (u, moved))
        layers.append(nxt)
    end = [k for k in layers[-1] if k[0] == target]
    if not end:
        raise GrowthError("no ribbon fits above; widen the flat margins")
    key = min(end, key=lambda k: layers[-1][k][0])
    h = []
    for k in range(n - 1, -1, -1):
        h.append(key[0])
        key = layers[k][key][1]
    h.reverse()
    return RibbonPath(s, h)


def _negate(r: RibbonPath) -> RibbonPath:
    return RibbonPath(r.start, [-v for v in r.h])


def _pad(stack: list[RibbonPath], k: int) -> list[RibbonPath]:
    return [RibbonPath(r.start - k, [r.h[0]] * k + r.h + [r.h[-1]] * k) for r in stack]


def embed_homoclinic_xh(w: Pattern2D, margin: int = 5, max_layers: int = 40) -> Pattern2D:
    """Embed a legal X_H pattern in a window that agrees with the flat point
    ``x0`` (ribbons on rows y = 0 mod 4) on a frame of thickness ``margin``.

    1. complete the ribbons through ``w``, keeping one clear ribbon above and
       one below it;
    2. let them meander left and right until they are flat on rows 0 mod 4;
    3. stack new ribbons above and below, each as flat as the one beneath it
       allows, until one is completely flat.
    """
    X = xh_rules()
    if margin < X.type_t:
        raise GrowthError(f"margin {margin} is below the type {X.type_t}; need at least {X.type_t}")
    if not w.cells:
        return flat_xh(Rect(0, 0, 0, 0).grow(margin))
    if not X.validate(w):
        raise LegalityError("pattern is not legal for X_H")
    wr = w.bbox()
    stack = _complete_through(w)

    offs = [sum(r.h) / len(r.h) - 4 * k for k, r in enumerate(stack)]
    t0 = 4 * round(sum(offs) / len(offs) / 4)
    targets = [t0 + 4 * k for k in range(len(stack))]
    stack = _pad(_extend_both(stack, targets), 3)

    above: list[RibbonPath] = []
    top, t = stack[-1], targets[-1]
    while not top.is_flat():
        t += 4
        top = _ribbon_above(top, t)
        above.append(top)
        if len(above) > max_layers:
            raise GrowthError("unraveling above did not terminate")
    below: list[RibbonPath] = []
    bot, b = _negate(stack[0]), -targets[0]
    while not bot.is_flat():
        b += 4
        bot = _ribbon_above(bot, b)
        below.append(_negate(bot))
        if len(below) > max_layers:
            raise GrowthError("unraveling below did not terminate")
    full = list(reversed(below)) + stack + above
    lo_t = full[0].h[0]
    hi_t = full[-1].h[0]
    s = full[0].start
    e = s + len(full[0].h) - 1
    ys = [v for r in full for v in r.h]
    rect = Rect(
        min(s, wr.x0 - 1) - margin,
        min(ys + [wr.y0]) - margin - 1,
        max(e + 1, wr.x1 + 1) + margin,
        max(ys + [wr.y1]) + margin + 1,
    )
    out = render_stack(full, rect, below=lo_t, above=hi_t)
    if not X.validate(out):
        raise GrowthError("embedding produced an illegal window")
    if out.restrict(w.shape) != w:
        raise GrowthError("embedding lost the input pattern")
    if not frame_matches_x0(out, margin):
        raise GrowthError("embedding does not match the flat point on its frame")
    return out


def frame_matches_x0(p: Pattern2D, thickness: int = 5) -> bool:
    b = p.bbox()
    return all(a == x0_letter(c) for c, a in p.cells.items() if b.on_frame(c, thickness))


# crossings of horizontal and vertical ribbons


def _components8(sites: set) -> list[set]:
    g = nx.Graph()
    g.add_nodes_from(sites)
    for x, y in sites:
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                n = (x + dx, y + dy)
                if n != (x, y) and n in sites:
                    g.add_edge((x, y), n)
    return [set(c) for c in nx.connected_components(g)]


def trace_vertical(window: Pattern2D, check: bool = True) -> RibbonDecomposition:
    """Vertical ribbons, traced in the transposed picture (cells reported untransposed)."""
    dec = ribbon_trace(window.transpose(), letter=V, check=check)
    for r in dec.ribbons:
        r.cells = frozenset((y, x) for x, y in r.cells)
    return dec


def crossing_map(xh_window: Pattern2D, xv_window: Pattern2D, check: bool = True) -> dict[tuple[int, int], Coord]:
    """(horizontal index, vertical index) -> lexicographically least crossing site.

    Only crossings lying strictly inside the overlap of the two windows are
    reported, since a crossing touching the overlap's edge may continue
    outside it.
    """
    overlap = xh_window.shape & xv_window.shape
    if not overlap:
        return {}
    hw = xh_window.restrict(overlap)
    vw = xv_window.restrict(overlap)
    hdec = ribbon_trace(hw, check=check)
    vdec = trace_vertical(vw, check=check)
    both = {c for c in overlap if hw[c] == H and vw[c] == V}
    out = {}
    for comp in _components8(both):
        if any(any((x + dx, y + dy) not in overlap for dx in (-1, 0, 1) for dy in (-1, 0, 1)) for x, y in comp):
            continue
        if not 1 <= len(comp) <= 3:
            raise LegalityError(f"crossing of {len(comp)} sites")
        site = min(comp)
        hr = hdec.ribbon_of(site)
        vr = vdec.ribbon_of(site)
        key = (hr.index, vr.index)
        if key in out:
            raise LegalityError(f"ribbon pair {key} crosses twice")
        out[key] = site
    return out
