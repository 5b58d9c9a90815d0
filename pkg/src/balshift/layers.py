"""The three-layer SFT over {0,1}^3 whose rows carry jointly balanced pairs.

Layer 1 is constant up columns, layer 2 is constant along the diagonal
(i, j) -> (i+1, j+1), and layer 3 is the running total of layer 2 minus
layer 1 along each row.  A point is determined, up to free rows, by the
sequences a(n) = layer1(n, 0) and b(n) = layer2(n, 0); row j carries a(i)
and b(i - j).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key, lru_cache
from itertools import product
from math import lcm
from typing import Optional, Union

from .exact import (
    QuadIrrational,
    Slope,
    as_exact,
    compare,
    floor_exact,
    format_slope,
    irrational_between,
    is_rational,
)
from .grid2d import Pattern2D, Rect, Sft2D, fill_rectangle
from .words import (
    SlopeInterval,
    is_aligned_balanced,
    is_jointly_balanced,
    is_k_balanced,
    joint_slope_interval,
    lower_char_window,
    upper_char_window,
)

Letter = tuple[int, int, int]
LETTERS: tuple[Letter, ...] = tuple(product((0, 1), repeat=3))


class ConstructionError(ValueError):
    pass


class LayerInputError(ValueError):
    pass


class ContradictionError(RuntimeError):
    """An intermediate fact that should always hold turned out false."""


# sequence descriptions


@dataclass(frozen=True)
class EventuallyPeriodic:
    """``... left left center right right ...`` with ``center`` starting at ``offset``.

    The left period ends just before ``offset`` and the right period starts
    right after the center.
    """

    left: str
    center: str
    right: str
    offset: int = 0

    def __post_init__(self):
        if not self.left or not self.right:
            raise LayerInputError("periods must be nonempty")
        if not set(self.left + self.center + self.right) <= {"0", "1"}:
            raise LayerInputError("sequences are over {0,1}")

    def at(self, n: int) -> int:
        k = n - self.offset
        if k < 0:
            return int(self.left[k % len(self.left)])
        if k < len(self.center):
            return int(self.center[k])
        return int(self.right[(k - len(self.center)) % len(self.right)])

    def window(self, start: int, stop: int) -> str:
        """Letters on the inclusive range [start, stop]."""
        return "".join(str(self.at(n)) for n in range(start, stop + 1))

    def shift(self, k: int) -> "EventuallyPeriodic":
        """sigma^k: the sequence n -> self(n + k)."""
        return EventuallyPeriodic(self.left, self.center, self.right, self.offset - k)

    @property
    def slope(self) -> Fraction:
        return Fraction(self.right.count("1"), len(self.right))

    @property
    def period_hint(self) -> int:
        return lcm(len(self.left), len(self.right))

    @property
    def span(self) -> tuple[int, int]:
        """Indices outside which the sequence is plainly periodic."""
        p = self.period_hint
        return self.offset - p, self.offset + len(self.center) + p

    def is_periodic(self) -> bool:
        p = self.period_hint
        lo, hi = self.span
        return all(self.at(n) == self.at(n + p) for n in range(lo - 2 * p, hi + 2 * p))


def periodic(word: str, offset: int = 0) -> EventuallyPeriodic:
    return EventuallyPeriodic(word, "", word, offset)


@dataclass(frozen=True)
class Characteristic:
    slope: Slope
    kind: str = "lower"
    intercept: Slope = Fraction(0)

    def __post_init__(self):
        if self.kind not in ("lower", "upper"):
            raise LayerInputError("kind must be 'lower' or 'upper'")
        object.__setattr__(self, "slope", as_exact(self.slope))
        object.__setattr__(self, "intercept", as_exact(self.intercept))

    def window(self, start: int, stop: int) -> str:
        fn = lower_char_window if self.kind == "lower" else upper_char_window
        return fn(self.slope, start, stop, self.intercept).letters

    def at(self, n: int) -> int:
        return int(self.window(n, n))

    def shift(self, k: int) -> "Characteristic":
        return Characteristic(self.slope, self.kind, self.intercept + self.slope * k)

    @property
    def period_hint(self) -> int:
        return Fraction(self.slope).denominator if is_rational(self.slope) else 1

    @property
    def span(self) -> tuple[int, int]:
        return 0, 0

    def is_periodic(self) -> bool:
        return is_rational(self.slope)


Sequence = Union[EventuallyPeriodic, Characteristic]


def describe(seq: Sequence) -> str:
    if isinstance(seq, Characteristic):
        s = f"{seq.kind}:{format_slope(seq.slope)}"
        if seq.intercept != 0:
            s += f"@{format_slope(seq.intercept)}"
        return s
    return f"ep:{seq.left}|{seq.center}|{seq.right}@{seq.offset}"


def seq_slope(seq: Sequence) -> Slope:
    if isinstance(seq, Characteristic):
        return seq.slope
    if Fraction(seq.left.count("1"), len(seq.left)) != seq.slope:
        raise LayerInputError(f"{describe(seq)} has different slopes on its two tails")
    return seq.slope


@dataclass(frozen=True)
class SequencePair:
    a: Sequence
    b: Sequence

    def check_range(self, pad: int = 0) -> tuple[int, int]:
        """An index range wide enough for window-level checks of this pair."""
        p = lcm(self.a.period_hint, self.b.period_hint)
        lo = min(self.a.span[0], self.b.span[0]) - 3 * p - pad - 8
        hi = max(self.a.span[1], self.b.span[1]) + 3 * p + pad + 8
        return lo, hi


# the SFT


@lru_cache(maxsize=None)
def x_rules() -> Sft2D:
    # cached: callers must not mutate the returned rule set
    F = []
    for u, v in product(LETTERS, repeat=2):
        if u[0] != v[0]:
            F.append(Pattern2D({(0, 0): u, (0, 1): v}))
        if u[1] != v[1]:
            F.append(Pattern2D({(0, 0): u, (1, 1): v}))
        if v[2] != u[2] + v[1] - v[0]:
            F.append(Pattern2D({(0, 0): u, (1, 0): v}))
    return Sft2D(LETTERS, F)


@dataclass
class LayeredPattern:
    pattern: Pattern2D
    free_rows: set = field(default_factory=set)
    locally_free_rows: set = field(default_factory=set)

    def layer(self, k: int) -> Pattern2D:
        return self.pattern.map_letters(lambda a: a[k - 1])

    def rows(self) -> list[int]:
        return sorted({y for _, y in self.pattern.cells})

    def row_cells(self, j: int) -> list[int]:
        return sorted(x for x, y in self.pattern.cells if y == j)

    def to_text(self) -> str:
        parts = []
        for k in (1, 2, 3):
            body = self.layer(k).to_text().splitlines()
            if k == 1:
                parts.append(body[0])
            parts.append(f"# layer {k}")
            parts.extend(body[1:])
        return "\n".join(parts) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LayeredPattern":
        lines = text.strip().splitlines()
        head = lines[0]
        blocks, cur = [], None
        for ln in lines[1:]:
            if ln.startswith("# layer"):
                cur = []
                blocks.append(cur)
            else:
                cur.append(ln)
        if len(blocks) != 3:
            raise LayerInputError("expected three layer grids")
        layers = [Pattern2D.from_text("\n".join([head] + b)) for b in blocks]
        cells = {c: (int(layers[0][c]), int(layers[1][c]), int(layers[2][c])) for c in layers[0].cells}
        return cls(Pattern2D(cells))

    def __eq__(self, other):
        return isinstance(other, LayeredPattern) and self.pattern == other.pattern


# building points from a pair of sequences


def _third_layer_row(a: Sequence, b: Sequence, j: int, lo: int, hi: int) -> dict[int, int]:
    """Running total of b(i-j) - a(i), anchored at 0 in column 0, on [lo, hi]."""
    lo0, hi0 = min(lo, 0), max(hi, 0)
    out = {0: 0}
    t = 0
    for i in range(1, hi0 + 1):
        t += b.at(i - j) - a.at(i)
        out[i] = t
    t = 0
    for i in range(0, lo0, -1):
        # value at i-1 is value at i minus the step that lands on i
        t -= b.at(i - j) - a.at(i)
        out[i - 1] = t
    return {i: v for i, v in out.items() if lo <= i <= hi}


def build_point_window(
    pair: SequencePair,
    window: Rect,
    free_rows: Optional[dict[int, int]] = None,
    collar: int = 6,
    global_pad: int = 60,
) -> LayeredPattern:
    """Restriction to ``window`` of the point built from (a, b).

    The third layer is evaluated on an extent reaching column 0 plus a collar;
    rows whose third layer hits -1 there are raised by one.  Rows on which
    layers 1 and 2 coincide over the whole extent are free and take the value
    given in ``free_rows`` (default 0).
    """
    a, b = pair.a, pair.b
    free_rows = dict(free_rows or {})
    lo = min(window.x0, 0) - collar
    hi = max(window.x1, 0) + collar
    ua = a.window(lo, hi)
    vb = b.window(lo - window.y1, hi - window.y0)
    if not is_jointly_balanced(ua, vb):
        raise ConstructionError("the pair is not jointly balanced on the evaluated extent")
    cells = {}
    free, local = set(), set()
    for j in range(window.y0, window.y1 + 1):
        t = _third_layer_row(a, b, j, lo, hi)
        vals = set(t.values())
        if not vals <= {-1, 0, 1}:
            raise ContradictionError(f"third layer left {{-1,0,1}} on row {j}")
        if {-1, 1} <= vals:
            raise ContradictionError(f"row {j} holds both 1 and -1")
        same = all(a.at(i) == b.at(i - j) for i in range(lo, hi + 1))
        if same:
            free.add(j)
            far_lo, far_hi = lo - global_pad, hi + global_pad
            if any(a.at(i) != b.at(i - j) for i in range(far_lo, far_hi + 1)):
                local.add(j)
            c = free_rows.pop(j, 0)
            if c not in (0, 1):
                raise LayerInputError("free row values are 0 or 1")
            t = {i: c for i in t}
        elif -1 in vals:
            t = {i: v + 1 for i, v in t.items()}
        for i in range(window.x0, window.x1 + 1):
            cells[(i, j)] = (a.at(i), b.at(i - j), t[i])
    if free_rows:
        raise LayerInputError(f"rows {sorted(free_rows)} are forced, not free")
    out = LayeredPattern(Pattern2D(cells), free, local)
    if not x_rules().validate(out.pattern):
        raise ContradictionError("constructed window violates the layer rules")
    return out


def verify_c1_forward(w: LayeredPattern) -> bool:
    """Telescoping check: third(e) - third(s-1) = ones(layer 2) - ones(layer 1) on every row segment."""
    if not x_rules().validate(w.pattern):
        raise LayerInputError("pattern violates the layer rules")
    p = w.pattern
    for j in w.rows():
        xs = w.row_cells(j)
        for s in xs:
            if (s - 1, j) not in p:
                continue
            total = 0
            e = s
            while (e, j) in p:
                total += p[(e, j)][1] - p[(e, j)][0]
                if p[(e, j)][2] - p[(s - 1, j)][2] != total:
                    return False
                e += 1
    return True


def row_freedom(w: LayeredPattern) -> set[int]:
    p = w.pattern
    return {j for j in w.rows() if all(p[(i, j)][0] == p[(i, j)][1] for i in w.row_cells(j))}


def fill_layers(first_second: dict, window: Rect) -> Optional[LayeredPattern]:
    """Backtracking fill of layer 3 given layers 1 and 2 on ``window``."""
    domains = {c: [(l1, l2, 0), (l1, l2, 1)] for c, (l1, l2) in first_second.items()}
    got = fill_rectangle(x_rules(), Pattern2D(), window, domains=domains)
    return None if got is None else LayeredPattern(got)


def row_condition(a_win: str, b_win: str, width: int, height: int) -> bool:
    """Window-level criterion for a fill of a width x height box.

    ``a_win`` holds a on [0, width-1] and ``b_win`` holds b on
    [-(height-1), width-1].  Row j pairs a(i) with b(i-j); column 0 is the
    collar whose third-layer value is free, so each row needs the aligned
    words on columns 1..width-1 to be balanced against each other.
    """
    for j in range(height):
        ar = a_win[1:width]
        br = "".join(b_win[i - j + height - 1] for i in range(1, width))
        if ar and not is_aligned_balanced(ar, br):
            return False
    return True


# classifying pairs


def _window_of(seq: Sequence, lo: int, hi: int) -> str:
    return seq.window(lo, hi)


def in_char_orbit(seq: Sequence, alpha: Fraction, lo: int, hi: int) -> bool:
    """Window check that ``seq`` is a shift of the lower characteristic sequence."""
    alpha = Fraction(alpha)
    j = alpha.denominator
    w = seq.window(lo, hi)
    ref = lower_char_window(alpha, 0, hi - lo + j).letters
    return any(ref[k : k + len(w)] == w for k in range(j))


@dataclass
class Classification:
    tags: set
    slope: Slope
    a_balanced: bool
    b_balanced: bool
    a_in_orbit: bool = False
    b_in_orbit: bool = False


def classify_pair(pair: SequencePair) -> Classification:
    lo, hi = pair.check_range()
    ua, vb = pair.a.window(lo, hi), pair.b.window(lo, hi)
    if not is_jointly_balanced(ua, vb):
        raise LayerInputError("pair is not jointly balanced")
    sa, sb = seq_slope(pair.a), seq_slope(pair.b)
    if compare(sa, sb) != 0:
        raise ContradictionError("jointly balanced sequences with different slopes")
    a1, b1 = is_k_balanced(ua, 1), is_k_balanced(vb, 1)
    a2, b2 = is_k_balanced(ua, 2), is_k_balanced(vb, 2)
    tags = set()
    res = Classification(tags, sa, a1, b1)
    if a1 and b1:
        tags.add(2 if is_rational(sa) else 1)
    if is_rational(sa):
        alpha = Fraction(sa)
        res.a_in_orbit = in_char_orbit(pair.a, alpha, lo, hi)
        res.b_in_orbit = in_char_orbit(pair.b, alpha, lo, hi)
        ref = lower_char_window(alpha, lo, hi).letters
        if a2 and not a1 and res.b_in_orbit and is_jointly_balanced(ua, ref):
            tags.add(3)
        if b2 and not b1 and res.a_in_orbit and is_jointly_balanced(vb, ref):
            tags.add(4)
    return res


# Sturmian approximation


def _frac(x: Slope) -> Slope:
    return x - floor_exact(x)


def _sturmian_with_window(alpha: QuadIrrational, word: str, start: int) -> Characteristic:
    """A lower Sturmian sequence of slope ``alpha`` reading ``word`` at ``start``."""
    n = len(word)
    cuts = sorted({_frac(-alpha * k) for k in range(start, start + n + 1)}, key=cmp_to_key(compare))
    cuts.append(cuts[0] + 1)
    for lo, hi in zip(cuts, cuts[1:]):
        rho = (lo + hi) / 2
        if lower_char_window(alpha, start, start + n - 1, rho).letters == word:
            return Characteristic(alpha, "lower", rho)
    raise ContradictionError(f"{word!r} does not occur at slope {format_slope(alpha)}")


def _shift_between(a: Sequence, b: Sequence, lo: int, hi: int, reach: int) -> Optional[int]:
    """k with a = sigma^k b, checked on [lo, hi]."""
    wa = a.window(lo, hi)
    for k in sorted(range(-reach, reach + 1), key=abs):
        if b.window(lo + k, hi + k) == wa:
            return k
    return None


def sturmian_approx_window(
    pair: SequencePair, window: Rect, free_rows: Optional[dict[int, int]] = None, max_collar: int = 200
) -> tuple[QuadIrrational, LayeredPattern, LayeredPattern]:
    """Irrational slope and Sturmian data reproducing the pair's window exactly.

    Returns (slope, approximating window, original window).
    """
    a, b = pair.a, pair.b
    alpha = seq_slope(a)
    if not is_rational(alpha):
        raise LayerInputError("the pair already has irrational slope")
    if a.is_periodic() and b.is_periodic():
        raise LayerInputError("both sequences are periodic; such pairs are not approximated this way")
    lo, hi = pair.check_range(window.width + window.height)
    if not (is_k_balanced(a.window(lo, hi), 1) and is_k_balanced(b.window(lo, hi), 1)):
        raise LayerInputError("both sequences must be 1-balanced")
    original = build_point_window(pair, window, free_rows)
    reach = (hi - lo) + window.height
    k = _shift_between(a, b, lo - reach, hi + reach, reach)
    rows = range(window.y0, window.y1 + 1)
    for collar in range(0, max_collar + 1):
        e0 = min(window.x0, 0) - collar - 6
        e1 = max(window.x1, 0) + collar + 6
        differing = [j for j in rows if any(a.at(i) != b.at(i - j) for i in range(e0, e1 + 1))]
        # with a = sigma^k b, row -k carries identical first and second layers
        allowed = set(rows) - ({-k} if k is not None else set())
        if set(differing) >= allowed:
            break
    else:
        raise ContradictionError("rows never separate")
    u = a.window(e0, e1)
    v = b.window(e0 - window.y1, e1 - window.y0)
    if k is None:
        J = joint_slope_interval(u, v)
        if J is None:
            raise ContradictionError("empty joint slope interval")
        beta = irrational_between(J.lo, J.hi)
        an = _sturmian_with_window(beta, u, e0)
        bn = _sturmian_with_window(beta, v, e0 - window.y1)
        fr = {}
    else:
        # a = sigma^k b: approximate b and shift it
        lo_b = min(e0 - window.y1, e0 + k)
        hi_b = max(e1 - window.y0, e1 + k)
        vv = b.window(lo_b, hi_b)
        J = joint_slope_interval(vv, vv)
        beta = irrational_between(J.lo, J.hi)
        bn = _sturmian_with_window(beta, vv, lo_b)
        an = bn.shift(k)
        fr = {}
        if window.y0 <= -k <= window.y1:
            fr[-k] = original.pattern[(window.x0, -k)][2]
    approx = build_point_window(SequencePair(an, bn), window, fr)
    if approx != original:
        raise ContradictionError("approximating window differs from the original")
    return beta, approx, original


# slope estimates from a window


def slope_window_estimate(w: Union[LayeredPattern, str]) -> SlopeInterval:
    """Closed interval [(m-2)/L, (m+2)/L] clipped to [0,1] from the longest row segment."""
    if isinstance(w, str):
        row = w
    else:
        p = w.pattern
        best = ""
        for j in w.rows():
            xs = w.row_cells(j)
            seg = []
            for x in xs:
                if seg and x != seg[-1] + 1:
                    seg = []
                seg.append(x)
                if len(seg) > len(best):
                    best = "".join(str(p[(i, j)][0]) for i in seg)
        row = best
    if not row:
        raise LayerInputError("no row segment to estimate from")
    L, m = len(row), row.count("1")
    lo = max(Fraction(m - 2, L), Fraction(0))
    hi = min(Fraction(m + 2, L), Fraction(1))
    return SlopeInterval(lo, hi, closed=True)
