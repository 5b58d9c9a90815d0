"""Balanced words, characteristic sequences and slope intervals over {0, 1}.

Words are plain strings of single-character letters.  :class:`Word` adds an
offset (the index of the first letter) for the places where position matters.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate
from typing import Iterable, Optional

from .exact import Slope, as_exact, compare, floor_exact, ceil_exact, format_slope


class AlphabetError(ValueError):
    pass


class WordInputError(ValueError):
    pass


class SearchError(ValueError):
    """A construction needs a different input window to proceed."""


@dataclass(frozen=True)
class Word:
    letters: str
    offset: int = 0

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return self.letters

    @property
    def stop(self) -> int:
        """One past the index of the last letter."""
        return self.offset + len(self.letters)

    def at(self, n: int) -> str:
        return self.letters[n - self.offset]

    def sub(self, start: int, stop: int) -> "Word":
        """Subword on the half-open index range ``[start, stop)``."""
        if start < self.offset or stop > self.stop or start > stop:
            raise IndexError(f"[{start},{stop}) outside word on [{self.offset},{self.stop})")
        return Word(self.letters[start - self.offset : stop - self.offset], start)

    def serialize(self) -> str:
        return f"@{self.offset}:{self.letters}"

    @classmethod
    def parse(cls, text: str) -> "Word":
        text = text.strip()
        if text.startswith("@"):
            head, _, body = text[1:].partition(":")
            return cls(body, int(head))
        return cls(text, 0)


def _letters(w) -> str:
    return w.letters if isinstance(w, Word) else str(w)


def _binary(w) -> str:
    s = _letters(w)
    if not set(s) <= {"0", "1"}:
        raise AlphabetError(f"word {s!r} is not over {{0,1}}")
    return s


def _prefix(s: str) -> list[int]:
    return [0] + list(accumulate(int(c) for c in s))


def ones_count(w) -> int:
    return _binary(w).count("1")


def _window_count_range(pre: list[int], n: int) -> tuple[int, int]:
    counts = [pre[i + n] - pre[i] for i in range(len(pre) - n)]
    return min(counts), max(counts)


def is_k_balanced(w, k: int) -> bool:
    s = _binary(w)
    pre = _prefix(s)
    for n in range(1, len(s) + 1):
        lo, hi = _window_count_range(pre, n)
        if hi - lo > k:
            return False
    return True


def balance_defect(w) -> int:
    """Smallest k for which ``w`` is k-balanced."""
    s = _binary(w)
    pre = _prefix(s)
    worst = 0
    for n in range(1, len(s) + 1):
        lo, hi = _window_count_range(pre, n)
        worst = max(worst, hi - lo)
    return worst


def is_jointly_balanced(a, b) -> bool:
    """Every length-n subword of ``a`` and of ``b`` differ by at most one 1."""
    sa, sb = _binary(a), _binary(b)
    if not sa or not sb:
        raise WordInputError("joint balance needs nonempty words")
    pa, pb = _prefix(sa), _prefix(sb)
    for n in range(1, min(len(sa), len(sb)) + 1):
        alo, ahi = _window_count_range(pa, n)
        blo, bhi = _window_count_range(pb, n)
        if ahi - blo > 1 or bhi - alo > 1:
            return False
    return True


def is_aligned_balanced(a, b) -> bool:
    """Equal-length words whose position-aligned subwords differ by at most one 1.

    This is the row condition of the layered SFT: the running difference of
    the two rows must take at most two adjacent values.
    """
    sa, sb = _binary(a), _binary(b)
    if len(sa) != len(sb):
        raise WordInputError("aligned balance needs words of equal length")
    run = list(accumulate((int(y) - int(x) for x, y in zip(sa, sb)), initial=0))
    return max(run) - min(run) <= 1


def within_one_of_slope(w, alpha: Slope) -> bool:
    """Every subword v has ``|#(v,1) - |v| alpha| <= 1``."""
    s = _binary(w)
    alpha = as_exact(alpha)
    pre = _prefix(s)
    for n in range(1, len(s) + 1):
        lo, hi = _window_count_range(pre, n)
        if compare(alpha * n - lo, 1) > 0 or compare(hi - alpha * n, 1) > 0:
            return False
    return True


@dataclass(frozen=True)
class SlopeInterval:
    """Interval of slopes with rational endpoints, open unless ``closed``."""

    lo: Fraction
    hi: Fraction
    closed: bool = False

    def contains(self, x: Slope) -> bool:
        x = as_exact(x)
        if self.closed:
            return compare(x, self.lo) >= 0 and compare(x, self.hi) <= 0
        return compare(x, self.lo) > 0 and compare(x, self.hi) < 0

    def contains_closed(self, x: Slope) -> bool:
        return compare(x, self.lo) >= 0 and compare(x, self.hi) <= 0

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def intersect(self, other: "SlopeInterval") -> Optional["SlopeInterval"]:
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        closed = self.closed and other.closed
        if lo > hi or (lo == hi and not closed):
            return None
        return SlopeInterval(lo, hi, closed)

    def __str__(self):
        l, r = ("[", "]") if self.closed else ("(", ")")
        return f"{l}{format_slope(self.lo)}, {format_slope(self.hi)}{r}"


def _clamp(x: Fraction) -> Fraction:
    return min(max(x, Fraction(0)), Fraction(1))


def slope_interval(w) -> SlopeInterval:
    """Open interval of slopes whose Sturmian sequences contain ``w``.

    The lower end is the max over subwords v of (#(v,1)-1)/|v|, the upper end
    the min of (#(v,1)+1)/|v|, both clamped to [0, 1].
    """
    s = _binary(w)
    if not s:
        raise WordInputError("slope interval of the empty word")
    pre = _prefix(s)
    lo, hi = Fraction(0), Fraction(1)
    for n in range(1, len(s) + 1):
        cmin, cmax = _window_count_range(pre, n)
        lo = max(lo, Fraction(cmax - 1, n))
        hi = min(hi, Fraction(cmin + 1, n))
    return SlopeInterval(_clamp(lo), _clamp(hi))


def joint_slope_interval(u, v) -> Optional[SlopeInterval]:
    return slope_interval(u).intersect(slope_interval(v))


def lower_char(alpha: Slope, n: int, intercept: Slope = 0) -> str:
    alpha, rho = as_exact(alpha), as_exact(intercept)
    return str(floor_exact(alpha * (n + 1) + rho) - floor_exact(alpha * n + rho))


def upper_char(alpha: Slope, n: int, intercept: Slope = 0) -> str:
    alpha, rho = as_exact(alpha), as_exact(intercept)
    return str(ceil_exact(alpha * (n + 1) + rho) - ceil_exact(alpha * n + rho))


def _check_unit(alpha):
    if compare(alpha, 0) < 0 or compare(alpha, 1) > 0:
        raise WordInputError(f"slope {format_slope(alpha)} outside [0,1]")


def lower_char_window(alpha: Slope, start: int, stop: int, intercept: Slope = 0) -> Word:
    """Lower characteristic sequence on the inclusive index range [start, stop]."""
    alpha = as_exact(alpha)
    _check_unit(alpha)
    rho = as_exact(intercept)
    fl = [floor_exact(alpha * n + rho) for n in range(start, stop + 2)]
    return Word("".join(str(b - a) for a, b in zip(fl, fl[1:])), start)


def upper_char_window(alpha: Slope, start: int, stop: int, intercept: Slope = 0) -> Word:
    alpha = as_exact(alpha)
    _check_unit(alpha)
    rho = as_exact(intercept)
    cl = [ceil_exact(alpha * n + rho) for n in range(start, stop + 2)]
    return Word("".join(str(b - a) for a, b in zip(cl, cl[1:])), start)


def char_shift_offset(alpha: Fraction) -> int:
    """Least k > 0 with the upper sequence shifted by k equal to the lower one.

    Returns 0 for the degenerate slopes 0 and 1, where the two sequences
    already coincide.
    """
    alpha = Fraction(alpha)
    if alpha in (0, 1):
        return 0
    if not 0 < alpha < 1:
        raise WordInputError("slope must lie in [0,1]")
    return pow(alpha.numerator, -1, alpha.denominator)


def periodize_jointly_balanced(t, alpha: Fraction) -> str:
    """Repair ``t`` into one period of a sequence jointly balanced with the lower
    characteristic sequence of ``alpha``.

    ``t`` must have length m*j (alpha = i/j) and at most one 1 too many or too
    few; the final letter is flipped when needed.
    """
    s = _binary(t)
    alpha = Fraction(alpha)
    i, j = alpha.numerator, alpha.denominator
    if not s or len(s) % j:
        raise WordInputError(f"length {len(s)} is not a positive multiple of {j}")
    m = len(s) // j
    ref = lower_char_window(alpha, 0, 3 * len(s) - 1).letters
    if not is_jointly_balanced(s, ref):
        raise WordInputError("t is not jointly balanced with the characteristic sequence")
    ones = s.count("1")
    if ones == m * i:
        out = s
    elif ones == m * i - 1:
        if s[-1] != "0":
            raise SearchError("t has one 1 too few but does not end in 0; choose another window")
        out = s[:-1] + "1"
    elif ones == m * i + 1:
        if s[-1] != "1":
            raise SearchError("t has one 1 too many but does not end in 1; choose another window")
        out = s[:-1] + "0"
    else:
        raise WordInputError(f"t has {ones} ones, expected within one of {m * i}")
    if not within_one_of_slope(out * 4, alpha):
        raise SearchError("periodized word failed the 4-period certificate")
    return out


def splice_check(p, mid, q, alpha: Fraction, reps: int = 3) -> bool:
    """Certify that p^inf mid q^inf stays within one of alpha on every subword."""
    sp, sm, sq = _binary(p), _binary(mid), _binary(q)
    alpha = Fraction(alpha)
    i, j = alpha.numerator, alpha.denominator
    if len(sp) != j or len(sq) != j:
        raise WordInputError(f"p and q must have length {j}")
    if sp.count("1") != i or sq.count("1") != i:
        raise WordInputError(f"p and q must contain exactly {i} ones")
    return within_one_of_slope(sp * reps + sm + sq * reps, alpha)


def subwords(w, n: int) -> set[str]:
    s = _letters(w)
    return {s[k : k + n] for k in range(len(s) - n + 1)}


def all_subwords(w) -> set[str]:
    s = _letters(w)
    return {s[a:b] for a in range(len(s)) for b in range(a + 1, len(s) + 1)}


def binary_words(n: int) -> Iterable[str]:
    for k in range(2**n):
        yield format(k, f"0{n}b") if n else ""
