"""The spacer transform in one dimension.

Letters of a base shift are separated by runs of the spacer symbol ``0`` of
length 2, 3 or 4.  The transformed shift is again of finite type, with the
forbidden list built by :func:`f_forbidden_list`.
"""

from __future__ import annotations

from itertools import product
from typing import Iterable, Optional, Sequence

from .shift1d import Sft1D

SPACER = "0"
GAPS = (2, 3, 4)


class AlphabetClashError(ValueError):
    pass


class GapError(ValueError):
    pass


class SpacerInputError(ValueError):
    pass


def _check_alphabet(A: Iterable[str]):
    if SPACER in set(A):
        raise AlphabetClashError("base alphabet must not contain the spacer symbol 0")


def spaced_versions(w: str) -> list[str]:
    """All ways of writing ``w`` with gaps of 2, 3 or 4 spacers."""
    if not w:
        return [""]
    out = []
    for gaps in product(GAPS, repeat=len(w) - 1):
        out.append(induce_word(w, gaps))
    return out


def f_forbidden_list(A: Iterable[str], F: Iterable[str]) -> set[str]:
    A = sorted(set(A))
    _check_alphabet(A)
    out = {SPACER * 5}
    for a, b in product(A, repeat=2):
        out.add(a + b)
        out.add(a + SPACER + b)
    for w in F:
        out.update(spaced_versions(w))
    return out


def spacer_sft(X: Sft1D) -> Sft1D:
    _check_alphabet(X.alphabet)
    return Sft1D(X.alphabet + (SPACER,), f_forbidden_list(X.alphabet, X.forbidden))


def induce_word(v: str, gaps: Sequence[int]) -> str:
    if len(gaps) != max(len(v) - 1, 0):
        raise SpacerInputError(f"{len(v)} letters need {max(len(v) - 1, 0)} gaps, got {len(gaps)}")
    if any(g not in GAPS for g in gaps):
        raise GapError(f"gaps must lie in {GAPS}: {list(gaps)}")
    if SPACER in v:
        raise AlphabetClashError("base word contains the spacer symbol")
    out = v[:1]
    for g, a in zip(gaps, v[1:]):
        out += SPACER * g + a
    return out


def gap_pattern(w: str) -> tuple[list[int], int, int]:
    """Interior gaps of ``w`` plus the lengths of its leading and trailing spacer runs."""
    letters = [i for i, c in enumerate(w) if c != SPACER]
    if not letters:
        return [], len(w), 0
    gaps = [b - a - 1 for a, b in zip(letters, letters[1:])]
    return gaps, letters[0], len(w) - 1 - letters[-1]


def project_word(w: str) -> str:
    gaps, lead, trail = gap_pattern(w)
    bad = [g for g in gaps if g not in GAPS]
    if bad:
        raise GapError(f"interior gap of length {bad[0]} in {w!r}")
    if lead > 4 or trail > 4:
        raise GapError(f"spacer run longer than 4 in {w!r}")
    return w.replace(SPACER, "")


def gap_shift_pair(
    u: str, p: str, s: str, k: Optional[int] = None, X: Optional[Sft1D] = None
) -> tuple[str, str]:
    """The pair (u', u'') that moves a copy of ``u`` by k sites.

    u'  = p1 000 p2 ... pk 000 u 000 s1 ... 000 sk
    u'' has the first k gaps shortened to 2 and the last k lengthened to 4.
    """
    k = len(p) if k is None else k
    if len(p) != k or len(s) != k:
        raise SpacerInputError("p and s must both have length k")
    if not u or u[0] == SPACER or u[-1] == SPACER:
        raise SpacerInputError("u must begin and end with base letters")
    if SPACER in p + s:
        raise SpacerInputError("p and s are base words")
    base = p + project_word(u) + s
    if X is not None and not X.contains(base):
        raise SpacerInputError(f"{base!r} is not in the base language")
    z3, z2, z4 = SPACER * 3, SPACER * 2, SPACER * 4
    u1 = "".join(a + z3 for a in p) + u + "".join(z3 + a for a in s)
    u2 = "".join(a + z2 for a in p) + u + "".join(z4 + a for a in s)
    return u1, u2


def locally_legal_windows(Y: Sft1D, L: int) -> set[str]:
    """All length-L words over Y's alphabet avoiding Y's forbidden list."""
    out = {""}
    for _ in range(L):
        out = {w + a for w in out for a in Y.alphabet if Y.is_locally_legal(w + a)}
    return out


def orbit_disjointness_check(v: str, v2: str, L: int, X: Optional[Sft1D] = None) -> bool:
    """No length-L window is an inducement of a word projecting to both ``v`` and ``v2``.

    The windows considered are the locally legal ones (for the spacer image of
    X, or of the full shift on the letters used) whose projection is exactly
    the given base word.
    """
    if X is None:
        X = Sft1D(sorted(set(v + v2)) or ["a"], [])
    Y = spacer_sft(X)
    seen_a, seen_b = set(), set()
    for w in locally_legal_windows(Y, L):
        try:
            pr = project_word(w)
        except GapError:
            continue
        if pr == v:
            seen_a.add(w)
        if pr == v2:
            seen_b.add(w)
    return not (seen_a & seen_b)


def induced_language(X: Sft1D, L: int) -> set[str]:
    """Length-L windows of inducements of words of L(X), by direct construction.

    Every base word is induced with all gap patterns and padded on both sides
    by a full gap (the neighbouring base letters fall outside the frame);
    every length-L frame of the result is collected.
    """
    out = set()
    nmax = L // 3 + 3
    for n in range(1, nmax + 1):
        for v in X.language(n):
            for gaps in product(GAPS, repeat=n - 1):
                w = induce_word(v, gaps)
                if len(w) < L - 8:
                    continue
                for lead in GAPS:
                    for trail in GAPS:
                        full = SPACER * lead + w + SPACER * trail
                        for i in range(len(full) - L + 1):
                            out.add(full[i : i + L])
    return out
