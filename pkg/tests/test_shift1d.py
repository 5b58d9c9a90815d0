import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from balshift.shift1d import (
    EmptyShiftError,
    NotInLanguageError,
    Sft1D,
    SftInputError,
    chain_graph,
    factor_entropy,
    full_shift,
    golden_mean,
    spectral_radius,
    ztcpe_report,
)

forbidden_sets = st.sets(st.text("01", min_size=1, max_size=3), max_size=4)


def _locally_legal(X, n):
    return ["".join(p) for p in product(X.alphabet, repeat=n) if X.is_locally_legal("".join(p))]


def _language_oracle(X, n):
    """Words of length n sitting in the middle of a long locally legal word.

    Extending by more than the number of (m)-blocks on each side forces a
    repeated block, hence a periodic point through the word.
    """
    pad = len(X.alphabet) ** X.m + 1
    words = {w for w in _locally_legal(X, n)}
    out = set()
    for w in words:
        left, right = {""}, {""}
        ok = True
        for _ in range(pad):
            left = {a + u for u in left for a in X.alphabet if X.is_locally_legal(a + u + w)}
            if not left:
                ok = False
                break
        if not ok:
            continue
        for _ in range(pad):
            right = {u + a for u in right for a in X.alphabet if X.is_locally_legal(w + u + a)}
            if not right:
                ok = False
                break
        # both sides extend independently since the sides only interact through w when |w| >= t - 1
        if ok and (n >= X.type_t - 1 or any(X.is_locally_legal(l + w + r) for l in left for r in right)):
            out.add(w)
    return out


def test_language_examples():
    assert golden_mean().language(3) == {"000", "001", "010", "100", "101"}
    assert Sft1D("01", ["01", "10"]).language(3) == {"000", "111"}
    # 010 is locally legal but cannot be extended
    X = Sft1D("01", ["00", "11", "0101"])
    assert X.is_locally_legal("010")
    assert X.is_empty()


@settings(max_examples=40, deadline=None)
@given(forbidden_sets)
def test_language_matches_extension_oracle(F):
    X = Sft1D("01", F)
    for n in (1, 2, 3, 4):
        expected = _language_oracle(X, n) if not X.is_empty() else set()
        got = X.language(n) if not X.is_empty() else set()
        assert got == expected


@settings(max_examples=30, deadline=None)
@given(forbidden_sets)
def test_entropy_matches_eigenvalue_oracle(F):
    X = Sft1D("01", F)
    if X.is_empty():
        with pytest.raises(EmptyShiftError):
            X.entropy()
        return
    rho = max(abs(np.linalg.eigvals(X.adj.astype(float)))) if len(X.vertices) else 0.0
    expected = math.log(rho) if rho > 1 + 1e-9 else 0.0
    assert abs(X.entropy() - expected) < 1e-6


def test_spectral_radius_cycle_is_one():
    cyc = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
    assert spectral_radius(cyc) == 1.0
    assert spectral_radius(np.zeros((2, 2), dtype=int)) == 0.0


def test_entropy_values():
    assert abs(full_shift("01").entropy() - math.log(2)) < 1e-9
    assert abs(golden_mean().entropy() - 0.481211825) < 1e-6
    assert Sft1D("01", ["01", "10"]).entropy() == 0.0


def test_recurrence_flags():
    assert golden_mean().is_mixing()
    X = Sft1D("01", ["00", "11"])
    assert X.is_irreducible() and not X.is_mixing()
    assert not Sft1D("01", ["01", "10"]).is_irreducible()


def test_exchangeable_witness_is_valid():
    X = golden_mean()
    wit = X.exchangeable("000", "010", 9)
    assert wit is not None
    for fill, w in ((wit.fill_a, "000"), (wit.fill_b, "010")):
        assert len(fill) == 19
        assert fill[9:12] == w
        assert X.contains(fill)
    assert wit.fill_a[:2] == wit.fill_b[:2] and wit.fill_a[-2:] == wit.fill_b[-2:]


def test_exchangeable_rejects_bad_input():
    X = golden_mean()
    with pytest.raises(NotInLanguageError):
        X.exchangeable("11", "00", 9)
    with pytest.raises(SftInputError):
        X.exchangeable("0", "00", 9)
    assert Sft1D("01", ["01", "10"]).exchangeable("00", "11", 9) is None


@settings(max_examples=25, deadline=None)
@given(forbidden_sets, st.integers(1, 3))
def test_exchangeability_matches_bruteforce(F, n):
    X = Sft1D("01", F)
    if X.is_empty():
        return
    t = X.type_t
    N = n + t + 2
    words = sorted(X.language(n))
    # brute force: pairs of legal words of length 2N+1 agreeing off [0, n-1]
    full = X.language(2 * N + 1)
    frames = {}
    for f in full:
        # the annulus blocks of width t at both ends decide compatibility
        frames.setdefault((f[:t], f[-t:]), set()).add(f[N : N + n])
    for a in words:
        for b in words:
            expected = any(a in s and b in s for s in frames.values())
            assert (X.exchangeable(a, b, N) is not None) == expected


def test_chain_graph_examples():
    cg = chain_graph(golden_mean(), 2, 8)
    assert cg.connected and cg.diameter() == 1 and cg.is_complete()
    cg = chain_graph(Sft1D("01", ["01", "10"]), 1, 6)
    assert cg.disconnected and cg.components() == [["0"], ["1"]]
    assert cg.diameters() == [0, 0]
    assert "graph chain" in cg.to_dot()
    assert cg.to_edge_list().startswith("# nodes 2")
    with pytest.raises(SftInputError):
        chain_graph(golden_mean(), 3, 5)


def test_reports():
    rep = ztcpe_report(Sft1D("01", ["01", "10"]), 1)
    assert not rep.passed and "disconnected" in rep.render()
    rep = ztcpe_report(golden_mean(), 4)
    assert rep.passed and all(r.diameters == [1] for r in rep.rows)


def test_periodic_witness():
    X = golden_mean()
    per = X.positive_frequency_witness("010")
    assert per is not None and X.contains(per * 4) and "010" in per * 3
    assert full_shift("ab").positive_frequency_witness("abba") == "abba"
    assert Sft1D("ab", ["aa", "bb"]).positive_frequency_witness("ab") == "ab"


def test_factor_entropy():
    X = golden_mean()
    assert abs(factor_entropy(X, lambda w: w, 1) - X.entropy()) < 1e-9
    # collapsing everything to one symbol gives a single fixed point
    assert factor_entropy(X, lambda w: "*", 1) == 0.0


def test_text_roundtrip(tmp_path):
    X = Sft1D("abc", ["ab", "cc"])
    Y = Sft1D.from_text(X.to_text())
    assert (Y.alphabet, Y.forbidden) == (X.alphabet, X.forbidden)
    p = tmp_path / "x.sft"
    p.write_text(X.to_text())
    assert Sft1D.from_file(p).forbidden == X.forbidden
    with pytest.raises(SftInputError):
        Sft1D("01", ["02"])
