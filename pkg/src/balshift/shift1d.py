"""One-dimensional shifts of finite type.

An SFT is stored as an alphabet plus a finite forbidden list.  Everything
else works on its vertex graph: vertices are the words of length
``m = max(t - 1, 1)`` that avoid F, edges are the legal ``(m+1)``-words.
Pruning vertices without predecessors or successors leaves the essential
graph, whose bi-infinite paths are exactly the points of X.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional

import networkx as nx
import numpy as np


class EmptyShiftError(ValueError):
    pass


class NotInLanguageError(ValueError):
    pass


class SftInputError(ValueError):
    pass


def _avoids(word: str, forbidden: Iterable[str]) -> bool:
    return not any(f in word for f in forbidden)


def _bool_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # float32 BLAS; entries stay below the matrix size so nothing overflows
    return (a.astype(np.float32) @ b.astype(np.float32)) > 0


def spectral_radius(adj: np.ndarray, rtol: float = 1e-10) -> float:
    """Perron root of a nonnegative integer matrix.

    Each nontrivial strongly connected block is handled separately by power
    iteration on ``B = A + I`` (primitive on the block), stopping when the
    Collatz-Wielandt lower and upper bounds agree to ``rtol``.  A block that
    is a single simple cycle has root exactly 1.
    """
    n = adj.shape[0]
    if n == 0:
        return 0.0
    g = nx.from_numpy_array(adj, create_using=nx.DiGraph)
    best = 0.0
    for comp in nx.strongly_connected_components(g):
        idx = sorted(comp)
        sub = adj[np.ix_(idx, idx)].astype(np.float64)
        if len(idx) == 1 and sub[0, 0] == 0:
            continue
        if np.all(sub.sum(axis=1) == 1):
            best = max(best, 1.0)
            continue
        b = sub + np.eye(len(idx))
        x = np.ones(len(idx))
        for _ in range(200000):
            y = b @ x
            ratios = y / x
            lo, hi = ratios.min(), ratios.max()
            x = y / y.max()
            if hi - lo <= rtol * lo:
                break
        best = max(best, (lo + hi) / 2 - 1.0)
    return best


@dataclass
class Witness:
    """Annulus pattern proving that two words are exchangeable.

    ``left`` sits on ``[-N, -N+t-1]`` and ``right`` on ``[N-t+1, N]``; the
    fillings are full words on ``[-N, N]`` containing each word at ``[0, n-1]``.
    """

    N: int
    left: str
    right: str
    fill_a: str
    fill_b: str

    def delta(self) -> str:
        pad = "." * (2 * self.N + 1 - len(self.left) - len(self.right))
        return self.left + pad + self.right


class Sft1D:
    def __init__(self, alphabet: Iterable[str], forbidden: Iterable[str] = ()):
        self.alphabet = tuple(sorted(set(alphabet)))
        if not self.alphabet:
            raise SftInputError("empty alphabet")
        if any(len(a) != 1 for a in self.alphabet):
            raise SftInputError("letters must be single characters")
        fb = sorted(set(forbidden))
        for f in fb:
            if not f:
                raise SftInputError("forbidden words must be nonempty")
            if not set(f) <= set(self.alphabet):
                raise SftInputError(f"forbidden word {f!r} uses letters outside the alphabet")
        self.forbidden = tuple(fb)
        self.type_t = max((len(f) for f in fb), default=1)
        self.m = max(self.type_t - 1, 1)
        self._build()
        self._adj_f = (self.adj > 0).astype(np.float32)
        self._power_cache: dict[int, np.ndarray] = {}

    def __repr__(self):
        return f"Sft1D(alphabet={''.join(self.alphabet)!r}, forbidden={list(self.forbidden)!r})"

    # graph construction

    def _build(self):
        m = self.m
        by_len: dict[int, list[str]] = {}
        for f in self.forbidden:
            by_len.setdefault(len(f), []).append(f)
        verts = [""]
        for j in range(1, m + 1):
            # only suffixes can introduce a new forbidden occurrence
            verts = [
                v + a
                for v in verts
                for a in self.alphabet
                if not any((v + a).endswith(f) for k, fs in by_len.items() if k <= j for f in fs)
            ]
        succ = {v: [] for v in verts}
        vset = set(verts)
        for v in verts:
            for a in self.alphabet:
                e = v + a
                if e[1:] in vset and _avoids(e, self.forbidden):
                    succ[v].append(e[1:])
        # prune to the essential part
        alive = set(verts)
        changed = True
        while changed:
            changed = False
            indeg = {v: 0 for v in alive}
            for v in alive:
                for u in succ[v]:
                    if u in alive:
                        indeg[u] += 1
            for v in list(alive):
                if indeg[v] == 0 or not any(u in alive for u in succ[v]):
                    alive.discard(v)
                    changed = True
        self.vertices = sorted(alive)
        self.index = {v: i for i, v in enumerate(self.vertices)}
        k = len(self.vertices)
        self.adj = np.zeros((k, k), dtype=np.int64)
        for v in self.vertices:
            for u in succ[v]:
                if u in alive:
                    self.adj[self.index[v], self.index[u]] = 1
        self.graph = nx.DiGraph()
        self.graph.add_nodes_from(self.vertices)
        for v in self.vertices:
            for u in succ[v]:
                if u in alive:
                    self.graph.add_edge(v, u)
        self._edges = {v + u[-1] for v, u in self.graph.edges}
        self._prefixes = {v[:j] for v in self.vertices for j in range(m + 1)}

    # basic queries

    def is_empty(self) -> bool:
        return not self.vertices

    def _require_nonempty(self):
        if self.is_empty():
            raise EmptyShiftError(f"{self!r} is empty")

    def is_locally_legal(self, w: str) -> bool:
        return set(w) <= set(self.alphabet) and _avoids(w, self.forbidden)

    def contains(self, w: str) -> bool:
        """Is ``w`` in L(X), i.e. does it occur in some point?"""
        m = self.m
        if len(w) <= m:
            return w in self._prefixes
        return all(w[i : i + m + 1] in self._edges for i in range(len(w) - m))

    def language(self, n: int) -> set[str]:
        if n < 1:
            raise SftInputError("n must be positive")
        m = self.m
        if n <= m:
            return {v[:n] for v in self.vertices}
        out = set()
        succ = {v: list(self.graph.successors(v)) for v in self.vertices}
        stack = [(v, v) for v in self.vertices]
        while stack:
            word, v = stack.pop()
            if len(word) == n:
                out.add(word)
                continue
            for u in succ[v]:
                stack.append((word + u[-1], u))
        return out

    # recurrence structure

    def is_irreducible(self) -> bool:
        self._require_nonempty()
        return nx.is_strongly_connected(self.graph)

    def is_mixing(self) -> bool:
        return self.is_irreducible() and nx.is_aperiodic(self.graph)

    def entropy(self) -> float:
        self._require_nonempty()
        rho = spectral_radius(self.adj)
        return 0.0 if rho <= 1.0 else float(np.log(rho))

    # exchangeability

    def _power(self, k: int) -> np.ndarray:
        if k not in self._power_cache:
            n = len(self.vertices)
            result = np.eye(n, dtype=bool)
            base = self.adj > 0
            e = k
            while e:
                if e & 1:
                    result = _bool_mul(result, base)
                base = _bool_mul(base, base)
                e >>= 1
            self._power_cache[k] = result
        return self._power_cache[k]

    def _mask(self, w: str, i: int) -> np.ndarray:
        """Vertices starting at position ``i`` consistent with ``w`` on [0, |w|-1]."""
        m = self.m
        lo, hi = max(i, 0), min(i + m, len(w))
        if lo >= hi:
            return np.ones(len(self.vertices), dtype=bool)
        seg = w[lo:hi]
        return np.array([v[lo - i : hi - i] == seg for v in self.vertices], dtype=bool)

    def _check_frame(self, n: int, N: int):
        t = self.type_t
        if N - t < n - 1 or -N + t > 0:
            raise SftInputError(f"interval [0,{n - 1}] does not fit inside [{-N + t},{N - t}]")

    def _bounds(self, n: int, N: int) -> tuple[int, int, int, int]:
        t, m = self.type_t, self.m
        p0 = -N + t - m
        p1 = N - t + 1
        return p0, -m + 1, n - 1, p1

    def interior_reach(self, w: str, N: int) -> np.ndarray:
        """Boolean matrix: vertex pairs (l, r) joined by a legal filling through ``w``.

        ``l`` is the last vertex of the left annulus block, ``r`` the first of
        the right one.
        """
        self._check_frame(len(w), N)
        p0, s0, s1, p1 = self._bounds(len(w), N)
        a = self._adj_f
        rows = np.flatnonzero(self._mask(w, s0))
        seg = np.eye(len(rows), dtype=np.float32)
        cur = rows
        for i in range(s0 + 1, s1 + 1):
            nxt = np.flatnonzero(self._mask(w, i))
            seg = ((seg @ a[np.ix_(cur, nxt)]) > 0).astype(np.float32)
            cur = nxt
        left = self._power(s0 - p0)[:, rows].astype(np.float32)
        right = self._power(p1 - s1)[cur, :].astype(np.float32)
        return ((left @ seg) > 0).astype(np.float32) @ right > 0

    def _path(self, w: str, start: int, end: int, p0: int, p1: int) -> list[str]:
        k = len(self.vertices)
        a = self.adj > 0
        layers = []
        cur = np.zeros(k, dtype=bool)
        cur[start] = True
        layers.append(cur)
        for i in range(p0 + 1, p1 + 1):
            cur = (cur.astype(np.float32) @ self._adj_f > 0) & self._mask(w, i)
            layers.append(cur)
        if not layers[-1][end]:
            raise NotInLanguageError("no filling between the chosen annulus vertices")
        path = [end]
        for i in range(len(layers) - 2, -1, -1):
            nxt = path[-1]
            prev = next(j for j in np.flatnonzero(layers[i]) if a[j, nxt])
            path.append(prev)
        return [self.vertices[j] for j in reversed(path)]

    def _extend_left(self, v: str, steps: int) -> str:
        word = v
        cur = v
        for _ in range(steps):
            cur = next(iter(sorted(self.graph.predecessors(cur))))
            word = cur[0] + word
        return word

    def _extend_right(self, v: str, steps: int) -> str:
        word = v
        cur = v
        for _ in range(steps):
            cur = next(iter(sorted(self.graph.successors(cur))))
            word = word + cur[-1]
        return word

    def _check_word(self, w: str):
        if not self.contains(w):
            raise NotInLanguageError(f"{w!r} is not in the language of {self!r}")

    def exchangeable(self, w: str, w2: str, N: int) -> Optional[Witness]:
        self._check_word(w)
        self._check_word(w2)
        if len(w) != len(w2):
            raise SftInputError("exchangeable words must have the same length")
        both = self.interior_reach(w, N) & self.interior_reach(w2, N)
        return self._witness_from(both, w, w2, N)

    def _witness_from(self, both: np.ndarray, w: str, w2: str, N: int) -> Optional[Witness]:
        hits = np.argwhere(both)
        if len(hits) == 0:
            return None
        li, ri = (int(x) for x in hits[0])
        return self._witness_at(li, ri, w, w2, N)

    def _witness_at(self, li: int, ri: int, w: str, w2: str, N: int) -> Witness:
        t, m = self.type_t, self.m
        p0, _, _, p1 = self._bounds(len(w), N)
        left = self._extend_left(self.vertices[li], t - m)
        right = self._extend_right(self.vertices[ri], t - m)
        fills = []
        for word in (w, w2):
            path = self._path(word, li, ri, p0, p1)
            mid = "".join(v[0] for v in path[:-1]) + path[-1]
            fills.append(left[: t - m] + mid + right[m:])
        wit = Witness(N, left, right, fills[0], fills[1])
        for f, word in zip(fills, (w, w2)):
            assert len(f) == 2 * N + 1 and f[N : N + len(word)] == word and self.contains(f)
        return wit

    # periodic witnesses

    def positive_frequency_witness(self, w: str) -> Optional[str]:
        """One period of a periodic point containing ``w``, or None."""
        self._check_word(w)
        m = self.m
        if len(w) < m:
            for v in self.vertices:
                if v.startswith(w):
                    per = self._close_cycle([v])
                    if per is not None:
                        return per
            return None
        path = [w[i : i + m] for i in range(len(w) - m + 1)]
        return self._close_cycle(path)

    def _close_cycle(self, path: list[str]) -> Optional[str]:
        first, last = path[0], path[-1]
        # shortest path of positive length from last back to first
        seen = {}
        queue = deque()
        for u in self.graph.successors(last):
            if u not in seen:
                seen[u] = None
                queue.append(u)
        while queue and first not in seen:
            u = queue.popleft()
            for x in self.graph.successors(u):
                if x not in seen:
                    seen[x] = u
                    queue.append(x)
        if first not in seen:
            return None
        back = [first]
        while seen[back[-1]] is not None:
            back.append(seen[back[-1]])
        back.reverse()  # starts at a successor of last, ends at first
        cycle = path + back[:-1]
        return "".join(v[0] for v in cycle)

    # io

    @classmethod
    def from_text(cls, text: str) -> "Sft1D":
        lines = [ln.strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln and not ln.startswith("#")]
        if not lines:
            raise SftInputError("empty forbidden-list file")
        return cls(lines[0], lines[1:])

    @classmethod
    def from_file(cls, path) -> "Sft1D":
        return cls.from_text(Path(path).read_text())

    def to_text(self) -> str:
        return "\n".join(["".join(self.alphabet), *self.forbidden]) + "\n"


def full_shift(alphabet: str = "01") -> Sft1D:
    return Sft1D(alphabet, [])


def golden_mean() -> Sft1D:
    return Sft1D("01", ["11"])


@dataclass
class ChainGraph:
    """Exchangeability graph on L_n(X).

    ``edges`` maps each exchangeable pair to the annulus vertex pair (l, r)
    used for its witness; witnesses are rebuilt on request.
    """

    nodes: list[str]
    edges: dict[tuple[str, str], tuple[int, int]]
    annulus_radius: int
    sft: Optional["Sft1D"] = field(repr=False, default=None)
    graph: nx.Graph = field(repr=False, default=None)
    _witnesses: dict = field(repr=False, default_factory=dict)

    def __post_init__(self):
        g = nx.Graph()
        g.add_nodes_from(self.nodes)
        g.add_edges_from((a, b) for a, b in self.edges if a != b)
        self.graph = g

    def components(self) -> list[list[str]]:
        return sorted(sorted(c) for c in nx.connected_components(self.graph))

    @property
    def connected(self) -> bool:
        return len(self.nodes) > 0 and nx.is_connected(self.graph)

    @property
    def disconnected(self) -> bool:
        return not self.connected

    def diameters(self) -> list[int]:
        return [nx.diameter(self.graph.subgraph(c)) for c in self.components()]

    def diameter(self) -> Optional[int]:
        """Diameter if connected, else None (see :meth:`diameters`)."""
        return nx.diameter(self.graph) if self.connected else None

    def is_complete(self) -> bool:
        k = len(self.nodes)
        return self.graph.number_of_edges() == k * (k - 1) // 2

    def witness(self, a: str, b: str) -> Optional[Witness]:
        key = (a, b) if (a, b) in self.edges else (b, a)
        if key not in self.edges:
            return None
        if key not in self._witnesses:
            li, ri = self.edges[key]
            self._witnesses[key] = self.sft._witness_at(li, ri, key[0], key[1], self.annulus_radius)
        w = self._witnesses[key]
        if key != (a, b):
            w = Witness(w.N, w.left, w.right, w.fill_b, w.fill_a)
        return w

    def to_edge_list(self) -> str:
        lines = [f"# nodes {len(self.nodes)} radius {self.annulus_radius}"]
        lines += [f"node {v}" for v in self.nodes]
        lines += [f"{a} {b} {self.witness(a, b).delta()}" for a, b in sorted(self.edges) if a != b]
        return "\n".join(lines) + "\n"

    def to_dot(self) -> str:
        lines = ["graph chain {"]
        lines += [f'  "{v}";' for v in self.nodes]
        lines += [f'  "{a}" -- "{b}";' for a, b in sorted(self.edges) if a != b]
        lines.append("}")
        return "\n".join(lines) + "\n"


def chain_graph(X: Sft1D, n: int, N: int) -> ChainGraph:
    if n < 1:
        raise SftInputError("n must be positive")
    if N <= n + X.type_t:
        raise SftInputError(f"need N > n + t = {n + X.type_t}")
    nodes = sorted(X.language(n))
    k = len(X.vertices)
    # packed bit rows keep the pairwise intersections cheap
    reach = {w: np.packbits(X.interior_reach(w, N), axis=None) for w in nodes}
    edges = {}
    for i, a in enumerate(nodes):
        for b in nodes[i:]:
            both = reach[a] & reach[b]
            pos = int(both.argmax())
            if both[pos]:
                bit = int(np.unpackbits(both[pos : pos + 1]).argmax())
                edges[(a, b)] = divmod(8 * pos + bit, k)
    return ChainGraph(nodes, edges, N, X)


def default_radius(X: Sft1D, n: int) -> int:
    return n + 2 * X.type_t + 4


@dataclass
class ReportRow:
    n: int
    words: int
    missing_witness: list[str]
    connected: bool
    components: int
    diameters: list[int]

    @property
    def passed(self) -> bool:
        return not self.missing_witness and self.connected


@dataclass
class ZtcpeReport:
    rows: list[ReportRow]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def first_failure(self) -> Optional[ReportRow]:
        return next((r for r in self.rows if not r.passed), None)

    def render(self) -> str:
        out = []
        for r in self.rows:
            status = "PASS" if r.passed else "FAIL"
            why = []
            if r.missing_witness:
                why.append(f"no periodic witness for {r.missing_witness[:3]}")
            if not r.connected:
                why.append(f"chain graph disconnected ({r.components} components)")
            extra = f" ({'; '.join(why)})" if why else ""
            out.append(f"n={r.n} words={r.words} diameters={r.diameters} {status}{extra}")
        out.append("PASS" if self.passed else "FAIL")
        return "\n".join(out)


def ztcpe_report(
    X: Sft1D, n_max: int, N: Optional[int] = None, radius: Optional[Callable[[int], int]] = None
) -> ZtcpeReport:
    """Check, for each n <= n_max, periodic witnesses and chain connectivity.

    ``N`` fixes one radius for every n; otherwise ``radius(n)`` or the default
    ``n + 2t + 4`` is used, bumped up when too small for n.
    """
    X._require_nonempty()
    rows = []
    for n in range(1, n_max + 1):
        if N is not None:
            rad = max(N, n + X.type_t + 1)
        elif radius is not None:
            rad = radius(n)
        else:
            rad = default_radius(X, n)
        words = sorted(X.language(n))
        missing = [w for w in words if X.positive_frequency_witness(w) is None]
        cg = chain_graph(X, n, rad)
        rows.append(
            ReportRow(n, len(words), missing, cg.connected, len(cg.components()), cg.diameters())
        )
    return ZtcpeReport(rows)


def factor_entropy(X: Sft1D, block: Callable[[str], str], window: int) -> float:
    """Entropy of the image of X under a sliding block code of the given window.

    The image is presented by the ``k``-block graph of X with edges labelled by
    ``block``; a subset construction makes it right-resolving, and the entropy
    is the log of that graph's spectral radius.
    """
    X._require_nonempty()
    k = max(X.m, window - 1)
    verts = sorted(X.language(k))
    edges = sorted(X.language(k + 1))
    out: dict[str, dict[str, set[str]]] = {v: {} for v in verts}
    for e in edges:
        out[e[:-1]].setdefault(block(e[:window]), set()).add(e[1:])
    start = frozenset(verts)
    states = {start: 0}
    trans = []
    queue = deque([start])
    while queue:
        s = queue.popleft()
        by_label: dict[str, set[str]] = {}
        for v in s:
            for lab, tgt in out[v].items():
                by_label.setdefault(lab, set()).update(tgt)
        for lab, tgt in by_label.items():
            t = frozenset(tgt)
            if t not in states:
                states[t] = len(states)
                queue.append(t)
            trans.append((states[s], states[t]))
    adj = np.zeros((len(states), len(states)), dtype=np.int64)
    for a, b in trans:
        adj[a, b] += 1
    rho = spectral_radius(adj)
    return 0.0 if rho <= 1.0 else float(np.log(rho))
