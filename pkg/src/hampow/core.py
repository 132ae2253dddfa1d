"""Uniform hypergraphs, path templates, embeddings and cycle certificates.

Vertices are dense 0-based integers.  A graph is simply the 2-uniform case;
there is one code path for both.  Hypergraphs are immutable after
construction and safe to share between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Mapping

import numpy as np

__all__ = [
    "CycleCertificate",
    "Hypergraph",
    "VertexTuple",
    "connecting_path_template",
    "is_embedding",
    "is_power_path",
    "is_tight_path",
    "power_path_template",
    "tight_path_template",
    "verify_certificate",
]


class VertexTuple(tuple):
    """Ordered tuple of distinct vertices.

    Reversal is an involution: ``t.reversed().reversed() == t``.
    """

    __slots__ = ()

    def __new__(cls, vertices: Iterable[int] = ()) -> "VertexTuple":
        t = super().__new__(cls, (int(v) for v in vertices))
        if len(set(t)) != len(t):
            raise ValueError(f"vertices must be distinct, got {tuple(t)}")
        return t

    def reversed(self) -> "VertexTuple":
        return VertexTuple(reversed(self))


#: Injective map from template vertices to host vertices.
Embedding = Mapping[int, int]


class Hypergraph:
    """Immutable k-uniform hypergraph on the vertex set ``{0, .., n-1}``.

    Edges are stored as radix-encoded integers in a sorted array, which makes
    equality, hashing and serialization canonical and keeps membership tests
    cheap.  Complete hypergraphs are represented implicitly (no edge storage)
    so that dense hosts of any uniformity stay usable.
    """

    __slots__ = ("k", "n", "_codes", "_complete", "_adj")

    def __init__(self, k: int, n: int, edges: Iterable[Iterable[int]]):
        self.k = int(k)
        self.n = int(n)
        if self.k < 2:
            raise ValueError(f"uniformity must be >= 2, got {k}")
        if self.n < 0:
            raise ValueError(f"vertex count must be >= 0, got {n}")
        if self.n > 0 and self.n ** self.k >= 2 ** 62:
            raise ValueError(f"n={n}, k={k} exceeds the edge-encoding range")
        codes = []
        for edge in edges:
            codes.append(self._encode_checked(edge))
        arr = np.array(sorted(codes), dtype=np.int64)
        if arr.size > 1 and np.any(arr[1:] == arr[:-1]):
            raise ValueError("duplicate edges are not allowed")
        self._codes = arr
        self._complete = False
        self._adj = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def complete(cls, k: int, n: int) -> "Hypergraph":
        """Complete k-uniform hypergraph, stored implicitly."""
        g = cls(k, n, ())
        if n < k:
            return g
        g._complete = True
        g._codes = None
        return g

    @classmethod
    def from_codes(cls, k: int, n: int, codes: np.ndarray) -> "Hypergraph":
        """Internal fast path: ``codes`` must be sorted, unique, valid."""
        g = cls(k, n, ())
        g._codes = np.asarray(codes, dtype=np.int64)
        return g

    # -- encoding ----------------------------------------------------------

    def _encode_checked(self, edge: Iterable[int]) -> int:
        vs = sorted(int(v) for v in edge)
        if len(vs) != self.k or len(set(vs)) != self.k:
            raise ValueError(f"edge {tuple(edge)} must have {self.k} distinct vertices")
        if vs[0] < 0 or vs[-1] >= self.n:
            raise ValueError(f"edge {tuple(vs)} out of range [0, {self.n})")
        code = 0
        for v in vs:
            code = code * self.n + v
        return code

    def encode(self, sorted_edge: Iterable[int]) -> int:
        """Radix code of an already sorted, validated edge."""
        code = 0
        for v in sorted_edge:
            code = code * self.n + v
        return code

    def decode(self, code: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.k):
            code, v = divmod(code, self.n)
            out.append(int(v))
        return tuple(reversed(out))

    # -- basic queries -----------------------------------------------------

    @property
    def is_complete(self) -> bool:
        return self._complete

    @property
    def edge_count(self) -> int:
        if self._complete:
            return math.comb(self.n, self.k)
        return int(self._codes.size)

    def has_edge(self, vertices: Iterable[int]) -> bool:
        vs = sorted(int(v) for v in vertices)
        if len(vs) != self.k or len(set(vs)) != self.k:
            return False
        if vs[0] < 0 or vs[-1] >= self.n:
            return False
        if self._complete:
            return True
        code = self.encode(vs)
        i = np.searchsorted(self._codes, code)
        return bool(i < self._codes.size and self._codes[i] == code)

    def has_codes(self, codes: np.ndarray) -> np.ndarray:
        """Vectorized membership for radix codes of valid sorted edges."""
        if self._complete:
            return np.ones(len(codes), dtype=bool)
        idx = np.searchsorted(self._codes, codes)
        idx = np.minimum(idx, max(self._codes.size - 1, 0))
        if self._codes.size == 0:
            return np.zeros(len(codes), dtype=bool)
        return self._codes[idx] == codes

    def edges(self) -> Iterator[tuple[int, ...]]:
        """Edges as sorted tuples, in canonical (lexicographic) order."""
        if self._complete:
            yield from combinations(range(self.n), self.k)
            return
        for code in self._codes.tolist():
            yield self.decode(code)

    def edge_codes(self) -> np.ndarray:
        if self._complete:
            raise ValueError("complete hypergraph edges are implicit")
        return self._codes

    def neighbors(self, v: int) -> np.ndarray:
        """Sorted neighbor array (2-uniform only)."""
        if self.k != 2:
            raise ValueError("neighbors() requires a 2-uniform hypergraph")
        if self._complete:
            out = np.arange(self.n, dtype=np.int64)
            return np.delete(out, v)
        if self._adj is None:
            u = self._codes // self.n
            w = self._codes % self.n
            src = np.concatenate([u, w])
            dst = np.concatenate([w, u])
            order = np.lexsort((dst, src))
            src, dst = src[order], dst[order]
            starts = np.searchsorted(src, np.arange(self.n + 1))
            self._adj = (starts, dst)
        starts, dst = self._adj
        return dst[starts[v]:starts[v + 1]]

    def degree(self, v: int) -> int:
        if self.k == 2:
            return int(len(self.neighbors(v)))
        return sum(1 for e in self.edges() if v in e)

    def union(self, *others: "Hypergraph") -> "Hypergraph":
        graphs = (self,) + others
        if any(g.k != self.k or g.n != self.n for g in graphs):
            raise ValueError("union requires matching uniformity and vertex count")
        if any(g._complete for g in graphs):
            return Hypergraph.complete(self.k, self.n)
        codes = np.union1d(self._codes, graphs[1]._codes) if len(graphs) == 2 else self._codes
        if len(graphs) != 2:
            codes = self._codes
            for g in graphs[1:]:
                codes = np.union1d(codes, g._codes)
        return Hypergraph.from_codes(self.k, self.n, codes)

    # -- equality / text ----------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        if (self.k, self.n, self._complete) != (other.k, other.n, other._complete):
            return False
        if self._complete:
            return True
        return bool(np.array_equal(self._codes, other._codes))

    def __hash__(self) -> int:
        if self._complete:
            return hash((self.k, self.n, "complete"))
        return hash((self.k, self.n, self._codes.tobytes()))

    def __repr__(self) -> str:
        tag = "complete " if self._complete else ""
        return f"Hypergraph({tag}k={self.k}, n={self.n}, m={self.edge_count})"

    def to_text(self) -> str:
        """Bit-exact text format: ``k n m`` then one sorted edge per line."""
        lines = [f"{self.k} {self.n} {self.edge_count}"]
        for e in self.edges():
            lines.append(" ".join(str(v) for v in e))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Hypergraph":
        lines = text.splitlines()
        if not lines:
            raise ValueError("empty hypergraph text")
        head = lines[0].split()
        if len(head) != 3:
            raise ValueError(f"bad header {lines[0]!r}, expected 'k n m'")
        k, n, m = (int(x) for x in head)
        if len(lines) < 1 + m:
            raise ValueError(f"expected {m} edge lines, found {len(lines) - 1}")
        edges = []
        for line in lines[1:1 + m]:
            vs = [int(x) for x in line.split()]
            if any(a >= b for a, b in zip(vs, vs[1:])):
                raise ValueError(f"edge line {line!r} is not strictly increasing")
            edges.append(vs)
        return cls(k, n, edges)


# -- path templates ---------------------------------------------------------


def _power_path_pairs(k: int, ell: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(ell) for j in range(i + 1, min(i + k, ell - 1) + 1)]


def power_path_template(k: int, ell: int) -> Hypergraph:
    """k-th power of a path on ``ell`` vertices: edges {i, j} with 0 < j-i <= k."""
    if k < 1:
        raise ValueError(f"path power must be >= 1, got {k}")
    if ell < 2:
        raise ValueError(f"path length must be >= 2, got {ell}")
    return Hypergraph(2, ell, _power_path_pairs(k, ell))


def connecting_path_template(k: int, ell: int) -> Hypergraph:
    """Power path with the edges inside the two end blocks removed.

    Edges with both endpoints among the first k vertices, or both among the
    last k, are dropped; everything else of the k-power path stays.  The end
    blocks then behave like free sockets for prescribed endpoint tuples.

    For ell < 3k this keeps edges running directly between the two end
    blocks (they are required when such a path is spliced between two
    structures); :func:`middle_connecting_path_template` is the stricter
    variant without them.  The two coincide for ell >= 3k.
    """
    if k < 1:
        raise ValueError(f"path power must be >= 1, got {k}")
    if ell <= 2 * k:
        raise ValueError(f"connecting path needs ell >= {2 * k + 1}, got {ell}")
    first = set(range(k))
    last = set(range(ell - k, ell))
    pairs = [
        (i, j)
        for i, j in _power_path_pairs(k, ell)
        if not ({i, j} <= first or {i, j} <= last)
    ]
    return Hypergraph(2, ell, pairs)


def middle_connecting_path_template(k: int, ell: int) -> Hypergraph:
    """Connecting path keeping only edges that meet the interior.

    Every edge must have an endpoint outside both end blocks, so the end
    tuple is always independent; this is the right object for rooted density
    computations.  Coincides with :func:`connecting_path_template` for
    ell >= 3k.
    """
    if k < 1:
        raise ValueError(f"path power must be >= 1, got {k}")
    if ell <= 2 * k:
        raise ValueError(f"connecting path needs ell >= {2 * k + 1}, got {ell}")
    middle = set(range(k, ell - k))
    pairs = [(i, j) for i, j in _power_path_pairs(k, ell) if {i, j} & middle]
    return Hypergraph(2, ell, pairs)


def tight_path_template(k: int, ell: int) -> Hypergraph:
    """(k+1)-uniform path: consecutive windows {i, .., i+k}, ell-k edges."""
    if k < 1:
        raise ValueError(f"path parameter must be >= 1, got {k}")
    if ell <= k:
        raise ValueError(f"tight path needs ell >= {k + 1}, got {ell}")
    return Hypergraph(k + 1, ell, [tuple(range(i, i + k + 1)) for i in range(ell - k)])


# -- embeddings -------------------------------------------------------------


def is_embedding(template: Hypergraph, host: Hypergraph, f: Embedding) -> bool:
    """True iff ``f`` is injective on V(template) and maps edges to edges."""
    if template.k != host.k:
        raise ValueError(
            f"uniformity mismatch: template is {template.k}-uniform, host {host.k}-uniform"
        )
    if len(f) != template.n:
        return False
    images = set(f.values())
    if len(images) != template.n:
        return False
    if any(v < 0 or v >= host.n for v in images):
        return False
    return all(host.has_edge([f[v] for v in e]) for e in template.edges())


# -- path and cycle validation ----------------------------------------------


def is_power_path(host: Hypergraph, seq: Iterable[int], k: int) -> bool:
    """True iff every pair of ``seq`` at distance <= k is a host edge."""
    if host.k != 2:
        raise ValueError("power paths live in 2-uniform hosts")
    s = list(seq)
    if len(set(s)) != len(s):
        return False
    return all(
        host.has_edge((s[i], s[j]))
        for i in range(len(s))
        for j in range(i + 1, min(i + k, len(s) - 1) + 1)
    )


def is_tight_path(host: Hypergraph, seq: Iterable[int]) -> bool:
    """True iff every window of host-uniformity consecutive vertices is an edge."""
    s = list(seq)
    if len(set(s)) != len(s):
        return False
    w = host.k
    if len(s) < w:
        # shorter than one window: trivially a tight path
        return True
    return all(host.has_edge(s[i:i + w]) for i in range(len(s) - w + 1))


@dataclass(frozen=True)
class CycleCertificate:
    """A cyclic vertex ordering claimed to be a spanning power/tight cycle.

    ``mode`` is ``"power"`` (k-th power of a Hamilton cycle in a graph) or
    ``"tight"`` (tight Hamilton cycle in a (k+1)-uniform hypergraph, whose
    windows have k+1 vertices).
    """

    mode: str
    k: int
    order: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.mode not in ("power", "tight"):
            raise ValueError(f"mode must be 'power' or 'tight', got {self.mode!r}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")

    def to_text(self) -> str:
        head = f"{self.mode} {self.k} {len(self.order)}"
        return head + "\n" + " ".join(str(v) for v in self.order) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CycleCertificate":
        lines = text.splitlines()
        if len(lines) < 2:
            raise ValueError("certificate text needs a header and an ordering line")
        mode, k, n = lines[0].split()
        order = tuple(int(x) for x in lines[1].split())
        if len(order) != int(n):
            raise ValueError(f"expected {n} vertices, found {len(order)}")
        return cls(mode=mode, k=int(k), order=order)


def verify_certificate(host: Hypergraph, cert: CycleCertificate) -> bool:
    """Check a certificate against the host graph.

    Power mode: every pair at cyclic distance <= k in the ordering must be a
    host edge.  Tight mode: every window of host-uniformity many consecutive
    vertices (indices mod n) must be an edge.  Structural defects (wrong
    permutation, mode/uniformity mismatch) raise ``ValueError``.
    """
    n = host.n
    order = cert.order
    if len(order) != n or set(order) != set(range(n)):
        raise ValueError("certificate ordering is not a permutation of the vertex set")
    if cert.mode == "power":
        if host.k != 2:
            raise ValueError("power-mode certificates require a 2-uniform host")
        seen = set()
        for i in range(n):
            for d in range(1, cert.k + 1):
                u, v = order[i], order[(i + d) % n]
                if u == v:
                    continue  # wrapped onto itself: n <= d, no pair required
                key = (u, v) if u < v else (v, u)
                if key in seen:
                    continue
                seen.add(key)
                if not host.has_edge(key):
                    return False
        return True
    # tight mode
    if host.k != cert.k + 1:
        raise ValueError(
            f"tight-mode certificate with k={cert.k} requires a "
            f"{cert.k + 1}-uniform host, got {host.k}-uniform"
        )
    if n < host.k:
        raise ValueError(f"host has fewer vertices than one window ({host.k})")
    w = host.k
    ext = order + order[:w - 1]
    return all(host.has_edge(ext[i:i + w]) for i in range(n))
