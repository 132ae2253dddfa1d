"""Rooted copy search and the round-based greedy connection algorithm.

The searcher embeds a template into a host graph with the root tuple pinned
to prescribed host vertices and all internal vertices drawn from an allowed
reservoir.  Search is backtracking along a connectivity-aware template order
with candidates generated from already-placed neighbors, tried in ascending
host order, so results are deterministic and the first embedding found is
the lexicographically least assignment along that order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from hampow.core import Hypergraph, VertexTuple
from hampow.density import RootedTemplate

__all__ = [
    "ConnectFailure",
    "ConnectionRequest",
    "PathFamily",
    "PhaseFailure",
    "RootedMatching",
    "connect_family",
    "connect_paths",
    "find_rooted_copy",
    "partition_reservoir",
]


class PhaseFailure(Exception):
    """A construction phase did not complete; carries a diagnosis payload."""

    def __init__(self, phase: str, message: str, **details):
        super().__init__(f"{phase}: {message}")
        self.phase = phase
        self.message = message
        self.details = details


class SearchBudgetExceeded(Exception):
    """A bounded copy search ran out of candidate checks before finishing.

    Distinct from a None result: None certifies that no copy exists, while
    this says the (exhaustive) search was cut short.  Phases turn it into a
    fast failure so hopeless sparse hosts do not burn exponential time.
    """


class _Budget:
    __slots__ = ("remaining",)

    def __init__(self, checks: int):
        self.remaining = int(checks)

    def spend(self) -> None:
        self.remaining -= 1
        if self.remaining < 0:
            raise SearchBudgetExceeded()


class ConnectFailure(PhaseFailure):
    """Greedy connection rounds ended with unmatched requests."""

    def __init__(self, phase: str, unmatched: list[int], trajectory: list[int], **details):
        super().__init__(
            phase,
            f"{len(unmatched)} request(s) unmatched after {len(trajectory)} round(s)",
            unmatched=unmatched,
            trajectory=trajectory,
            **details,
        )
        self.unmatched = unmatched
        self.trajectory = trajectory


class _CopySearcher:
    """Reusable backtracking search for rooted copies of one template."""

    def __init__(self, host: Hypergraph, template: Hypergraph, root: Sequence[int]):
        if host.k != template.k:
            raise ValueError(
                f"uniformity mismatch: host {host.k}-uniform, template {template.k}-uniform"
            )
        self.host = host
        self.template = template
        self.root = tuple(root)
        rs = set(self.root)
        if len(rs) != len(self.root):
            raise ValueError("root vertices must be distinct")
        edges = [tuple(e) for e in template.edges()]
        self.root_edges = [e for e in edges if set(e) <= rs]
        # connectivity-aware order over the internal vertices
        placed = set(rs)
        internals = [v for v in range(template.n) if v not in rs]
        order: list[int] = []
        remaining = set(internals)
        while remaining:
            adjacent = sorted(
                v for v in remaining
                if any(v in e and (set(e) & placed) for e in edges)
            )
            nxt = adjacent[0] if adjacent else min(remaining)
            order.append(nxt)
            placed.add(nxt)
            remaining.discard(nxt)
        self.order = order
        # an edge is anchored at the latest-placed internal vertex it contains:
        # it becomes fully determined (and checkable) exactly there
        pos = {v: i for i, v in enumerate(order)}
        self.anchors: list[list[tuple[int, ...]]] = [[] for _ in order]
        for e in edges:
            internal = [v for v in e if v in pos]
            if not internal:
                continue
            last = max(internal, key=pos.__getitem__)
            self.anchors[pos[last]].append(e)

    def find(
        self,
        y: Sequence[int],
        allowed_sorted: Sequence[int],
        allowed_set: set[int],
        budget: "_Budget | None" = None,
    ) -> dict[int, int] | None:
        """First embedding with root -> y and internals inside allowed, or None.

        With a budget, every candidate check spends one unit and exhaustion
        raises :class:`SearchBudgetExceeded`.
        """
        host, template = self.host, self.template
        if len(y) != len(self.root):
            raise ValueError(f"root tuple has {len(self.root)} vertices, image has {len(y)}")
        if len(set(y)) != len(y):
            raise ValueError("root image vertices must be distinct")
        if any(v in allowed_set for v in y):
            raise ValueError("root image must be disjoint from the allowed reservoir")
        images: dict[int, int] = dict(zip(self.root, y))
        for e in self.root_edges:
            if not host.has_edge([images[v] for v in e]):
                return None
        if not self.order:
            return dict(images)
        used: set[int] = set()
        iters: list[Iterable[int]] = [
            self._candidates(0, images, used, allowed_sorted, allowed_set, budget)
        ]
        chosen: list[int | None] = [None]
        while iters:
            depth = len(iters) - 1
            v_t = self.order[depth]
            nxt = next(iters[depth], None)
            if nxt is None:
                iters.pop()
                chosen.pop()
                if chosen:
                    prev = chosen[-1]
                    if prev is not None:
                        used.discard(prev)
                        del images[self.order[len(iters) - 1]]
                        chosen[-1] = None
                continue
            if chosen[-1] is not None:
                used.discard(chosen[-1])
            images[v_t] = nxt
            used.add(nxt)
            chosen[-1] = nxt
            if depth + 1 == len(self.order):
                return dict(images)
            iters.append(
                self._candidates(depth + 1, images, used, allowed_sorted, allowed_set, budget)
            )
            chosen.append(None)
        return None

    def _candidates(self, depth, images, used, allowed_sorted, allowed_set, budget=None):
        v_t = self.order[depth]
        anchors = self.anchors[depth]
        host = self.host
        if host.k == 2 and anchors:
            arrays = [host.neighbors(images[next(u for u in e if u != v_t)]) for e in anchors]
            cand = arrays[0]
            for arr in arrays[1:]:
                cand = np.intersect1d(cand, arr, assume_unique=True)
            for w in cand.tolist():
                if budget is not None:
                    budget.spend()
                if w in allowed_set and w not in used:
                    yield w
            return
        for w in allowed_sorted:
            if budget is not None:
                budget.spend()
            if w in used:
                continue
            ok = True
            for e in anchors:
                image = [images[u] if u != v_t else w for u in e]
                if not host.has_edge(image):
                    ok = False
                    break
            if ok:
                yield w


def find_rooted_copy(
    host: Hypergraph,
    rt: RootedTemplate,
    y: Sequence[int],
    allowed: Iterable[int],
) -> dict[int, int] | None:
    """Embed rt.template into the host with root -> y, internals in allowed.

    Returns the first embedding found by the deterministic backtracking
    search, or None when no such copy exists (the search is exhaustive).
    """
    allowed_sorted = sorted(set(allowed))
    searcher = _CopySearcher(host, rt.template, rt.root)
    return searcher.find(tuple(y), allowed_sorted, set(allowed_sorted))


@dataclass(frozen=True)
class ConnectionRequest:
    """A family of disjoint root-image tuples to connect inside a reservoir."""

    template: Hypergraph
    root: VertexTuple
    tuples: tuple[VertexTuple, ...]
    reservoir: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "root", VertexTuple(self.root))
        object.__setattr__(self, "tuples", tuple(VertexTuple(t) for t in self.tuples))
        object.__setattr__(self, "reservoir", tuple(sorted(set(self.reservoir))))
        r = len(self.root)
        w = set(self.reservoir)
        seen: set[int] = set()
        for t in self.tuples:
            if len(t) != r:
                raise ValueError(f"tuple {t} does not match the root arity {r}")
            ts = set(t)
            if ts & seen:
                raise ValueError("request tuples must be pairwise disjoint")
            if ts & w:
                raise ValueError("request tuples must avoid the reservoir")
            seen |= ts

    @property
    def internals_per_copy(self) -> int:
        return self.template.n - len(self.root)


@dataclass
class RootedMatching:
    """Vertex-disjoint rooted copies, one per request index."""

    embeddings: list[dict[int, int]]
    trajectory: list[int] = field(default_factory=list)
    round_sizes: list[int] = field(default_factory=list)
    strict_precondition: bool = True

    def internal_vertices(self, root: Sequence[int]) -> set[int]:
        rs = set(root)
        out: set[int] = set()
        for emb in self.embeddings:
            out |= {host for tv, host in emb.items() if tv not in rs}
        return out


def partition_reservoir(
    reservoir: Iterable[int], rounds: int, include_remainder: bool = False
) -> list[tuple[int, ...]]:
    """Split a reservoir into round-sized slices, in canonical vertex order.

    Round i (1-based) gets max(|W| // 2^(i+1), |W| // (2 * rounds)) vertices,
    so early rounds get geometrically shrinking slices clamped from below.
    The stated sizes always leave vertices over; ``include_remainder``
    appends them as one final slice so the whole reservoir is usable (the
    pipeline needs this on small reservoirs).
    """
    w = sorted(set(reservoir))
    if not w:
        raise ValueError("reservoir must be nonempty")
    if rounds < 1:
        raise ValueError(f"rounds must be >= 1, got {rounds}")
    total = len(w)
    sizes = [max(total // 2 ** (i + 1), total // (2 * rounds)) for i in range(1, rounds + 1)]
    if sum(sizes) > total:
        raise ValueError(f"round sizes {sizes} exceed the reservoir ({total})")
    parts = []
    at = 0
    for s in sizes:
        parts.append(tuple(w[at:at + s]))
        at += s
    if include_remainder and at < total:
        parts.append(tuple(w[at:]))
    return parts


def _default_rounds(n: int) -> int:
    return max(1, math.ceil(math.log2(max(n, 2))))


def connect_family(
    host: Hypergraph,
    req: ConnectionRequest,
    rounds: int | None = None,
    include_remainder: bool = False,
    budget: int | None = None,
) -> RootedMatching:
    """Greedy round-based construction of a rooted matching.

    Keeps a set R of unmatched request indices; round j sweeps R in ascending
    order, searching each tuple inside the round's reservoir slice minus the
    vertices already consumed this round.  Matched indices leave R; matchings
    from different rounds are disjoint because the slices are.  Raises
    :class:`ConnectFailure` naming the surviving indices if R is nonempty
    after the last round.
    """
    if rounds is None:
        rounds = _default_rounds(host.n)
    t = len(req.tuples)
    if t == 0:
        return RootedMatching(embeddings=[])
    need = t * req.internals_per_copy
    if need > len(req.reservoir):
        raise ValueError(
            f"request needs {need} internal vertices but the reservoir has "
            f"{len(req.reservoir)}"
        )
    strict = need <= len(req.reservoir) // 4
    parts = partition_reservoir(req.reservoir, rounds, include_remainder=include_remainder)
    searcher = _CopySearcher(host, req.template, req.root)
    budget_obj = _Budget(budget) if budget is not None else None
    embeddings: list[dict[int, int] | None] = [None] * t
    remaining = list(range(t))
    trajectory: list[int] = []
    root_set = set(req.root)
    for part in parts:
        if not remaining:
            break
        part_sorted = list(part)
        part_set = set(part)
        used: set[int] = set()
        still: list[int] = []
        for i in remaining:
            allowed_sorted = [v for v in part_sorted if v not in used]
            try:
                emb = searcher.find(
                    req.tuples[i], allowed_sorted, part_set - used, budget=budget_obj
                )
            except SearchBudgetExceeded:
                raise ConnectFailure(
                    "connect",
                    unmatched=[j for j in range(t) if embeddings[j] is None],
                    trajectory=trajectory,
                    round_sizes=[len(p) for p in parts],
                    budget_exhausted=True,
                    strict_precondition=strict,
                ) from None
            if emb is None:
                still.append(i)
            else:
                embeddings[i] = emb
                used |= {h for tv, h in emb.items() if tv not in root_set}
        remaining = still
        trajectory.append(len(remaining))
    if remaining:
        raise ConnectFailure(
            "connect",
            unmatched=remaining,
            trajectory=trajectory,
            round_sizes=[len(p) for p in parts],
            strict_precondition=strict,
        )
    return RootedMatching(
        embeddings=[e for e in embeddings if e is not None],
        trajectory=trajectory,
        round_sizes=[len(p) for p in parts],
        strict_precondition=strict,
    )


@dataclass
class PathFamily:
    """Vertex-disjoint connecting paths, one per endpoint pair."""

    sequences: list[tuple[int, ...]]
    embeddings: list[dict[int, int]]
    trajectory: list[int]
    end_width: int = 0

    def internal_vertices(self) -> set[int]:
        out: set[int] = set()
        w = self.end_width
        for seq in self.sequences:
            out |= set(seq[w:len(seq) - w])
        return out


def connect_paths(
    host: Hypergraph,
    pairs: Sequence[tuple[Sequence[int], Sequence[int]]],
    reservoir: Iterable[int],
    k: int,
    ell: int,
    mode: str,
    rounds: int | None = None,
    include_remainder: bool = False,
    budget: int | None = None,
) -> PathFamily:
    """Connect endpoint tuple pairs with disjoint connecting/tight paths.

    Power mode uses the connecting-path template on a 2-uniform host; tight
    mode uses the tight-path template on a (k+1)-uniform host.  Path i runs
    from a_i to b_i with all internal vertices inside the reservoir.
    """
    from hampow.core import connecting_path_template, tight_path_template

    if mode not in ("power", "tight"):
        raise ValueError(f"mode must be 'power' or 'tight', got {mode!r}")
    if ell <= 2 * k:
        raise ValueError(f"connector length must exceed 2k = {2 * k}, got {ell}")
    if mode == "power":
        if host.k != 2:
            raise ValueError("power mode requires a 2-uniform host")
        template = connecting_path_template(k, ell)
    else:
        if host.k != k + 1:
            raise ValueError(
                f"tight mode with k={k} requires a {k + 1}-uniform host, got {host.k}"
            )
        template = tight_path_template(k, ell)
    root = VertexTuple(tuple(range(k)) + tuple(range(ell - k, ell)))
    tuples = tuple(VertexTuple(tuple(a) + tuple(b)) for a, b in pairs)
    req = ConnectionRequest(
        template=template, root=root, tuples=tuples, reservoir=tuple(reservoir)
    )
    if not req.tuples:
        return PathFamily(sequences=[], embeddings=[], trajectory=[], end_width=k)
    matching = connect_family(
        host, req, rounds=rounds, include_remainder=include_remainder, budget=budget
    )
    sequences = [
        tuple(emb[v] for v in range(ell)) for emb in matching.embeddings
    ]
    return PathFamily(
        sequences=sequences,
        embeddings=matching.embeddings,
        trajectory=matching.trajectory,
        end_width=k,
    )
