"""End-to-end search for Hamilton cycle powers and tight Hamilton cycles.

One run: split the host into three independent exposure rounds; build a
chain absorber in round one; cover the remaining vertices with transversal
paths via a sequence of bipartite perfect matchings in round two; merge the
cover paths and the absorber ends with connecting paths through the
absorbable set in round three; absorb whatever the merge consumed and close
the cycle.  Every certificate is verified before it is returned; phase
failures trigger whole-run retries with derived seeds.

The headline thresholds are asymptotic, so all sizes here are configuration
with defaults calibrated for hosts in the n = 500..3000 range.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable

from hampow.absorber import (
    absorb,
    build_chain_absorber,
    chain_vertex_count,
    default_connector_len,
)
from hampow.core import CycleCertificate, Hypergraph, verify_certificate
from hampow.matcher import ConnectFailure, PhaseFailure, connect_paths
from hampow.randmodels import (
    BipartiteGraph,
    derive,
    sample_three_rounds,
    split_edges_three,
)

__all__ = [
    "Attempt",
    "CoverFamily",
    "FailureReport",
    "ModelSpec",
    "Parameters",
    "cover_with_paths",
    "find_hamilton",
    "implied_threshold",
    "perfect_matching",
    "resolve_plan",
]


DEFAULT_SEED = 24115


@dataclass(frozen=True)
class Parameters:
    """Pipeline configuration.

    The free constants of the analysis (c, c_prime) are plain configuration
    used for threshold reporting, never derived.  Unset sizes are resolved
    from n by :func:`resolve_plan`.
    """

    k: int = 2
    mode: str = "power"
    ell: int | None = None
    connector_len: int | None = None
    merge_len: int | None = None
    rounds: int | None = None
    merge_rounds: int = 2
    absorb_size: int | None = None
    t_cover: int | None = None
    retries: int = 5
    seed: int = DEFAULT_SEED
    input_rate: float | None = None
    merge_utilization: float = 0.75
    search_budget: int | None = 1_500_000
    c: float = 1.0
    c_prime: float = 1.0

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.mode not in ("power", "tight"):
            raise ValueError(f"mode must be 'power' or 'tight', got {self.mode!r}")
        if self.retries < 0:
            raise ValueError("retries must be >= 0")

    @property
    def uniformity(self) -> int:
        return 2 if self.mode == "power" else self.k + 1


@dataclass(frozen=True)
class ModelSpec:
    """Sample the host from the binomial model instead of taking a fixed graph."""

    n: int
    p: float


@dataclass(frozen=True)
class Attempt:
    seed: int
    phase: str
    message: str


@dataclass(frozen=True)
class FailureReport:
    attempts: tuple[Attempt, ...]

    @property
    def phase_failed(self) -> str:
        return self.attempts[-1].phase if self.attempts else "none"

    def __str__(self) -> str:
        lines = [f"no verified cycle after {len(self.attempts)} attempt(s):"]
        for a in self.attempts:
            lines.append(f"  seed={a.seed}: {a.phase}: {a.message}")
        return "\n".join(lines)


# -- bipartite matching kernel ----------------------------------------------


def perfect_matching(B: BipartiteGraph) -> dict[int, int] | None:
    """A perfect matching of a balanced bipartite graph, or None.

    Hopcroft-Karp with sorted adjacency, so the outcome is deterministic.
    """
    if B.left != B.right:
        raise ValueError(f"sides must be balanced, got {B.left} x {B.right}")
    s = B.left
    if s == 0:
        return {}
    adj = B.adjacency()
    INF = float("inf")
    match_l: list[int | None] = [None] * s
    match_r: list[int | None] = [None] * s
    dist = [0.0] * s

    def bfs() -> bool:
        q = deque()
        for u in range(s):
            if match_l[u] is None:
                dist[u] = 0.0
                q.append(u)
            else:
                dist[u] = INF
        found = False
        while q:
            u = q.popleft()
            for v in adj[u]:
                w = match_r[v]
                if w is None:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    q.append(w)
        return found

    def dfs(u: int) -> bool:
        for v in adj[u]:
            w = match_r[v]
            if w is None or (dist[w] == dist[u] + 1 and dfs(w)):
                match_l[u] = v
                match_r[v] = u
                return True
        dist[u] = INF
        return False

    size = 0
    while bfs():
        for u in range(s):
            if match_l[u] is None and dfs(u):
                size += 1
    if size != s:
        return None
    return {u: match_l[u] for u in range(s)}  # type: ignore[misc]


# -- covering with transversal paths -----------------------------------------


@dataclass(frozen=True)
class CoverFamily:
    """s vertex-disjoint paths, each with exactly one vertex in every part."""

    parts: tuple[tuple[int, ...], ...]
    paths: tuple[tuple[int, ...], ...]

    def a(self, i: int, k: int) -> tuple[int, ...]:
        return self.paths[i][:k]

    def b(self, i: int, k: int) -> tuple[int, ...]:
        return self.paths[i][-k:]


def cover_with_paths(
    host: Hypergraph,
    uncovered: Iterable[int],
    borrowed: Iterable[int],
    t: int,
    k: int,
    mode: str,
) -> CoverFamily:
    """Cover the pooled vertices with transversal paths via perfect matchings.

    The pool (uncovered plus borrowed vertices) is split into t equal parts;
    paths start as the singletons of part one and are extended one part per
    step by a perfect matching in the auxiliary bipartite graph whose edges
    mark extensions that keep every new adjacency window satisfied.  Only
    adjacencies between the new part and the last k parts are ever consulted.
    Raises :class:`PhaseFailure` naming the first step without a perfect
    matching.
    """
    if mode not in ("power", "tight"):
        raise ValueError(f"mode must be 'power' or 'tight', got {mode!r}")
    pool = sorted(set(uncovered) | set(borrowed))
    if t < 1:
        raise ValueError(f"part count must be >= 1, got {t}")
    if len(pool) % t != 0:
        raise ValueError(f"pool of {len(pool)} vertices is not divisible into {t} parts")
    s = len(pool) // t
    if s == 0:
        raise ValueError("empty parts")
    parts = tuple(tuple(pool[j * s:(j + 1) * s]) for j in range(t))
    paths: list[list[int]] = [[v] for v in parts[0]]
    for j in range(1, t):
        edges = set()
        for i in range(s):
            tail = paths[i]
            for u_idx, u in enumerate(parts[j]):
                if mode == "power":
                    ok = all(
                        host.has_edge((tail[j2], u)) for j2 in range(max(0, j - k), j)
                    )
                else:
                    ok = j < k or host.has_edge(tail[j - k:j] + [u])
                if ok:
                    edges.add((i, u_idx))
        matching = perfect_matching(BipartiteGraph(s, s, frozenset(edges)))
        if matching is None:
            raise PhaseFailure(
                "cover",
                f"no perfect matching when extending into part {j + 1} of {t}",
                step=j + 1,
                parts=t,
                paths=s,
            )
        for i in range(s):
            paths[i].append(parts[j][matching[i]])
    family = CoverFamily(parts=parts, paths=tuple(tuple(p) for p in paths))
    for p in family.paths:
        assert len(p) == t
    for j, part in enumerate(parts):
        assert {p[j] for p in family.paths} == set(part)
    return family


# -- planning -----------------------------------------------------------------


@dataclass(frozen=True)
class ResolvedPlan:
    n: int
    k: int
    mode: str
    uniformity: int
    ell: int
    connector_len: int
    merge_len: int
    absorb_size: int
    absorber_vertices: int
    t_cover: int
    borrow: int
    s_paths: int

    def describe(self) -> str:
        return (
            f"plan: ell={self.ell} connector={self.connector_len} "
            f"merge={self.merge_len} absorbable={self.absorb_size} "
            f"absorber_vertices={self.absorber_vertices} parts={self.t_cover} "
            f"paths={self.s_paths} borrowed={self.borrow}"
        )


def _slice_capacity(w_size: int, rounds: int, interior: int) -> int:
    """Connector copies placeable in a partitioned reservoir of this size."""
    if w_size <= 0:
        return 0
    sizes = [
        max(w_size // 2 ** (i + 1), w_size // (2 * rounds)) for i in range(1, rounds + 1)
    ]
    sizes.append(w_size - sum(sizes))
    return sum(sz // interior for sz in sizes)


def resolve_plan(n: int, cfg: Parameters) -> ResolvedPlan:
    """Resolve all sizes for a host on n vertices; deterministic in (n, cfg).

    Raises ValueError when no feasible plan exists (host too small for the
    requested configuration).
    """
    k, mode = cfg.k, cfg.mode
    ell = cfg.ell if cfg.ell is not None else 5
    if ell < 5 or ell % 2 == 0:
        raise ValueError(f"backbone length must be odd and >= 5, got {ell}")
    conn = cfg.connector_len if cfg.connector_len is not None else default_connector_len(k, mode)
    merge_len = cfg.merge_len if cfg.merge_len is not None else conn
    if conn <= 2 * k or merge_len <= 2 * k:
        raise ValueError(f"connector lengths must exceed 2k = {2 * k}")
    v_backbone = 1 + 2 * k * ell
    interior = conn - 2 * k
    w1 = (n + 2) // 3  # residue classes mod 3
    w2 = (n + 1) // 3
    m_int = merge_len - 2 * k

    def solve_cover(t_abs: int) -> tuple[int, int, int] | None:
        total = chain_vertex_count(k, ell, conn, t_abs)
        if total > n // 2:
            return None
        pool = n - total

        def merge_capacity(w_size: int) -> int:
            return _slice_capacity(w_size, cfg.merge_rounds, m_int)

        def feasible(t_cand: int, soft: bool) -> tuple[int, int] | None:
            ux = (-pool) % t_cand
            if ux > t_abs:
                return None
            s = (pool + ux) // t_cand
            if s < k + 1:
                return None
            if merge_capacity(t_abs - ux) < s + 1:
                return None
            if soft and (s + 1) * m_int > cfg.merge_utilization * (t_abs - ux):
                return None
            return s, ux

        if cfg.t_cover is not None:
            if cfg.t_cover < 2 * k:
                return None
            got = feasible(cfg.t_cover, soft=False)
            return None if got is None else (cfg.t_cover, got[0], got[1])
        # prefer as many cover paths as the merge reservoir supports: larger
        # path families make the per-step matchings far more robust
        for soft in (True, False):
            if soft:
                s_hi = int(cfg.merge_utilization * t_abs) // m_int - 1
            else:
                s_hi = merge_capacity(t_abs) - 1
            for s_target in range(max(s_hi, 0), k, -1):
                t_lo = max(2 * k, -(-pool // (s_target + 1)))
                t_hi = -(-pool // max(s_target - 1, 1)) if s_target > 1 else pool
                t_hi = min(max(t_hi, t_lo), pool)
                for t_cand in range(t_lo, t_hi + 1):
                    got = feasible(t_cand, soft=soft)
                    if got is not None and got[0] == s_target:
                        return t_cand, got[0], got[1]
        return None

    hard_cap = min(
        (n // 2 + interior) // (v_backbone + ell * interior),  # chain <= n/2
        w1 // v_backbone,                                      # factor window
        w2 // ((ell - 1) * interior),                          # intra reservoir
    )
    if cfg.absorb_size is not None:
        candidates = [cfg.absorb_size]
    else:
        soft_cap = min(
            hard_cap,
            int(0.9 * w1) // v_backbone,
            int(0.6 * w2) // ((ell - 1) * interior),
        )
        candidates = list(range(soft_cap, hard_cap + 1)) + list(range(soft_cap - 1, 0, -1))
    solution = None
    for t_abs in candidates:
        if t_abs < 1:
            continue
        got = solve_cover(t_abs)
        if got is not None:
            solution = (t_abs, *got)
            break
    if solution is None:
        raise ValueError(
            f"no feasible absorber/cover/merge plan for n={n}, k={k}, {mode} mode "
            f"(ell={ell}, connector={conn}); the host is too small for this configuration"
        )
    t_abs, t_cover, s, ux = solution
    total = chain_vertex_count(k, ell, conn, t_abs)
    if total > n // 2:
        raise ValueError(
            f"absorber with {t_abs} absorbable vertices needs {total} > n/2 vertices"
        )
    return ResolvedPlan(
        n=n,
        k=k,
        mode=mode,
        uniformity=cfg.uniformity,
        ell=ell,
        connector_len=conn,
        merge_len=merge_len,
        absorb_size=t_abs,
        absorber_vertices=total,
        t_cover=t_cover,
        borrow=ux,
        s_paths=s,
    )


def implied_threshold(n: int, cfg: Parameters) -> tuple[str, float]:
    """The configured threshold formula and its value at this n."""
    log2n = math.log2(max(n, 2))
    if cfg.mode == "power":
        formula = f"(c * log2(n)^8 / n)^(1/k) with c={cfg.c}, k={cfg.k}"
        value = (cfg.c * log2n ** 8 / n) ** (1.0 / cfg.k)
    else:
        formula = f"c * log2(n)^8 / n with c={cfg.c}"
        value = cfg.c * log2n ** 8 / n
    return formula, min(value, 1.0)


# -- the full pipeline --------------------------------------------------------


def _exposures(
    source: Hypergraph | ModelSpec, cfg: Parameters, attempt_seed: int
) -> tuple[Hypergraph, Hypergraph, Hypergraph, Hypergraph]:
    if isinstance(source, ModelSpec):
        return sample_three_rounds(
            cfg.uniformity, source.n, source.p, derive(attempt_seed, 1)
        )
    g1, g2, g3 = split_edges_three(source, derive(attempt_seed, 4), p=cfg.input_rate)
    return g1, g2, g3, source


def _attempt(
    source: Hypergraph | ModelSpec,
    cfg: Parameters,
    plan: ResolvedPlan,
    attempt_seed: int,
) -> CycleCertificate:
    n, k, mode = plan.n, plan.k, plan.mode
    g1, g2, g3, full = _exposures(source, cfg, attempt_seed)
    chain = build_chain_absorber(
        g1,
        k,
        mode,
        attempt_seed,
        ell=plan.ell,
        connector_len=plan.connector_len,
        absorb_size=plan.absorb_size,
        rounds=cfg.rounds,
        include_remainder=True,
        search_budget=cfg.search_budget,
    )
    absorbable = sorted(chain.absorbable)
    a_vertices = chain.vertices()
    uncovered = [v for v in range(n) if v not in a_vertices]
    borrowed = absorbable[: plan.borrow]
    cover = cover_with_paths(g2, uncovered, borrowed, plan.t_cover, k, mode)
    s = plan.s_paths
    merge_reservoir = [v for v in absorbable if v not in set(borrowed)]
    pairs = [(tuple(chain.b), cover.a(0, k))]
    for i in range(s - 1):
        pairs.append((cover.b(i, k), cover.a(i + 1, k)))
    pairs.append((cover.b(s - 1, k), tuple(chain.a)))
    try:
        merge = connect_paths(
            g3,
            pairs,
            merge_reservoir,
            k,
            plan.merge_len,
            mode,
            rounds=cfg.merge_rounds,
            include_remainder=True,
            budget=cfg.search_budget,
        )
    except ConnectFailure as e:
        raise PhaseFailure("merge", e.message, **e.details) from e
    used_from_x = merge.internal_vertices()
    exclude = set(borrowed) | used_from_x
    absorb_path = absorb(chain, exclude)
    # b .. Z1 .. Q1 .. Z2 .. ... .. Qs .. Z_{s+1} .. a, interiors only
    interior: list[int] = []
    for i in range(s + 1):
        seq = merge.sequences[i]
        interior += list(seq[k:len(seq) - k])
        if i < s:
            interior += list(cover.paths[i])
    cycle = list(absorb_path) + interior
    if len(cycle) != n or set(cycle) != set(range(n)):
        raise PhaseFailure(
            "assembly",
            f"vertex accounting failed: cycle has {len(cycle)} entries, "
            f"{len(set(cycle))} distinct, host has {n}",
        )
    cert = CycleCertificate(mode=mode, k=k, order=tuple(cycle))
    if not verify_certificate(full, cert):
        raise PhaseFailure("verify", "assembled certificate failed verification")
    return cert


def find_hamilton_detailed(
    source: Hypergraph | ModelSpec, cfg: Parameters
) -> tuple[CycleCertificate | FailureReport, int]:
    """Like :func:`find_hamilton`, also reporting the succeeding attempt index."""
    if isinstance(source, ModelSpec):
        n = source.n
        if not 0.0 <= source.p <= 1.0:
            raise ValueError(f"model rate must be in [0, 1], got {source.p}")
    else:
        n = source.n
        if source.k != cfg.uniformity:
            raise ValueError(
                f"{cfg.mode} mode with k={cfg.k} needs a {cfg.uniformity}-uniform "
                f"host, got {source.k}-uniform"
            )
    plan = resolve_plan(n, cfg)
    attempts: list[Attempt] = []
    for r in range(cfg.retries + 1):
        attempt_seed = derive(cfg.seed, 17, r)
        try:
            return _attempt(source, cfg, plan, attempt_seed), r
        except PhaseFailure as e:
            attempts.append(Attempt(seed=attempt_seed, phase=e.phase, message=e.message))
    return FailureReport(attempts=tuple(attempts)), cfg.retries


def find_hamilton(
    source: Hypergraph | ModelSpec, cfg: Parameters
) -> CycleCertificate | FailureReport:
    """Find a verified Hamilton k-power (power mode) or tight cycle (tight mode).

    ``source`` is either a fixed host hypergraph (its edges are then split
    into three exposure rounds at random) or a :class:`ModelSpec`, in which
    case the three rounds are sampled directly.  The returned certificate is
    always verified against the full host; an unverifiable assembly counts
    as a failure.  Deterministic configuration problems raise ValueError;
    stochastic phase failures are retried with derived seeds and reported.
    """
    return find_hamilton_detailed(source, cfg)[0]
