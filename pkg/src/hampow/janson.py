"""Lower-tail bound parameters for counts of template copies in random hosts.

Works with the family of *lexicographic* copies: every choice of v(H) host
vertices determines exactly one copy (the order-preserving one), so the
family size is C(n, v(H)).  Expected counts and the pair-overlap parameter
are evaluated in log space; a brute-force enumeration oracle is provided for
small instances and is the ground truth in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from hampow.core import Hypergraph
from hampow.density import RootedTemplate, m1_density, m_density

__all__ = [
    "JansonParams",
    "delta_rooted_bound",
    "delta_upper_bound",
    "exact_mu_delta",
    "expected_lex_copies",
    "lower_tail_bound",
]


@dataclass(frozen=True)
class JansonParams:
    """Parameters (mu, delta, gamma) of the lower-tail inequality.

    ``bound`` is exp(-gamma^2 mu^2 / (2 (mu + delta))) when mu > 0 and the
    vacuous 1.0 when mu = 0.  The optional fields are free reporting slots
    for analysis constants.
    """

    mu: float
    delta: float
    gamma: float
    bound: float = float("nan")
    beta: float | None = None
    big_k: float | None = None
    c: float | None = None
    c_prime: float | None = None

    @classmethod
    def compute(cls, mu: float, delta: float, gamma: float, **extra: float) -> "JansonParams":
        if not 0.0 < gamma < 1.0:
            raise ValueError(f"gamma must be in (0, 1), got {gamma}")
        if mu < 0 or delta < 0:
            raise ValueError("mu and delta must be nonnegative")
        if mu == 0.0:
            bound = 1.0
        else:
            bound = math.exp(-(gamma * gamma * mu * mu) / (2.0 * (mu + delta)))
        return cls(mu=mu, delta=delta, gamma=gamma, bound=bound, **extra)


def _log_comb(n: int, k: int) -> float:
    if k < 0 or k > n:
        return float("-inf")
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _logsumexp(values: list[float]) -> float:
    finite = [v for v in values if v != float("-inf")]
    if not finite:
        return float("-inf")
    top = max(finite)
    return top + math.log(sum(math.exp(v - top) for v in finite))


def expected_lex_copies(n: int, template: Hypergraph, p: float) -> float:
    """mu = C(n, v(H)) * p^e(H), evaluated in log space."""
    v = template.n
    if v > n:
        raise ValueError(f"template has {v} vertices but the host only {n}")
    e = template.edge_count
    if p == 0.0:
        return 0.0 if e > 0 else math.comb(n, v)
    return math.exp(_log_comb(n, v) + e * math.log(p))


def delta_upper_bound(n: int, template: Hypergraph, p: float) -> float:
    """Closed-form upper bound on the pair-overlap parameter delta.

    Sums, over the overlap size j from the uniformity up to v(H)-1, the
    number of ways to choose an overlapping ordered pair of lexicographic
    copies times p^(2 e(H) - (j-1) m1(H)); the exponent uses the exact
    1-density.  An empty range gives 0.
    """
    if template.edge_count == 0:
        raise ValueError("delta bound is undefined for an edgeless template")
    v = template.n
    k = template.k
    if p == 0.0:
        return 0.0
    m1 = float(m1_density(template))
    logp = math.log(p)
    terms = []
    for j in range(k, v):
        expo = 2.0 * template.edge_count - (j - 1) * m1
        terms.append(
            _log_comb(n, j)
            + 2.0 * _log_comb(n - j, v - j)
            + expo * logp
        )
    if not terms:
        return 0.0
    return math.exp(_logsumexp(terms))


def exact_mu_delta(
    n: int, template: Hypergraph, p: float, budget: int = 100_000
) -> tuple[float, float]:
    """Enumerate all lexicographic copies and edge-sharing ordered pairs.

    The oracle: mu is the copy count times p^e; delta sums
    p^(2 e - |shared edges|) over ordered pairs of distinct copies sharing at
    least one edge.  Refuses hosts with more than ``budget`` copies.
    """
    v = template.n
    if v > n:
        raise ValueError(f"template has {v} vertices but the host only {n}")
    n_copies = math.comb(n, v)
    if n_copies > budget:
        raise ValueError(f"enumeration budget exceeded: C({n},{v}) = {n_copies} > {budget}")
    tmpl_edges = [tuple(e) for e in template.edges()]
    e_count = len(tmpl_edges)
    host = Hypergraph(template.k, n, ())  # encoder for host edge codes
    copy_edge_sets: list[list[int]] = []
    by_edge: dict[int, list[int]] = {}
    for idx, verts in enumerate(combinations(range(n), v)):
        codes = [host.encode(sorted(verts[u] for u in e)) for e in tmpl_edges]
        copy_edge_sets.append(codes)
        for c in set(codes):
            by_edge.setdefault(c, []).append(idx)
    mu = n_copies * p ** e_count
    shared: dict[tuple[int, int], int] = {}
    for ids in by_edge.values():
        for a in range(len(ids)):
            for b in range(a + 1, len(ids)):
                key = (ids[a], ids[b])
                shared[key] = shared.get(key, 0) + 1
    delta = 0.0
    for overlap in shared.values():
        delta += 2.0 * p ** (2 * e_count - overlap)  # ordered pairs
    return mu, delta


def delta_rooted_bound(
    rt: RootedTemplate, n: int, s_size: int, t: int, p: float
) -> tuple[float, float]:
    """The two-part overlap bound for rooted copy families.

    Splits the overlap sum by whether the shared part meets the root images:
    the first sum ranges over shared internal sets of size j >= 2 across all
    t^2 ordered tuple pairs, the second over j >= 1 within a single tuple.
    Returns (delta_1, delta_2); empty ranges give 0, and delta_2 is 0 for an
    empty root (there are no root images to share).
    """
    template = rt.template
    if template.edge_count == 0:
        raise ValueError("rooted delta bound is undefined for an edgeless template")
    if p == 0.0:
        return 0.0, 0.0
    r = len(rt.root)
    v = template.n
    e = template.edge_count
    m = float(m_density(rt))
    logp = math.log(p)
    d1_terms = []
    for j in range(2, v - r + 1):
        d1_terms.append(
            _log_comb(s_size, j)
            + 2.0 * (math.log(t) + _log_comb(s_size - j, v - r - j))
            + (2.0 * e - (j - 1) * m) * logp
        )
    delta1 = math.exp(_logsumexp(d1_terms)) if d1_terms else 0.0
    if r == 0:
        return delta1, 0.0
    d2_terms = []
    for j in range(1, v - r + 1):
        d2_terms.append(
            math.log(t)
            + _log_comb(s_size, j)
            + 2.0 * _log_comb(s_size - j, v - r - j)
            + (2.0 * e - j * m) * logp
        )
    delta2 = math.exp(_logsumexp(d2_terms)) if d2_terms else 0.0
    return delta1, delta2


def lower_tail_bound(params: JansonParams) -> float:
    """P[X < (1 - gamma) mu] <= exp(-gamma^2 mu^2 / (2 (mu + delta)))."""
    if not 0.0 < params.gamma < 1.0:
        raise ValueError(f"gamma must be in (0, 1), got {params.gamma}")
    if params.mu == 0.0:
        return 1.0
    g, mu, d = params.gamma, params.mu, params.delta
    return math.exp(-(g * g * mu * mu) / (2.0 * (mu + d)))
