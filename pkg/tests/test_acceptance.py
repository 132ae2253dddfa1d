"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

Criterion 3 asserts the k-degeneracy claims for the backbone gadgets exactly
as stated.  Those claims are arithmetically unattainable for the constructed
edge sets (e = k(v-1) + k > k(v-1)), so the two tests in TestCriterion3 fail
by design and document the precise violation; see README and the regression
values in test_density.py.
"""

import math
from fractions import Fraction
from itertools import combinations

import pytest

from hampow.absorber import (
    absorb,
    absorb_single,
    backbone_template,
    build_chain_absorber,
    chain_vertex_count,
    default_connector_len,
    demo_absorber,
)
from hampow.core import (
    CycleCertificate,
    Hypergraph,
    VertexTuple,
    connecting_path_template,
    is_power_path,
    is_tight_path,
    middle_connecting_path_template,
    power_path_template,
    tight_path_template,
    verify_certificate,
)
from hampow.density import (
    RootedTemplate,
    backbone_degeneracy_ordering,
    is_degenerate_ordering,
    m1_density,
    m_density,
)
from hampow.janson import (
    JansonParams,
    delta_upper_bound,
    exact_mu_delta,
    expected_lex_copies,
    lower_tail_bound,
)
from hampow.matcher import PhaseFailure
from hampow.pipeline import (
    FailureReport,
    ModelSpec,
    Parameters,
    find_hamilton,
    perfect_matching,
)
from hampow.randmodels import derive, sample_bipartite, uniform_stream

from oracles import naive_m1, naive_m_rooted


def report(criterion: str, ok: bool, detail: str = "") -> None:
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())


class TestCriterion1Templates:
    def test_template_goldens(self):
        ok = True
        for k in (1, 2, 3):
            for ell in range(k + 1, 21):
                p = power_path_template(k, ell)
                ok &= p.n == ell and p.edge_count == k * ell - k * (k + 1) // 2
                if ell >= 2 * k + 1:
                    cp = connecting_path_template(k, ell)
                    ok &= cp.edge_count == p.edge_count - k * (k - 1)
                h = tight_path_template(k, ell)
                ok &= h.n == ell and h.edge_count == ell - k
            for ell in range(5, 21, 2):
                b = backbone_template(k, ell, "power")
                bh = backbone_template(k, ell, "tight")
                ok &= b.graph.n == 1 + 2 * k * ell == bh.graph.n
                ok &= b.graph.edge_count == 2 * k * k * ell + k
                ok &= bh.graph.edge_count == 2 * k * ell + 1
        report("1 (template goldens)", ok)
        assert ok


class TestCriterion2DensityOracle:
    def test_exact_equals_enumeration(self):
        zoo = [
            Hypergraph(2, 2, [(0, 1)]),
            Hypergraph(2, 3, [(0, 1), (0, 2), (1, 2)]),
            Hypergraph(2, 5, [(i, j) for i in range(5) for j in range(i + 1, 5)]),
            power_path_template(1, 6),
            power_path_template(2, 8),
            power_path_template(3, 9),
            connecting_path_template(2, 8),
            connecting_path_template(3, 10),
            tight_path_template(2, 8),
            tight_path_template(3, 9),
            backbone_template(1, 5, "power").graph,   # 11 vertices
        ]
        ok = True
        for g in zoo:
            assert g.n <= 12
            ok &= m1_density(g) == naive_m1(g)
        rooted = [
            (connecting_path_template(2, 8), (0, 1, 6, 7)),
            (connecting_path_template(3, 10), (0, 1, 2, 7, 8, 9)),
            (tight_path_template(2, 8), (0, 1, 6, 7)),
            (power_path_template(2, 8), (0,)),
            (power_path_template(2, 8), ()),
        ]
        for g, root in rooted:
            rt = RootedTemplate(g, VertexTuple(root))
            ok &= m_density(rt) == naive_m_rooted(g, tuple(root))
        report("2 (density oracle equivalence)", ok)
        assert ok


class TestCriterion3BackboneDegeneracy:
    """Claimed: the explicit ordering witnesses k-degeneracy and
    m1(backbone) <= k, m1(tight backbone) <= 1 for k in {2,3}, ell in {5,7}.

    Unattainable: the power backbone has 2k^2 ell + k = k(v-1) + k edges, so
    no ordering can close at most k edges per vertex, and the whole graph
    already has 1-density k + 1/(2 ell) > k; the tight backbone has v edges,
    one more than 1-degeneracy allows, and 1-density 1 + 1/(2k ell) > 1.
    """

    CASES = [(k, ell) for k in (2, 3) for ell in (5, 7)]

    def test_explicit_ordering_witnesses_degeneracy(self):
        failures = []
        for k, ell in self.CASES:
            b = backbone_template(k, ell, "power")
            order = backbone_degeneracy_ordering(k, ell)
            if not is_degenerate_ordering(b.graph, order, k):
                failures.append(
                    f"(k={k}, ell={ell}): e = {b.graph.edge_count} = "
                    f"k(v-1)+{b.graph.edge_count - k * (b.graph.n - 1)} exceeds the "
                    f"k-degenerate budget, ordering cannot witness"
                )
        report("3a (backbone degeneracy ordering)", not failures, "; ".join(failures))
        assert not failures, "; ".join(failures)

    def test_backbone_density_bounds(self):
        failures = []
        for k, ell in self.CASES:
            b = backbone_template(k, ell, "power")
            witness = Fraction(b.graph.edge_count, b.graph.n - 1)
            value = m1_density(b.graph) if b.graph.n <= 21 else witness
            if value > k:
                failures.append(f"m1(B k={k} ell={ell}) = {value} > {k}")
            bh = backbone_template(k, ell, "tight")
            witness = Fraction(bh.graph.edge_count, bh.graph.n - 1)
            value = m1_density(bh.graph) if bh.graph.n <= 21 else witness
            if value > 1:
                failures.append(f"m1(BH k={k} ell={ell}) = {value} > 1")
        report("3b (backbone density bounds)", not failures, "; ".join(failures))
        assert not failures, "; ".join(failures)


class TestCriterion4CorollaryDensityBounds:
    @pytest.mark.parametrize("k", [2, 3])
    @pytest.mark.parametrize("ell", [8, 10, 12])
    def test_connecting_and_tight_end_density(self, k, ell):
        # the middle-anchored variant is the corollary's object: below
        # ell = 3k the splice-form connecting path has end-to-end edges and
        # its end tuple is not independent
        u = VertexTuple(tuple(range(k)) + tuple(range(ell - k, ell)))
        cp = m_density(RootedTemplate(middle_connecting_path_template(k, ell), u))
        cp_bound = Fraction(k) + Fraction(8 * k ** 3, ell)
        ht = m_density(RootedTemplate(tight_path_template(k, ell), u))
        ht_bound = Fraction(1) + Fraction(8 * k ** 2, ell)
        ok = cp <= cp_bound and ht <= ht_bound
        report(
            "4 (corollary density bounds)",
            ok,
            f"k={k} ell={ell}: m(CP,u)={cp} <= {cp_bound}, m(H,u)={ht} <= {ht_bound}",
        )
        assert cp <= cp_bound
        assert ht <= ht_bound


class TestCriterion5Janson:
    def test_exact_triangle_values_and_domination(self):
        tri = Hypergraph(2, 3, [(0, 1), (0, 2), (1, 2)])
        mu, delta = exact_mu_delta(5, tri, 0.5)
        ok = mu == pytest.approx(1.25) and delta == pytest.approx(1.875)
        templates = [
            tri,
            power_path_template(2, 4),
            power_path_template(1, 3),
            tight_path_template(2, 4),
            tight_path_template(3, 4),
        ]
        for template in templates:
            for n in (8, 10, 12):
                for p in (0.3, 0.5, 0.9):
                    mu_e, delta_e = exact_mu_delta(n, template, p)
                    ok &= expected_lex_copies(n, template, p) == pytest.approx(mu_e)
                    ok &= delta_upper_bound(n, template, p) >= delta_e * (1 - 1e-12)
        report("5a (janson exact + domination)", ok)
        assert ok

    def test_empirical_lower_tail(self):
        n, p, samples = 12, 0.4, 10_000
        tri = Hypergraph(2, 3, [(0, 1), (0, 2), (1, 2)])
        mu, delta = exact_mu_delta(n, tri, p)
        bound = lower_tail_bound(JansonParams.compute(mu=mu, delta=delta, gamma=0.5))
        pairs = list(combinations(range(n), 2))
        below = 0
        for s in range(samples):
            u = uniform_stream(derive(555, s), 0, len(pairs))
            adj = [0] * n
            for idx in (u < p).nonzero()[0].tolist():
                a, b = pairs[idx]
                adj[a] |= 1 << b
                adj[b] |= 1 << a
            triangles = 0
            for idx in (u < p).nonzero()[0].tolist():
                a, b = pairs[idx]
                triangles += bin(adj[a] & adj[b]).count("1")
            if triangles / 3 < mu / 2:
                below += 1
        freq = below / samples
        sigma = math.sqrt(max(bound * (1 - bound), 0.25 / samples) / samples)
        ok = freq <= bound + 3 * sigma
        report("5b (janson empirical tail)", ok, f"freq={freq:.4f} bound={bound:.4f}")
        assert ok


class TestCriterion6AbsorberSoundness:
    def test_single_vertex_exhaustive(self):
        ok = True
        for mode in ("power", "tight"):
            for k in (2, 3):
                for ell in (5, 7):
                    host, ab = demo_absorber(k, ell, mode)
                    for include in (True, False):
                        path = absorb_single(ab, include_x=include)
                        valid = (
                            is_power_path(host, path, k)
                            if mode == "power"
                            else is_tight_path(host, path)
                        )
                        expect = ab.vertices() - (set() if include else {ab.x})
                        ok &= valid and set(path) == expect
        report("6a (single-vertex absorbers exhaustive)", ok)
        assert ok

    @pytest.mark.parametrize("mode", ["power", "tight"])
    def test_chain_absorber_random_subsets(self, mode):
        k, ell, t = 2, 5, 7
        conn = default_connector_len(k, mode)
        n = max(3 * 21 * t, 2 * chain_vertex_count(k, ell, conn, t) + 10)
        host = Hypergraph.complete(2 if mode == "power" else k + 1, n)
        chain = build_chain_absorber(
            host, k, mode, seed=6, ell=ell, absorb_size=t, include_remainder=True
        )
        xs = list(chain.absorbable)
        checked = 0
        ok = True
        for trial in range(128):  # >= 100 subsets, here all 2^7 of them
            subset = {x for i, x in enumerate(xs) if (trial >> i) & 1}
            path = absorb(chain, subset)
            valid = is_power_path(host, path, k) if mode == "power" else is_tight_path(host, path)
            ok &= valid and set(path) == chain.vertices() - subset
            checked += 1
        report(f"6b (chain absorber, {mode})", ok, f"{checked} subsets checked")
        assert ok and checked >= 100


class TestCriterion7MatchingKernel:
    def test_random_bipartite_success_rate(self):
        s, p, trials = 300, 0.05, 100
        wins = 0
        for seed in range(trials):
            b = sample_bipartite(s, p, seed=derive(777, seed))
            m = perfect_matching(b)
            if m is not None:
                assert sorted(m) == list(range(s))
                assert sorted(set(m.values())) == list(range(s))
                wins += 1
        ok = wins >= 99
        report("7 (matching kernel)", ok, f"{wins}/{trials} perfect matchings")
        assert ok


class TestCriterion8EndToEndSoundness:
    # (k, mode, n, p, retries, trials): mixed modes and k at n in {300, 1000},
    # spanning feasible and failing regimes; every certificate that comes
    # back must verify against an independently regenerated host
    MIX = [
        (1, "power", 300, 0.9995, 1, 50),
        (1, "power", 300, 0.999, 1, 25),
        (1, "power", 300, 0.99, 1, 15),   # mostly cover failures
        (1, "tight", 300, 0.9995, 1, 25),
        (2, "tight", 300, 0.9, 1, 12),    # infeasible plan: ValueError path
        (2, "power", 300, 1.0, 1, 8),     # infeasible plan: ValueError path
        (2, "power", 1000, 0.9998, 1, 20),
        (2, "power", 1000, 0.999, 1, 10),
        (3, "power", 1000, 0.9995, 1, 10),  # junction edge demands: mostly failures
        (1, "power", 1000, 0.9995, 1, 14),
        (1, "tight", 1000, 0.999, 1, 10),
        (2, "tight", 1000, 0.05, 0, 1),   # sparse hypergraph: budgeted fast failure
    ]

    def test_soundness_fuzz(self):
        runs = certs = failures = config_errors = 0
        for k, mode, n, p, retries, trials in self.MIX:
            for t in range(trials):
                runs += 1
                cfg = Parameters(k=k, mode=mode, seed=derive(808, runs), retries=retries)
                try:
                    result = find_hamilton(ModelSpec(n=n, p=p), cfg)
                except ValueError:
                    config_errors += 1
                    continue
                if isinstance(result, FailureReport):
                    failures += 1
                    continue
                # re-verify externally against a freshly regenerated host:
                # soundness is absolute, never trust the pipeline's own word
                from hampow.randmodels import sample_three_rounds

                for attempt in range(cfg.retries + 1):
                    seed_r = derive(cfg.seed, 17, attempt)
                    _, _, _, host = sample_three_rounds(cfg.uniformity, n, p, derive(seed_r, 1))
                    if verify_certificate(host, result):
                        break
                else:
                    pytest.fail(f"unverifiable certificate for k={k} {mode} n={n} p={p}")
                certs += 1
        assert runs == 200
        ok = certs >= 20
        report(
            "8 (end-to-end soundness fuzz)",
            ok,
            f"{runs} runs: {certs} verified certificates, {failures} failures, "
            f"{config_errors} infeasible configs",
        )
        assert ok


class TestCriterion9PhaseTransition:
    # regression grid calibrated for this implementation at n=1500, k=2,
    # power mode (not a claim about the asymptotic threshold); per-point
    # success rates over 20 trials with 5 retries must be monotone within
    # one binomial sigma and reach 95% at the top
    GRID = [0.985, 0.991, 0.995, 0.9975, 0.999, 0.9995]
    TRIALS = 20

    def test_success_rates_monotone_and_high_at_top(self):
        rates = []
        for idx, p in enumerate(self.GRID):
            wins = 0
            for t in range(self.TRIALS):
                cfg = Parameters(
                    k=2, mode="power", seed=derive(909, idx, t), retries=5
                )
                result = find_hamilton(ModelSpec(n=1500, p=p), cfg)
                if not isinstance(result, FailureReport):
                    wins += 1
            rates.append(wins / self.TRIALS)
        monotone = True
        for a, b in zip(rates, rates[1:]):
            sigma = math.sqrt((a * (1 - a) + b * (1 - b)) / self.TRIALS)
            if b < a - sigma - 1e-9:
                monotone = False
        top_ok = rates[-1] >= 0.95
        report(
            "9 (phase-transition trend)",
            monotone and top_ok,
            f"rates={rates}",
        )
        assert monotone, f"success rates not monotone within noise: {rates}"
        assert top_ok, f"top-of-grid rate {rates[-1]} < 0.95"


class TestCriterion10Determinism:
    def test_find_and_experiment_are_byte_stable(self, tmp_path, capsys):
        from hampow.cli import main

        cert1, cert2 = tmp_path / "c1.cert", tmp_path / "c2.cert"
        find_args = ["find", "--model", "gnp", "--n", "600", "--p", "1.0",
                     "--k", "2", "--mode", "power", "--seed", "42"]
        assert main(find_args + ["--out", str(cert1)]) == 0
        assert main(find_args + ["--out", str(cert2)]) == 0
        capsys.readouterr()
        ok = cert1.read_bytes() == cert2.read_bytes()

        csv1, csv2 = tmp_path / "e1.csv", tmp_path / "e2.csv"
        exp_args = ["experiment", "--k", "1", "--mode", "power", "--n-list", "300",
                    "--p-grid", "0.9995,1.0", "--trials", "3", "--seed", "5",
                    "--retries", "1", "--zero-timings"]
        assert main(exp_args + ["--csv", str(csv1)]) == 0
        assert main(exp_args + ["--csv", str(csv2)]) == 0
        capsys.readouterr()
        ok &= csv1.read_bytes() == csv2.read_bytes()

        g1, g2 = tmp_path / "g1.hg", tmp_path / "g2.hg"
        gen_args = ["gen", "--model", "hgnp", "--k", "3", "--n", "40",
                    "--p", "0.3", "--seed", "8"]
        assert main(gen_args + ["--out", str(g1)]) == 0
        assert main(gen_args + ["--out", str(g2)]) == 0
        capsys.readouterr()
        ok &= g1.read_bytes() == g2.read_bytes()
        report("10 (byte determinism)", ok)
        assert ok
