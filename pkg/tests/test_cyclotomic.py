import itertools
import json
import random
import threading

import pytest

from klrbound import abacus
from klrbound.algebra import Element, Monomial, canonical_word, dot, idempotent, symmetric_dot_sum
from klrbound.cyclotomic import (CACHE_SCHEMA_VERSION, QuotientContext, desk_grid,
                                 min_monomial_degree, verify_parallel)
from klrbound.linalg import DEFAULT_PRIME, rank_of
from klrbound.quiver import CapExceeded, RootSpec, WeightSpec, swap

from conftest import WINDOW
from oracles import cyclotomic_dimension, idempotent_dimension


def ctx(nu, weight, **kw):
    return QuotientContext(RootSpec(nu), WeightSpec(weight), **kw)


SMALL_GRID = [(nu, w) for nu, w in desk_grid((0, 1, 2), 3, 2)]


# -- spanning sets --------------------------------------------------------------

def test_spanning_set_examples():
    c = ctx({0: 1}, {0: 2})
    assert dot(1, (0,), 2) in c.ideal_spanning_set((0,), (0,), 4)
    c0 = ctx({0: 1}, {})
    assert idempotent((0,)) in c0.ideal_spanning_set((0,), (0,), 0)
    # degree 2 in 1_{01} J 1_{01}: only x_1 itself; products through 1_{10} have degree >= 4
    c2 = ctx({0: 1, 1: 1}, {0: 1, 1: 1})
    assert c2.ideal_spanning_set((0, 1), (0, 1), 2) == [dot(1, (0, 1))]
    assert min_monomial_degree(4) == -12


@pytest.mark.parametrize("nu,w", [({0: 1, 1: 1}, {0: 1, 1: 1}), ({0: 2, 1: 1}, {0: 2}),
                                  ({0: 2}, {0: 1}), ({0: 1, 1: 1, 2: 1}, {0: 1, 1: 1}),
                                  ({0: 1, 2: 1, 1: 1}, {2: 1})])
def test_reduced_spanning_set_has_full_span(nu, w):
    c = ctx(nu, w)
    for bottom, top in itertools.product(c.sequences, repeat=2):
        for d in range(min_monomial_degree(c.m), 9):
            full = c.ideal_spanning_set(bottom, top, d)
            red = c.reduced_spanning_set(bottom, top, d)
            cols: dict = {}

            def vec(el):
                return {cols.setdefault(m, len(cols)): v for m, v in el.terms.items()}
            rf, rr = rank_of(map(vec, full)), rank_of(map(vec, red))
            assert rf == rr == rank_of([vec(e) for e in full + red])


def test_spanning_elements_lie_in_ideal():
    c = ctx({0: 2, 1: 1}, {0: 1, 1: 1})
    for bottom, top in itertools.product(c.sequences, repeat=2):
        for d in (-2, 0, 2, 4):
            for el in c.ideal_spanning_set(bottom, top, d):
                assert c.is_zero_in_quotient(el)


# -- membership and nilpotency ---------------------------------------------------

def test_membership_examples():
    for lam in (1, 2, 3):
        c = ctx({0: 1}, {0: lam})
        assert c.is_zero_in_quotient(dot(1, (0,), lam))
        assert not c.is_zero_in_quotient(dot(1, (0,), lam - 1))
    assert ctx({0: 1, 1: 1}, {0: 1}).is_zero_in_quotient(idempotent((1, 0)))
    with pytest.raises(ValueError):
        ctx({0: 1}, {0: 1}).is_zero_in_quotient(idempotent((1,)))


def test_nilpotency_examples():
    assert ctx({0: 1}, {0: 2}).nilpotency_degree((0,), 1) == 2
    assert ctx({0: 1, 1: 1}, {0: 1}).nilpotency_degree((1, 0), 2) == 0
    c = ctx({0: 1, 1: 1}, {0: 1, 1: 1})
    # x_2 1_{01} is not in the ideal (see test_spanning_set_examples), so the degree is 2 = b_2
    assert c.nilpotency_degree((0, 1), 2) == 2
    assert abacus.antigravity_bound((0, 1), 2, c.weight) == 2
    assert c.nilpotency_degree((0, 1), 1) == 1


def test_membership_is_degree_consistent():
    rng = random.Random(4)
    c = ctx({0: 2, 1: 1}, {0: 2})
    for _ in range(60):
        parts = []
        for _ in range(3):
            seq = rng.choice(c.sequences)
            perm = list(range(3))
            rng.shuffle(perm)
            exps = tuple(rng.randint(0, 2) for _ in range(3))
            parts.append(Element.monomial(Monomial(seq, exps, canonical_word(perm)), rng.randint(1, 3)))
        total = parts[0] + parts[1] + parts[2]
        want = all(c.is_zero_in_quotient(comp) for comp in total.components().values())
        assert c.is_zero_in_quotient(total) == want


def test_ideal_closure():
    rng = random.Random(8)
    for nu, w in [({0: 2, 1: 1}, {0: 1, 1: 1}), ({0: 1, 1: 1, 2: 1, 3: 1}, {1: 1, 2: 1})]:
        c = ctx(nu, w)
        m = c.m
        for _ in range(25):
            bottom, top = rng.choice(c.sequences), rng.choice(c.sequences)
            gens = [e for d in range(-2, 5) for e in c.ideal_spanning_set(bottom, top, d)]
            if not gens:
                continue
            z = rng.choice(gens)
            perm_u, perm_v = list(range(m)), list(range(m))
            rng.shuffle(perm_u)
            rng.shuffle(perm_v)
            v_seq = tuple(bottom[p] for p in perm_v)  # any rearrangement is a valid source
            v = Element.monomial(Monomial(tuple(v_seq), tuple(rng.randint(0, 1) for _ in range(m)),
                                          canonical_word(perm_v)))
            u = Element.monomial(Monomial(top, tuple(rng.randint(0, 1) for _ in range(m)),
                                          canonical_word(perm_u)))
            assert c.is_zero_in_quotient(u * z * v)


def test_prime_mode_agrees_with_exact():
    for nu, w in [({0: 2, 1: 1}, {0: 2, 1: 1}), ({0: 1, 1: 1, 2: 1}, {0: 1, 2: 1})]:
        exact, modular = ctx(nu, w), ctx(nu, w, prime=DEFAULT_PRIME)
        assert exact.graded_dimensions() == modular.graded_dimensions()
        for seq in exact.sequences:
            for r in range(1, exact.m + 1):
                assert exact.nilpotency_degree(seq, r) == modular.nilpotency_degree(seq, r)


# -- dimensions ---------------------------------------------------------------------

@pytest.mark.parametrize("lam", [0, 1, 2, 3, 4])
def test_single_vertex_dimensions(lam):
    c = ctx({0: 1}, {0: lam}, level_cap=4)
    assert c.graded_dimensions() == {2 * k: 1 for k in range(lam)}
    assert c.total_dimension() == lam


def test_small_examples_dimensions():
    assert ctx({0: 1, 5: 1}, {0: 1, 5: 1}).graded_dimensions() == {0: 4}
    assert ctx({0: 1}, {0: 0}).total_dimension() == 0
    assert ctx({0: 2}, {0: 2}).graded_dimensions() == {-2: 1, 0: 2, 2: 1}


@pytest.mark.parametrize("nu,w", desk_grid((0, 1, 2), 3, 3), ids=lambda x: json.dumps(x.to_json()))
def test_total_dimension_matches_tableau_count(nu, w):
    """Independent oracle: dim = sum over multipartitions of (#standard tableaux)^2."""
    c = QuotientContext(nu, w)
    assert c.total_dimension() == cyclotomic_dimension(nu.as_dict(), w.as_dict())


@pytest.mark.parametrize("nu,w", [({0: 2, 1: 2}, {0: 2, 1: 1}), ({0: 1, 1: 1, 2: 1, 3: 1}, {0: 1, 2: 1}),
                                  ({0: 2, 1: 1, -1: 1}, {0: 2, 1: 1}), ({0: 3, 1: 1}, {0: 3})])
def test_total_dimension_four_strands(nu, w):
    assert ctx(nu, w).total_dimension() == cyclotomic_dimension(nu, w)


def test_idempotent_vanishing_matches_tableaux():
    for nu, w in SMALL_GRID:
        c = QuotientContext(nu, w)
        for seq in c.sequences:
            assert c.idempotent_vanishes(seq) == (idempotent_dimension(seq, w.as_dict()) == 0)


# -- theorem-level properties ----------------------------------------------------------

def test_verify_examples():
    assert ctx({0: 1}, {0: 1}).verify_theorem().passed
    assert ctx({0: 1, 1: 1}, {0: 1, 1: 1}).verify_theorem().passed
    rep = ctx({0: 2, 1: 1}, {0: 2}).verify_theorem(nilpotency=True)
    assert rep.passed and {c.kind for c in rep.checks} == {"theorem", "corollary", "lemma"}
    doc = rep.to_json()
    assert set(doc) == {"nu", "lambda", "checks", "timing_ms"} and doc["timing_ms"] is None
    assert set(doc["checks"][0]) >= {"seq", "r", "bound", "nilpotency", "pass"}
    assert rep.to_json(timing=True)["timing_ms"] >= 0
    assert rep.matrix_sizes


def test_monotone_chain_and_invariance():
    for nu, w in SMALL_GRID:
        c = QuotientContext(nu, w)
        m = c.m
        nil = {(s, r): c.nilpotency_degree(s, r) for s in c.sequences for r in range(1, m + 1)}
        for (s, r), n in nil.items():
            assert n <= abacus.antigravity_bound(s, r, w) <= w.level
        for s in c.sequences:
            for r in range(1, m - 1):
                if abs(s[r - 1] - s[r]) > 1:
                    assert nil[(s, m)] == nil[(swap(s, r), m)]


def test_symmetric_sum_vanishing():
    for nu, w in desk_grid((0, 1), 3, 3):
        c = QuotientContext(nu, w)
        for seq in c.sequences:
            for r in range(c.m):
                s = 1
                while r + s < c.m and seq[r + s] == seq[r]:
                    s += 1
                for a in range(s - 1, w.level + 1):
                    if c.dot_power_vanishes(seq, r + 1, a):
                        assert c.is_zero_in_quotient(symmetric_dot_sum(seq, r, s, a))


def test_anchor_propagation_and_tightness_examples():
    assert ctx({0: 2}, {0: 2}).check_anchor_prop() == []
    assert ctx({0: 2, 1: 1}, {0: 2, 1: 1}).check_anchor_prop() == []
    assert ctx({0: 1, 1: 1}, {0: 1}).check_anchor_prop() == []
    for lam in range(4):
        assert ctx({0: 1}, {0: lam}).tightness_report() == []
    # an over-tall stack: lambda_0 + 1 beads on runner 0 kills the idempotent
    c = ctx({0: 3}, {0: 2})
    assert c.idempotent_vanishes((0, 0, 0)) and c.tightness_report() == []


def test_caps():
    with pytest.raises(CapExceeded):
        ctx({0: 6}, {0: 1})
    with pytest.raises(CapExceeded):
        ctx({0: 1}, {0: 4})
    assert ctx({0: 6}, {0: 1}, nu_cap=6).m == 6


# -- cache and concurrency ------------------------------------------------------------

def test_disk_cache_round_trip(tmp_path):
    c = ctx({0: 2, 1: 1}, {0: 2}, cache_dir=tmp_path)
    dims = c.graded_dimensions()
    files = sorted(tmp_path.glob("*.json"))
    assert files
    doc = json.loads(files[0].read_text())
    assert doc["schema"] == CACHE_SCHEMA_VERSION and {"bottom", "top", "d", "rref"} <= set(doc)
    again = ctx({0: 2, 1: 1}, {0: 2}, cache_dir=tmp_path)
    assert again.graded_dimensions() == dims
    assert again._truncated and all(pc.complete for pc in again._truncated.values())
    # a stale schema is ignored and regenerated
    for f in files:
        d = json.loads(f.read_text())
        d["schema"] = -1
        d["rref"] = []
        f.write_text(json.dumps(d))
    assert ctx({0: 2, 1: 1}, {0: 2}, cache_dir=tmp_path).graded_dimensions() == dims


def test_compute_once_under_threads():
    c = ctx({0: 2, 1: 1, 2: 1}, {0: 1, 1: 1})
    results = {}

    def work(k):
        results[k] = [c.nilpotency_degree(s, r) for s in c.sequences for r in (1, 2, 3, 4)]
    threads = [threading.Thread(target=work, args=(k,)) for k in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len({tuple(v) for v in results.values()}) == 1
    serial = ctx({0: 2, 1: 1, 2: 1}, {0: 1, 1: 1})
    assert results[0] == [serial.nilpotency_degree(s, r) for s in serial.sequences for r in (1, 2, 3, 4)]


def test_parallel_report_is_order_independent():
    c = ctx({0: 2, 1: 1}, {0: 1, 1: 1})
    serial = c.verify_theorem(nilpotency=True).to_json()
    parallel = verify_parallel(ctx({0: 2, 1: 1}, {0: 1, 1: 1}), 2, nilpotency=True).to_json()
    assert serial == parallel


def test_tightness_gaps_are_genuine():
    """Every bound gap on the small grid is confirmed by the tableau count.

    Each gap sits on an idempotent whose corner algebra 1_i R 1_i is
    one-dimensional, hence concentrated in degree 0, so a dot (degree 2)
    must vanish there even though the bound is 2.
    """
    gaps = []
    for nu, w in desk_grid(WINDOW, 3, 2):
        for seq, r, bound, actual in QuotientContext(nu, w).tightness_report():
            gaps.append((seq, r, bound, actual))
            assert idempotent_dimension(seq, w.as_dict()) == 1
            assert (bound, actual) == (2, 1)
    assert len(gaps) == 12
    assert ((0, 1, 0), 2, 2, 1) in gaps
