import itertools
import math

import pytest

from bigramsey.errors import DomainError
from bigramsey.limit import (
    BLUE,
    SAMPLE_RATIONALS,
    RED,
    EnumeratedPrefix,
    age,
    build_prefix,
    check_prefix,
    constant_coloring,
    kronecker_prefix,
    order_prefix,
    persistence_sample,
    random_prefix,
    sierpinski_color,
    sierpinski_coloring,
)
from bigramsey.structures import (
    all_structures,
    complete_graph,
    embeds,
    g3,
    generic_digraph,
    linear_order,
    rado,
    GRAPH_SIGNATURE,
)


def test_order_prefix_n3_follows_schedule():
    p = build_prefix(linear_order(), 3)
    assert p.types == ((), (0,), (1, 1))
    # v_1 realises the single gap over K_1 (below v_0); v_2 the first gap over K_2
    # in letter order, pushed to the top
    assert [(e.stage, e.rank) for e in p.schedule] == [(0, 0), (1, 0), (1, 1)]
    assert p.schedule[2].scheduled == (1,)


@pytest.mark.parametrize("spec", [linear_order(), rado(), g3(), generic_digraph()])
def test_build_prefix_is_deterministic_and_extends(spec):
    a, b = build_prefix(spec, 8), build_prefix(spec, 9)
    assert a.types == b.types[:8]
    assert a == build_prefix(spec, 8)
    check_prefix(b)


def test_build_prefix_schedule_is_fair():
    # every queued type of the first stages gets its turn
    p = build_prefix(rado(), 20)
    assert {e.stage for e in p.schedule} >= {0, 1, 2, 3}
    stages = [e.stage for e in p.schedule]
    assert stages == sorted(stages)


def test_g3_prefix_is_triangle_free_at_every_stage():
    p = build_prefix(g3(), 14)
    for n in range(1, p.size + 1):
        assert not embeds(complete_graph(3), p.initial(n))


def test_rado_prefix_contains_both_two_graphs():
    K = build_prefix(rado(), 6).structure
    for G in all_structures(GRAPH_SIGNATURE, 2):
        assert embeds(G, K)


def test_ages():
    assert len(age(build_prefix(rado(), 5), 2)) == 3
    # triangle-free graphs on <= 3 vertices: 1 + 2 + 3 classes, all realised
    g = age(build_prefix(g3(), 12), 3)
    assert [S.size for S in g] == [1, 2, 2, 3, 3, 3]
    tf = [G for n in (1, 2, 3) for G in all_structures(GRAPH_SIGNATURE, n) if g3().member(G)]
    assert {S.code for S in g} == {G.code for G in tf}
    assert len(age(random_prefix(g3(), 12, seed=0), 3)) == 6
    for n in (1, 3, 5):
        assert [S.size for S in age(kronecker_prefix(8), n)] == list(range(1, n + 1))
    with pytest.raises(DomainError):
        age(build_prefix(rado(), 3), 4)


def test_kronecker_matches_floating_order():
    p = kronecker_prefix(60)
    r = math.sqrt(2)
    xs = [(n * r) % 1 for n in range(60)]
    for j in range(60):
        assert p.types[j] == tuple(int(xs[i] < xs[j]) for i in range(j))


@pytest.mark.parametrize("seed", range(4))
def test_random_prefix_valid_and_seeded(seed):
    p = random_prefix(g3(), 15, seed)
    check_prefix(p)
    assert p == random_prefix(g3(), 15, seed)


def test_order_prefix_of_sample_rationals():
    p = order_prefix(SAMPLE_RATIONALS)
    assert p.types[1] == (1,)
    assert p.types[2] == (0, 0)
    with pytest.raises(DomainError):
        order_prefix([1, 1])


def test_json_round_trip():
    for p in (build_prefix(rado(), 7), kronecker_prefix(9), random_prefix(g3(), 8, 1)):
        assert EnumeratedPrefix.loads(p.dumps()) == p


def test_loads_rejects_invalid_prefix():
    doc = build_prefix(rado(), 3).to_dict()
    doc["class"] = {"class": "g3"}
    doc["types"] = [[], [1], [1, 1]]
    doc.pop("schedule")
    with pytest.raises(DomainError):
        EnumeratedPrefix.from_dict(doc)


def test_build_prefix_errors():
    with pytest.raises(DomainError):
        build_prefix(rado(), 0)


# -- Sierpinski ---------------------------------------------------------------------

def test_sierpinski_examples():
    up = order_prefix([0, 1])
    down = order_prefix([1, 0])
    assert sierpinski_color(up, 0, 1) == BLUE
    assert sierpinski_color(down, 0, 1) == RED
    with pytest.raises(DomainError):
        sierpinski_color(up, 1, 1)
    with pytest.raises(DomainError):
        sierpinski_color(build_prefix(rado(), 3), 0, 1)


def test_sierpinski_agrees_with_definition():
    vals = [5, 1, 7, 3, 0, 9]
    c = sierpinski_coloring(order_prefix(vals))
    for i, j in itertools.combinations(range(len(vals)), 2):
        assert c(i, j) == (BLUE if vals[i] < vals[j] else RED)


def test_both_colours_persist():
    p = build_prefix(linear_order(), 200)
    rep = persistence_sample(p, sierpinski_coloring(p), 20, 100, seed=0)
    assert len(rep.trials) == 100
    assert all(t.colors_seen == (BLUE, RED) for t in rep.trials)


def test_constant_colouring_and_tiny_subcopies():
    p = build_prefix(linear_order(), 30)
    rep = persistence_sample(p, constant_coloring(30), 10, 20)
    assert all(t.colors_seen == (0,) for t in rep.trials)
    rep = persistence_sample(p, sierpinski_coloring(p), 1, 5)
    assert all(t.colors_seen == () for t in rep.trials)
    with pytest.raises(DomainError):
        persistence_sample(p, constant_coloring(30), 31, 1)


def test_persistence_report_is_reproducible():
    p = build_prefix(linear_order(), 50)
    a = persistence_sample(p, sierpinski_coloring(p), 8, 10, seed=7).to_csv()
    assert a == persistence_sample(p, sierpinski_coloring(p), 8, 10, seed=7).to_csv()
    assert a.splitlines()[0] == "trial,seed,colors_seen"
    assert a.splitlines()[1].startswith("0,7:0,")
