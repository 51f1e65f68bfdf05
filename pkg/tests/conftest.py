"""Shared graph corpus and random-graph helpers for the test suite."""

from __future__ import annotations

import random

import pytest

from graphck import DirectedGraph


def two_loop() -> DirectedGraph:
    return DirectedGraph.build(["v"], [("e", "v", "v"), ("f", "v", "v")])


def single_loop() -> DirectedGraph:
    return DirectedGraph.build(["v"], [("e", "v", "v")])


def single_edge() -> DirectedGraph:
    return DirectedGraph.build(["v", "w"], [("e", "v", "w")])


def two_cycle() -> DirectedGraph:
    return DirectedGraph.build(["v", "w"], [("a", "v", "w"), ("b", "w", "v")])


def mixed_m() -> DirectedGraph:
    """v carries two loops, u feeds v and the sink w."""
    return DirectedGraph.build(
        ["u", "v", "w"],
        [("e1", "v", "v"), ("e2", "v", "v"), ("a", "u", "v"), ("b", "u", "w")])


def u_graph() -> DirectedGraph:
    """u feeds a two-loop vertex; sink-free and purely infinite downstream."""
    return DirectedGraph.build(
        ["u", "v"], [("a", "u", "v"), ("e1", "v", "v"), ("e2", "v", "v")])


def three_loop() -> DirectedGraph:
    return DirectedGraph.build(["v"], [("a", "v", "v"), ("b", "v", "v"), ("c", "v", "v")])


def two_vertex_pi() -> DirectedGraph:
    """Two loops at each of two vertices plus a bridge."""
    return DirectedGraph.build(
        ["v", "w"],
        [("e1", "v", "v"), ("e2", "v", "v"), ("f1", "w", "w"), ("f2", "w", "w"),
         ("c", "v", "w")])


def full_two_vertex() -> DirectedGraph:
    """Adjacency all-ones on two vertices."""
    return DirectedGraph.build(
        ["v", "w"],
        [("e", "v", "v"), ("a", "v", "w"), ("b", "w", "v"), ("f", "w", "w")])


def dumbbell() -> DirectedGraph:
    """Loop feeding a loop; Condition (K) fails at both vertices."""
    return DirectedGraph.build(
        ["v", "w"], [("e", "v", "v"), ("a", "v", "w"), ("f", "w", "w")])


# corpus for representation-level suites: branching at most 2 keeps the
# truncated basis small at cutoff 10
REP_CORPUS = {
    "two_loop": two_loop,
    "single_loop": single_loop,
    "single_edge": single_edge,
    "two_cycle": two_cycle,
    "mixed_m": mixed_m,
    "u_graph": u_graph,
}

# sink-free corpus for the inclusion/reinclusion suites
SINK_FREE_CORPUS = {
    "two_loop": two_loop,
    "single_loop": single_loop,
    "two_cycle": two_cycle,
    "u_graph": u_graph,
    "three_loop": three_loop,
    "two_vertex_pi": two_vertex_pi,
}


def random_graph(rng: random.Random, max_vertices: int = 6, max_edges: int = 12,
                 no_sinks: bool = False) -> DirectedGraph:
    nv = rng.randint(1, max_vertices)
    vs = [f"v{i}" for i in range(nv)]
    es = []
    if no_sinks:
        for i, v in enumerate(vs):
            for k in range(rng.randint(1, max(1, max_edges // nv))):
                es.append((f"e{i}_{k}", v, rng.choice(vs)))
        es = es[:max(nv, max_edges)]
        covered = {s for (_, s, _) in es}
        for i, v in enumerate(vs):
            if v not in covered:
                es.append((f"x{i}", v, rng.choice(vs)))
    else:
        ne = rng.randint(0, max_edges)
        es = [(f"e{j}", rng.choice(vs), rng.choice(vs)) for j in range(ne)]
    return DirectedGraph.build(vs, es)


def random_condition_k_graph(rng: random.Random, max_vertices: int = 5) -> DirectedGraph:
    from graphck import every_vertex_connects_to_cycle, satisfies_condition_K

    while True:
        nv = rng.randint(1, max_vertices)
        vs = [f"v{i}" for i in range(nv)]
        es = []
        j = 0
        for v in vs:
            for _ in range(rng.randint(1, 3)):
                es.append((f"e{j}", v, rng.choice(vs)))
                j += 1
        g = DirectedGraph.build(vs, es)
        if satisfies_condition_K(g) and every_vertex_connects_to_cycle(g):
            return g


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240817)
