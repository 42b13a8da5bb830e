"""Independent oracles and corpora shared by the test modules."""

import itertools
import random
from fractions import Fraction

from shiftlab.actions import translation_action
from shiftlab.graphs import FiniteGraph, schreier_graph
from shiftlab.groups import GroupSubset, cyclic, dihedral, direct_product


def count_proper_colorings(n_vertices, edges, ell):
    return sum(all(c[u] != c[v] for u, v in edges)
               for c in itertools.product(range(ell), repeat=n_vertices))


def cycle_chromatic(n, k):
    return (k - 1) ** n + (-1) ** n * (k - 1)


def _random_seed_coloring(rng, graph, ell, frac):
    seed = {}
    for v in graph.vertices:
        if rng.random() < frac:
            used = {seed[u] for u in graph.adj[v] if u in seed}
            free = [c for c in range(ell) if c not in used]
            if free:
                seed[v] = rng.choice(free)
    return seed


def graph_corpus(seed=0):
    """50 (graph, partial colouring) pairs: Cayley graphs and random graphs."""
    rng = random.Random(seed)
    out = []
    for n in range(3, 13):
        G = cyclic(n)
        out.append(schreier_graph(translation_action(G), GroupSubset.of(G, [1, n - 1])))
    for n in range(5, 13):
        G = cyclic(n)
        out.append(schreier_graph(translation_action(G), GroupSubset.of(G, [1, 2, n - 1, n - 2])))
    for n in range(3, 8):
        G = dihedral(n)
        out.append(schreier_graph(translation_action(G), GroupSubset.of(G, [1, n - 1, n])))
    K = direct_product(cyclic(3), cyclic(4))
    out.append(schreier_graph(translation_action(K), GroupSubset.of(K, [1, 2, 4, 8])))
    while len(out) < 50:
        n = rng.randint(4, 14)
        p = rng.uniform(0.1, 0.6)
        edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
        out.append(FiniteGraph.from_edges(n, edges))
    return [(g, _random_seed_coloring(rng, g, g.max_degree + 1, rng.choice([0.0, 0.3, 0.6])))
            for g in out]


def naive_params(csp):
    """p, d, vdeg, ord straight from the definitions."""
    cons = csp.constraints
    sizes = {v: len(list(csp.lists[v])) for v in csp.variables}
    p = Fraction(0)
    for c in cons:
        total = 1
        for v in c.domain:
            total *= sizes[v]
        bad = sum(1 for a in itertools.product(*[list(csp.lists[v]) for v in c.domain])
                  if c.violated_by(a))
        p = max(p, Fraction(bad, total))
    d = max((sum(1 for j, c2 in enumerate(cons) if j != i and set(c.domain) & set(c2.domain))
             for i, c in enumerate(cons)), default=0)
    vdeg = max((sum(1 for c in cons if v in c.domain) for v in csp.variables), default=0)
    order = max((len(c.domain) for c in cons), default=0)
    return p, d, vdeg, order


def naive_solutions(csp):
    vs = list(csp.variables)
    out = []
    for vals in itertools.product(*[list(csp.lists[v]) for v in vs]):
        a = dict(zip(vs, vals))
        if not any(c.violated_by([a[v] for v in c.domain]) for c in csp.constraints):
            out.append(a)
    return out


# acceptance verdicts, collected for the terminal summary
ACCEPTANCE = []


def record(n, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    ACCEPTANCE.append(line)
    print(line)
    return ok
