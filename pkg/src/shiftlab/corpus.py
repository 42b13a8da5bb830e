"""Seeded random CSP generators for tests and statistical runs."""

from __future__ import annotations

import itertools
import random

from .csp import CSP, Constraint
from .lll import check_symmetric_lll


def random_csp(rng: random.Random, max_vars: int = 5, max_colors: int = 3, max_cons: int = 5,
               max_arity: int = 3, lists: bool = False, max_forbidden: int = 4) -> CSP:
    """A small CSP with uniform colours or per-variable lists."""
    n = rng.randint(1, max_vars)
    q = rng.randint(1, max_colors)
    variables = list(range(n))
    if lists:
        colors = {v: sorted(rng.sample(range(q), rng.randint(1, q))) for v in variables}
    else:
        colors = q
    cons = []
    for _ in range(rng.randint(0, max_cons)):
        dom = rng.sample(variables, rng.randint(1, min(max_arity, n)))
        space = list(itertools.product(*[colors[v] if lists else range(q) for v in dom]))
        bad = rng.sample(space, rng.randint(1, min(max_forbidden, len(space))))
        cons.append(Constraint.of(dom, bad))
    return CSP(variables, colors, cons)


def random_lll_csp(rng: random.Random, n_vars: int = 30, colors: int = 4, arity: int = 2,
                   forbidden: int = 1, degree: int = 2, tries: int = 1000) -> CSP:
    """A random CSP that satisfies the symmetric Local Lemma condition.

    Each variable occurs in at most ``degree`` constraints; instances are
    redrawn until the exact checker passes.
    """
    for _ in range(tries):
        load = {v: 0 for v in range(n_vars)}
        cons = []
        for _ in range(n_vars * degree // arity):
            free = [v for v in range(n_vars) if load[v] < degree]
            if len(free) < arity:
                break
            dom = rng.sample(free, arity)
            for v in dom:
                load[v] += 1
            space = list(itertools.product(range(colors), repeat=arity))
            cons.append(Constraint.of(dom, rng.sample(space, forbidden)))
        csp = CSP(list(range(n_vars)), colors, cons)
        if check_symmetric_lll(csp).passed:
            return csp
    raise ValueError("could not draw an instance satisfying the symmetric condition")
