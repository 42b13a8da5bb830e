"""Local Lemma conditions and a Moser–Tardos resampling solver.

The symmetric condition ``e·p·(d+1) <= 1`` is decided with exact rational
enclosures of e, so there is no floating point anywhere in a verdict.
"""

from __future__ import annotations

import hashlib
import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .csp import CSP, LLLParams, compute_params

E_LOWER = Fraction(27182818284, 10**10)
E_UPPER = Fraction(27182818285, 10**10)


def e_enclosure(terms: int) -> tuple[Fraction, Fraction]:
    """Rational bounds ``lo < e < hi`` from the partial sums of Σ 1/i!.

    The tail after ``terms`` terms is below ``1/((terms-1)! (terms-1))``.
    """
    if terms < 3:
        raise ValueError("need at least 3 terms")
    lo = sum(Fraction(1, math.factorial(i)) for i in range(terms))
    hi = lo + Fraction(1, math.factorial(terms - 1) * (terms - 1))
    return lo, hi


@dataclass(frozen=True)
class Verdict:
    status: str  # "pass", "fail" or "undecided"
    margin: float
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self) -> dict:
        return {"status": self.status, "margin": self.margin, **self.detail}


def _params(obj) -> LLLParams:
    return obj if isinstance(obj, LLLParams) else compute_params(obj)


def check_symmetric_lll(obj: CSP | LLLParams, max_terms: int = 80) -> Verdict:
    """Decide ``e·p·(d+1) <= 1``.

    The stored interval (2.7182818284, 2.7182818285) is tried first; if the
    product straddles 1 the enclosure of e is refined from its series.
    """
    P = _params(obj)
    x = P.p * (P.d + 1)
    lo, hi = E_LOWER, E_UPPER
    terms = None
    while True:
        if hi * x <= 1:
            status = "pass"
            break
        if lo * x > 1:
            status = "fail"
            break
        terms = 15 if terms is None else terms + 5
        if terms > max_terms:
            status = "undecided"
            break
        lo, hi = e_enclosure(terms)
    margin = float(1 - Fraction(math.e).limit_denominator(10**15) * x)
    return Verdict(status, margin, {"p": str(P.p), "d": P.d,
                                    "e_interval": [str(lo), str(hi)]})


def check_continuous_lll(obj: CSP | LLLParams) -> Verdict:
    """Decide ``p · vdeg^ord < 1`` exactly."""
    P = _params(obj)
    val = P.p * Fraction(P.vdeg) ** P.ord
    return Verdict("pass" if val < 1 else "fail", float(1 - val),
                   {"p": str(P.p), "vdeg": P.vdeg, "ord": P.ord, "value": str(val)})


def uniform_index(seed: int, stream: int, var: int, m: int) -> int:
    """Uniform integer in ``range(m)`` keyed by (seed, stream, var).

    Bits come from BLAKE2b in counter mode; rejection sampling makes the
    draw exactly uniform for any m, including very large m.
    """
    if m == 1:
        return 0
    nbits = (m - 1).bit_length()
    nbytes = (nbits + 7) // 8
    mask = (1 << nbits) - 1
    attempt = 0
    while True:
        buf = b""
        block = 0
        while len(buf) < nbytes:
            h = hashlib.blake2b(f"{seed}:{stream}:{var}:{attempt}:{block}".encode(), digest_size=64)
            buf += h.digest()
            block += 1
        x = int.from_bytes(buf[:nbytes], "big") & mask
        if x < m:
            return x
        attempt += 1


@dataclass
class SolverReport:
    status: str  # "solved" or "budget_exhausted"
    assignment: dict | None
    resamples: int
    seed: int

    def to_json(self, encode=lambda v: v) -> dict:
        a = None if self.assignment is None else [[encode(k), encode(v)] for k, v in self.assignment.items()]
        return {"status": self.status, "assignment": a, "resamples": self.resamples, "seed": self.seed}


def moser_tardos(csp: CSP, seed: int, max_resamples: int = 10**6) -> SolverReport:
    """Resample the lowest-indexed violated constraint until none is violated.

    The value drawn for variable i at resampling step r is
    ``uniform_index(seed, r, i, |list|)``; step 0 is the initial assignment.
    The returned assignment is re-checked against every constraint.
    """
    vars_ = csp.variables
    idx = csp.index
    assign = {v: csp.lists[v][uniform_index(seed, 0, idx[v], csp.list_size(v))] for v in vars_}
    cons = csp.constraints
    bv = csp.by_variable

    def bad(j):
        c = cons[j]
        return c.violated_by([assign[v] for v in c.domain])

    flagged = [bad(j) for j in range(len(cons))]
    heap = [j for j, b in enumerate(flagged) if b]
    heapq.heapify(heap)
    resamples = 0
    while heap:
        j = heapq.heappop(heap)
        if not flagged[j]:
            continue
        if not bad(j):  # defensive; flags are kept exact below
            flagged[j] = False
            continue
        if resamples >= max_resamples:
            return SolverReport("budget_exhausted", None, resamples, seed)
        resamples += 1
        for v in cons[j].domain:
            assign[v] = csp.lists[v][uniform_index(seed, resamples, idx[v], csp.list_size(v))]
        touched = {k for v in cons[j].domain for k in bv[v]}
        for k in touched:
            flagged[k] = bad(k)
            if flagged[k]:
                heapq.heappush(heap, k)  # duplicates are skipped lazily
    if csp.violated(assign):
        raise AssertionError("solver produced an assignment that violates a constraint")
    return SolverReport("solved", assign, resamples, seed)
