"""Scenario files: validation and dispatch to the constructions and solvers.

A scenario is a JSON object::

    {"mode": "free_image", "group": {"kind": "cyclic", "n": 8},
     "params": {"k": 2}, "seed": 7, "caps": {"table": 1000000}}

:func:`run_scenario` returns a report dictionary whose ``audits`` list
decides the exit status; nothing in it depends on wall-clock time.
"""

from __future__ import annotations

import random
from copy import deepcopy

import jsonschema

from . import caps
from .actions import translation_action
from .audit import AuditLog
from .csp import UNSAT, CSP, brute_force, compute_params
from .errors import ShiftlabError, StageFailure
from .graphs import split_syndetic_d, split_syndetic_plain
from .groups import GroupSubset, group_from_descriptor
from .lll import check_continuous_lll, check_symmetric_lll, moser_tardos
from .shift import DistinguishingSet, LocalRule

STOCHASTIC = {"free_image", "lemma41", "lemma16", "solve_csp", "lll_corpus"}
NEEDS_GROUP = {"verify_prop15", "trivial_stab", "schedule", "free_image", "lemma16",
               "approx_rule", "split"}
MODES = sorted(STOCHASTIC | NEEDS_GROUP | {"bound_report"})

_subset = {"type": "array", "items": {}}
_rule = {
    "type": "object",
    "required": ["window"],
    "properties": {
        "window": _subset,
        "kind": {"enum": ["evaluation", "sum_mod", "table"]},
        "m": {"type": "integer", "minimum": 1},
        "table": {"type": "array", "items": {"type": "array", "minItems": 2, "maxItems": 2}},
    },
}

SCHEMA = {
    "type": "object",
    "required": ["mode"],
    "additionalProperties": False,
    "properties": {
        "mode": {"enum": MODES},
        "group": {"type": "object", "required": ["kind"]},
        "params": {"type": "object"},
        "seed": {"type": "integer", "minimum": 0},
        "caps": {"type": "object", "properties": {"table": {"type": "integer", "minimum": 1}},
                 "additionalProperties": False},
        "output": {"type": "string"},
    },
    "allOf": [
        {"if": {"properties": {"mode": {"enum": sorted(STOCHASTIC)}}},
         "then": {"required": ["seed"]}},
        {"if": {"properties": {"mode": {"enum": sorted(NEEDS_GROUP)}}},
         "then": {"required": ["group"]}},
    ],
}

for _m in ("lemma16", "approx_rule"):
    SCHEMA["allOf"].append({"if": {"properties": {"mode": {"const": _m}}},
                            "then": {"properties": {"params": {"required": ["rule"],
                                                               "properties": {"rule": _rule}}}}})


class ScenarioError(ShiftlabError):
    """The scenario is not schema-valid."""


def validate(scenario) -> None:
    try:
        jsonschema.validate(scenario, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ScenarioError(f"{where}: {exc.message}") from None


# --- parameter decoding --------------------------------------------------------


def _sub(G, items) -> GroupSubset:
    return GroupSubset.of(G, [G.decode(e) for e in items])


def _rule(G, k: int, desc: dict) -> LocalRule:
    W = _sub(G, desc["window"])
    m = desc.get("m", k)
    kind = desc.get("kind", "evaluation")
    if kind == "evaluation":
        i0 = W.elements.index(G.identity)
        return LocalRule.from_function(W, k, m, lambda p: p[i0] % m)
    if kind == "sum_mod":
        return LocalRule.from_function(W, k, m, lambda p: sum(p) % m)
    table = {tuple(p): int(v) for p, v in desc["table"]}
    return LocalRule(W, k, m, table)


# --- mode handlers ---------------------------------------------------------------
# each returns (payload, AuditLog)


def _verify_prop15(G, p, seed):
    from .constructions.basic import verify_prop15
    r = verify_prop15(G, _sub(G, p["H"]), int(p.get("k", 2)))
    return {"H": r.H.encode(), "stabilizer": r.stabilizer.encode()}, r.audits


def _trivial_stab(G, p, seed):
    from .constructions.basic import trivial_stab_coloring
    r = trivial_stab_coloring(G, _sub(G, p.get("F", [1, -1 % G.order])), int(p.get("ell", 3)))
    return {"points": r.action.n, "stabilizer": r.stabilizer.encode(), "coloring": r.f.tolist()}, r.audits


def _schedule(G, p, seed):
    from .constructions.schedule import schedule_sets
    opt = lambda key: None if p.get(key) is None else _sub(G, p[key])  # noqa: E731
    gammas = None if p.get("gammas") is None else [G.decode(e) for e in p["gammas"]]
    s = schedule_sets(p.get("mode", "lemma43"), G, opt("D"), opt("T"), int(p["count"]), gammas=gammas,
                      W=opt("W"), M=opt("M"), e_S=int(p.get("e_S", 3)),
                      allow_truncate=bool(p.get("allow_truncate", False)))
    return s.to_json(), s.audits


def _default_schedule(G, p):
    from .constructions.schedule import schedule_sets
    T = _sub(G, p.get("T", [G.encode(G.identity)]))
    gammas = None if p.get("gammas") is None else [G.decode(e) for e in p["gammas"]]
    count = len(gammas) if gammas is not None else G.order - 1
    return schedule_sets("lemma43", G, None, T, count, gammas=gammas, allow_truncate=True), gammas


def _free_image(G, p, seed):
    from .constructions.free_image import free_image_coloring, image_stabilizer_sizes
    sched, gammas = _default_schedule(G, p)
    action = translation_action(G)
    r = free_image_coloring(action, int(p.get("k", 2)), sched, gammas, seed=seed)
    log = AuditLog()
    log.extend(sched.audits, "schedule.")
    log.extend(r.audits)
    sizes = image_stabilizer_sizes(action, r.f)
    log.check("image_stabilizers_trivial_recomputed", bool((sizes == 1).all()), "coding images",
              counterexample={"point": int((sizes != 1).argmax())})
    out = r.to_json()
    out.pop("audits")
    out["schedule"] = sched.to_json()
    out["schedule"].pop("audits")
    return out, log


def _lemma41(G, p, seed):
    from .constructions.lemma41 import instance, lemma41_csp, probability_audit, solve
    action, data, part = instance(p.get("instance", "Z24"), int(p.get("e_D", 2)), int(p.get("e_S", 3)))
    log = AuditLog()
    log.extend(data.audits, "sets.")
    res = lemma41_csp(action, data, part)
    solve(res, seed=seed)
    log.extend(res.audits, "csp.")
    mode = p.get("probability", "exact")
    probs = []
    if mode != "none":
        for i in range(len(res.keys)):
            pr = probability_audit(res, i, mode, samples=int(p.get("samples", 2000)), seed=seed)
            log.extend(pr.audits, f"constraint{i}.")
            probs.append(pr.to_json())
    out = res.to_json()
    out.pop("audits")
    out["f"] = None if res.f is None else sorted([x, v] for x, v in res.f.items())
    out["probabilities"] = [{k: v for k, v in q.items() if k != "audits"} for q in probs]
    return out, log


def _lemma16(G, p, seed):
    from .constructions.lemma16 import lemma16_pipeline
    k = int(p.get("k", 2))
    rho = _rule(G, k, p["rule"])
    t = lambda key: None if p.get(key) is None else [G.decode(e) for e in p[key]]  # noqa: E731
    r = lemma16_pipeline(G, k, rho, t0=t("t0"), t1=t("t1"), e_F=int(p.get("e_F", 1)), seed=seed)
    out = r.to_json()
    out.pop("audits")
    return out, r.audits


def _approx_rule(G, p, seed):
    from .constructions.approx import approx_local_rule
    from .constructions.free_image import stage_gammas
    from .shift import all_configurations
    k = int(p.get("k", 2))
    rho = _rule(G, k, p["rule"])
    sched, gammas = _default_schedule(G, p)
    gl = gammas if gammas is not None else [g for g in G.elements() if g != G.identity]
    fam = [DistinguishingSet(e.S, tuple(b), k) for e, b in zip(sched.entries, stage_gammas(sched, gl))]
    D = _sub(G, p.get("D", [G.encode(G.identity)]))
    configs = all_configurations(G, k)
    r = approx_local_rule(G, k, fam, rho, D, int(p.get("N", len(fam))), configs=configs)
    table = sorted([list(pat), v] for pat, v in r.rule.table.items())
    return {"members": r.members, "core": r.core, "family": len(fam), "table": table}, r.audits


def _split(G, p, seed):
    action = translation_action(G)
    V = set(range(action.n)) if p.get("V") is None else {G.decode(e) for e in p["V"]}
    sets = {key: _sub(G, p[key]) for key in ("R", "S", "T", "T_next")}
    log = AuditLog()
    if p.get("D") is not None:
        name = "split_syndetic_d"
        r = split_syndetic_d(action, V, sets["R"], sets["S"], sets["T"], sets["T_next"], _sub(G, p["D"]))
    else:
        name = "split_syndetic_plain"
        r = split_syndetic_plain(action, V, sets["R"], sets["S"], sets["T"], sets["T_next"])
    enc = lambda pts: sorted(G.encode(x) for x in pts)  # noqa: E731
    wit = {"C": enc(r.C), "U": enc(r.U), "U_prime": enc(r.U_prime), "predicates": dict(r.checks)}
    log.check(name, all(r.checks.values()), "syndetic splitting", witness=wit, counterexample=wit)
    return wit, log


def _bound_report(G, p, seed):
    from .constructions.bounds import bound_report
    r = bound_report(int(p["ell"]), int(p["D"]), int(p["R"]), None if p.get("M") is None else int(p["M"]))
    log = AuditLog()
    log.check("threshold_consistent", r.product_below_one == (r.M >= r.threshold), "bound arithmetic",
              witness={"M": r.M, "threshold": r.threshold})
    return r.to_json(), log


def _solve_csp(G, p, seed):
    csp = CSP.from_json(p["csp"])
    params = compute_params(csp)
    log = AuditLog()
    out = {"params": params.to_json(), "symmetric_lll": check_symmetric_lll(params).to_json(),
           "continuous_lll": check_continuous_lll(params).to_json()}
    method = p.get("method", "moser_tardos")
    if method == "brute_force":
        sol = brute_force(csp)
        out["status"] = "UNSAT" if sol == UNSAT else "solved"
        out["assignment"] = None if sol == UNSAT else [[v, sol[v]] for v in csp.variables]
        log.check("brute_force", sol == UNSAT or csp.is_solution(sol), "constraint solving", witness=out["status"])
        return out, log
    rep = moser_tardos(csp, seed, int(p.get("max_resamples", 10**6)))
    out["solver"] = rep.to_json()
    log.check("moser_tardos", rep.status == "solved", "constraint solving",
              witness={"resamples": rep.resamples, "seed": seed, "status": rep.status},
              counterexample={"resamples": rep.resamples, "seed": seed, "status": rep.status})
    return out, log


def _lll_corpus(G, p, seed):
    from .corpus import random_lll_csp
    rng = random.Random(seed)
    count = int(p.get("count", 100))
    kw = {k: int(p[k]) for k in ("n_vars", "colors", "arity", "forbidden", "degree") if k in p}
    budget = int(p.get("max_resamples", 10**6))
    rows = []
    for i in range(count):
        csp = random_lll_csp(rng, **kw)
        rep = moser_tardos(csp, seed * 100003 + i, budget)
        rows.append({"status": rep.status, "resamples": rep.resamples,
                     "p": str(compute_params(csp).p), "d": compute_params(csp).d})
    solved = sum(r["status"] == "solved" for r in rows)
    log = AuditLog()
    log.check("all_solved", solved == count, "constraint solving",
              witness={"solved": solved, "count": count},
              counterexample={"unsolved": [i for i, r in enumerate(rows) if r["status"] != "solved"]})
    return {"solved": solved, "count": count, "max_resamples": max((r["resamples"] for r in rows), default=0),
            "instances": rows}, log


HANDLERS = {
    "verify_prop15": _verify_prop15, "trivial_stab": _trivial_stab, "schedule": _schedule,
    "free_image": _free_image, "lemma41": _lemma41, "lemma16": _lemma16, "approx_rule": _approx_rule,
    "split": _split, "bound_report": _bound_report, "solve_csp": _solve_csp, "lll_corpus": _lll_corpus,
}


def run_scenario(scenario: dict, seed: int | None = None, cap_override: int | None = None) -> dict:
    """Validate and execute; the report is returned even when audits fail.

    Raises :class:`ScenarioError` for schema violations.
    """
    scenario = deepcopy(scenario)
    if seed is not None:
        scenario["seed"] = seed
    validate(scenario)
    mode = scenario["mode"]
    G = group_from_descriptor(scenario["group"]) if "group" in scenario else None
    params = scenario.get("params", {})
    cap = cap_override if cap_override is not None else scenario.get("caps", {}).get("table")
    report = {"scenario": scenario}
    caps.set_override(cap)
    try:
        payload, log = HANDLERS[mode](G, params, scenario.get("seed", 0))
    except StageFailure as exc:
        log = AuditLog()
        partial = getattr(exc, "report", None)
        if partial is not None:
            log.extend(partial.audits)
        failing = [a.name for a in log.failures()]
        log.check("stage_failure", False, "stage failure",
                  counterexample={"stage": exc.stage, "message": exc.detail, "failing_checks": failing})
        payload = {"failed_stage": exc.stage, "message": exc.detail}
    except ShiftlabError as exc:
        log = AuditLog()
        log.check("error", False, type(exc).__name__, counterexample={"message": str(exc)})
        payload = {"error": type(exc).__name__, "message": str(exc)}
    finally:
        caps.set_override(None)
    report["payload"] = payload
    report["audits"] = log.to_json()
    report["status"] = "pass" if log.passed else "fail"
    return report
