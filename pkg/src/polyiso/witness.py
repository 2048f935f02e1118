"""Replay of witnesses stored in CLI reports.

Each check re-derives the claim from the raw inputs with direct arithmetic
(facet equations, norms of explicit elements) instead of re-running the
search that produced it.
"""
from __future__ import annotations

from .isometry_engine import BlockOperator, make_weighted_composition
from .polyhedral_space import NormedSpace
from .function_space import sup_norm
from .rational import ONE, dot, mat, vec


def _pullback_support(T: BlockOperator, facet: int, y) -> list:
    """Domain points where (facet normal at y) composed with T is nonzero."""
    F, e = T.codomain.space, T.domain.space.dim
    a = F.normals[facet]
    rows = T.row_block(T.codomain.points.index(y))
    ell = [sum((a[k] * rows[k][col] for k in range(F.dim)), 0) for col in range(T.domain.dim)]
    return [x for i, x in enumerate(T.domain.points) if any(ell[i * e:(i + 1) * e])]


def _on(E: NormedSpace, facet: int, vid: int) -> bool:
    return dot(E.normals[facet], E.vertices[vid]) == ONE


def _common(E: NormedSpace, *facets: int) -> list[int]:
    return [k for k in range(len(E.vertices)) if all(_on(E, f, k) for f in facets)]


def check_discrepancy(E: NormedSpace, rep: dict) -> bool:
    """Verify one serialized discrepancy verdict against the facet equations."""
    r, s = rep["pair"]
    verdict = rep["verdict"]
    if verdict == "TriviallyIntersecting":
        return not _common(E, r, s)
    if verdict == "ViaWitness":
        L = rep["witness"]
        return L not in (r, s) and not _common(E, L, r) and not _common(E, L, s)
    if verdict == "NotDiscrepant":
        if not _common(E, r, s):
            return False
        ev = {int(k): v for k, v in rep["blocking_evidence"].items()}
        for L in range(len(E.normals)):
            if L in (r, s):
                continue
            ids = ev.get(L)
            if not ids or not all(_on(E, L, k) and (_on(E, r, k) or _on(E, s, k)) for k in ids):
                return False
        return True
    return False


def _element(fs, values: dict):
    return fs.element({k: vec(v) for k, v in values.items()})


def _check_isometry_witness(T: BlockOperator, res: dict) -> bool:
    w = res["witness"]
    reason = res["reason"]
    if reason == "not square":
        return T.domain.dim != T.codomain.dim
    if reason == "singular":
        f = _element(T.domain, w)
        return any(any(v) for v in f.values) and not any(any(v) for v in T.apply(f).values)
    if reason == "expands":
        f = _element(T.domain, w["f"])
        return sup_norm(f) <= ONE and sup_norm(T.apply(f)) > ONE
    if reason == "inverse expands":
        g = _element(T.codomain, w["g"])
        Tinv = T.inverse()
        return Tinv is not None and sup_norm(g) <= ONE and sup_norm(Tinv.apply(g)) > ONE
    return False


def _check_decomposition(T: BlockOperator, doc: dict) -> list:
    E, F = T.domain.space, T.codomain.space
    phi = doc["phi"]
    fibers = {y: mat(m) for y, m in doc["fibers"].items()}
    checks = [("resynthesis", make_weighted_composition(T.domain, T.codomain, phi, fibers).matrix == T.matrix)]
    e = E.dim
    ok = True
    for c in doc["certificates"]:
        # facet functional at y, pulled back, equals the recorded covector at x and 0 elsewhere
        j = T.codomain.points.index(c["y"])
        a = F.normals[c["facet"]]
        rows = T.row_block(j)
        ell = [sum((a[k] * rows[k][col] for k in range(F.dim)), 0) for col in range(T.domain.dim)]
        i = T.domain.points.index(c["x"])
        want = [0] * len(ell)
        want[i * e:(i + 1) * e] = vec(c["covector"])
        ok &= ell == want and tuple(vec(c["covector"])) in set(E.normals)
    checks.append(("certificates", ok))
    return checks


def _check_st(T: BlockOperator, res: dict) -> bool:
    """No unit v of the domain space lifts (St) at (u, y0): ||T(v-hat)(y0) + u|| <= ||u|| for all vertices."""
    ce = res["counterexample"]
    u, y0 = vec(ce["u"]), ce["y0"]
    F = T.codomain.space
    nu = F.norm(u)
    for v in T.domain.space.vertices:
        w = T.value_at(T.domain.constant(v), y0)
        if F.norm(tuple(p + q for p, q in zip(w, u))) > nu:
            return False
    return True


def _check_max_norm(inp, w: dict) -> bool:
    from .cli import _specs

    T, A, B = _specs(inp)
    reason = w["reason"]
    if reason == "singular":
        f = _element(T.domain, w["f"])
        return any(any(v) for v in f.values) and not any(any(v) for v in T.apply(f).values)
    if reason in ("vertex", "sample"):
        f = _element(T.domain, w["f"])
        return A.norm(f) != B.norm(T.apply(f))
    if reason == "inverse vertex":
        g = _element(T.codomain, w["g"])
        Tinv = T.inverse()
        return Tinv is not None and B.norm(g) != A.norm(Tinv.apply(g))
    return reason == "not square" and T.domain.dim != T.codomain.dim


def replay(command: str, inp, report: dict):
    """Return (ok, checks) for a stored report against freshly loaded inputs."""
    checks = [
        ("command", report.get("command") == command),
        ("inputs_digest", report.get("inputs_digest") == inp.digest()),
    ]
    res = report.get("result", {})
    try:
        checks.extend(_replay_result(command, inp, res))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        checks.append(("witness parse", False))
        checks.append((f"error: {type(exc).__name__}: {exc}", False))
    out = [{"check": name, "ok": bool(ok)} for name, ok in checks]
    return all(c["ok"] for c in out), out


def _replay_result(command: str, inp, res: dict) -> list:
    if command in ("space-analyze", "check-d", "check-dw"):
        E = inp.space()
        if command == "space-analyze":
            return [("discrepancy", all(check_discrepancy(E, r) for r in res["discrepancy"]))]
        if command == "check-d":
            if res["holds"]:
                return [("no counterexample", res["counterexample"] is None)]
            ce = res["counterexample"]
            return [("counterexample", ce["verdict"] == "NotDiscrepant" and check_discrepancy(E, ce))]
        if res["holds"]:
            r0 = res["witness"]
            reps = res["witness_reports"]
            covered = sorted(x for rep in reps for x in rep["pair"] if x != r0) == [
                r for r in range(len(E.normals)) if r != r0
            ]
            return [
                ("witness covers all facets", covered and all(rep["pair"][0] == r0 for rep in reps)),
                ("witness reports", all(rep["verdict"] != "NotDiscrepant" and check_discrepancy(E, rep) for rep in reps)),
            ]
        rej = res["rejections"]
        return [
            ("every facet rejected", sorted(int(k) for k in rej) == list(range(len(E.normals)))),
            ("rejections", all(r["verdict"] == "NotDiscrepant" and check_discrepancy(E, r) for r in rej.values())),
        ]
    if command == "space-tsets":
        E = inp.space()
        ok = all(
            all(_on(E, t["id"], k) for k in t["vertex_ids"])
            and all(dot(vec(t["gamma"][0]), E.vertices[k]) == ONE for k in t["vertex_ids"])
            for t in res["tsets"]
        )
        return [("tsets", ok and len(res["tsets"]) == len(E.normals))]
    T = inp.operator()[0]
    if command == "op-verify":
        return [("isometry witness", res["isometry"] or _check_isometry_witness(T, res))]
    if command == "op-decompose" or command == "pipeline":
        status = res["status"]
        if status == "decomposed":
            return _check_decomposition(T, res["decomposition"])
        if status == "PhiDisagreement":
            w = res["witness"]
            supports = [_pullback_support(T, f, w["y"]) for f in w["facets"]]
            return [("phi disagreement", supports == [[x] for x in w["points"]] and len(set(w["points"])) == 2)]
        if status == "StFalsified":
            op = T if res["direction"] == "T" else T.inverse()
            return [("(St) counterexample", _check_st(op, res))]
        if status == "NotMaxNormIsometry":
            return [("max-norm witness", _check_max_norm(inp, res["witness"]))]
        if status == "NotIsometry":
            d = res["witness"]
            return [("isometry witness", _check_isometry_witness(T, {"reason": d["reason"], "witness": d["detail"]}))]
        return [("status " + status, False)]
    if command == "st-check":
        if res["counterexample"] is None:
            return [("no counterexample", True)]
        return [("(St) counterexample", _check_st(T, res))]
    return [("replay supported", False)]
