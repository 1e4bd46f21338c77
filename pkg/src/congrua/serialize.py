"""Canonical JSON forms for algebras, characters, base-change data and presentations.

Fractions are written as strings "a/b" (or "a"). Output of ``dumps`` is
deterministic: sorted keys, fixed separators.
"""
from __future__ import annotations

import json
from fractions import Fraction

from .finalg import AlgebraModule, BaseChangeDatum, Character, FiniteFlatAlgebra

SCHEMA = 1


def q(x) -> str:
    return str(Fraction(x))


def unq(s) -> Fraction:
    return Fraction(s)


def algebra_to_json(T: FiniteFlatAlgebra, seed=None) -> dict:
    n = T.rank
    triples = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                c = T.structure_constants[i][j][k]
                if c:
                    triples.append([i, j, k, q(c)])
    out = {
        "type": "FiniteFlatAlgebra",
        "p": T.p,
        "rank": n,
        "structure_constants": triples,
        "unit": [q(x) for x in T.unit],
        "label": T.label,
    }
    if seed is not None:
        out["seed"] = seed
    return out


def algebra_from_json(d: dict) -> FiniteFlatAlgebra:
    n = d["rank"]
    c = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for i, j, k, v in d["structure_constants"]:
        c[i][j][k] = unq(v)
    return FiniteFlatAlgebra.create(d["p"], c, [unq(x) for x in d["unit"]], label=d.get("label", ""))


def character_to_json(lam: Character) -> dict:
    return {"type": "Character", "values": [q(x) for x in lam.values]}


def character_from_json(d: dict, T: FiniteFlatAlgebra) -> Character:
    return Character.create(T, [unq(x) for x in d["values"]])


def matrix_to_json(A) -> list:
    return [[q(x) for x in row] for row in A]


def matrix_from_json(rows) -> list:
    return [[unq(x) for x in row] for row in rows]


def module_to_json(M: AlgebraModule) -> dict:
    return {"type": "AlgebraModule", "rank": M.rank, "action": [matrix_to_json(A) for A in M.action]}


def module_from_json(d: dict, T: FiniteFlatAlgebra) -> AlgebraModule:
    return AlgebraModule.create(T, [matrix_from_json(A) for A in d["action"]])


def datum_to_json(D: BaseChangeDatum, seed=None) -> dict:
    out = {
        "type": "BaseChangeDatum",
        "source": algebra_to_json(D.source),
        "target": algebra_to_json(D.target),
        "theta": matrix_to_json(D.theta),
        "lambda": character_to_json(D.lam),
    }
    if seed is not None:
        out["seed"] = seed
    return out


def datum_from_json(d: dict) -> BaseChangeDatum:
    S = algebra_from_json(d["source"])
    T = algebra_from_json(d["target"])
    lam = character_from_json(d["lambda"], T)
    return BaseChangeDatum.create(S, T, matrix_from_json(d["theta"]), lam)


def presentation_to_json(P) -> dict:
    out = {"type": "AlgebraPresentation", "target": algebra_to_json(P.target)}
    out.update(P.to_json())
    out["images"] = [[q(x) for x in v] for v in P.images]
    return out


def presentation_from_json(d: dict):
    from .cotangent import AlgebraPresentation

    T = algebra_from_json(d["target"])
    rels = [{tuple(k): unq(v) for k, v in f} for f in d["relations"]]
    imgs = [[unq(x) for x in v] for v in d["images"]]
    return AlgebraPresentation.create(T, rels, imgs)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
