"""Explicit presentations O[x_1..x_g]/(f_0..f_g) for the standard algebra families."""
from __future__ import annotations

from fractions import Fraction

from .cotangent import AlgebraPresentation
from .randalg import Order, monogenic_glue, triple_glue


def monogenic_presentation(p: int, roots) -> tuple[Order, AlgebraPresentation]:
    """O[x]/(prod (x - a_i)) with the redundant second relation x * prod (x - a_i)."""
    O = monogenic_glue(p, roots)
    poly = [Fraction(1)]  # ascending coefficients
    for r in roots:
        poly = [a - r * b for a, b in zip([Fraction(0)] + poly, poly + [Fraction(0)])]
    f = {(i,): c for i, c in enumerate(poly) if c}
    xf = {(i + 1,): c for (i,), c in f.items()}
    x = O.coords([Fraction(r) for r in roots])
    return O, AlgebraPresentation.create(O.algebra, [f, xf], [x])


def glue_presentation(p: int, m: int = 1) -> tuple[Order, AlgebraPresentation]:
    """O.1 + p^m O^3 as O[x, y]/(x^2 - p^m x, y^2 - p^m y, xy)."""
    O = triple_glue(p, m)
    q = p**m
    x = O.coords([0, q, 0])
    y = O.coords([0, 0, q])
    rels = [{(2, 0): 1, (1, 0): -q}, {(0, 2): 1, (0, 1): -q}, {(1, 1): 1}]
    return O, AlgebraPresentation.create(O.algebra, rels, [x, y])


def standard_fixtures(p: int = 3) -> list:
    """(name, order, presentation, expected defect valuation or None) tuples."""
    out = []
    for roots in ([0, p], [0, p, p * p], [1, 1 + p, 1 + p + p * p, 1 + p**3]):
        O, P = monogenic_presentation(p, roots)
        out.append((f"monogenic{roots}", O, P, 0))
    O, P = glue_presentation(p, 1)
    out.append(("triple_glue", O, P, 1))
    O, P = glue_presentation(p, 2)
    out.append(("triple_glue_m2", O, P, None))
    return out
