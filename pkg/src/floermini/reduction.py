"""Valuation-pivoted elimination over the Novikov field.

Vectors are sparse maps coordinate -> NovikovScalar; each coordinate
carries a weight (its action level) and the level of a vector is
max(weight - valuation) over its support.  The reduction produces a
triangular family with pairwise distinct pivot coordinates, each pivot
realizing its vector's level.  Such a family is level-orthogonal:

    level(sum c_i t_i) = max_i level(c_i t_i)

so greedy pivot elimination against it computes exact distances to the
spanned subspace.  Pivot ties break toward the smaller coordinate in the
supplied order, which fixes the output for golden tests.
"""

from __future__ import annotations

from typing import Callable, Hashable, Iterable

from .action import NEG_INFINITY, NovikovScalar

Vector = dict  # coordinate -> NovikovScalar


def vec_is_zero(v: Vector) -> bool:
    return not v


def vec_add(a: Vector, b: Vector) -> Vector:
    out = dict(a)
    for k, s in b.items():
        t = out.get(k)
        t = s if t is None else t + s
        if t.is_zero():
            out.pop(k, None)
        else:
            out[k] = t
    return out


def vec_sub_scaled(a: Vector, coef: NovikovScalar, b: Vector) -> Vector:
    """a - coef * b."""
    out = dict(a)
    for k, s in b.items():
        t = out.get(k)
        delta = coef * s
        t = -delta if t is None else t - delta
        if t.is_zero():
            out.pop(k, None)
        else:
            out[k] = t
    return out


def vec_scale(a: Vector, coef: NovikovScalar) -> Vector:
    if coef.is_zero():
        return {}
    return {k: coef * s for k, s in a.items()}


def vec_level(v: Vector, weight: Callable[[Hashable], object]):
    """max over support of weight(k) - valuation(coef); -inf for zero."""
    best = NEG_INFINITY
    for k, s in v.items():
        lvl = weight(k) - s.valuation()
        if best is NEG_INFINITY or lvl > best:
            best = lvl
    return best


def vec_peaks(v: Vector, weight) -> list:
    """Coordinates (with leading caps) achieving the level, sorted."""
    lvl = vec_level(v, weight)
    if lvl is NEG_INFINITY:
        return []
    out = []
    for k, s in v.items():
        if weight(k) - s.valuation() == lvl:
            cap, _ = s.leading_term()
            out.append((k, cap))
    out.sort(key=lambda t: t[0])
    return out


class Reduced:
    """One accepted column: pivot coordinate, vector, tracked companion."""

    __slots__ = ("pivot", "vec", "companion")

    def __init__(self, pivot, vec, companion):
        self.pivot = pivot
        self.vec = vec
        self.companion = companion


def _peak_pivot(v: Vector, weight, order):
    lvl = None
    best = None
    for k, s in v.items():
        l = weight(k) - s.valuation()
        if lvl is None or l > lvl or (l == lvl and order(k) < order(best)):
            lvl, best = l, k
    return best


def orthogonalize(
    columns: Iterable[tuple],
    weight,
    order=lambda k: k,
):
    """Triangularize columns; returns (reduced list, kernel companions).

    `columns` yields (vector, companion) pairs; identical row operations
    are applied to companions, so a column that collapses to zero leaves
    its companion as an exact linear relation among the inputs.
    """
    reduced: list[Reduced] = []
    kernel: list = []
    for vec, comp in columns:
        vec = dict(vec)
        for r in reduced:
            s = vec.get(r.pivot)
            if s is not None:
                t = s / r.vec[r.pivot]
                vec = vec_sub_scaled(vec, t, r.vec)
                comp = vec_sub_scaled(comp, t, r.companion)
                vec.pop(r.pivot, None)
        if vec_is_zero(vec):
            if not vec_is_zero(comp):
                kernel.append(comp)
            continue
        reduced.append(Reduced(_peak_pivot(vec, weight, order), vec, comp))
    return reduced, kernel


def reduce_vector(v: Vector, reduced: list, weight=None):
    """Eliminate every pivot coordinate of `reduced` from v.

    Returns (residual, combination) with v = residual + sum coeff_i * vec_i.
    The residual's level is the exact distance from v to the span.
    """
    v = dict(v)
    coeffs = []
    for r in reduced:
        s = v.get(r.pivot)
        if s is None:
            coeffs.append(None)
            continue
        t = s / r.vec[r.pivot]
        v = vec_sub_scaled(v, t, r.vec)
        v.pop(r.pivot, None)
        coeffs.append(t)
    return v, coeffs


def combination(coeffs: list, reduced: list, attr: str = "companion") -> Vector:
    """sum coeff_i * getattr(reduced_i, attr) skipping None coefficients."""
    out: Vector = {}
    for c, r in zip(coeffs, reduced):
        if c is not None and not c.is_zero():
            out = vec_add(out, vec_scale(getattr(r, attr), c))
    return out


def minimize_against(v: Vector, reduced: list, weight) -> Vector:
    """Level-minimal element of v + span(reduced); greedy pivot elimination."""
    residual, _ = reduce_vector(v, reduced, weight)
    return residual
