"""Lagrange interpolation over prime fields and, for Shoup RSA, over the integers."""

from __future__ import annotations

from collections.abc import Iterable
from math import factorial


def _check_subset(subset: Iterable[int], i: int) -> list[int]:
    points = list(subset)
    if len(set(points)) != len(points):
        raise ValueError("duplicate party index in interpolation set")
    if i not in points:
        raise ValueError(f"party {i} is not in the interpolation set")
    return points


def lagrange_coefficient(subset: Iterable[int], i: int, order: int, eval_at: int = 0) -> int:
    """Coefficient of ``f(i)`` when interpolating ``f(eval_at)`` from ``subset``."""
    points = _check_subset(subset, i)
    num = 1
    den = 1
    for j in points:
        if j == i:
            continue
        num = num * (eval_at - j) % order
        den = den * (i - j) % order
    if den == 0:
        raise ValueError("interpolation points collide modulo the group order")
    return num * pow(den, -1, order) % order


def lagrange_coefficients(subset: Iterable[int], order: int, eval_at: int = 0) -> dict[int, int]:
    points = list(subset)
    return {i: lagrange_coefficient(points, i, order, eval_at) for i in points}


def interpolate_at_zero(points: dict[int, int], order: int) -> int:
    coeffs = lagrange_coefficients(points, order)
    return sum(coeffs[i] * y for i, y in points.items()) % order


def integer_lagrange_coefficient(subset: Iterable[int], i: int, n: int) -> int:
    """``n! * lambda_i(0)``, which is always an integer for indices in 1..n."""
    points = _check_subset(subset, i)
    num = factorial(n)
    den = 1
    for j in points:
        if j == i:
            continue
        num *= -j
        den *= i - j
    value, rem = divmod(num, den)
    if rem:
        raise ArithmeticError("scaled Lagrange coefficient is not integral")  # pragma: no cover
    return value


def eval_polynomial(coefficients: list[int], x: int, modulus: int | None = None) -> int:
    acc = 0
    for c in reversed(coefficients):
        acc = acc * x + c
        if modulus is not None:
            acc %= modulus
    return acc
