"""Closed forms of the normalized moments for n ≤ 3.

Each expression is E[∏ Tr_N(B^{m_i}_{t/N})] for U(N) as a sympy expression in N and
t; ``closed_form`` evaluates it and adds the SU(N) factor e^{n²t/(2N²)} on request.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable

import sympy as sp

from .models import Group
from .perm_core import CycleType

N, t = sp.symbols("N t", positive=True)

_x = 3 * t / N

CLOSED_FORMS: dict[tuple[int, ...], sp.Expr] = {
    (1,): sp.exp(-t / 2),
    (2,): sp.exp(-t) * (sp.cosh(t / N) - N * sp.sinh(t / N)),
    (1, 1): sp.exp(-t) * (sp.cosh(t / N) - sp.sinh(t / N) / N),
    (3,): sp.exp(-3 * t / 2) * (1 + (N**2 + 2) / 3 * (sp.cosh(_x) - 1) - N * sp.sinh(_x)),
    (2, 1): sp.exp(-3 * t / 2) * (sp.cosh(_x) - (N**2 + 2) / (3 * N) * sp.sinh(_x)),
    (1, 1, 1): sp.exp(-3 * t / 2)
    * (1 + (N**2 + 2) / (3 * N**2) * (sp.cosh(_x) - 1) - sp.sinh(_x) / N),
}


def closed_form_expr(lam: CycleType) -> sp.Expr:
    try:
        return CLOSED_FORMS[lam.parts]
    except KeyError:
        raise ValueError(f"no closed form for {lam}") from None


@lru_cache(maxsize=None)
def _numeric(parts: tuple[int, ...]) -> Callable[[float, float], float]:
    return sp.lambdify((N, t), CLOSED_FORMS[parts], modules="math")


def closed_form(lam: CycleType, N_value: float, t_value: float, group: Group = Group.U) -> float:
    closed_form_expr(lam)
    value = float(_numeric(lam.parts)(N_value, t_value))
    if group == Group.SU:
        value *= math.exp(lam.n**2 * t_value / (2 * N_value**2))
    return value


def rescaled_series(lam: CycleType, order: int) -> dict[int, sp.Expr]:
    """Coefficients of t^k, k ≤ order, in e^{nt/2} times the closed form, expanded in N."""
    expr = sp.exp(lam.n * t / 2) * closed_form_expr(lam)
    series = sp.series(expr, t, 0, order + 1).removeO()
    expanded = sp.expand(series)
    return {k: sp.expand(expanded.coeff(t, k)) for k in range(order + 1)}
