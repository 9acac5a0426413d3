"""
Golden-section search for unimodal scalar functions.
"""

import math
from typing import Callable, Tuple

INV_PHI = (math.sqrt(5) - 1) / 2
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2


def golden_section_maximize(f: Callable[[float], float], a: float, b: float,
                            tol: float = 1e-10, max_iters: int = 500) -> Tuple[float, float]:
    """
    Maximize a unimodal f on [a, b].

    Returns (argmax, max). The bracket shrinks by 1/phi per evaluation until
    it is shorter than tol (relative to the bracket midpoint when that is
    larger than one).
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    fc, fd = f(c), f(d)
    for _ in range(max_iters):
        if h <= tol * max(1.0, abs(a + b) / 2):
            break
        if fc > fd:
            b, d, fd = d, c, fc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = INV_PHI * h
            d = a + INV_PHI * h
            fd = f(d)
    best = max((a, f(a)), (c, fc), (d, fd), (b, f(b)), key=lambda item: item[1])
    return best


def golden_section_maximize_log(f: Callable[[float], float], lo: float, hi: float,
                                tol: float = 1e-10, max_iters: int = 500) -> Tuple[float, float]:
    """Same search on log(x); suits brackets spanning several decades"""
    if lo <= 0:
        raise ValueError("log-scale search needs lo > 0")
    t, value = golden_section_maximize(lambda s: f(math.exp(s)), math.log(lo), math.log(hi),
                                       tol=tol, max_iters=max_iters)
    return math.exp(t), value
