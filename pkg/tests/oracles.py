"""Independent reference computations.

Nothing here imports the package's arithmetic: step maps run in exact
rational arithmetic and the root-operator numerators come from sympy.
"""

from fractions import Fraction as F
from functools import lru_cache

import sympy as sp


def step_exact(r, s, alpha, beta, K, L, mu, x, y):
    r, s, alpha, beta, K, L, mu, x, y = (F(v) for v in (r, s, alpha, beta, K, L, mu, x, y))
    xs = x * (1 + r * mu) / (1 + r * mu * (x / K + alpha * y))
    ys = y * (1 + s * mu) / (1 + s * mu * (y / L + beta * x))
    return xs, ys


def logistic_iterate_exact(r, K, mus, z0):
    """Iterate the single-species step map exactly along graininess values."""
    z = F(z0)
    out = [z]
    for mu in mus:
        z = z * (1 + F(r) * F(mu)) / (1 + F(r) * F(mu) * z / F(K))
        out.append(z)
    return out


@lru_cache(maxsize=None)
def numerators():
    """Sympy polynomials N_a, N_b in mu, and the common denominator D.

    N_a = alpha D (y^sigma - h(x^sigma)),  N_b = D (y^sigma - k(x^sigma)).
    """
    r, s, a, b, K, L, mu, x, y = sp.symbols("r s alpha beta K L mu x y", positive=True)
    d1 = K + r * mu * x + a * r * mu * K * y
    d2 = L + b * s * mu * L * x + s * mu * y
    xs = x * (1 + r * mu) * K / d1
    ys = y * (1 + s * mu) * L / d2
    D = d1 * d2
    Na = sp.expand(sp.cancel(a * D * (ys - (1 - xs / K) / a)))
    Nb = sp.expand(sp.cancel(D * (ys - L * (1 - b * xs))))
    syms = (r, s, a, b, K, L, mu, x, y)
    return syms, sp.Poly(Na, mu), sp.Poly(Nb, mu)


@lru_cache(maxsize=None)
def _coeff_functions(which):
    syms, Na, Nb = numerators()
    poly = Na if which == "a" else Nb
    assert poly.degree() <= 2
    args = syms[:6] + syms[7:]
    return [sp.lambdify(args, poly.coeff_monomial(syms[6] ** i)) for i in range(3)]


def numerator_coeffs(which, r, s, alpha, beta, K, L, x, y):
    """(c0, c1, c2) of N_a (``which="a"``) or N_b at numeric values."""
    return tuple(float(f(r, s, alpha, beta, K, L, x, y)) for f in _coeff_functions(which))
