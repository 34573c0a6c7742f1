"""Truncated bivariate Taylor (jet) arithmetic.

High-order mixed partials of composite scalar fields are obtained by carrying
truncated Taylor expansions through every arithmetic step, so residual checks
downstream are limited by roundoff, never by finite-difference truncation.

A :class:`Jet2` stores the coefficients ``c[i, j]`` of
``sum c[i,j] dx^i dz^j`` for ``i + j <= m``.  Coefficients are numpy arrays,
so a single jet can carry the expansions of a whole grid of base points at
once; all operations broadcast like numpy.

Univariate expansions reuse the same class with the second slot unused
(seed the variable into the x slot); ``compose_series`` plugs a jet into a
one-variable Taylor series, which is how user-supplied functions and the
elementary functions below are applied to jets.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .errors import BranchCutError

__all__ = [
    "Jet2",
    "jet_seed",
    "jet_partial",
    "compose_series",
    "poly_jet",
    "jexp",
    "jlog",
    "jpow",
    "jsqrt",
    "jcosh",
    "jsinh",
]


class Jet2:
    """Bivariate Taylor expansion truncated at total degree ``m``."""

    __slots__ = ("m", "c")

    # keep numpy from broadcasting over jets; arithmetic goes through our dunders
    __array_ufunc__ = None

    def __init__(self, m: int, c: np.ndarray):
        self.m = int(m)
        self.c = c

    # -- construction ------------------------------------------------------

    @classmethod
    def constant(cls, value, m: int) -> "Jet2":
        value = np.asarray(value)
        c = np.zeros((m + 1, m + 1) + value.shape, dtype=np.result_type(value.dtype, np.float64))
        c[0, 0] = value
        return cls(m, c)

    def copy(self) -> "Jet2":
        return Jet2(self.m, self.c.copy())

    # -- basic queries ------------------------------------------------------

    @property
    def value(self):
        """Field value at the base point: the constant coefficient."""
        return self.c[0, 0]

    @property
    def shape(self):
        return self.c.shape[2:]

    def __repr__(self):  # pragma: no cover - debugging aid
        return f"Jet2(m={self.m}, value={self.value!r})"

    # -- ring operations ----------------------------------------------------

    def _check_order(self, other: "Jet2"):
        if other.m != self.m:
            raise ValueError(f"jet order mismatch: {self.m} vs {other.m}")

    def __add__(self, other):
        if isinstance(other, Jet2):
            self._check_order(other)
            return Jet2(self.m, self.c + other.c)
        out = self.c.copy()
        out = out.astype(np.result_type(out.dtype, np.asarray(other).dtype))
        out[0, 0] = out[0, 0] + other
        return Jet2(self.m, out)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(self.m, -self.c)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet2) else -np.asarray(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet2):
            return Jet2(self.m, self.c * np.asarray(other))
        self._check_order(other)
        m = self.m
        shape = np.broadcast_shapes(self.shape, other.shape)
        out = np.zeros((m + 1, m + 1) + shape, dtype=np.result_type(self.c.dtype, other.c.dtype))
        for i in range(m + 1):
            for j in range(m + 1 - i):
                a = self.c[i, j]
                if not np.any(a):
                    continue
                rest = m - i - j
                for p in range(rest + 1):
                    for q in range(rest + 1 - p):
                        out[i + p, j + q] += a * other.c[p, q]
        return Jet2(m, out)

    __rmul__ = __mul__

    def recip(self) -> "Jet2":
        """Multiplicative inverse; the constant term must be nonzero."""
        v = self.value
        if np.any(v == 0):
            raise ZeroDivisionError("jet reciprocal of a zero field value")
        inv = 1.0 / v
        # 1/a = inv * sum_k N^k  with N = 1 - inv*a nilpotent
        n = Jet2(self.m, -(self.c * inv))
        n.c[0, 0] = np.zeros_like(n.c[0, 0])
        acc = Jet2.constant(np.ones_like(inv), self.m)
        for _ in range(self.m):
            acc = acc * n
            acc.c[0, 0] = acc.c[0, 0] + 1.0
        return Jet2(self.m, acc.c * inv)

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * other.recip()
        return Jet2(self.m, self.c / np.asarray(other))

    def __rtruediv__(self, other):
        return self.recip() * other

    def __pow__(self, p):
        return jpow(self, p)

    # -- calculus -----------------------------------------------------------

    def dx(self) -> "Jet2":
        """Jet of the x-derivative field (order drops by one)."""
        if self.m < 1:
            raise ValueError("cannot differentiate an order-0 jet")
        m = self.m - 1
        out = np.zeros((m + 1, m + 1) + self.shape, dtype=self.c.dtype)
        for i in range(m + 1):
            for j in range(m + 1 - i):
                out[i, j] = (i + 1) * self.c[i + 1, j]
        return Jet2(m, out)

    def dz(self) -> "Jet2":
        """Jet of the z-derivative field (order drops by one)."""
        if self.m < 1:
            raise ValueError("cannot differentiate an order-0 jet")
        m = self.m - 1
        out = np.zeros((m + 1, m + 1) + self.shape, dtype=self.c.dtype)
        for i in range(m + 1):
            for j in range(m + 1 - i):
                out[i, j] = (j + 1) * self.c[i, j + 1]
        return Jet2(m, out)


def jet_seed(x0, z0, m: int) -> tuple[Jet2, Jet2]:
    """Coordinate jets at base point ``(x0, z0)``.

    The x-jet carries ``c[0,0] = x0, c[1,0] = 1``; the z-jet analogously.
    ``x0`` and ``z0`` may be arrays of matching (broadcastable) shape.
    """
    if m < 1:
        raise ValueError("jet order must be at least 1")
    xj = Jet2.constant(x0, m)
    xj.c[1, 0] = np.ones_like(xj.c[0, 0])
    zj = Jet2.constant(z0, m)
    zj.c[0, 1] = np.ones_like(zj.c[0, 0])
    return xj, zj


def jet_partial(a: Jet2, i: int, j: int):
    """True mixed partial d^{i+j} / dx^i dz^j at the base point."""
    if i < 0 or j < 0:
        raise ValueError("partial orders must be nonnegative")
    if i + j > a.m:
        raise ValueError(f"partial ({i},{j}) exceeds jet order {a.m}")
    return a.c[i, j] * (math.factorial(i) * math.factorial(j))


# -- composition with one-variable series ------------------------------------


def compose_series(tk: Sequence, a: Jet2) -> Jet2:
    """Compose a one-variable Taylor series with a jet.

    ``tk[k]`` is the k-th Taylor coefficient (``g^(k)(a0)/k!``) of the outer
    function about the jet's constant term.  Evaluation is Horner's scheme in
    the nilpotent part, so it is exact within the truncated algebra.
    """
    if len(tk) < a.m + 1:
        raise ValueError("series too short for the jet order")
    n = Jet2(a.m, a.c.copy())
    n.c[0, 0] = np.zeros_like(n.c[0, 0])
    acc = Jet2.constant(np.broadcast_to(np.asarray(tk[a.m]), a.shape).copy(), a.m)
    for k in range(a.m - 1, -1, -1):
        acc = acc * n
        acc.c[0, 0] = acc.c[0, 0] + tk[k]
    return acc


def poly_jet(coeffs: Sequence, a: Jet2) -> Jet2:
    """Evaluate a polynomial (ascending coefficients) on a jet, exactly."""
    if len(coeffs) == 0:
        return Jet2.constant(np.zeros(a.shape), a.m)
    acc = Jet2.constant(np.broadcast_to(np.asarray(coeffs[-1]), a.shape).copy(), a.m)
    for ck in reversed(coeffs[:-1]):
        acc = acc * a
        acc.c[0, 0] = acc.c[0, 0] + ck
    return acc


def _off_cut(v, what: str):
    """Reject arguments on the principal-branch cut instead of going silent."""
    v = np.asarray(v)
    if np.iscomplexobj(v):
        bad = (v.real <= 0) & (v.imag == 0)
    else:
        bad = v <= 0
    if np.any(bad):
        raise BranchCutError(
            f"{what}: argument on the branch cut at {int(np.count_nonzero(bad))} point(s)"
        )


def jexp(a: Jet2) -> Jet2:
    ev = np.exp(a.value)
    tk = [ev / math.factorial(k) for k in range(a.m + 1)]
    return compose_series(tk, a)


def jlog(a: Jet2) -> Jet2:
    v = a.value
    _off_cut(v, "log")
    tk = [np.log(v)]
    vk = np.ones_like(v)
    for k in range(1, a.m + 1):
        vk = vk / v
        tk.append(((-1) ** (k - 1) / k) * vk)
    return compose_series(tk, a)


def jpow(a: Jet2, p) -> Jet2:
    """Power of a jet: exact repeated products for integer p, principal branch otherwise."""
    if isinstance(p, (int, np.integer)):
        p = int(p)
        if p == 0:
            return Jet2.constant(np.ones(a.shape), a.m)
        base = a if p > 0 else a.recip()
        out = base
        for _ in range(abs(p) - 1):
            out = out * base
        return out
    v = a.value
    _off_cut(v, "pow")
    tk = [np.power(v, p)]
    coef = 1.0
    for k in range(1, a.m + 1):
        coef = coef * (p - (k - 1)) / k
        tk.append(coef * np.power(v, p - k))
    return compose_series(tk, a)


def jsqrt(a: Jet2) -> Jet2:
    return jpow(a, 0.5)


def jcosh(a: Jet2) -> Jet2:
    ch, sh = np.cosh(a.value), np.sinh(a.value)
    tk = [(ch if k % 2 == 0 else sh) / math.factorial(k) for k in range(a.m + 1)]
    return compose_series(tk, a)


def jsinh(a: Jet2) -> Jet2:
    ch, sh = np.cosh(a.value), np.sinh(a.value)
    tk = [(sh if k % 2 == 0 else ch) / math.factorial(k) for k in range(a.m + 1)]
    return compose_series(tk, a)
