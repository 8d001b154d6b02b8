"""Exact arithmetic for integer-matrix endomorphisms of the 2-torus.

Points of ``T^2 = R^2 / Z^2`` are stored as reduced rationals and every
operation here works on Python integers.  Nothing in this module touches
floating point except :func:`eigenframe`, whose output is inherently real.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterable


class NotHyperbolic(ValueError):
    """The matrix has no splitting ``|lambda_u| > 1 > |lambda_s|``."""


class DegenerateCongruence(ValueError):
    """``M**n - sign*I`` is singular, so the solution set is infinite."""


@dataclass(frozen=True)
class IntMatrix2:
    """A 2x2 integer matrix ``[[a, b], [c, d]]``."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self) -> None:
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, operator.index(getattr(self, name)))

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> "IntMatrix2":
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    @classmethod
    def identity(cls) -> "IntMatrix2":
        return cls(1, 0, 0, 1)

    @classmethod
    def parse(cls, text: str) -> "IntMatrix2":
        """Parse ``"a,b,c,d"`` (row-major)."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected four comma-separated integers, got {text!r}")
        return cls(*(int(p) for p in parts))

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> int:
        return self.a + self.d

    def rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.a, self.b), (self.c, self.d))

    def adjugate(self) -> "IntMatrix2":
        return IntMatrix2(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other: "IntMatrix2") -> "IntMatrix2":
        if not isinstance(other, IntMatrix2):
            return NotImplemented
        return IntMatrix2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __pow__(self, n: int) -> "IntMatrix2":
        if n < 0:
            raise ValueError("only nonnegative powers are integral")
        result, base = IntMatrix2.identity(), self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def shifted(self, k: int) -> "IntMatrix2":
        """Return ``self - k*I``."""
        return IntMatrix2(self.a - k, self.b, self.c, self.d - k)

    def mul_vec(self, v: tuple[int, int]) -> tuple[int, int]:
        return (self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1])

    def __str__(self) -> str:
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


#: The matrix of the worked example, ``[[4, 1], [2, 1]]``.
A = IntMatrix2(4, 1, 2, 1)


@total_ordering
@dataclass(frozen=True, eq=True)
class RationalTorusPoint:
    """The point ``(n1/d, n2/d)`` of ``R^2/Z^2`` in reduced form.

    Any integers are accepted and normalized: coordinates are taken mod 1
    and the triple is divided by ``gcd(n1, n2, d)``, so equality of points
    is equality of fields.
    """

    n1: int
    n2: int
    d: int = 1

    def __post_init__(self) -> None:
        n1, n2, d = (operator.index(v) for v in (self.n1, self.n2, self.d))
        if d == 0:
            raise ZeroDivisionError("denominator must be nonzero")
        if d < 0:
            n1, n2, d = -n1, -n2, -d
        n1 %= d
        n2 %= d
        g = math.gcd(n1, n2, d)
        object.__setattr__(self, "n1", n1 // g)
        object.__setattr__(self, "n2", n2 // g)
        object.__setattr__(self, "d", d // g)

    @classmethod
    def of(cls, x1, x2) -> "RationalTorusPoint":
        """Build from anything :class:`fractions.Fraction` accepts."""
        f1, f2 = Fraction(x1), Fraction(x2)
        den = f1.denominator * f2.denominator // math.gcd(f1.denominator, f2.denominator)
        return cls(f1.numerator * (den // f1.denominator), f2.numerator * (den // f2.denominator), den)

    @property
    def coords(self) -> tuple[Fraction, Fraction]:
        return (Fraction(self.n1, self.d), Fraction(self.n2, self.d))

    def as_floats(self) -> tuple[float, float]:
        return (self.n1 / self.d, self.n2 / self.d)

    def is_two_torsion(self) -> bool:
        return self.d <= 2

    def __neg__(self) -> "RationalTorusPoint":
        return RationalTorusPoint(-self.n1, -self.n2, self.d)

    def __add__(self, other: "RationalTorusPoint") -> "RationalTorusPoint":
        if not isinstance(other, RationalTorusPoint):
            return NotImplemented
        return RationalTorusPoint(
            self.n1 * other.d + other.n1 * self.d,
            self.n2 * other.d + other.n2 * self.d,
            self.d * other.d,
        )

    def __lt__(self, other: "RationalTorusPoint") -> bool:
        if not isinstance(other, RationalTorusPoint):
            return NotImplemented
        # cross-multiplication keeps the comparison in integers
        a = self.n1 * other.d
        b = other.n1 * self.d
        if a != b:
            return a < b
        return self.n2 * other.d < other.n2 * self.d

    def __str__(self) -> str:
        x1, x2 = self.coords
        return f"({x1},{x2})"


TWO_TORSION: tuple[RationalTorusPoint, ...] = tuple(
    RationalTorusPoint(i, j, 2) for i in (0, 1) for j in (0, 1)
)


def apply(M: IntMatrix2, x: RationalTorusPoint) -> RationalTorusPoint:
    """``M x mod Z^2``, exactly."""
    y1, y2 = M.mul_vec((x.n1, x.n2))
    return RationalTorusPoint(y1, y2, x.d)


# --- lattice normal forms -------------------------------------------------


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``a*x + b*y == g == gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def hermite_normal_form(M: IntMatrix2) -> tuple[IntMatrix2, IntMatrix2]:
    """Column-style Hermite normal form of a nonsingular matrix.

    Returns ``(H, U)`` with ``H = M @ U``, ``U`` unimodular and
    ``H = [[h11, 0], [h21, h22]]`` where ``h11, h22 > 0`` and
    ``0 <= h21 < h22``.  The columns of ``H`` span the same lattice as the
    columns of ``M``.
    """
    if M.det == 0:
        raise ValueError(f"{M} is singular")
    g, x, y = _xgcd(M.a, M.b)
    # (a, b) @ U = (g, 0)
    U = IntMatrix2(x, -M.b // g, y, M.a // g)
    H = M @ U
    if H.d < 0:
        U = U @ IntMatrix2(1, 0, 0, -1)
        H = M @ U
    q = H.c // H.d
    U = U @ IntMatrix2(1, 0, -q, 1)
    H = M @ U
    assert H.b == 0 and H.a > 0 and 0 <= H.c < H.d
    return H, U


def coset_representatives(M: IntMatrix2) -> list[tuple[int, int]]:
    """A transversal of ``Z^2 / M Z^2`` (``|det M|`` integer vectors)."""
    H, _ = hermite_normal_form(M)
    return [(i, j) for i in range(H.a) for j in range(H.d)]


def smith_normal_form(M: IntMatrix2) -> tuple[tuple[int, int], IntMatrix2, IntMatrix2]:
    """Smith normal form ``U @ M @ V = diag(d1, d2)``.

    ``U`` and ``V`` are unimodular, ``d1, d2 >= 0`` and ``d1`` divides ``d2``.
    """
    m = [[M.a, M.b], [M.c, M.d]]
    u = [[1, 0], [0, 1]]
    v = [[1, 0], [0, 1]]

    def swap_rows():
        m.reverse()
        u.reverse()

    def swap_cols():
        for row in m:
            row.reverse()
        for row in v:
            row.reverse()

    def add_row(dst, src, k):  # row_dst += k * row_src
        for mat in (m, u):
            mat[dst] = [p + k * q for p, q in zip(mat[dst], mat[src])]

    def add_col(dst, src, k):  # col_dst += k * col_src
        for mat in (m, v):
            for row in mat:
                row[dst] += k * row[src]

    while True:
        entries = [(abs(m[i][j]), i, j) for i in (0, 1) for j in (0, 1) if m[i][j]]
        if not entries:
            break
        _, i, j = min(entries)
        if i:
            swap_rows()
        if j:
            swap_cols()
        p = m[0][0]
        if m[1][0]:
            add_row(1, 0, -(m[1][0] // p))
        if m[0][1]:
            add_col(1, 0, -(m[0][1] // p))
        if m[1][0] or m[0][1]:
            continue
        if m[1][1] % p:
            add_row(0, 1, 1)
            continue
        break

    for i in (0, 1):
        if m[i][i] < 0:
            m[i] = [-t for t in m[i]]
            u[i] = [-t for t in u[i]]
    U = IntMatrix2.from_rows(u)
    V = IntMatrix2.from_rows(v)
    return (m[0][0], m[1][1]), U, V


# --- preimages and periodic points ---------------------------------------


def preimages(M: IntMatrix2, y: RationalTorusPoint) -> frozenset[RationalTorusPoint]:
    """All ``x`` with ``M x = y (mod Z^2)``; there are ``|det M|`` of them."""
    det = M.det
    if det == 0:
        raise ValueError(f"{M} is singular")
    adj = M.adjugate()
    out = set()
    for k1, k2 in coset_representatives(M):
        v = (y.n1 + k1 * y.d, y.n2 + k2 * y.d)
        w1, w2 = adj.mul_vec(v)
        out.add(RationalTorusPoint(w1, w2, det * y.d))
    return frozenset(out)


def solve_congruence(M: IntMatrix2, n: int, sign: int = 1) -> frozenset[RationalTorusPoint]:
    """Solutions of ``M**n x = sign * x (mod Z^2)``.

    Uses the Smith form ``U B V = diag(d1, d2)`` of ``B = M**n - sign*I``:
    the solutions are exactly ``V (j1/d1, j2/d2)`` for ``0 <= j_i < d_i``.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    B = (M**n).shifted(sign)
    if B.det == 0:
        raise DegenerateCongruence(f"det({M}^{n} - ({sign:+d})I) = 0")
    (d1, d2), _, V = smith_normal_form(B)
    scale = d2 // d1
    out = set()
    for j1 in range(d1):
        for j2 in range(d2):
            w1, w2 = V.mul_vec((j1 * scale, j2))
            out.add(RationalTorusPoint(w1, w2, d2))
    return frozenset(out)


def congruence_count(M: IntMatrix2, n: int, sign: int = 1) -> int:
    """``|det(M**n - sign*I)|`` without enumerating the solutions."""
    det = (M**n).shifted(sign).det
    if det == 0:
        raise DegenerateCongruence(f"det({M}^{n} - ({sign:+d})I) = 0")
    return abs(det)


# --- real eigen-structure -------------------------------------------------


@dataclass(frozen=True)
class EigenFrame:
    """Unstable/stable eigenvalues and unit eigenvectors of a hyperbolic matrix.

    Eigenvectors are normalized to unit length with a nonnegative first
    component (positive second component when the first vanishes).
    """

    lambda_u: float
    lambda_s: float
    e_u: tuple[float, float]
    e_s: tuple[float, float]


HYPERBOLIC_MARGIN = 1e-9


def _unit_eigenvector(M: IntMatrix2, lam: float) -> tuple[float, float]:
    # null vector of M - lam*I: pick the better-conditioned of the two rows
    r1 = (float(M.b), lam - M.a)
    r2 = (lam - M.d, float(M.c))
    v = r1 if math.hypot(*r1) >= math.hypot(*r2) else r2
    norm = math.hypot(*v)
    v = (v[0] / norm, v[1] / norm)
    if v[0] < 0 or (v[0] == 0 and v[1] < 0):
        v = (-v[0], -v[1])
    return v


def eigenframe(M: IntMatrix2) -> EigenFrame:
    t, det = M.trace, M.det
    disc = t * t - 4 * det
    if disc < 0:
        raise NotHyperbolic(f"{M} has non-real eigenvalues")
    root = math.sqrt(disc)
    big = (t + math.copysign(root, t)) / 2 if t else root / 2
    if big == 0:
        raise NotHyperbolic(f"{M} is nilpotent")
    small = det / big
    lam_u, lam_s = (big, small) if abs(big) >= abs(small) else (small, big)
    if abs(abs(lam_u) - 1) <= HYPERBOLIC_MARGIN or abs(abs(lam_s) - 1) <= HYPERBOLIC_MARGIN:
        raise NotHyperbolic(f"{M} has an eigenvalue of modulus 1")
    if not abs(lam_u) > 1 > abs(lam_s):
        raise NotHyperbolic(f"{M} has no stable/unstable splitting (eigenvalues {lam_u}, {lam_s})")
    return EigenFrame(lam_u, lam_s, _unit_eigenvector(M, lam_u), _unit_eigenvector(M, lam_s))
