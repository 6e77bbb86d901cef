"""Exact Gaussian-rational checks of the pointwise curvature algebra.

Everything here is exact: entries are pairs of :class:`fractions.Fraction`
and every test is an equality, with no tolerance.  A block holds the named
entries of the Hermitian curvature on ``Lambda^{1,1} x Lambda^{1,1}`` in the
basis ``(z_{11bar}, z_{12bar}, z_{21bar}, z_{22bar})``::

    [[k,        conj(a),  a,  w      ],
     [conj(a'), conj(x),  conj(v), conj(b)],
     [a',       v,        x,  b      ],
     [u,        conj(b'), b', l      ]]
"""

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ConstraintViolationError

NUMERATORS = range(-9, 10)
DENOMINATORS = (1, 2, 3, 4)


@dataclass(frozen=True)
class GaussianRational:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def of(cls, z):
        if isinstance(z, GaussianRational):
            return z
        if isinstance(z, complex):
            return cls(Fraction(z.real), Fraction(z.imag))
        return cls(Fraction(z))

    def __add__(self, o):
        o = GaussianRational.of(o)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, o):
        return self + (-GaussianRational.of(o))

    def __rsub__(self, o):
        return GaussianRational.of(o) - self

    def __mul__(self, o):
        o = GaussianRational.of(o)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def conj(self):
        return GaussianRational(self.re, -self.im)

    def is_zero(self):
        return self.re == 0 and self.im == 0

    def is_real(self):
        return self.im == 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im == 0:
            return str(self.re)
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


G = GaussianRational
ZERO = G()


@dataclass(frozen=True)
class RationalBlock:
    k: Fraction = Fraction(0)
    l: Fraction = Fraction(0)
    u: Fraction = Fraction(0)
    w: Fraction = Fraction(0)
    a: GaussianRational = ZERO
    a_prime: GaussianRational = ZERO
    b: GaussianRational = ZERO
    b_prime: GaussianRational = ZERO
    v: GaussianRational = ZERO
    x: GaussianRational = ZERO
    constrained: bool = field(default=True, compare=False)
    """Enforce ``a + b = a' + b'`` and ``v`` real on construction."""

    def __post_init__(self):
        for name in ("k", "l", "u", "w"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        for name in ("a", "a_prime", "b", "b_prime", "v", "x"):
            object.__setattr__(self, name, G.of(getattr(self, name)))
        if self.constrained:
            if not self.constraint_residual().is_zero():
                raise ConstraintViolationError(f"a + b != a' + b' in {self}")
            if not self.v.is_real():
                raise ConstraintViolationError(f"v is not real in {self}")

    def constraint_residual(self):
        return self.a + self.b - self.a_prime - self.b_prime

    def entries(self):
        """The 4x4 matrix of Gaussian rationals."""
        k, l, u, w = (G(t) for t in (self.k, self.l, self.u, self.w))
        a, ap, b, bp, v, x = self.a, self.a_prime, self.b, self.b_prime, self.v, self.x
        return (
            (k, a.conj(), a, w),
            (ap.conj(), x.conj(), v.conj(), b.conj()),
            (ap, v, x, b),
            (u, bp.conj(), bp, l),
        )

    def as_complex_kwargs(self):
        """Named entries as Python numbers (for building a numeric block)."""
        out = {}
        for name in ("k", "l", "u", "w"):
            out[name] = float(getattr(self, name))
        for name in ("a", "a_prime", "b", "b_prime", "v", "x"):
            out[name] = complex(getattr(self, name))
        return out

    @classmethod
    def from_numeric(cls, entries, resolution=10**9, constrained=False):
        """Round the named entries of a numeric block to rationals with denominator ``resolution``."""

        def q(t):
            return Fraction(round(t * resolution), resolution)

        kw = {name: q(float(getattr(entries, name))) for name in ("k", "l", "u", "w")}
        for name in ("a", "a_prime", "b", "b_prime", "v", "x"):
            z = complex(getattr(entries, name))
            kw[name] = G(q(z.real), q(z.imag))
        return cls(constrained=constrained, **kw)


def check_holk1(m: RationalBlock) -> bool:
    """``x = 0, a' = -a, a = -b, k = l, u + 2v + w = 2k``."""
    return (
        m.x.is_zero()
        and (m.a_prime + m.a).is_zero()
        and (m.a + m.b).is_zero()
        and m.k == m.l
        and (G(m.u) + 2 * m.v + G(m.w) - G(2 * m.k)).is_zero()
    )


def check_holk2(m: RationalBlock) -> bool:
    """``x = 0, a = b', u + 2v + w = k + l``."""
    return (
        m.x.is_zero()
        and (m.a - m.b_prime).is_zero()
        and (G(m.u) + 2 * m.v + G(m.w) - G(m.k + m.l)).is_zero()
    )


def check_forms_dual(m: RationalBlock) -> bool:
    """``k = l, a' + b = -(a + b')``."""
    return m.k == m.l and (m.a_prime + m.b + m.a + m.b_prime).is_zero()


def check_holk2_and_dual(m: RationalBlock) -> bool:
    return check_holk2(m) and check_forms_dual(m)


# -- polynomial expansion ---------------------------------------------------------

# exponents of (x, xbar, y, ybar) in the coefficients of Z ^ Zbar on
# z_{11bar}, z_{12bar}, z_{21bar}, z_{22bar} for Z = x z1 + y z2
_BIVECTOR_MONOMIALS = ((1, 1, 0, 0), (1, 0, 0, 1), (0, 1, 1, 0), (0, 0, 1, 1))


def hsc_polynomial(m: RationalBlock):
    """Coefficients of ``R(Z, Zbar, Z, Zbar)`` as a polynomial in ``x, xbar, y, ybar``.

    Returns a dict keyed by exponent tuples ``(p, q, r, s)`` of
    ``x^p xbar^q y^r ybar^s``; there are nine monomials with ``p + r = q + s = 2``.
    """
    M = m.entries()
    poly = {}
    for P, Q in itertools.product(range(4), repeat=2):
        key = tuple(i + j for i, j in zip(_BIVECTOR_MONOMIALS[P], _BIVECTOR_MONOMIALS[Q]))
        poly[key] = poly.get(key, ZERO) + M[P][Q]
    return poly


def norm_squared_polynomial(k):
    """``k h(Z, Z)^2 = k (x xbar + y ybar)^2``."""
    k = G(k)
    return {(2, 2, 0, 0): k, (1, 1, 1, 1): 2 * k, (0, 0, 2, 2): k}


def balas_coefficient_check(m: RationalBlock, k=None) -> bool:
    """True iff ``R(Z, Zbar, Z, Zbar) - k h(Z, Z)^2`` vanishes identically.

    ``k`` defaults to the block's own ``k`` entry (the only possible value,
    read off the ``|x|^4`` coefficient).
    """
    k = m.k if k is None else Fraction(k)
    diff = hsc_polynomial(m)
    for key, c in norm_squared_polynomial(k).items():
        diff[key] = diff.get(key, ZERO) - c
    return all(c.is_zero() for c in diff.values())


# -- random blocks ----------------------------------------------------------------

def _rand_q(rng):
    return Fraction(rng.choice(NUMERATORS), rng.choice(DENOMINATORS))


def _rand_g(rng):
    return G(_rand_q(rng), _rand_q(rng))


_IMPOSABLE = ("x=0", "l=k", "a'=-a", "b=-a", "b=a'", "trace 2k", "trace k+l")


def random_constrained_block(seed, impose=None) -> RationalBlock:
    """Reproducible random block satisfying ``a + b = a' + b'`` and ``v`` real.

    Free entries have numerators in ``[-9, 9]`` and denominators in
    ``{1, 2, 3, 4}``.  To exercise both verdicts of the checks, a random
    subset of simple conditions (``x = 0``, ``l = k``, ``a' = -a``,
    ``b = -a``, ``b = a'`` and the trace conditions) is imposed unless
    ``impose`` names the subset explicitly; ``b'`` is always solved from the
    constraint last.
    """
    rng = random.Random(seed)
    e = {
        "k": _rand_q(rng), "l": _rand_q(rng), "u": _rand_q(rng), "w": _rand_q(rng),
        "a": _rand_g(rng), "a_prime": _rand_g(rng), "b": _rand_g(rng),
        "v": G(_rand_q(rng)), "x": _rand_g(rng),
    }
    if impose is None:
        impose = {c for c in _IMPOSABLE if rng.random() < 0.5}
    impose = set(impose)
    unknown = impose - set(_IMPOSABLE)
    if unknown:
        raise ValueError(f"unknown conditions {sorted(unknown)}; choose from {_IMPOSABLE}")
    if "x=0" in impose:
        e["x"] = ZERO
    if "l=k" in impose:
        e["l"] = e["k"]
    if "a'=-a" in impose:
        e["a_prime"] = -e["a"]
    if "b=-a" in impose:
        e["b"] = -e["a"]
    if "b=a'" in impose:
        e["b"] = e["a_prime"]
    two_v = 2 * e["v"].re
    if "trace 2k" in impose:
        e["u"] = 2 * e["k"] - two_v - e["w"]
    if "trace k+l" in impose:
        e["u"] = e["k"] + e["l"] - two_v - e["w"]
    e["b_prime"] = e["a"] + e["b"] - e["a_prime"]
    return RationalBlock(**e)


def child_seed(seed, i):
    return int(seed) * 2**32 + i


@dataclass(frozen=True)
class SweepRecord:
    agree_count: int
    disagree_examples: list
    holk1_true: int
    grid_size: int

    @property
    def ok(self):
        return not self.disagree_examples


def exhaustive_grid():
    """All constrained blocks with ``x, a, b, a', b'`` in ``{-1, 0, 1}`` and ``k = l = u = w = v = 0``."""
    for x, a, b, ap, bp in itertools.product((-1, 0, 1), repeat=5):
        if a + b == ap + bp:
            yield RationalBlock(a=G(a), b=G(b), a_prime=G(ap), b_prime=G(bp), x=G(x))


def _sweep(blocks, lhs, rhs, max_examples):
    agree, true, bad = 0, 0, []
    for m in blocks:
        left = lhs(m)
        true += left
        if left == rhs(m):
            agree += 1
        elif len(bad) < max_examples:
            bad.append(m)
    return agree, true, bad


def theorem3_equivalence_sweep(n, seed=0, grid=True, max_examples=10) -> SweepRecord:
    """``check_holk1 <=> check_holk2_and_dual`` over ``n`` random blocks plus the exhaustive grid.

    ``agree_count`` counts the random blocks only; a grid block that
    disagrees is appended to ``disagree_examples`` like a random one.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rand = (random_constrained_block(child_seed(seed, i)) for i in range(n))
    agree, true, bad = _sweep(rand, check_holk1, check_holk2_and_dual, max_examples)
    size = 0
    if grid:
        blocks = list(exhaustive_grid())
        size = len(blocks)
        _, _, gbad = _sweep(blocks, check_holk1, check_holk2_and_dual, max_examples)
        bad += gbad
    return SweepRecord(agree, bad, true, size)


def balas_sweep(n, seed=0, max_examples=10) -> SweepRecord:
    """``balas_coefficient_check <=> check_holk1`` over ``n`` random constrained blocks."""
    rand = (random_constrained_block(child_seed(seed, i)) for i in range(n))
    agree, true, bad = _sweep(rand, check_holk1, balas_coefficient_check, max_examples)
    return SweepRecord(agree, bad, true, 0)
