"""Closing arithmetic of the distinguishing-colouring argument.

With ``a = 256|D|^14|R|^7``, ``c = 1/(8|D|^3|R|)`` and
``b = (1 - ℓ^-|D|)^c`` the argument needs ``a² M^14 b^M < 1``.  The product
is evaluated in log space with interval arithmetic, so a verdict is only
returned when the whole enclosure lies on one side of 1.  An exact integer
test is kept alongside as an independent route.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import iv


@contextmanager
def _ivprec(prec: int):
    old = iv.prec
    iv.prec = prec
    try:
        yield
    finally:
        iv.prec = old


@dataclass(frozen=True)
class BoundReport:
    ell: int
    D: int
    R: int
    M: int
    a: int
    c: Fraction
    b: str  # decimal enclosure of b
    product_log10: list  # [lo, hi] enclosure of log10(product)
    product_below_one: bool
    threshold: int

    def to_json(self) -> dict:
        return {"ell": self.ell, "D": self.D, "R": self.R, "M": self.M, "a": self.a,
                "c": str(self.c), "b": self.b, "product_log10": self.product_log10,
                "product_below_one": self.product_below_one, "threshold": self.threshold}


def constants(ell: int, D: int, R: int) -> tuple[int, Fraction, Fraction]:
    """(a, c, base) with ``b = base**c``."""
    for name, v in (("ell", ell), ("D", D), ("R", R)):
        if not isinstance(v, int) or v < 1:
            raise ValueError(f"{name} must be a positive integer")
    if ell < 2:
        raise ValueError("ell must be at least 2")
    a = 256 * D ** 14 * R ** 7
    c = Fraction(1, 8 * D ** 3 * R)
    base = 1 - Fraction(1, ell ** D)
    return a, c, base


def _log_product(ell: int, D: int, R: int, M: int, prec: int):
    a, c, base = constants(ell, D, R)
    with _ivprec(prec):
        lb = iv.log(iv.mpf(base.numerator)) - iv.log(iv.mpf(base.denominator))
        cc = iv.mpf(c.numerator) / c.denominator
        return 2 * iv.log(iv.mpf(a)) + 14 * iv.log(iv.mpf(M)) + M * cc * lb


def product_below_one(ell: int, D: int, R: int, M: int, prec: int = 80) -> bool:
    """Rigorous decision of ``a² M^14 b^M < 1``; precision grows until the
    enclosure of the log excludes 0."""
    if M < 1:
        raise ValueError("M must be positive")
    p = prec
    while True:
        v = _log_product(ell, D, R, M, p)
        if v.b < 0:
            return True
        if v.a >= 0:
            return False
        p *= 2
        if p > 1 << 16:  # product is exactly 1; only possible if it is rational
            return False


def product_below_one_exact(ell: int, D: int, R: int, M: int) -> bool:
    """Integer-only oracle: with ``q = 1/c`` the inequality raised to the
    q-th power reads ``a^{2q} M^{14q} (ℓ^D - 1)^M < ℓ^{D M}``."""
    a, c, _ = constants(ell, D, R)
    q = c.denominator
    return a ** (2 * q) * M ** (14 * q) * (ell ** D - 1) ** M < ell ** (D * M)


def threshold(ell: int, D: int, R: int, below=product_below_one) -> int:
    """Least M with product < 1.

    log(product) is concave in M and positive at M = 1, so the set where it
    is negative is a ray; doubling finds a point on it, bisection its start.
    """
    if below(ell, D, R, 1):
        return 1
    hi = 2
    while not below(ell, D, R, hi):
        hi *= 2
    lo = hi // 2  # below(lo) is False
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if below(ell, D, R, mid):
            hi = mid
        else:
            lo = mid
    return hi


def bound_report(ell: int, D: int, R: int, M: int | None = None) -> BoundReport:
    """Constants, the product at M (default: the threshold) and the threshold."""
    a, c, base = constants(ell, D, R)
    t = threshold(ell, D, R)
    M = t if M is None else M
    with mpmath.workdps(30):
        b = mpmath.power(mpmath.mpf(base.numerator) / base.denominator,
                         mpmath.mpf(c.numerator) / c.denominator)
        b_s = mpmath.nstr(b, 25)
    v = _log_product(ell, D, R, M, 80)
    with _ivprec(80):
        l10 = v / iv.log(10)
    return BoundReport(ell, D, R, M, a, c, b_s,
                       [mpmath.nstr(mpmath.mpf(l10.a), 15), mpmath.nstr(mpmath.mpf(l10.b), 15)],
                       product_below_one(ell, D, R, M), t)


def vdeg_bound(D: int, R: int, M: int) -> int:
    """``a·|M|^7``, the bound on constraints per variable."""
    return 256 * D ** 14 * R ** 7 * M ** 7
