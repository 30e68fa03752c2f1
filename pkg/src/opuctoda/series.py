"""Truncated Laurent/Taylor series arithmetic over complex or exact rational scalars.

A :class:`TruncatedSeries` stores coefficients on an integer exponent window
``lo..hi`` together with two flags saying what is known *outside* the window:

* ``exact_below`` -- coefficients below ``lo`` are exactly zero (a Taylor or
  polynomial bottom), as opposed to merely untracked;
* ``exact_above`` -- same for coefficients above ``hi``.

A Laurent polynomial is exact on both sides.  A power series truncated at
order ``M`` is exact below and truncated above.  Arithmetic combines windows
so that every retained coefficient is fully determined by retained inputs;
multiplication shrinks the reliable window instead of silently reading
truncated data.

Scalars may be Python complex/float/int or :class:`fractions.Fraction`.
Rational inputs stay rational through every operation, which is what the
exact identity checks elsewhere in the package rely on.
"""

from __future__ import annotations

from fractions import Fraction
from math import lgamma, exp

import numpy as np

__all__ = [
    "TruncatedSeries",
    "WindowUnderflowError",
    "binomial_series",
    "divide",
]

_INF = float("inf")


class WindowUnderflowError(ValueError):
    """Raised when an operation leaves no reliably-known coefficients."""


def conj_scalar(x):
    """Complex conjugate that leaves exact rationals exact."""
    if isinstance(x, (Fraction, int, float)):
        return x
    return x.conjugate()


def _is_inexact(x) -> bool:
    return isinstance(x, (float, complex)) or isinstance(x, np.generic)


class TruncatedSeries:
    """Series sum_{n=lo..hi} coeffs[n-lo] * z^n with window bookkeeping."""

    __slots__ = ("lo", "hi", "coeffs", "exact_below", "exact_above")

    def __init__(self, lo, coeffs, exact_below=True, exact_above=True):
        coeffs = list(coeffs)
        if not coeffs:
            raise WindowUnderflowError("window underflow: empty coefficient window")
        self.lo = int(lo)
        self.hi = int(lo) + len(coeffs) - 1
        self.coeffs = coeffs
        self.exact_below = bool(exact_below)
        self.exact_above = bool(exact_above)

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls):
        return cls(0, [0])

    @classmethod
    def one(cls):
        return cls(0, [1])

    @classmethod
    def monomial(cls, coefficient, power=0):
        return cls(power, [coefficient])

    @classmethod
    def from_coeff_map(cls, mapping, exact_below=True, exact_above=True):
        lo = min(mapping)
        hi = max(mapping)
        coeffs = [mapping.get(n, 0) for n in range(lo, hi + 1)]
        return cls(lo, coeffs, exact_below, exact_above)

    # -- basic queries ------------------------------------------------

    @property
    def window(self):
        return (self.lo, self.hi)

    def coeff(self, n):
        """Coefficient of z^n.

        Outside the window this returns 0 on an exact side and raises on a
        truncated side: truncated data must never be read as if it were zero.
        """
        if self.lo <= n <= self.hi:
            return self.coeffs[n - self.lo]
        if n < self.lo:
            if self.exact_below:
                return 0
            raise WindowUnderflowError(f"coefficient {n} below reliable window {self.window}")
        if self.exact_above:
            return 0
        raise WindowUnderflowError(f"coefficient {n} above reliable window {self.window}")

    def is_exact_mode(self) -> bool:
        """True when no coefficient is a float/complex (pure rational data)."""
        return not any(_is_inexact(c) for c in self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        try:
            return all(self.coeff(n) == other.coeff(n) for n in range(lo, hi + 1))
        except WindowUnderflowError:
            return (
                self.window == other.window
                and self.coeffs == other.coeffs
                and self.exact_below == other.exact_below
                and self.exact_above == other.exact_above
            )

    def __hash__(self):
        return hash((self.lo, tuple(self.coeffs)))

    def __repr__(self):
        inner = ", ".join(f"{n}: {c}" for n, c in zip(range(self.lo, self.hi + 1), self.coeffs))
        tag = ("" if self.exact_below else "~") + ("" if self.exact_above else "~")
        return f"TruncatedSeries({{{inner}}}{tag})"

    # -- window bookkeeping -------------------------------------------

    def _bot_limit(self):
        return -_INF if self.exact_below else self.lo

    def _top_limit(self):
        return _INF if self.exact_above else self.hi

    def _clipped(self, lo_ok, hi_ok, exact_below, exact_above, data_lo, data):
        """Build a series from dense data on [data_lo, ...], clipped to the
        reliable range [lo_ok, hi_ok]."""
        if lo_ok > hi_ok:
            raise WindowUnderflowError("window underflow: no reliable coefficients remain")
        data_hi = data_lo + len(data) - 1
        lo = int(max(lo_ok, data_lo)) if lo_ok > -_INF else data_lo
        hi = int(min(hi_ok, data_hi)) if hi_ok < _INF else data_hi
        if lo > hi:
            # all data fell outside the reliable range but the range itself
            # is nonempty: the series is reliably zero somewhere inside it
            point = int(lo_ok) if lo_ok > -_INF else int(hi_ok)
            return TruncatedSeries(point, [0], exact_below, exact_above)
        return TruncatedSeries(lo, data[lo - data_lo : hi - data_lo + 1], exact_below, exact_above)

    # -- arithmetic ----------------------------------------------------

    def __neg__(self):
        return TruncatedSeries(self.lo, [-c for c in self.coeffs], self.exact_below, self.exact_above)

    def scale(self, factor):
        return TruncatedSeries(self.lo, [factor * c for c in self.coeffs], self.exact_below, self.exact_above)

    def __add__(self, other):
        if isinstance(other, (int, float, complex, Fraction)):
            other = TruncatedSeries.monomial(other, 0)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        lo_ok = max(self._bot_limit(), other._bot_limit())
        hi_ok = min(self._top_limit(), other._top_limit())
        if lo_ok > hi_ok:
            raise WindowUnderflowError("window underflow in add: disjoint reliable windows")
        data_lo = min(self.lo, other.lo)
        data_hi = max(self.hi, other.hi)
        data = []
        for n in range(data_lo, data_hi + 1):
            a = self.coeffs[n - self.lo] if self.lo <= n <= self.hi else 0
            b = other.coeffs[n - other.lo] if other.lo <= n <= other.hi else 0
            data.append(a + b)
        return self._clipped(
            lo_ok, hi_ok, self.exact_below and other.exact_below,
            self.exact_above and other.exact_above, data_lo, data,
        )

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, float, complex, Fraction)):
            other = TruncatedSeries.monomial(other, 0)
        return self.__add__(-other)

    def __rsub__(self, other):
        return (-self).__add__(TruncatedSeries.monomial(other, 0))

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, Fraction)):
            return self.scale(other)
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        a, b = self, other

        # top of the reliable window: a truncated top of one factor pollutes
        # products from the definite bottom of the other factor upward
        if a.exact_above and b.exact_above:
            hi_ok = _INF
        else:
            hi_ok = _INF
            if not a.exact_above:
                if not b.exact_below:
                    raise WindowUnderflowError("window underflow in mul: doubly truncated factors")
                hi_ok = min(hi_ok, a.hi + b.lo)
            if not b.exact_above:
                if not a.exact_below:
                    raise WindowUnderflowError("window underflow in mul: doubly truncated factors")
                hi_ok = min(hi_ok, b.hi + a.lo)
        if a.exact_below and b.exact_below:
            lo_ok = -_INF
        else:
            lo_ok = -_INF
            if not a.exact_below:
                if not b.exact_above:
                    raise WindowUnderflowError("window underflow in mul: doubly truncated factors")
                lo_ok = max(lo_ok, a.lo + b.hi)
            if not b.exact_below:
                if not a.exact_above:
                    raise WindowUnderflowError("window underflow in mul: doubly truncated factors")
                lo_ok = max(lo_ok, b.lo + a.hi)
        if lo_ok > hi_ok:
            raise WindowUnderflowError("window underflow in mul: no reliable coefficients")

        data_lo = a.lo + b.lo
        if all(_is_inexact(c) or isinstance(c, int) for c in a.coeffs + b.coeffs) and (
            any(_is_inexact(c) for c in a.coeffs + b.coeffs)
        ):
            data = list(np.convolve(np.asarray(a.coeffs, dtype=complex), np.asarray(b.coeffs, dtype=complex)))
        else:
            data = [0] * (len(a) + len(b) - 1)
            for i, ca in enumerate(a.coeffs):
                if ca == 0:
                    continue
                for j, cb in enumerate(b.coeffs):
                    data[i + j] += ca * cb
        return self._clipped(
            lo_ok, hi_ok, a.exact_below and b.exact_below,
            a.exact_above and b.exact_above, data_lo, data,
        )

    __rmul__ = __mul__

    def truncate(self, lo, hi):
        """Restrict to the subwindow [lo, hi]; marks cut sides as truncated."""
        if lo > hi:
            raise WindowUnderflowError("window underflow: empty truncation request")
        data = [self.coeff(n) for n in range(lo, hi + 1)]
        exact_below = self.exact_below and lo <= self.lo
        exact_above = self.exact_above and hi >= self.hi
        return TruncatedSeries(lo, data, exact_below, exact_above)

    def shift(self, k):
        """Multiply by z^k."""
        return TruncatedSeries(self.lo + k, self.coeffs, self.exact_below, self.exact_above)

    def star(self):
        """The series f*(z) = sum conj(f_{-n}) z^n.

        An involution; on the unit circle eval(f*, z) == conj(eval(f, z)).
        """
        data = [conj_scalar(c) for c in reversed(self.coeffs)]
        return TruncatedSeries(-self.hi, data, self.exact_above, self.exact_below)

    # -- evaluation -----------------------------------------------------

    def eval_at(self, z):
        """Evaluate at complex z (scalar or ndarray), Horner on both tails."""
        z = np.asarray(z, dtype=complex) if isinstance(z, np.ndarray) else z
        coeffs = [complex(c) for c in self.coeffs]
        # nonnegative tail: sum_{n>=max(lo,0)} c_n z^n by descending Horner
        acc_pos = 0.0 + 0.0j
        if self.hi >= 0:
            base = max(self.lo, 0)
            for n in range(self.hi, base - 1, -1):
                acc_pos = acc_pos * z + coeffs[n - self.lo]
            if base > 0:
                acc_pos = acc_pos * z ** base
        # negative tail in w = 1/z
        acc_neg = 0.0 + 0.0j
        if self.lo < 0:
            w = 1.0 / z
            t = min(self.hi, -1)
            for n in range(self.lo, t + 1):
                acc_neg = acc_neg * w + coeffs[n - self.lo]
            # loop leaves sum_{n<=t} c_n w^{t-n}; w^{-t} lands each term on z^n
            acc_neg = acc_neg * w ** (-t)
        return acc_pos + acc_neg

    def eval_angle(self, theta):
        """Evaluate at z = e^{i theta}; theta scalar or ndarray (radians)."""
        return self.eval_at(np.exp(1j * np.asarray(theta)) if isinstance(theta, np.ndarray) else complex(np.exp(1j * theta)))

    # -- serialization ---------------------------------------------------

    def to_json_obj(self):
        return {
            "lo": self.lo,
            "hi": self.hi,
            "coeffs": [[float(np.real(complex(c))), float(np.imag(complex(c)))] for c in self.coeffs],
        }

    @classmethod
    def from_json_obj(cls, obj, exact_below=True, exact_above=True):
        coeffs = [complex(re, im) for re, im in obj["coeffs"]]
        s = cls(obj["lo"], coeffs, exact_below, exact_above)
        if s.hi != obj["hi"]:
            raise ValueError("inconsistent window in serialized series")
        return s

    def to_csv_rows(self):
        """Rows (n, re, im)."""
        return [
            (n, float(np.real(complex(c))), float(np.imag(complex(c))))
            for n, c in zip(range(self.lo, self.hi + 1), self.coeffs)
        ]


def binomial_series(m, n_terms, exact=False):
    """Coefficients of (1-z)^(-m): coeff at n is binom(m+n-1, n).

    Built by the product recurrence c_n = c_{n-1} (m+n-1)/n, which is exact
    for rational m and numerically equivalent to the Gamma-ratio form
    Gamma(m+n) / (Gamma(m) n!).  Principal branch, |z| < 1.
    """
    if m <= 0:
        raise ValueError("binomial series requires m > 0")
    if n_terms < 0:
        raise ValueError("need n_terms >= 0")
    if exact:
        m = Fraction(m)
        c = Fraction(1)
    else:
        m = float(m)
        c = 1.0
    coeffs = [c]
    for n in range(1, n_terms + 1):
        c = c * (m + n - 1) / n
        coeffs.append(c)
    return TruncatedSeries(0, coeffs, exact_below=True, exact_above=False)


def gamma_ratio(x, y):
    """Gamma(x)/Gamma(y) for positive reals, exact-friendly at integer steps."""
    if x <= 0 or y <= 0:
        raise ValueError("gamma_ratio needs positive arguments")
    return exp(lgamma(x) - lgamma(y))


def divide(num: TruncatedSeries, den: TruncatedSeries, order: int) -> TruncatedSeries:
    """Power-series division num/den to coefficients 0..order.

    Both series are read as Taylor expansions (exact below); den must have a
    nonzero constant term.
    """
    d0 = den.coeff(0)
    if d0 == 0:
        raise ZeroDivisionError("series division breakdown: zero constant term")
    # reliable output order is limited by the truncation of either input
    top = min(num._top_limit(), den._top_limit())
    if top < order:
        order = int(top)
    if order < 0:
        raise WindowUnderflowError("window underflow in division")
    exact = isinstance(d0, (int, Fraction))
    q = []
    for n in range(order + 1):
        acc = num.coeff(n)
        for k in range(n):
            acc = acc - q[k] * den.coeff(n - k)
        if exact and isinstance(acc, (int, Fraction)):
            q.append(Fraction(acc) / Fraction(d0))
        else:
            q.append(acc / d0)
    # a quotient is an infinite series in general, so its top is truncated
    return TruncatedSeries(0, q, exact_below=True, exact_above=False)
