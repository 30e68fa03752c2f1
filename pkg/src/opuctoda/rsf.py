"""Root subgroup partial products on the circle and derived functions.

The product of elementary SU(1,1)-type loop factors

    [[1, conj(a_k) z^{-k}], [a_k z^k, 1]],   k = 1..N,

taken with new factors multiplying on the left, has bottom row
(gamma(z), delta(z)) where gamma and delta are polynomials in z (the
negative powers cancel), delta(0) = 1 and gamma(0) = 0.  The top row is
(delta*, gamma*) by the star symmetry.  Everything downstream of the
inverse Verblunsky map lives here: the Schur function -gamma/(z delta),
the Caratheodory function (delta - gamma)/(delta + gamma), the density
reconstruction prod(1-|a_k|^2)/|gamma + delta|^2, and the boundedness
diagnostic that signals when the loop has no triangular factorization.

A note on naming: in the factorization literature gamma_2/delta_2 also
label entries of the third triangular factor of the loop.  This module
implements the *product* entries only; the two usages agree through the
Schur function identity -c_2/(z d_2) = -gamma_2/(z delta_2), and the
triangular factors themselves are out of scope.

Two evaluation paths are provided on purpose.  Coefficient statements use
truncated series built by an exact recurrence in nonnegative powers;
pointwise statements (densities, disk bounds) use direct 2x2 matrix
products per evaluation point, which have no truncation error at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .opuc import CircleMeasure, VerblunskySequence
from .series import TruncatedSeries, conj_scalar, divide

__all__ = [
    "PartialProduct",
    "SchurFn",
    "CaratheodoryFn",
    "partial_product",
    "product_matrix_at",
    "bottom_row_at",
    "bottom_row_on_grid",
    "coefficients_by_enumeration",
    "schur_function",
    "caratheodory_function",
    "rsf_density",
    "delta_identity_residual",
    "circle_sup_diagnostic",
    "disk_samples",
]

MAX_SERIES_ORDER = 200_000


def _as_alpha_list(alphas, n_factors=None):
    if isinstance(alphas, VerblunskySequence):
        vals = list(alphas.values)
    else:
        vals = list(alphas)
    for k, v in enumerate(vals, start=1):
        if abs(complex(v)) >= 1:
            raise ValueError(f"|alpha_{k}| >= 1: factor outside the domain")
    if n_factors is not None:
        if n_factors > len(vals):
            raise ValueError(f"requested {n_factors} factors, only {len(vals)} coefficients given")
        vals = vals[:n_factors]
    return vals


@dataclass
class PartialProduct:
    """Bottom row of the N-factor product as truncated series in z.

    ``gamma`` has window 1..M, ``delta`` window 0..M.  Coefficients with
    index >= ``exact_from`` equal the finite product's coefficients exactly
    (up to scalar rounding); below that index, contributions involving
    series data beyond order M were dropped and the values carry an O(1/M)
    truncation drift.  ``fully_resolved`` means M was large enough that no
    contribution was ever dropped.
    """

    n_factors: int
    order: int
    normalized: bool
    gamma: TruncatedSeries
    delta: TruncatedSeries
    alphas: list
    det_product: object
    exact_from: int
    fully_resolved: bool

    @property
    def det_target(self):
        return 1 if self.normalized else self.det_product

    def coefficient(self, which, n):
        s = self.gamma if which == "gamma" else self.delta
        return s.coeff(n)

    def sum_series(self):
        return self.delta + self.gamma

    def to_json_obj(self, gridsize=512):
        det_res, sup = self._grid_stats(gridsize)
        return {
            "N": self.n_factors,
            "M": self.order,
            "normalized": self.normalized,
            "gamma": self.gamma.to_json_obj(),
            "delta": self.delta.to_json_obj(),
            "det_residual": det_res,
            "sup_table": sup,
        }

    def _grid_stats(self, gridsize):
        gam, dlt = bottom_row_on_grid(self.alphas, self.n_factors, gridsize,
                                      normalized=self.normalized)
        det = np.abs(dlt) ** 2 - np.abs(gam) ** 2
        det_res = float(np.max(np.abs(det - float(abs(complex(self.det_target))))))
        sup = float(np.max(np.abs(gam + dlt)))
        return det_res, sup


def partial_product(alphas, n_factors=None, order=None, normalized=False) -> PartialProduct:
    """Accumulate the first ``n_factors`` loop factors, left to right growth.

    Coefficient recurrence per factor k (exact in nonnegative powers):

        gamma[j] += a_k conj(delta[k-j]),    delta[j] += a_k conj(gamma[k-j]).

    Rational coefficients stay rational.  ``order`` is the retained series
    order M, defaulting to the full polynomial degree (M = N), which makes
    every coefficient exact.  With a smaller M the contributions routed
    through dropped high-order data never arrive: coefficients below
    ``exact_from`` are then frozen near their level-(M+n) values instead of
    converging, which is why full resolution is the default.
    """
    vals = _as_alpha_list(alphas, n_factors)
    n = len(vals)
    m = max(1, n) if order is None else int(order)
    if m < 1:
        raise ValueError("order must be >= 1")
    if m > MAX_SERIES_ORDER:
        raise MemoryError(f"series order {m} exceeds resource budget {MAX_SERIES_ORDER}")

    exact = all(isinstance(v, (int, Fraction)) for v in vals)
    if exact:
        zero, one = Fraction(0), Fraction(1)
        g = [zero] * (m + 1)
        d = [zero] * (m + 1)
        d[0] = one
        det = one
        for k in range(1, n + 1):
            a = vals[k - 1]
            det = det * (1 - a * a if isinstance(a, (int, Fraction)) else 1 - a * conj_scalar(a))
            lo = max(0, k - m)
            hi = min(m, k)  # touched indices j satisfy 0 <= k-j <= m
            gk = g[:]
            dk = d[:]
            for j in range(lo, hi + 1):
                q = k - j
                if j >= 1:
                    gk[j] = g[j] + a * conj_scalar(d[q])
                dk[j] = d[j] + a * conj_scalar(g[q])
            g, d = gk, dk
    else:
        g = np.zeros(m + 1, dtype=complex)
        d = np.zeros(m + 1, dtype=complex)
        d[0] = 1.0
        det = 1.0
        for k in range(1, n + 1):
            a = complex(vals[k - 1])
            det *= 1.0 - abs(a) ** 2
            lo = max(0, k - m)
            hi = min(m, k)
            if lo > hi:
                continue
            # q runs k-lo down to k-hi as j runs lo..hi
            dq = np.conj(d[k - hi : k - lo + 1][::-1])
            gq = np.conj(g[k - hi : k - lo + 1][::-1])
            g_new = g.copy()
            d_new = d.copy()
            jlo = max(lo, 1)
            g_new[jlo : hi + 1] = g[jlo : hi + 1] + a * dq[jlo - lo :]
            d_new[lo : hi + 1] = d[lo : hi + 1] + a * gq
            g, d = g_new, d_new
        g = list(g)
        d = list(d)

    if normalized:
        scale = 1.0 / np.sqrt(float(det) if exact else abs(det))
        g = [float(x) * scale if exact else x * scale for x in g]
        d = [float(x) * scale if exact else x * scale for x in d]

    fully_poly = m >= n  # polynomial degrees: gamma <= N, delta <= N-1
    gamma = TruncatedSeries(1, g[1:] if m >= 1 else [zero], exact_above=fully_poly)
    delta = TruncatedSeries(0, d, exact_above=fully_poly)
    fully_resolved = m >= max(0, n - 1)
    exact_from = 1 if fully_resolved else max(1, n - m)
    return PartialProduct(
        n_factors=n, order=m, normalized=normalized, gamma=gamma, delta=delta,
        alphas=vals, det_product=det, exact_from=exact_from,
        fully_resolved=fully_resolved,
    )


def product_matrix_at(alphas, z, n_factors=None, normalized=False):
    """The full 2x2 product evaluated at a point z != 0 (direct 2x2 arithmetic).

    Intended for |z| near 1; at small |z| the off-diagonal z^{-k} entries
    overflow and :func:`bottom_row_at` is the stable evaluation.
    """
    vals = _as_alpha_list(alphas, n_factors)
    z = complex(z)
    if z == 0:
        raise ValueError("factors carry z^{-k}: cannot evaluate at z = 0")
    G = np.eye(2, dtype=complex)
    for k, a in enumerate(vals, start=1):
        a = complex(a)
        F = np.array([[1.0, np.conj(a) * z ** (-k)], [a * z ** k, 1.0]])
        if normalized:
            F = F / np.sqrt(1.0 - abs(a) ** 2)
        G = F @ G
    return G


def bottom_row_at(alphas, z, n_factors=None):
    """(gamma(z), delta(z)) anywhere in the closed disk, overflow-free.

    Tracks the polynomials gamma, delta together with their reversed
    conjugates rg = z^k gamma*, rd = z^k delta*, closing the coupled
    recursion without ever forming z^{-k}:

        gamma' = gamma + a z rd          delta' = delta + a z rg
        rd'    = z rd + conj(a) gamma    rg'    = z rg + conj(a) delta

    Accepts scalar or ndarray z (z = 0 included: the factors' poles cancel
    in the bottom row, which is polynomial).
    """
    vals = _as_alpha_list(alphas, n_factors)
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    gam = np.zeros_like(z)
    dlt = np.ones_like(z)
    rg = np.zeros_like(z)
    rd = np.ones_like(z)
    for a in vals:
        a = complex(a)
        ac = np.conj(a)
        gam, dlt, rd, rg = (
            gam + a * z * rd,
            dlt + a * z * rg,
            z * rd + ac * gam,
            z * rg + ac * dlt,
        )
    if scalar:
        return complex(gam[0]), complex(dlt[0])
    return gam, dlt


def bottom_row_on_grid(alphas, n_factors=None, gridsize=1024, theta=None,
                       normalized=False, collect_sup=False):
    """(gamma, delta) values on a circle grid via the pointwise recurrence.

    On |z| = 1 the top row is the conjugate of the bottom row, so the whole
    product reduces to two complex arrays updated per factor; there is no
    series truncation anywhere.  With ``collect_sup`` also return the level
    table sup_{grid} |gamma + delta| for each intermediate number of factors.
    """
    vals = _as_alpha_list(alphas, n_factors)
    if theta is None:
        theta = 2.0 * np.pi * np.arange(gridsize) / gridsize
    theta = np.asarray(theta, dtype=float)
    z = np.exp(1j * theta)
    gam = np.zeros_like(z)
    dlt = np.ones_like(z)
    zk = np.ones_like(z)
    sup_table = []
    scale = 1.0
    for a in vals:
        a = complex(a)
        zk = zk * z
        ph = a * zk
        gam, dlt = gam + ph * np.conj(dlt), dlt + ph * np.conj(gam)
        if normalized:
            scale = scale / np.sqrt(1.0 - abs(a) ** 2)
        if collect_sup:
            sup_table.append(float(np.max(np.abs(gam + dlt))) * scale)
    if normalized:
        gam = gam * scale
        dlt = dlt * scale
    if collect_sup:
        return gam, dlt, sup_table
    return gam, dlt


def coefficients_by_enumeration(alphas, n, n_factors=None):
    """Coefficient of z^n in gamma and delta by direct multiindex enumeration.

    gamma: ascending indices x_1 < x_2 < ... of odd length with alternating
    sum x_1 - x_2 + x_3 - ... = n; term prod a_{x(odd)} conj(a_{x(even)}).
    delta: even length, -x_1 + x_2 - x_3 + ... = n; term
    prod conj(a_{x(odd)}) a_{x(even)}.  This is the expansion of the product
    itself, and in exact mode must match partial_product coefficient for
    coefficient.  Guarded to n <= 12: the oracle is for small orders.
    """
    if n < 1:
        raise ValueError("coefficient index must be >= 1")
    if n > 12:
        raise ValueError("enumeration guard: n > 12 refused (combinatorial blowup)")
    vals = _as_alpha_list(alphas, n_factors)
    nn = len(vals)
    exact = all(isinstance(v, (int, Fraction)) for v in vals)
    zero = Fraction(0) if exact else 0.0 + 0.0j

    gamma_total = zero
    delta_total = zero

    # DFS over strictly increasing index tuples with alternating signed roles.
    # A term "closes" at odd length for gamma (+x1 - x2 + x3 ...) and at even
    # length for delta (-x1 + x2 - ...).  Every extension past a closed state
    # appends a (-y, +w) pair with w > y, increasing the alternating sum by at
    # least 1, which is what the pruning below relies on.
    def walk(start, length, partial, product, sign_first):
        nonlocal gamma_total, delta_total
        for x in range(start, nn + 1):
            first_role = length % 2 == 0
            sign = sign_first if first_role else -sign_first
            new_partial = partial + sign * x
            av = vals[x - 1]
            if (sign_first > 0) == first_role:
                fac = av
            else:
                fac = conj_scalar(av)
            new_product = product * fac
            new_len = length + 1
            closed = (new_len % 2 == 1) if sign_first > 0 else (new_len % 2 == 0)
            if closed:
                if new_partial == n:
                    if sign_first > 0:
                        gamma_total += new_product
                    else:
                        delta_total += new_product
                if new_partial < n and x + 1 <= nn:
                    walk(x + 1, new_len, new_partial, new_product, sign_first)
            else:
                # the closing element is at least x + 1
                if new_partial + x + 1 <= n and x + 1 <= nn:
                    walk(x + 1, new_len, new_partial, new_product, sign_first)

    one = Fraction(1) if exact else 1.0 + 0.0j
    walk(1, 0, 0, one, +1)
    walk(1, 0, 0, one, -1)
    return gamma_total, delta_total


@dataclass
class SchurFn:
    """Holomorphic self-map of the disk attached to a partial product."""

    series: TruncatedSeries
    alphas: list

    def value_at(self, z):
        """Exact pointwise value -gamma(z)/(z delta(z)), no truncation error."""
        gam, dlt = bottom_row_at(self.alphas, z)
        return -gam / (complex(z) * dlt)


@dataclass
class CaratheodoryFn:
    """Disk-to-right-half-plane map attached to a partial product; F(0) = 1."""

    series: TruncatedSeries
    alphas: list

    def value_at(self, z):
        gam, dlt = bottom_row_at(self.alphas, z)
        return (dlt - gam) / (dlt + gam)


def disk_samples(radii=(0.3, 0.6, 0.9), n_angles=64):
    """Deterministic spot-check set inside the disk."""
    out = []
    for r in radii:
        for j in range(n_angles):
            out.append(r * np.exp(2j * np.pi * j / n_angles))
    return out


def schur_function(pp: PartialProduct, check_bound=True) -> SchurFn:
    """Schur function -gamma/(z delta) as a series to order M-1.

    Certifies |f| <= 1 + 1e-9 on the standard disk samples using exact
    pointwise products (no truncation error in the check).
    """
    if pp.delta.coeff(0) == 0:
        raise ZeroDivisionError("division breakdown: delta(0) = 0")
    num = pp.gamma.scale(-1).shift(-1)
    f = divide(num, pp.delta, pp.order - 1)
    fn = SchurFn(series=f, alphas=pp.alphas)
    if check_bound:
        for z in disk_samples():
            if abs(fn.value_at(z)) > 1.0 + 1e-9:
                raise AssertionError(f"Schur bound violated at z={z}: |f|={abs(fn.value_at(z))}")
    return fn


def caratheodory_function(pp: PartialProduct) -> CaratheodoryFn:
    """F = (delta - gamma)/(delta + gamma) as a series to order M; F(0) = 1."""
    s = pp.sum_series()
    if s.coeff(0) == 0:
        raise ZeroDivisionError("division breakdown: (delta + gamma)(0) = 0")
    F = divide(pp.delta - pp.gamma, s, pp.order)
    c0 = F.coeff(0)
    if c0 != 1:
        F = F.scale(1 / c0 if not isinstance(c0, Fraction) else Fraction(1) / c0)
    return CaratheodoryFn(series=F, alphas=pp.alphas)


def delta_identity_residual(pp: PartialProduct):
    """Max coefficient magnitude of delta - (1 + F)(delta + gamma)/2.

    Algebraically zero by the definition of F; exactly zero in rational
    mode, bounded by rounding in floating mode.
    """
    F = caratheodory_function(pp).series
    s = pp.sum_series()
    exact = F.is_exact_mode() and s.is_exact_mode()
    half = Fraction(1, 2) if exact else 0.5
    resid = pp.delta - ((F + 1) * s).scale(half)
    if exact:
        return max(abs(c) for c in resid.coeffs)
    return max(abs(complex(c)) for c in resid.coeffs)


def rsf_density(alphas, n_factors=None, gridsize=4096, mass_tol=5e-2) -> CircleMeasure:
    """Measure with density prod(1-|a_k|^2)/|gamma + delta|^2.

    Evaluation is pointwise through the 2x2 recurrence, so there is no
    series truncation anywhere.  The measure's ``report`` attribute carries
    the total mass and any near-vanishing denominator locations (expected
    near theta = 0 for slowly decaying coefficient families as N grows).
    """
    vals = _as_alpha_list(alphas, n_factors)
    prod = 1.0
    for a in vals:
        prod *= 1.0 - abs(complex(a)) ** 2

    def dens(theta):
        gam, dlt = bottom_row_on_grid(vals, theta=np.atleast_1d(theta))
        denom = np.abs(gam + dlt) ** 2
        if np.any(denom == 0.0):
            raise ZeroDivisionError("delta + gamma vanishes on the evaluation grid")
        out = prod / denom
        return out if np.ndim(theta) else float(out[0])

    theta = 2.0 * np.pi * np.arange(gridsize) / gridsize
    gam, dlt = bottom_row_on_grid(vals, theta=theta)
    denom = np.abs(gam + dlt) ** 2
    mass = float(np.mean(prod / denom))
    near_zero = theta[denom < 1e-12]
    mu = CircleMeasure(dens, mass_tol=mass_tol, check_grid=gridsize,
                       name=f"rsf-N{len(vals)}")
    mu.report = {
        "N": len(vals),
        "total_mass": mass,
        "det_product": prod,
        "near_zero_thetas": [float(t) for t in near_zero],
    }
    return mu


def circle_sup_diagnostic(alphas, n_factors=None, gridsize=1024):
    """Boundedness diagnostic: sup |gamma + delta| per level, plus the exact
    value at theta = 0.

    For alpha_k = 1/(1+k) the theta = 0 value at level N is (N+2)/2, growing
    without bound; for summable alphas the table plateaus.  Unboundedness is
    the signal that the loop leaves the class admitting a triangular
    factorization.
    """
    vals = _as_alpha_list(alphas, n_factors)
    _, _, sup_table = bottom_row_on_grid(vals, gridsize=gridsize, collect_sup=True)
    exact = all(isinstance(v, (int, Fraction)) for v in vals)
    if exact:
        v0 = Fraction(1)
        for a in vals:
            v0 *= 1 + Fraction(a)
    else:
        v0 = 1.0
        for a in vals:
            v0 *= abs(1.0 + complex(a))
    return {
        "sup": sup_table[-1] if sup_table else 1.0,
        "growth_table": sup_table,
        "value_at_zero": v0,
    }
