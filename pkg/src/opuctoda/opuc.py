"""Probability measures on the unit circle and their Verblunsky coefficients.

Measures are absolutely continuous, entered as densities with respect to
d(theta)/2pi.  Moments are Fourier coefficients c_n = int e^{-in theta} dmu
computed by the uniform-grid trapezoid rule (spectrally accurate for smooth
periodic densities).  Monic orthogonal polynomials follow the recursion

    p_n(z) = z p_{n-1}(z) + conj(alpha_n) z^{n-1} p_{n-1}^*(z),    p_0 = 1,

with alpha_n = conj(p_n(0)).  Note the convention: alpha_0 = 1 is implicit
and never stored; the nontrivial coefficients are alpha_1, alpha_2, ...
Translation to the Simon-style convention used in most of the OPUC
literature: shift the index down by one and flip the sign,
alpha_n(here) = -alpha_{n-1}(Simon).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .series import TruncatedSeries, conj_scalar

__all__ = [
    "CircleMeasure",
    "MomentSequence",
    "MonicPolynomialSeq",
    "VerblunskySequence",
    "MeasureError",
    "QuadratureResolutionError",
    "RecursionBreakdownError",
    "moments_quadrature",
    "szego_step",
    "verblunsky_forward",
    "bernstein_szego_density",
    "monic_poly_from_moments",
]

DEFAULT_GRID = 4096


class MeasureError(ValueError):
    """Density is not a valid probability density on the circle."""


class QuadratureResolutionError(ValueError):
    """Quadrature grid too coarse to resolve the requested moments."""


class RecursionBreakdownError(RuntimeError):
    """Toeplitz minors degenerate or |alpha| >= 1: finite-support or
    under-resolved measure."""


def _uniform_grid(gridsize):
    return 2.0 * np.pi * np.arange(gridsize) / gridsize


@dataclass(frozen=True)
class MomentSequence:
    """Fourier coefficients c_0..c_N with the Hermitian extension implicit.

    ``renormalization`` records the factor c_0 carried before being scaled
    to exactly 1.
    """

    c: np.ndarray
    renormalization: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "c", np.asarray(self.c, dtype=complex))
        if self.c[0] != 1:
            raise ValueError("moment sequence must be normalized: c[0] == 1")

    def __len__(self):
        return len(self.c) - 1

    def __getitem__(self, n):
        """c_n for -N <= n <= N, using c_{-n} = conj(c_n)."""
        if n < 0:
            return np.conj(self.c[-n])
        return self.c[n]

    def toeplitz(self, size):
        """Gram matrix T[j, k] = <z^k, z^j> = c_{j-k} of size x size."""
        if size > len(self.c):
            raise ValueError("not enough moments for requested Toeplitz size")
        return np.array([[self[j - k] for k in range(size)] for j in range(size)])

    def min_toeplitz_eigenvalue(self, size):
        return float(np.linalg.eigvalsh(self.toeplitz(size)).min())

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["n", "re", "im"])
        for n, v in enumerate(self.c):
            w.writerow([n, repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()

    def to_json_obj(self):
        return {
            "renormalization": float(self.renormalization),
            "c": [[float(v.real), float(v.imag)] for v in self.c],
        }


class VerblunskySequence:
    """Coefficients alpha_1..alpha_N, each in the open unit disk.

    Indexing is 1-based to match the recursion; alpha_0 = 1 is an implicit
    convention, not data.
    """

    def __init__(self, values):
        vals = tuple(complex(v) if isinstance(v, (float, int, complex)) else v for v in values)
        for k, v in enumerate(vals, start=1):
            if abs(v) >= 1:
                raise ValueError(f"|alpha_{k}| = {abs(v)} >= 1: not in the open disk")
        self.values = vals

    def __len__(self):
        return len(self.values)

    def __getitem__(self, n):
        if not 1 <= n <= len(self.values):
            raise IndexError(f"alpha index {n} outside 1..{len(self.values)}")
        return self.values[n - 1]

    def __iter__(self):
        return iter(self.values)

    def __eq__(self, other):
        return isinstance(other, VerblunskySequence) and self.values == other.values

    def __repr__(self):
        head = ", ".join(repr(v) for v in self.values[:4])
        tail = ", ..." if len(self.values) > 4 else ""
        return f"VerblunskySequence([{head}{tail}], N={len(self.values)})"

    def one_minus_sq_product(self):
        """prod_k (1 - |alpha_k|^2), exact when the data is exact."""
        out = 1
        for v in self.values:
            out = out * (1 - v * conj_scalar(v))
        return out

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(["n", "re", "im"])
        for n, v in enumerate(self.values, start=1):
            z = complex(v)
            w.writerow([n, repr(z.real), repr(z.imag)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        rows = list(csv.reader(io.StringIO(text)))
        if rows and rows[0] and rows[0][0].strip().lower() == "n":
            rows = rows[1:]
        vals = [complex(float(r[1]), float(r[2])) for r in rows if r]
        return cls(vals)


@dataclass
class MonicPolynomialSeq:
    """polys[n] is the degree-n monic orthogonal polynomial."""

    polys: list = field(default_factory=list)

    def __post_init__(self):
        for n, p in enumerate(self.polys):
            _require_monic(p, n)

    def __len__(self):
        return len(self.polys)

    def __getitem__(self, n):
        return self.polys[n]


def _require_monic(p: TruncatedSeries, degree: int):
    if p.window != (0, degree) and not (degree == 0 and p.window == (0, 0)):
        raise ValueError(f"expected polynomial window (0, {degree}), got {p.window}")
    if p.coeff(degree) != 1:
        raise ValueError(f"polynomial of degree {degree} is not monic")


class CircleMeasure:
    """Probability measure density(theta) d(theta)/2pi on [0, 2pi).

    The density callable must accept ndarray input.  Construction samples the
    density on ``check_grid`` points, rejecting negative values and total
    mass away from 1 beyond ``mass_tol``.  Instances are immutable in use;
    moments are cached per (N, gridsize).
    """

    def __init__(self, density, mass_tol=1e-6, check_grid=DEFAULT_GRID, name=None):
        self._density = density
        self.name = name or "measure"
        theta = _uniform_grid(check_grid)
        vals = np.asarray(density(theta), dtype=float)
        if np.any(vals < 0):
            worst = float(vals.min())
            raise MeasureError(f"density negative on grid (min {worst:.3e})")
        self.mass = float(vals.mean())
        if abs(self.mass - 1.0) > mass_tol:
            raise MeasureError(
                f"density mass {self.mass:.6g} differs from 1 beyond tolerance {mass_tol}"
            )
        self._moment_cache = {}

    def density(self, theta):
        return self._density(np.asarray(theta, dtype=float))

    @classmethod
    def lebesgue(cls):
        return cls(lambda th: np.ones_like(th), name="lebesgue")

    @classmethod
    def from_samples(cls, theta, values, mass_tol=1e-6, name=None):
        """Density from samples on a uniform theta grid, periodic linear
        interpolation in between."""
        theta = np.asarray(theta, dtype=float)
        values = np.asarray(values, dtype=float)
        if len(theta) != len(values) or len(theta) < 8:
            raise ValueError("need matching theta/value arrays, at least 8 samples")
        steps = np.diff(theta)
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12):
            raise ValueError("theta grid must be uniform")
        period = 2.0 * np.pi

        def interp(th):
            return np.interp(np.mod(th - theta[0], period) + theta[0],
                             np.concatenate([theta, [theta[0] + period]]),
                             np.concatenate([values, [values[0]]]))

        return cls(interp, mass_tol=mass_tol, check_grid=len(theta), name=name)

    def moments(self, n_moments, gridsize=None):
        gridsize = gridsize or DEFAULT_GRID
        key = (n_moments, gridsize)
        if key not in self._moment_cache:
            self._moment_cache[key] = moments_quadrature(self, n_moments, gridsize)
        return self._moment_cache[key]


def moments_quadrature(measure, n_moments, gridsize=None) -> MomentSequence:
    """Trapezoid-rule Fourier moments c_n = mean_k e^{-in theta_k} density(theta_k).

    c_0 is renormalized to exactly 1 and the applied factor reported in the
    result.  Requires gridsize >= 8 * n_moments.
    """
    gridsize = gridsize or DEFAULT_GRID
    if gridsize < 8 * n_moments:
        raise QuadratureResolutionError(
            f"gridsize {gridsize} < 8*N = {8 * n_moments}: grid too coarse"
        )
    dens = measure.density if isinstance(measure, CircleMeasure) else measure
    theta = _uniform_grid(gridsize)
    w = np.asarray(dens(theta), dtype=float)
    if np.any(w < 0):
        raise MeasureError(f"negative density sample (min {w.min():.3e})")
    phases = np.exp(-1j * np.outer(np.arange(n_moments + 1), theta))
    c = phases.dot(w) / gridsize
    c0 = c[0].real
    if abs(c0 - 1.0) > 1e-6:
        raise QuadratureResolutionError(
            f"c_0 = {c0:.8f} before renormalization: density unnormalized or grid too coarse"
        )
    return MomentSequence(c / c0, renormalization=c0)


def reversed_conjugate(p: TruncatedSeries, degree: int) -> TruncatedSeries:
    """z^degree * p^*(z): coefficient k is conj of coefficient degree-k of p."""
    data = [conj_scalar(p.coeff(degree - k)) for k in range(degree + 1)]
    return TruncatedSeries(0, data)


def szego_step(p: TruncatedSeries, alpha_n, n: int) -> TruncatedSeries:
    """One step of the recursion: p_n = z p_{n-1} + conj(alpha_n) z^{n-1} p_{n-1}^*."""
    _require_monic(p, n - 1)
    if abs(complex(alpha_n)) >= 1:
        raise ValueError(f"|alpha_{n}| >= 1")
    shifted = p.shift(1)
    rev = reversed_conjugate(p, n - 1)
    out = shifted + rev.scale(conj_scalar(alpha_n))
    _require_monic(out, n)
    return out


def monic_poly_from_moments(moments: MomentSequence, degree: int) -> TruncatedSeries:
    """Degree-n monic orthogonal polynomial by a dense Toeplitz solve.

    Orthogonalizes z^n against span{1..z^{n-1}} using moments only: solve
    T x = -(c_{j-n})_j for the lower coefficients.  O(n^3); serves as the
    cross-check for the O(n^2) recursion path.
    """
    if degree == 0:
        return TruncatedSeries.one()
    T = moments.toeplitz(degree)
    rhs = -np.array([moments[j - degree] for j in range(degree)])
    x = np.linalg.solve(T, rhs)
    return TruncatedSeries(0, list(x) + [1.0 + 0.0j])


def verblunsky_forward(mu: CircleMeasure, n_coeffs: int, gridsize=None,
                       minor_floor=1e-13, cross_check=True):
    """Forward Verblunsky map: measure -> (alpha_1..alpha_N, p_0..p_N).

    Runs the Levinson-style recursion on the Toeplitz moment matrix; each
    alpha_n comes from orthogonality of p_n against 1 and the norm identity
    ||p_n||^2 = (1 - |alpha_n|^2) ||p_{n-1}||^2.  With ``cross_check`` the
    final polynomial is verified against an independent dense Toeplitz solve.
    """
    gridsize = gridsize or max(DEFAULT_GRID, 8 * n_coeffs)
    c = mu.moments(n_coeffs + 1, gridsize)
    p = TruncatedSeries.one()
    polys = [p]
    alphas = []
    norm2 = 1.0
    for n in range(1, n_coeffs + 1):
        if norm2 <= minor_floor:
            raise RecursionBreakdownError(
                f"Toeplitz leading minor ratio {norm2:.3e} at degree {n}: "
                "finite-support or under-resolved measure"
            )
        # <z p_{n-1}, 1> = sum_k p_k conj(c_{k+1})
        num = sum(p.coeff(k) * np.conj(c[k + 1]) for k in range(n))
        alpha_star = -num / norm2
        alpha = np.conj(alpha_star)
        if abs(alpha) >= 1:
            raise RecursionBreakdownError(
                f"|alpha_{n}| = {abs(alpha):.6f} >= 1: numerical breakdown"
            )
        p = szego_step(p, alpha, n)
        polys.append(p)
        alphas.append(alpha)
        norm2 *= (1.0 - abs(alpha) ** 2)
    if cross_check and n_coeffs > 0:
        dense = monic_poly_from_moments(c, n_coeffs)
        dev = max(abs(complex(p.coeff(k)) - complex(dense.coeff(k))) for k in range(n_coeffs + 1))
        if dev > 1e-8:
            raise RecursionBreakdownError(
                f"recursion vs dense Toeplitz solve disagree by {dev:.3e}"
            )
    return VerblunskySequence(alphas), MonicPolynomialSeq(polys)


def bernstein_szego_density(alphas: VerblunskySequence, mass_tol=1e-6,
                            check_grid=DEFAULT_GRID) -> CircleMeasure:
    """Measure with density prod(1-|alpha_k|^2) / |p_N|^2.

    This is the level-N approximant whose weak* limit realizes the inverse
    Verblunsky map; its own coefficients are alpha_1..alpha_N followed by
    zeros.
    """
    if isinstance(alphas, (list, tuple, np.ndarray)):
        alphas = VerblunskySequence(alphas)
    p = TruncatedSeries.one()
    for n in range(1, len(alphas) + 1):
        p = szego_step(p, alphas[n], n)
    scale = float(abs(complex(alphas.one_minus_sq_product())))
    coeffs = np.asarray([complex(v) for v in p.coeffs])

    def dens(theta):
        z = np.exp(1j * np.asarray(theta))
        vals = np.zeros_like(z)
        for c in coeffs[::-1]:
            vals = vals * z + c
        mag2 = np.abs(vals) ** 2
        if np.any(mag2 == 0):
            raise MeasureError("reconstruction polynomial vanishes on the grid")
        return scale / mag2

    return CircleMeasure(dens, mass_tol=mass_tol, check_grid=check_grid,
                         name=f"bernstein-szego-N{len(alphas)}")
