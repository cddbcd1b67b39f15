"""Fixed-step numeric treatment of the profile ODEs in the scaling variable.

The drift polynomial Phi(u) = (z-1)u^2 + phi(u) multiplies every highest
derivative, so grids must stay away from its zeros; integration refuses to
cross a sign change instead of regularizing.  All solvers are classic RK4
marching node to node.  The recorded residual of a solution is its
Richardson deviation: the maximum difference against the same march with
two substeps per interval, which shrinks sixteenfold when the grid step is
halved.  Solvers are deterministic for a fixed grid and may run in
parallel on independent grids.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np


class OdeError(Exception):
    pass


class SingularDriftError(OdeError):
    """Phi vanishes or changes sign inside the requested grid."""


@dataclass
class ScalarFn:
    """A scalar profile u -> value with an optional analytic derivative."""

    fn: Callable[[float], float]
    dfn: Callable[[float], float] | None = None
    domain: tuple[float, float] = (float("-inf"), float("inf"))

    def __call__(self, u: float) -> float:
        return self.fn(u)

    def derivative(self, u: float, h: float = 1e-6) -> float:
        if self.dfn is not None:
            return self.dfn(u)
        return (self.fn(u + h) - self.fn(u - h)) / (2.0 * h)


def const_fn(value: float) -> ScalarFn:
    return ScalarFn(lambda u: value, lambda u: 0.0)


@dataclass
class NumericFn1D:
    """Tabulated profile with derivative samples and residual metadata."""

    grid: np.ndarray
    values: np.ndarray
    derivatives: np.ndarray
    residuals: np.ndarray
    residual_max: float

    def __call__(self, u: float) -> float:
        """Cubic Hermite interpolation using the tabulated derivatives."""
        grid = self.grid
        if u <= grid[0]:
            i = 0
        elif u >= grid[-1]:
            i = len(grid) - 2
        else:
            i = int(np.searchsorted(grid, u) - 1)
        h = grid[i + 1] - grid[i]
        s = (u - grid[i]) / h
        y0, y1 = self.values[i], self.values[i + 1]
        d0, d1 = self.derivatives[i] * h, self.derivatives[i + 1] * h
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s ** 2 * (3 - 2 * s)
        h11 = s ** 2 * (s - 1)
        return h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(["u", "value", "derivative", "residual"])
            for u, val, der, res in zip(self.grid, self.values,
                                        self.derivatives, self.residuals):
                writer.writerow([repr(float(u)), repr(float(val)),
                                 repr(float(der)), repr(float(res))])


def make_grid(lo: float, hi: float, step: float) -> np.ndarray:
    if step <= 0 or hi <= lo:
        raise OdeError("grid needs lo < hi and step > 0")
    n = int(round((hi - lo) / step))
    return np.linspace(lo, hi, n + 1)


def _drift(z: float, phi: ScalarFn) -> Callable[[float], float]:
    zm1 = z - 1.0
    return lambda u: zm1 * u * u + phi(u)


def _check_drift(big_phi: Callable[[float], float], grid: np.ndarray):
    samples = np.concatenate([grid, 0.5 * (grid[:-1] + grid[1:])])
    vals = np.array([big_phi(u) for u in samples])
    if np.any(vals == 0.0):
        where = samples[np.argmax(vals == 0.0)]
        raise SingularDriftError(f"Phi vanishes at u = {where}")
    if np.any(vals > 0) and np.any(vals < 0):
        signs = np.sign([big_phi(u) for u in grid])
        flip = np.argmax(signs[1:] != signs[:-1])
        raise SingularDriftError(
            f"Phi changes sign between u = {grid[flip]} and "
            f"u = {grid[flip + 1]}; refusing to integrate across it")


def _rk4_march(f: Callable[[float, np.ndarray], np.ndarray],
               grid: np.ndarray, y0: Sequence[float],
               substeps: int = 1) -> np.ndarray:
    y = np.asarray(y0, dtype=float)
    out = np.empty((len(grid), len(y)))
    out[0] = y
    for i in range(len(grid) - 1):
        u = grid[i]
        h = (grid[i + 1] - grid[i]) / substeps
        for _ in range(substeps):
            k1 = f(u, y)
            k2 = f(u + h / 2, y + h / 2 * k1)
            k3 = f(u + h / 2, y + h / 2 * k2)
            k4 = f(u + h, y + h * k3)
            y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
            u += h
        out[i + 1] = y
    return out


def _solve_with_residual(f, grid, y0) -> tuple[np.ndarray, np.ndarray]:
    coarse = _rk4_march(f, grid, y0, substeps=1)
    fine = _rk4_march(f, grid, y0, substeps=2)
    residuals = np.abs(coarse[:, 0] - fine[:, 0])
    return coarse, residuals


def solve_d12(z, phi: ScalarFn, mu: float, x: float, grid: np.ndarray,
              anchor: float = 0.0) -> NumericFn1D:
    """March z*u*d + Phi(u)*d' + 2*mu*x/z = 0 from d(grid[0]) = anchor."""
    zf = float(Fraction(z))
    big_phi = _drift(zf, phi)
    _check_drift(big_phi, grid)
    src = 2.0 * mu * x / zf

    def f(u: float, y: np.ndarray) -> np.ndarray:
        return np.array([-(zf * u * y[0] + src) / big_phi(u)])

    states, residuals = _solve_with_residual(f, grid, [anchor])
    values = states[:, 0]
    derivs = np.array([-(zf * u * d + src) / big_phi(u)
                       for u, d in zip(grid, values)])
    return NumericFn1D(grid, values, derivs, residuals, float(residuals.max()))


def closed_d12_z2(mu: float, x: float, phi0: float) -> ScalarFn:
    """The elementary z = 2 profile -mu*x*u/(u^2 + phi0)."""
    def fn(u: float) -> float:
        return -mu * x * u / (u * u + phi0)

    def dfn(u: float) -> float:
        den = u * u + phi0
        return -mu * x * (phi0 - u * u) / (den * den)

    if phi0 < 0:
        edge = abs(phi0) ** 0.5
        return ScalarFn(fn, dfn, (edge, float("inf")))
    return ScalarFn(fn, dfn)


def closed_b12_z2(phi0: float, b120: float, b121: float) -> ScalarFn:
    """The elementary z = 2 second-order profile with both constants."""
    def fn(u: float) -> float:
        den = (u * u + phi0) ** 2
        return (b120 * u + b121 * (u * u - phi0)) / den

    def dfn(u: float) -> float:
        den = u * u + phi0
        return (b120 * (phi0 - 3 * u * u)
                + b121 * (6 * phi0 * u - 2 * u ** 3)) / den ** 3

    return ScalarFn(fn, dfn)


def solve_b12(z, phi: ScalarFn, mu: float, grid: np.ndarray,
              init: tuple[float, float] = (0.0, 0.0)) -> NumericFn1D:
    """March the second-order profile equation for b12 as a (b, b') system.

    Phi^2 b'' + 3 z u Phi b' + z[(z+1)u^2 - 2u phi' + 3 phi] b
      + [(2-z)u - phi'] * 2 mu / z = 0.
    """
    zf = float(Fraction(z))
    big_phi = _drift(zf, phi)
    _check_drift(big_phi, grid)

    def f(u: float, y: np.ndarray) -> np.ndarray:
        b, db = y
        pf = big_phi(u)
        dphi = phi.derivative(u)
        rhs = -(3 * zf * u * pf * db
                + zf * ((zf + 1) * u * u - 2 * u * dphi + 3 * phi(u)) * b
                + ((2 - zf) * u - dphi) * 2 * mu / zf)
        return np.array([db, rhs / (pf * pf)])

    states, residuals = _solve_with_residual(f, grid, list(init))
    return NumericFn1D(grid, states[:, 0], states[:, 1], residuals,
                       float(residuals.max()))


@dataclass
class GalileiProfilePair:
    """Two independent solutions of the b0 equation plus their Wronskian."""

    first: NumericFn1D
    second: NumericFn1D
    wronskian: NumericFn1D
    independent: bool


def solve_b0(z, phi: ScalarFn, s: float, grid: np.ndarray
             ) -> GalileiProfilePair:
    """March Phi^2 b'' + z u Phi b' + (2z Phi - z u Phi')b - 2 s Phi = 0.

    Returns the solutions launched from (1, 0) and (0, 1) together with
    their Wronskian b1*b2' - b1'*b2; a Wronskian dipping below 1e-10
    triggers a dependence warning.
    """
    zf = float(Fraction(z))
    big_phi = _drift(zf, phi)
    _check_drift(big_phi, grid)

    def dbig(u: float) -> float:
        return 2.0 * (zf - 1.0) * u + phi.derivative(u)

    def f(u: float, y: np.ndarray) -> np.ndarray:
        b, db = y
        pf = big_phi(u)
        rhs = 2 * s * pf - zf * u * pf * db - (2 * zf * pf - zf * u * dbig(u)) * b
        return np.array([db, rhs / (pf * pf)])

    states1, res1 = _solve_with_residual(f, grid, [1.0, 0.0])
    states2, res2 = _solve_with_residual(f, grid, [0.0, 1.0])
    sol1 = NumericFn1D(grid, states1[:, 0], states1[:, 1], res1,
                       float(res1.max()))
    sol2 = NumericFn1D(grid, states2[:, 0], states2[:, 1], res2,
                       float(res2.max()))
    wr = states1[:, 0] * states2[:, 1] - states1[:, 1] * states2[:, 0]
    dwr = np.zeros_like(wr)
    wron = NumericFn1D(grid, wr, dwr, np.zeros_like(wr), 0.0)
    independent = bool(np.min(np.abs(wr)) > 1e-10)
    if not independent:
        warnings.warn("Wronskian of the two b0 launches drops below 1e-10; "
                      "the solutions may be dependent", stacklevel=2)
    return GalileiProfilePair(sol1, sol2, wron, independent)


def quadrature_d12(z, phi0: float, delta0: float, base: float,
                   grid: np.ndarray) -> NumericFn1D:
    """Antiderivative form of the first-order profile equation.

    d(u) = -delta0 * Phi^(z/(2(1-z))) * integral_base^u Phi^((z-2)/(2(1-z)));
    the integral is a running composite Simpson sum from the base point.
    The product solves z u d + Phi d' + delta0 = 0, so delta0 = 2 mu x / z
    reproduces the inhomogeneous profile equation.
    """
    zf = float(Fraction(z))
    if zf in (0.0, 1.0):
        raise OdeError("the antiderivative form needs z outside {0, 1}")
    ep = zf / (2.0 * (1.0 - zf))
    eq = (zf - 2.0) / (2.0 * (1.0 - zf))
    zm1 = zf - 1.0

    def big_phi(u: float) -> float:
        return zm1 * u * u + phi0

    _check_drift(big_phi, grid)
    if any(big_phi(u) <= 0.0 for u in grid):
        raise OdeError("Phi must stay positive for the fractional powers")

    def pref(u: float) -> float:
        return big_phi(u) ** ep

    def dpref(u: float) -> float:
        return ep * big_phi(u) ** (ep - 1.0) * 2.0 * zm1 * u

    def integrand(u: float) -> float:
        return big_phi(u) ** eq

    def simpson(a: float, b: float, pieces: int) -> float:
        total = 0.0
        width = (b - a) / pieces
        for i in range(pieces):
            lo = a + i * width
            hi = lo + width
            total += (width / 6.0) * (integrand(lo)
                                      + 4.0 * integrand(0.5 * (lo + hi))
                                      + integrand(hi))
        return total

    def cumulative(pieces: int) -> np.ndarray:
        acc = np.empty(len(grid))
        acc[0] = simpson(base, grid[0], max(pieces, 1)) if base != grid[0] else 0.0
        for i in range(len(grid) - 1):
            acc[i + 1] = acc[i] + simpson(grid[i], grid[i + 1], pieces)
        return acc

    coarse = cumulative(1)
    fine = cumulative(2)
    values = np.array([-delta0 * pref(u) * ii for u, ii in zip(grid, coarse)])
    values_fine = np.array([-delta0 * pref(u) * ii
                            for u, ii in zip(grid, fine)])
    residuals = np.abs(values - values_fine)
    derivs = np.array([
        -delta0 * (dpref(u) * ii + pref(u) * integrand(u))
        for u, ii in zip(grid, coarse)])
    return NumericFn1D(grid, values, derivs, residuals,
                       float(residuals.max()))


def ode_residual_max(fn: NumericFn1D,
                     lhs: Callable[[float, float, float], float]) -> float:
    """Max |lhs(u, value, derivative)| over the tabulated nodes."""
    worst = 0.0
    for u, val, der in zip(fn.grid, fn.values, fn.derivatives):
        worst = max(worst, abs(lhs(float(u), float(val), float(der))))
    return worst
