"""Brute-force numerical integration used to validate the closed-form engine.

Everything here works on pointwise samples and composite trapezoidal sums on
uniform grids.  The integrands are entire functions times Gaussians, for which
the trapezoidal rule converges faster than any power of the step size, so a
plain uniform rule is both accurate and easy to audit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UsageError
from .gausspoly import GaussPolyState, GaussTerm
from .states import SignalParams, make_approx, make_signal, make_squeezed_vacuum

#: Default 1-D grid: [-12, 12] with 4096 points.
DEFAULT_POINTS_1D = 4096
#: Default per-axis points for two-mode grids.
DEFAULT_POINTS_2D = 1024
DEFAULT_BOUND = 12.0

#: Sigma multiple beyond the farthest polynomial-weighted Gaussian peak that
#: the grid must cover.  The amplitude falls like exp(-k^2/2) at k sigma, so
#: the squared-mass tail at 6 sigma is ~ exp(-36) << 1e-12 even after
#: polynomial widening.
_COVERAGE_SIGMAS = 6.0


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid with the same bounds and point count on every axis."""

    lo: float = -DEFAULT_BOUND
    hi: float = DEFAULT_BOUND
    points: int = DEFAULT_POINTS_1D

    def __post_init__(self):
        if not self.hi > self.lo:
            raise UsageError("grid needs hi > lo")
        if self.points < 64:
            raise UsageError("grid needs at least 64 points per axis")

    def axis(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.points)

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.points - 1)


def required_bound(u: GaussPolyState) -> float:
    """Smallest symmetric bound that captures all but ~1e-12 of the state.

    For each term the Gaussian factor is centred at Re(Q)^-1 Re(L) with
    per-axis standard deviations from the diagonal of Re(Q)^-1; a polynomial
    of degree d widens the support by about sqrt(2 d) standard deviations.
    """
    bound = 1.0
    degs = u.degrees()
    for t in u.terms:
        rq = t.quad.real
        try:
            cov = np.linalg.inv(rq)
        except np.linalg.LinAlgError as exc:
            raise DomainError("term covariance is singular") from exc
        if np.any(np.linalg.eigvalsh(rq) <= 0.0):
            raise DomainError("term has non-integrable real quadratic form")
        centre = cov @ t.lin.real
        sig = np.sqrt(np.abs(np.diag(cov)))
        for i in range(u.n_modes):
            reach = abs(centre[i]) + (math.sqrt(2.0 * degs[i]) + _COVERAGE_SIGMAS) * sig[i]
            bound = max(bound, reach)
    return bound


def sample(u: GaussPolyState, grid: GridSpec) -> np.ndarray:
    """Wavefunction values on the tensor grid, after a coverage check."""
    need = required_bound(u)
    if grid.lo > -need or grid.hi < need:
        raise DomainError(
            f"grid [{grid.lo}, {grid.hi}] does not cover the state; "
            f"use at least [-{need:.2f}, {need:.2f}]")
    axes = np.meshgrid(*[grid.axis()] * u.n_modes, indexing="ij")
    return u.evaluate(*axes)


def _trapz_weights(n: int, step: float) -> np.ndarray:
    w = np.full(n, step)
    w[0] = w[-1] = step / 2.0
    return w


@dataclass(frozen=True)
class QuadResult:
    """Integral value together with its half-resolution companion."""

    value: complex
    half_value: complex

    @property
    def delta(self) -> float:
        return abs(self.value - self.half_value)


def quad_inner(u_samples: np.ndarray, v_samples: np.ndarray, grid: GridSpec) -> QuadResult:
    """Trapezoidal integral of conj(u) * v, with a half-resolution check."""
    if u_samples.shape != v_samples.shape:
        raise UsageError("sample arrays must share their grid")
    integrand = np.conjugate(u_samples) * v_samples

    def integrate(arr: np.ndarray, step: float) -> complex:
        for _ in range(arr.ndim):
            w = _trapz_weights(arr.shape[-1], step)
            arr = arr @ w
        return complex(arr)

    full = integrate(integrand, grid.step)
    half = integrate(integrand[(slice(None, None, 2),) * integrand.ndim], 2.0 * grid.step)
    return QuadResult(full, half)


def random_gauss_poly(rng: np.random.Generator, n_modes: int = 1,
                      max_degree: int = 8, max_terms: int = 2,
                      modes: tuple[str, ...] | None = None) -> GaussPolyState:
    """Well-conditioned random state for oracle-vs-engine regression runs.

    Real quadratic forms have eigenvalues in roughly [0.8, 3], centres stay
    within a few units of the origin, and polynomial degrees are bounded, so
    the default oracle grids cover the states comfortably.
    """
    if modes is None:
        modes = tuple("xyz"[:n_modes])
    terms = []
    for _ in range(int(rng.integers(1, max_terms + 1))):
        a = rng.uniform(-0.7, 0.7, (n_modes, n_modes))
        re_q = a @ a.T + np.eye(n_modes) * rng.uniform(0.8, 1.6)
        im_q = rng.uniform(-0.25, 0.25, (n_modes, n_modes))
        quad = re_q + 0.5j * (im_q + im_q.T)
        lin = rng.uniform(-1.0, 1.0, n_modes) + 1j * rng.uniform(-0.8, 0.8, n_modes)
        poly = {}
        for _ in range(int(rng.integers(1, 4))):
            expo = tuple(int(k) for k in rng.integers(0, max_degree + 1, n_modes))
            poly[expo] = complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
        terms.append(GaussTerm(poly, quad, lin,
                               complex(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3))))
    return GaussPolyState.from_terms(modes, terms)


def quad_teleport(signal: SignalParams, n: int, beta: float, grid: GridSpec,
                  out_axis: np.ndarray | None = None) -> np.ndarray:
    """Direct quadrature of the conditioned teleportation output

        psi_out(x) = integral exp(i beta t) psi_vac(x/sqrt2 - t/2)
                     * psi_ladder(t/2 + x/sqrt2) * psi_sig(t/sqrt2) dt,

    evaluated for every x on ``out_axis`` (defaults to the grid axis).  The
    argument scalings are used exactly as written above; agreement with the
    beam-splitter-derived engine output is one of the validation checks.
    """
    ladder = make_approx(n)
    vac = make_squeezed_vacuum(signal.g)
    sig = make_signal(signal)
    xs = grid.axis() if out_axis is None else np.asarray(out_axis)
    ts = grid.axis()
    x2 = xs[:, None] / math.sqrt(2.0)
    t = ts[None, :]
    integrand = (np.exp(1j * beta * t)
                 * vac.evaluate(x2 - t / 2.0)
                 * ladder.evaluate(t / 2.0 + x2)
                 * sig.evaluate(t / math.sqrt(2.0)))
    w = _trapz_weights(ts.size, grid.step)
    return integrand @ w
