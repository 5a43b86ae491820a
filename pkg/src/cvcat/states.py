"""Constructors for the wavefunctions used by the protocols.

Every constructor returns a normalised GaussPolyState; normalisation is always
recomputed from the exact inner product rather than taken from a printed
constant.  Squeezing never appears as a Fock-space operator: squeezed states
enter exclusively through their wavefunctions, with g = exp(-2r) and the x
quadrature squeezed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np
from scipy import optimize

from .errors import DomainError, UsageError
from .gausspoly import (
    GaussPolyState,
    GaussTerm,
    fidelity,
    superpose,
)

#: Largest initial excitation number accepted by make_approx; keeps the
#: polynomial degree cap honoured even after one doubling step.
MAX_EXCITATION = 32

Parity = Literal["even", "odd"]


@dataclass(frozen=True)
class SignalParams:
    """Qubit-like signal a * S(r)|alpha> + b * S(r)|-alpha>."""

    a: complex
    b: complex
    alpha: float
    r: float = 0.0

    def __post_init__(self):
        if self.a == 0 and self.b == 0:
            raise UsageError("signal amplitudes (a, b) must not both vanish")
        if self.alpha <= 0.0:
            raise UsageError("signal alpha must be positive")
        if self.norm_constant_squared() <= 1e-300:
            raise UsageError("degenerate signal: normalisation diverges")

    @property
    def g(self) -> float:
        return math.exp(-2.0 * self.r)

    def norm_constant_squared(self) -> float:
        """1 / N_sig^2 = |a|^2 + |b|^2 + 2 exp(-2 alpha^2) Re(a conj(b))."""
        a, b = complex(self.a), complex(self.b)
        return (abs(a) ** 2 + abs(b) ** 2
                + 2.0 * math.exp(-2.0 * self.alpha ** 2) * (a * b.conjugate()).real)

    def swapped(self) -> "SignalParams":
        """The companion state with the roles of the two basis branches exchanged."""
        return SignalParams(self.b, self.a, self.alpha, self.r)


def make_squeezed_coherent(alpha: float, r: float = 0.0, mode: str = "x") -> GaussPolyState:
    """S(r)|alpha>: Gaussian of x-variance g/2 centred at alpha*sqrt(2g)."""
    g = math.exp(-2.0 * r)
    mu = alpha * math.sqrt(2.0 * g)
    term = GaussTerm({(0,): (math.pi * g) ** -0.25},
                     np.array([[1.0 / g]], dtype=complex),
                     np.array([mu / g], dtype=complex),
                     -alpha * alpha)
    return GaussPolyState((mode,), (term,))


def make_squeezed_vacuum(g: float, mode: str = "x") -> GaussPolyState:
    """Squeezed vacuum (pi g)^-1/4 exp(-x^2 / 2g)."""
    if g <= 0.0:
        raise DomainError("squeezing parameter g must be positive")
    term = GaussTerm({(0,): (math.pi * g) ** -0.25},
                     np.array([[1.0 / g]], dtype=complex),
                     np.zeros(1, dtype=complex), 0j)
    return GaussPolyState((mode,), (term,))


def make_signal(p: SignalParams, mode: str = "s") -> GaussPolyState:
    """Normalised signal state for the given (a, b, alpha, r)."""
    plus = make_squeezed_coherent(p.alpha, p.r, mode)
    minus = make_squeezed_coherent(-p.alpha, p.r, mode)
    return superpose([plus, minus], [p.a, p.b]).normalized()


def make_approx(n: int, mode: str = "x") -> GaussPolyState:
    """The n-th rung of the quadrature ladder x^n exp(-x^2/2), normalised.

    This is the state produced by splitting an n-photon Fock state on a
    balanced beam splitter and post-selecting a zero homodyne outcome in one
    arm; it approximates a squeezed even cat of amplitude ~ sqrt(2n).
    """
    if n < 0:
        raise UsageError("excitation number must be >= 0")
    if n > MAX_EXCITATION:
        raise UsageError(f"excitation number capped at {MAX_EXCITATION}")
    log_norm = 0.5 * (2 * n * math.log(2.0) + math.lgamma(n + 1)
                      - math.lgamma(2 * n + 1)) - 0.25 * math.log(math.pi)
    term = GaussTerm({(n,): math.exp(log_norm)},
                     np.eye(1, dtype=complex), np.zeros(1, dtype=complex), 0j)
    return GaussPolyState((mode,), (term,))


def make_ideal_squeezed_cat(alpha: float, r: float, parity: Parity = "even",
                            mode: str = "x") -> GaussPolyState:
    """Normalised S(r)(|alpha> +/- |-alpha>)."""
    if parity not in ("even", "odd"):
        raise UsageError("parity must be 'even' or 'odd'")
    if parity == "odd" and alpha == 0.0:
        raise DomainError("the odd superposition is undefined at alpha = 0")
    sign = 1.0 if parity == "even" else -1.0
    plus = make_squeezed_coherent(alpha, r, mode)
    minus = make_squeezed_coherent(-alpha, r, mode)
    return superpose([plus, minus], [1.0, sign]).normalized()


def make_entangled_resource(alpha: float, r: float, parity: Parity = "even",
                            modes: tuple[str, str] = ("1", "2")) -> GaussPolyState:
    """Two-mode resource S(r)S(r)(|alpha, alpha> +/- |-alpha, -alpha>),
    normalised from the exact overlap <alpha,alpha|-alpha,-alpha> = e^{-4 alpha^2}."""
    if parity not in ("even", "odd"):
        raise UsageError("parity must be 'even' or 'odd'")
    if parity == "odd" and alpha == 0.0:
        raise DomainError("the odd resource is undefined at alpha = 0")
    sign = 1.0 if parity == "even" else -1.0
    g = math.exp(-2.0 * r)
    mu = alpha * math.sqrt(2.0 * g)
    terms = []
    for s in (1.0, -1.0):
        terms.append(GaussTerm({(0, 0): (math.pi * g) ** -0.5 * (1.0 if s > 0 else sign)},
                               np.array([[1.0 / g, 0.0], [0.0, 1.0 / g]], dtype=complex),
                               np.array([s * mu / g, s * mu / g], dtype=complex),
                               -2.0 * alpha * alpha))
    return GaussPolyState(tuple(modes), tuple(terms)).normalized()


@dataclass(frozen=True)
class EffectiveParams:
    """Best (alpha, g) of an ideal squeezed even cat matching a ladder state."""

    alpha: float
    g: float
    fidelity: float
    converged: bool

    @property
    def r(self) -> float:
        return -0.5 * math.log(self.g)


@lru_cache(maxsize=None)
def fit_effective_params(n: int, tol: float = 1e-8) -> EffectiveParams:
    """Maximise fidelity(make_approx(n), ideal squeezed cat) over (alpha, g).

    The comparison cat carries the parity of n (x^n exp(-x^2/2) is an even
    function for even n and odd otherwise; the opposite-parity overlap
    vanishes identically).  Direct Nelder-Mead search in (log alpha, log g)
    from five coarse starts; the landscape is smooth and single-peaked in the
    region of interest.
    """
    if n < 1:
        raise UsageError("fit is defined for n >= 1")
    ladder = make_approx(n)
    parity: Parity = "even" if n % 2 == 0 else "odd"

    def objective(params: np.ndarray) -> float:
        alpha, g = math.exp(params[0]), math.exp(params[1])
        if alpha > 20.0 or g > 20.0 or g < 1e-4:
            return 1.0
        cat = make_ideal_squeezed_cat(alpha, -0.5 * math.log(g), parity)
        return -fidelity(ladder, cat)

    guess_alpha = math.sqrt(2.0 * n)
    starts = [(guess_alpha * fa, g0) for fa, g0 in
              ((0.6, 0.45), (1.0, 0.45), (1.4, 0.45), (1.0, 0.25), (1.0, 0.8))]
    best = None
    converged = False
    for a0, g0 in starts:
        res = optimize.minimize(objective, np.log([a0, g0]), method="Nelder-Mead",
                                options={"xatol": 1e-9, "fatol": tol, "maxiter": 600})
        if best is None or res.fun < best.fun:
            best = res
            converged = bool(res.success)
    alpha, g = math.exp(best.x[0]), math.exp(best.x[1])
    return EffectiveParams(alpha, g, -best.fun, converged)
