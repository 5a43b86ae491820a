"""Exact algebra over polynomial-times-Gaussian wavefunctions.

A state on modes (x_1 .. x_m), m <= 3, is a finite sum of terms

    P(x_1 .. x_m) * exp(-1/2 x^T Q x + L.x + c)

with a complex-coefficient polynomial ``P``, a complex symmetric matrix ``Q``
whose real part is positive definite, a complex vector ``L`` and a complex
log-prefactor ``c``.  This family is closed under products, balanced
beam-splitter coordinate mixing, fixing a quadrature to a measured value and
integrating a mode against a plane-wave kernel, so every operation here is
carried out in closed form through the moments of a Gaussian.

Conventions (used consistently by the rest of the package):

* quadratures obey x = (a + a^dag)/sqrt(2), [x, p] = i; the vacuum has
  x-variance 1/2 and wavefunction pi**-0.25 * exp(-x**2/2);
* a coherent state of real amplitude ``alpha`` is centred at sqrt(2)*alpha;
* squeezing by ``r`` rescales x -> x*sqrt(g) with g = exp(-2r), so the
  squeezed vacuum reads (pi*g)**-0.25 * exp(-x**2/(2g));
* the momentum-side projection uses the kernel
  (2*pi)**-0.5 * integral exp(+i*beta*x) psi(x) dx, which sends the squeezed
  vacuum at beta = 0 to (g/pi)**0.25.

All values are immutable and all operations are pure functions; states can be
shared freely across threads.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CapacityError, DomainError, UsageError

Monomial = tuple[int, ...]
Poly = dict[Monomial, complex]

#: Largest polynomial degree per variable a state may carry.
DEGREE_CAP = 64

#: Coefficients below this fraction of a term's largest coefficient are dropped.
COEFF_DROP = 1e-14

_SQRT2 = math.sqrt(2.0)

# Negative-control knob for the validation command: scales the first-order
# Gaussian moment, which breaks every downstream closed form without being
# absorbed by renormalisation.  Always 1.0 outside `perturb_first_moment`.
_FIRST_MOMENT_SCALE = 1.0


class perturb_first_moment:
    """Context manager that deliberately mis-scales first moments by (1+eps)."""

    def __init__(self, eps: float):
        self.eps = eps

    def __enter__(self):
        global _FIRST_MOMENT_SCALE
        self._saved = _FIRST_MOMENT_SCALE
        _FIRST_MOMENT_SCALE = 1.0 + self.eps
        return self

    def __exit__(self, *exc):
        global _FIRST_MOMENT_SCALE
        _FIRST_MOMENT_SCALE = self._saved
        return False


# ---------------------------------------------------------------------------
# polynomial helpers (dict of exponent tuples -> complex coefficient)
# ---------------------------------------------------------------------------

def _poly_add(a: Poly, b: Poly) -> Poly:
    out = dict(a)
    for e, c in b.items():
        out[e] = out.get(e, 0j) + c
    return out


def _poly_mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0j) + ca * cb
    return out


def _poly_scale(a: Poly, s: complex) -> Poly:
    return {e: c * s for e, c in a.items()}


def _poly_compact(a: Poly) -> Poly:
    if not a:
        return {}
    top = max(abs(c) for c in a.values())
    if top == 0.0:
        return {}
    floor = top * COEFF_DROP
    return {e: c for e, c in a.items() if abs(c) >= floor}


def _poly_degrees(a: Poly, m: int) -> tuple[int, ...]:
    degs = [0] * m
    for e in a:
        for i, k in enumerate(e):
            if k > degs[i]:
                degs[i] = k
    return tuple(degs)


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------

def _frozen_array(a, shape) -> np.ndarray:
    arr = np.array(a, dtype=complex).reshape(shape)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class GaussTerm:
    """One summand P(x) * exp(-1/2 x.Q.x + L.x + c)."""

    poly: Mapping[Monomial, complex]
    quad: np.ndarray
    lin: np.ndarray
    offset: complex = 0j

    def __post_init__(self):
        m = len(self.lin)
        q = np.array(self.quad, dtype=complex).reshape((m, m))
        q = (q + q.T) / 2.0
        object.__setattr__(self, "quad", _frozen_array(q, (m, m)))
        object.__setattr__(self, "lin", _frozen_array(self.lin, (m,)))
        object.__setattr__(self, "poly", dict(self.poly))
        object.__setattr__(self, "offset", complex(self.offset))

    @property
    def n_modes(self) -> int:
        return len(self.lin)


@dataclass(frozen=True)
class GaussPolyState:
    """Wavefunction represented as a sum of Gaussian-polynomial terms.

    ``modes`` labels the variables; all terms share the same mode set.
    """

    modes: tuple[str, ...]
    terms: tuple[GaussTerm, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        object.__setattr__(self, "terms", tuple(self.terms))
        m = len(self.modes)
        if m not in (0, 1, 2, 3):
            raise UsageError(f"states support 1..3 modes, got {m}")
        if len(set(self.modes)) != m:
            raise UsageError(f"duplicate mode labels in {self.modes}")
        for t in self.terms:
            if t.n_modes != m:
                raise UsageError("term arity does not match the mode list")

    # -- construction ------------------------------------------------------

    @classmethod
    def from_terms(cls, modes: Sequence[str], terms: Iterable[GaussTerm]) -> "GaussPolyState":
        """Build a state, merging terms that share (Q, L) and dropping noise."""
        groups: dict[bytes, list[GaussTerm]] = {}
        order: list[bytes] = []
        for t in terms:
            key = t.quad.tobytes() + t.lin.tobytes()
            if key not in groups:
                groups[key] = []
                order.append(key)
            groups[key].append(t)
        merged: list[GaussTerm] = []
        for key in order:
            group = groups[key]
            ref = max(g.offset.real for g in group)
            poly: Poly = {}
            for g in group:
                poly = _poly_add(poly, _poly_scale(dict(g.poly), cmath.exp(g.offset - ref)))
            poly = _poly_compact(poly)
            if poly:
                merged.append(GaussTerm(poly, group[0].quad, group[0].lin, ref))
        return cls(tuple(modes), tuple(merged))

    # -- basic queries -----------------------------------------------------

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    def degrees(self) -> tuple[int, ...]:
        """Maximal polynomial degree per variable across all terms."""
        m = self.n_modes
        degs = [0] * m
        for t in self.terms:
            for i, k in enumerate(_poly_degrees(dict(t.poly), m)):
                degs[i] = max(degs[i], k)
        return tuple(degs)

    def is_zero(self) -> bool:
        return not self.terms

    def evaluate(self, *coords: np.ndarray) -> np.ndarray:
        """Pointwise wavefunction values on broadcastable coordinate arrays."""
        if len(coords) != self.n_modes:
            raise UsageError(f"expected {self.n_modes} coordinate arrays")
        xs = [np.asarray(c) for c in coords]
        out = np.zeros(np.broadcast(*xs).shape if xs else (), dtype=complex)
        for t in self.terms:
            expo = np.full_like(out, t.offset)
            for i, xi in enumerate(xs):
                expo = expo + t.lin[i] * xi - 0.5 * t.quad[i, i] * xi * xi
                for j in range(i + 1, len(xs)):
                    expo = expo - t.quad[i, j] * xi * xs[j]
            poly = np.zeros_like(out)
            for e, c in t.poly.items():
                mono = np.full_like(out, c)
                for i, k in enumerate(e):
                    if k:
                        mono = mono * xs[i] ** k
                poly = poly + mono
            out = out + poly * np.exp(expo)
        return out

    def normalized(self) -> "GaussPolyState":
        """Rescale to unit norm; raises DomainError on a zero state."""
        n2 = norm_squared(self)
        if n2 <= 0.0 or not math.isfinite(n2):
            raise DomainError("cannot normalise a zero or non-finite state")
        shift = -0.5 * math.log(n2)
        terms = [GaussTerm(t.poly, t.quad, t.lin, t.offset + shift) for t in self.terms]
        return GaussPolyState(self.modes, tuple(terms))


@dataclass(frozen=True)
class GaussianMomentSpec:
    """Parameters of the integral  integral x**order * exp(-a*x**2 + 2*b*x) dx."""

    a: complex
    b: complex
    order: int

    def __post_init__(self):
        if self.order < 0:
            raise UsageError("moment order must be >= 0")
        if complex(self.a).real <= 0.0:
            raise DomainError("non-integrable exponent: Re(a) must be positive")


# ---------------------------------------------------------------------------
# Gaussian moments
# ---------------------------------------------------------------------------

def gaussian_moment_integral(spec: GaussianMomentSpec) -> complex:
    """Closed form of integral x**k exp(-a x**2 + 2 b x) dx over the real line.

    Equals sqrt(pi/a) * exp(b**2/a) * E[x**k] for x ~ Normal(b/a, 1/(2a)),
    and obeys I_k = (2 b I_{k-1} + (k-1) I_{k-2}) / (2 a).
    """
    a, b, k = complex(spec.a), complex(spec.b), spec.order
    if a.real <= 0.0:
        raise DomainError("non-integrable exponent: Re(a) must be positive")
    i0 = cmath.sqrt(cmath.pi / a) * cmath.exp(b * b / a)
    if k == 0:
        return i0
    prev, cur = i0, (b / a) * i0 * _FIRST_MOMENT_SCALE
    for n in range(2, k + 1):
        prev, cur = cur, (2.0 * b * cur + (n - 1) * prev) / (2.0 * a)
    return cur


def _moment_polys(a: complex, b_poly: Poly, kmax: int, zero_key: Monomial) -> list[Poly]:
    """Normalised moments E[x**k] of Normal(b/a, 1/(2a)) as polynomials in b.

    ``b_poly`` is the (affine) polynomial giving b in terms of the surviving
    variables; the returned list has entries for k = 0 .. kmax.
    """
    out: list[Poly] = [{zero_key: 1.0 + 0j}]
    if kmax >= 1:
        out.append(_poly_scale(b_poly, _FIRST_MOMENT_SCALE / a))
    for k in range(2, kmax + 1):
        rec = _poly_add(_poly_scale(_poly_mul(b_poly, out[k - 1]), 2.0),
                        _poly_scale(out[k - 2], float(k - 1)))
        out.append(_poly_scale(rec, 1.0 / (2.0 * a)))
    return out


# ---------------------------------------------------------------------------
# internal plumbing
# ---------------------------------------------------------------------------

def _conj_state(u: GaussPolyState) -> GaussPolyState:
    terms = [GaussTerm({e: c.conjugate() for e, c in t.poly.items()},
                       t.quad.conjugate(), t.lin.conjugate(), t.offset.conjugate())
             for t in u.terms]
    return GaussPolyState(u.modes, tuple(terms))


def _aligned(v: GaussPolyState, modes: tuple[str, ...]) -> GaussPolyState:
    """Permute the variables of ``v`` into the given mode order."""
    if v.modes == modes:
        return v
    perm = [v.modes.index(m) for m in modes]
    idx = np.array(perm)
    terms = []
    for t in v.terms:
        poly = {tuple(e[p] for p in perm): c for e, c in t.poly.items()}
        terms.append(GaussTerm(poly, t.quad[np.ix_(idx, idx)], t.lin[idx], t.offset))
    return GaussPolyState(modes, tuple(terms))


def _raw_multiply(u: GaussPolyState, v: GaussPolyState) -> GaussPolyState:
    """Termwise product over a shared mode set, without the degree-cap check."""
    terms = []
    for tu in u.terms:
        for tv in v.terms:
            terms.append(GaussTerm(_poly_mul(dict(tu.poly), dict(tv.poly)),
                                   tu.quad + tv.quad, tu.lin + tv.lin,
                                   tu.offset + tv.offset))
    return GaussPolyState.from_terms(u.modes, terms)


def _integrate_index(u: GaussPolyState, j: int):
    """Integrate variable ``j`` out in closed form.

    Returns a GaussPolyState on the remaining modes, or a complex number when
    the last variable is integrated.
    """
    m = u.n_modes
    others = [i for i in range(m) if i != j]
    new_modes = tuple(u.modes[i] for i in others)
    zero_key: Monomial = (0,) * len(others)
    units = [tuple(1 if t == i else 0 for t in range(len(others)))
             for i in range(len(others))]

    new_terms: list[GaussTerm] = []
    total = 0j
    for t in u.terms:
        a = t.quad[j, j] / 2.0
        if a.real <= 0.0:
            raise DomainError("non-integrable exponent while integrating a mode")
        b0 = t.lin[j] / 2.0
        bvec = np.array([-t.quad[j, i] / 2.0 for i in others])

        by_k: dict[int, Poly] = {}
        for e, c in t.poly.items():
            rest = tuple(e[i] for i in others)
            sub = by_k.setdefault(e[j], {})
            sub[rest] = sub.get(rest, 0j) + c
        kmax = max(by_k) if by_k else 0

        b_poly: Poly = {zero_key: complex(b0)}
        for i, unit in enumerate(units):
            if bvec[i] != 0:
                b_poly[unit] = complex(bvec[i])
        moments = _moment_polys(complex(a), b_poly, kmax, zero_key)

        poly: Poly = {}
        for k, sub in by_k.items():
            poly = _poly_add(poly, _poly_mul(sub, moments[k]))
        poly = _poly_scale(poly, cmath.sqrt(cmath.pi / complex(a)))
        off = t.offset + b0 * b0 / a

        if others:
            qn = t.quad[np.ix_(others, others)] - 2.0 * np.outer(bvec, bvec) / a
            ln = t.lin[others] + 2.0 * b0 * bvec / a
            new_terms.append(GaussTerm(poly, qn, ln, off))
        else:
            total += poly.get((), 0j) * cmath.exp(off)
    if others:
        return GaussPolyState.from_terms(new_modes, new_terms)
    return total


def _mode_index(u: GaussPolyState, mode: str) -> int:
    try:
        return u.modes.index(mode)
    except ValueError:
        raise UsageError(f"mode {mode!r} not present in {u.modes}") from None


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def multiply(u: GaussPolyState, v: GaussPolyState) -> GaussPolyState:
    """Pointwise product (same modes) or tensor product (disjoint modes)."""
    if u.modes == v.modes or set(u.modes) == set(v.modes):
        out = _raw_multiply(u, _aligned(v, u.modes))
    elif not set(u.modes) & set(v.modes):
        if u.n_modes + v.n_modes > 3:
            raise UsageError("products beyond three modes are unsupported")
        modes = u.modes + v.modes
        mu, mv = u.n_modes, v.n_modes
        terms = []
        for tu in u.terms:
            for tv in v.terms:
                poly = {eu + ev: cu * cv
                        for eu, cu in tu.poly.items()
                        for ev, cv in tv.poly.items()}
                quad = np.zeros((mu + mv, mu + mv), dtype=complex)
                quad[:mu, :mu] = tu.quad
                quad[mu:, mu:] = tv.quad
                lin = np.concatenate([tu.lin, tv.lin])
                terms.append(GaussTerm(poly, quad, lin, tu.offset + tv.offset))
        out = GaussPolyState.from_terms(modes, terms)
    else:
        raise UsageError("mode sets must match exactly or be disjoint")
    if any(d > DEGREE_CAP for d in out.degrees()):
        raise CapacityError(f"polynomial degree cap {DEGREE_CAP} exceeded")
    return out


def inner_product(u: GaussPolyState, v: GaussPolyState) -> complex:
    """Exact overlap integral conj(u) * v over all variables."""
    if set(u.modes) != set(v.modes):
        raise UsageError("inner product needs identical mode sets")
    w = _raw_multiply(_conj_state(u), _aligned(v, u.modes))
    for _ in range(w.n_modes):
        w = _integrate_index(w, 0)
    if isinstance(w, GaussPolyState):  # zero-term state short-circuits
        return 0j
    return w


def norm_squared(u: GaussPolyState) -> float:
    return inner_product(u, u).real


def fidelity(u: GaussPolyState, v: GaussPolyState) -> float:
    """|<u|v>|^2 between the normalised versions of two states."""
    nu, nv = norm_squared(u), norm_squared(v)
    if nu <= 0.0 or nv <= 0.0:
        raise DomainError("fidelity of a zero state is undefined")
    return abs(inner_product(u, v)) ** 2 / (nu * nv)


def beam_splitter(u: GaussPolyState, mode_i: str, mode_j: str) -> GaussPolyState:
    """Balanced beam splitter: substitutes
    x_i -> (x_i - x_j)/sqrt(2),  x_j -> (x_i + x_j)/sqrt(2).

    The substitution is orthogonal, so norms and inner products are preserved.
    """
    i, j = _mode_index(u, mode_i), _mode_index(u, mode_j)
    if i == j:
        raise UsageError("beam splitter needs two distinct modes")
    m = u.n_modes
    rot = np.eye(m, dtype=complex)
    rot[i, i] = rot[j, j] = rot[j, i] = 1.0 / _SQRT2
    rot[i, j] = -1.0 / _SQRT2

    terms = []
    for t in u.terms:
        poly: Poly = {}
        for e, c in t.poly.items():
            p, q = e[i], e[j]
            base = c / _SQRT2 ** (p + q)
            for s in range(p + 1):
                for r in range(q + 1):
                    coef = base * math.comb(p, s) * math.comb(q, r) * (-1.0) ** (p - s)
                    e2 = list(e)
                    e2[i] = s + r
                    e2[j] = (p - s) + (q - r)
                    key = tuple(e2)
                    poly[key] = poly.get(key, 0j) + coef
        terms.append(GaussTerm(poly, rot.T @ t.quad @ rot, rot.T @ t.lin, t.offset))
    return GaussPolyState.from_terms(u.modes, terms)


def condition_x(u: GaussPolyState, mode: str, value: float):
    """Fix quadrature x_mode to a measured value.

    Returns the unnormalised conditioned state on the remaining modes, or the
    complex amplitude when ``u`` was single-mode.  Callers renormalise; the
    squared norm of the result is the relative heralding weight.
    """
    j = _mode_index(u, mode)
    m = u.n_modes
    others = [i for i in range(m) if i != j]
    new_modes = tuple(u.modes[i] for i in others)

    new_terms: list[GaussTerm] = []
    total = 0j
    for t in u.terms:
        poly: Poly = {}
        for e, c in t.poly.items():
            coef = c * value ** e[j] if e[j] else c
            rest = tuple(e[i] for i in others)
            poly[rest] = poly.get(rest, 0j) + coef
        off = t.offset - 0.5 * t.quad[j, j] * value * value + t.lin[j] * value
        if others:
            idx = np.array(others)
            qn = t.quad[np.ix_(idx, idx)]
            ln = t.lin[idx] - t.quad[idx, j] * value
            new_terms.append(GaussTerm(poly, qn, ln, off))
        else:
            total += poly.get((), 0j) * cmath.exp(off)
    if others:
        return GaussPolyState.from_terms(new_modes, new_terms)
    return total


def project_p(u: GaussPolyState, mode: str, beta: float):
    """Project one mode on the plane-wave kernel:
    (2*pi)**-0.5 * integral exp(+i*beta*x_mode) u dx_mode.

    Returns the unnormalised state on the remaining modes (complex amplitude
    when ``u`` was single-mode).  Choosing beta = 0 on the squeezed vacuum
    yields (g/pi)**0.25.
    """
    j = _mode_index(u, mode)
    scale = 1.0 / math.sqrt(2.0 * math.pi)
    shifted = []
    for t in u.terms:
        lin = t.lin.copy()
        lin[j] = lin[j] + 1j * beta
        shifted.append(GaussTerm(t.poly, t.quad, lin, t.offset))
    res = _integrate_index(GaussPolyState(u.modes, tuple(shifted)), j)
    if isinstance(res, GaussPolyState):
        terms = [GaussTerm(_poly_scale(dict(t.poly), scale), t.quad, t.lin, t.offset)
                 for t in res.terms]
        return GaussPolyState(res.modes, tuple(terms))
    return res * scale


def superpose(states: Sequence[GaussPolyState], coeffs: Sequence[complex]) -> GaussPolyState:
    """Linear combination sum_k coeffs[k] * states[k] over a common mode set."""
    if len(states) != len(coeffs) or not states:
        raise UsageError("superpose needs one coefficient per state")
    modes = states[0].modes
    terms: list[GaussTerm] = []
    for s, c in zip(states, coeffs):
        if set(s.modes) != set(modes):
            raise UsageError("superpose needs identical mode sets")
        for t in _aligned(s, modes).terms:
            terms.append(GaussTerm(_poly_scale(dict(t.poly), complex(c)),
                                   t.quad, t.lin, t.offset))
    return GaussPolyState.from_terms(modes, terms)


def relabel(u: GaussPolyState, mapping: Mapping[str, str]) -> GaussPolyState:
    """Rename modes; the wavefunction itself is untouched."""
    modes = tuple(mapping.get(m, m) for m in u.modes)
    return GaussPolyState(modes, u.terms)


def hermite_gauss(n: int, mode: str = "x") -> GaussPolyState:
    """n-th harmonic-oscillator eigenfunction as a Gaussian-polynomial state.

    Built from the normalised recurrence
    h_{n+1} = sqrt(2/(n+1)) x h_n - sqrt(n/(n+1)) h_{n-1}, which keeps the
    coefficients well-scaled for large n.  The monomial-basis representation
    itself is only well conditioned for generic algebra up to n ~ 25 (term
    cancellation grows with the degree); photon-number projections of
    arbitrary states should go through fock.fock_from_wavefunction, which
    uses a stable recurrence instead.
    """
    if n < 0:
        raise UsageError("excitation number must be >= 0")
    if n > DEGREE_CAP:
        raise CapacityError(f"polynomial degree cap {DEGREE_CAP} exceeded")
    prev: Poly = {}
    cur: Poly = {(0,): math.pi ** -0.25 + 0j}
    for k in range(n):
        nxt = _poly_scale({(e[0] + 1,): c for e, c in cur.items()},
                          math.sqrt(2.0 / (k + 1)))
        if prev:
            nxt = _poly_add(nxt, _poly_scale(prev, -math.sqrt(k / (k + 1.0))))
        prev, cur = cur, nxt
    term = GaussTerm(cur, np.eye(1, dtype=complex), np.zeros(1, dtype=complex), 0j)
    return GaussPolyState((mode,), (term,))
