"""
Distance laws of the intersection of a random flat with a linear subspace.

Two families are covered: flats drawn from the invariant measure restricted to
the radius-h ball (the ball law) and flats tangent to the unit sphere (the
tangent law, a transformed beta distribution). The ball law is also the law
of the distance when the subspace is held fixed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING

import numpy as np
import numpy.typing as npt
from scipy import integrate, special

from flatsect.exceptions import DomainError
from flatsect.specfun import (
    CaseTriple,
    ball_weight_constant,
    beta_incomplete,
    d_constant,
    fixed_subspace_constant,
    hit_probability,
    log_beta,
    log_omega,
    omega,
)

if TYPE_CHECKING:
    from collections.abc import Callable

    from flatsect.subspaces import FloatArray

# quadrature controls
QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-10
QUAD_LIMIT = 200
WEIGHT_EPSABS = 1e-10
# below this argument B(u; a, b) / u^a is replaced by its limit 1/a
_SERIES_CUTOFF = 1e-12


class WeightKind(str, Enum):
    BALL_INDICATOR = "ball_indicator"
    CONSTANT = "constant"
    RADIAL = "radial"


@dataclass(frozen=True)
class WeightProfile:
    """
    Rotation invariant weight H on flats, given by its radial profile H_I(d(o, E)).

    Use the constructors `ball_indicator`, `constant`, `radial` and `from_table`.
    """

    kind: WeightKind
    h: float = math.inf
    profile: Callable[[float], float] | None = field(default=None, compare=False)
    support: float = math.inf

    def __post_init__(self) -> None:
        if self.kind is WeightKind.BALL_INDICATOR and not (0 < self.h < math.inf):
            error_msg = f"ball indicator radius must be positive and finite, got {self.h}"
            raise DomainError(error_msg)

        if self.kind is WeightKind.RADIAL and self.profile is None:
            error_msg = "radial weight profiles need a callable"
            raise DomainError(error_msg)

        if not self.support > 0:
            error_msg = f"support radius must be positive, got {self.support}"
            raise DomainError(error_msg)

    @classmethod
    def ball_indicator(cls, h: float) -> WeightProfile:
        return cls(WeightKind.BALL_INDICATOR, h=h, support=h)

    @classmethod
    def constant(cls) -> WeightProfile:
        return cls(WeightKind.CONSTANT)

    @classmethod
    def radial(cls, profile: Callable[[float], float], support: float = math.inf) -> WeightProfile:
        """Arbitrary non-negative profile, zero beyond `support`."""
        return cls(WeightKind.RADIAL, profile=profile, support=support)

    @classmethod
    def from_table(cls, radii: npt.ArrayLike, values: npt.ArrayLike) -> WeightProfile:
        """Piecewise linear profile through the table, zero beyond its last radius."""
        grid = np.asarray(radii, dtype=np.float64)
        table = np.asarray(values, dtype=np.float64)
        if grid.ndim != 1 or grid.shape != table.shape or grid.size < 2:
            error_msg = "radii and values must be 1-d tables of equal length >= 2"
            raise DomainError(error_msg)

        if np.any(np.diff(grid) <= 0) or grid[0] != 0 or np.any(table < 0):
            error_msg = "radii must increase from 0 and values must be non-negative"
            raise DomainError(error_msg)

        def profile(r: float) -> float:
            return float(np.interp(r, grid, table, right=0.0))

        return cls.radial(profile, support=float(grid[-1]))

    def __call__(self, r: float) -> float:
        if self.kind is WeightKind.CONSTANT:
            return 1.0

        if self.kind is WeightKind.BALL_INDICATOR:
            return 1.0 if r <= self.h else 0.0

        if r > self.support:
            return 0.0

        value = float(self.profile(r))  # type: ignore[misc]
        if value < 0:
            error_msg = f"weight profile is negative at r={r}: {value}"
            raise DomainError(error_msg)

        return value

    def evaluate(self, radii: npt.ArrayLike) -> FloatArray:
        r = np.asarray(radii, dtype=np.float64)
        if self.kind is WeightKind.CONSTANT:
            return np.ones_like(r)

        if self.kind is WeightKind.BALL_INDICATOR:
            return (r <= self.h).astype(np.float64)

        return np.fromiter((self(float(x)) for x in r.ravel()), np.float64, r.size).reshape(r.shape)


def _check_dims(q: int, n: int) -> None:
    if not 1 <= q <= n - 1:
        error_msg = f"expected 1 <= q <= n-1, got n={n}, q={q}"
        raise DomainError(error_msg)


def _check_nonnegative(name: str, value: float) -> None:
    if not value >= 0:
        error_msg = f"{name} must be non-negative, got {value}"
        raise DomainError(error_msg)


def _quad(func: Callable[[float], float], a: float, b: float, **kwargs: object) -> float:
    kwargs.setdefault("epsabs", QUAD_EPSABS)
    kwargs.setdefault("epsrel", QUAD_EPSREL)
    value, _ = integrate.quad(func, a, b, limit=QUAD_LIMIT, **kwargs)
    return float(value)


def j_weight(H: WeightProfile, q: int, n: int, r: float) -> float:
    """
    Weight J_H(r) = ∫_0^1 H_I(rz) z^q (1 - z²)^{(n-q)/2 - 1} dz.

    Closed forms for the ball indicator and the constant profile, adaptive
    quadrature for radial profiles.
    """
    _check_dims(q, n)
    _check_nonnegative("r", r)
    a, b = (q + 1) / 2, (n - q) / 2

    if H.kind is WeightKind.CONSTANT or (H.kind is WeightKind.BALL_INDICATOR and r <= H.h):
        return ball_weight_constant(n, q)

    if H.kind is WeightKind.BALL_INDICATOR:
        return 0.5 * beta_incomplete((H.h / r) ** 2, a, b)

    # (1 - z²)^s = (1 - z)^s (1 + z)^s, the first factor is the quadrature weight
    s = b - 1
    upper = 1.0 if r == 0 else min(1.0, H.support / r)

    def integrand(z: float) -> float:
        return H(r * z) * z**q * (1 + z) ** s

    if upper < 1.0:
        return _quad(lambda z: integrand(z) * (1 - z) ** s, 0.0, upper, epsabs=WEIGHT_EPSABS)

    return _quad(integrand, 0.0, 1.0, weight="alg", wvar=(0.0, s), epsabs=WEIGHT_EPSABS)


def _ball_normalization(c: CaseTriple) -> float:
    """(q - γ) ω_{γ+1} ω_{n-q} / ω_{n-(q-γ)+1}, the factor in front of δ^{q-γ-1} J(δ)."""
    return c.codim * fixed_subspace_constant(c)


def density_ball(c: CaseTriple, delta: float) -> float:
    """
    Density of d(o, E ∩ L) for E drawn from the flats meeting the unit ball.

    Equal to K J_0 δ^{q-γ-1} on [0, 1] and (K/2) δ^{q-γ-1} B(δ⁻²; (q+1)/2, (n-q)/2)
    beyond, e.g. 1/2 and 1/8 at δ = 0.5 and δ = 2 for (3,1,0).

    Continuous at δ = 1, but for n - q = 1 the right derivative there is infinite:
    f(1 + ε) - f(1) is of order √ε, about 1.4e-3 at ε = 1e-6 for (3,2,1).
    """
    _check_nonnegative("delta", delta)
    k = _ball_normalization(c)
    a, b = (c.q + 1) / 2, (c.n - c.q) / 2

    if delta <= 1.0:
        return k * ball_weight_constant(c.n, c.q) * delta ** (c.codim - 1)

    return 0.5 * k * delta ** (c.codim - 1) * beta_incomplete(delta**-2, a, b)


def _incomplete_ratio(u: float, a: float, b: float) -> float:
    """B(u; a, b) / u^a, continuous at u = 0."""
    if u < _SERIES_CUTOFF:
        return 1.0 / a

    return beta_incomplete(u, a, b) / u**a


def _ball_tail_integral(c: CaseTriple, lower: float, alpha: float = 0.0) -> float:
    """
    ∫_{lower}^1 (K/4) u^{(γ-1-α)/2} B(u; a, b) u^{-a} du.

    The substitution u = δ⁻² maps the tail [1, 1/√lower] of δ^α f(δ) onto [lower, 1].
    """
    k = _ball_normalization(c)
    a, b = (c.q + 1) / 2, (c.n - c.q) / 2
    exponent = (c.gamma - 1 - alpha) / 2

    if lower == 0.0:
        return _quad(
            lambda u: 0.25 * k * _incomplete_ratio(u, a, b),
            0.0,
            1.0,
            weight="alg",
            wvar=(exponent, 0.0),
        )

    return _quad(lambda u: 0.25 * k * u**exponent * _incomplete_ratio(u, a, b), lower, 1.0)


def cdf_ball(c: CaseTriple, delta: float) -> float:
    """
    Distribution function of d(o, E ∩ L) for the unit ball law.

    Closed form p δ^{q-γ} on [0, 1] where p is the hit probability; beyond that
    quadrature of the density after the substitution u = δ⁻².
    """
    _check_nonnegative("delta", delta)
    p = hit_probability(c)

    if delta <= 1.0:
        return p * delta**c.codim

    lower = 0.0 if math.isinf(delta) else delta**-2
    return min(max(p + _ball_tail_integral(c, lower), 0.0), 1.0)


def survival_ball(c: CaseTriple, delta: float) -> float:
    """
    Tail 1 - F(δ) of the unit ball law in closed form.

    For δ > 1 it is K/(2(q-γ)) [B(δ⁻²; (γ+1)/2, b) - δ^{q-γ} B(δ⁻²; (q+1)/2, b)]
    with b = (n-q)/2.
    """
    _check_nonnegative("delta", delta)

    if delta <= 1.0:
        return 1.0 - hit_probability(c) * delta**c.codim

    if math.isinf(delta):
        return 0.0

    k = _ball_normalization(c)
    b = (c.n - c.q) / 2
    u = delta**-2
    value = (
        k
        / (2 * c.codim)
        * (
            beta_incomplete(u, (c.gamma + 1) / 2, b)
            - delta**c.codim * beta_incomplete(u, (c.q + 1) / 2, b)
        )
    )
    return max(value, 0.0)


def density_tangent(c: CaseTriple, r: float) -> float:
    """
    Density of d(o, E ∩ L) for E tangent to the unit sphere,
    C r^{-(γ+2)} (1 - r⁻²)^{(n-q)/2 - 1} on r > 1.
    """
    _check_nonnegative("r", r)
    if r <= 1.0:
        return 0.0

    b = (c.n - c.q) / 2
    return fixed_subspace_constant(c) * r ** -(c.gamma + 2) * (1 - r**-2) ** (b - 1)


def density_tangent_beta(c: CaseTriple, r: float) -> float:
    """Same density through the Beta((γ+1)/2, (n-q)/2) law of r⁻²."""
    _check_nonnegative("r", r)
    if r <= 1.0:
        return 0.0

    a, b = (c.gamma + 1) / 2, (c.n - c.q) / 2
    x = r**-2
    log_beta_density = (a - 1) * math.log(x) + (b - 1) * math.log1p(-x) - log_beta(a, b)
    return 2.0 * r**-3 * math.exp(log_beta_density)


def cdf_tangent(c: CaseTriple, r: float) -> float:
    """1 - I_{r⁻²}((γ+1)/2, (n-q)/2) for r > 1, zero below."""
    _check_nonnegative("r", r)
    if r <= 1.0:
        return 0.0

    a, b = (c.gamma + 1) / 2, (c.n - c.q) / 2
    return float(special.betaincc(a, b, r**-2))


def moment_ball(c: CaseTriple, alpha: float) -> float:
    """
    E d(o, E ∩ L)^α under the unit ball law.

    Finite exactly for α in (γ - q, γ + 1); `math.inf` is returned otherwise.
    """
    if not c.gamma - c.q < alpha < c.gamma + 1:
        return math.inf

    k = _ball_normalization(c)
    inner = k * ball_weight_constant(c.n, c.q) / (c.codim + alpha)
    return inner + _ball_tail_integral(c, 0.0, alpha)


def moment_tangent(c: CaseTriple, alpha: float) -> float:
    """
    E d(o, E ∩ L)^α under the tangent law, B((γ+1-α)/2, b) / B((γ+1)/2, b).

    Infinite exactly when α >= γ + 1.
    """
    if alpha >= c.gamma + 1:
        return math.inf

    a, b = (c.gamma + 1) / 2, (c.n - c.q) / 2
    return math.exp(log_beta(a - alpha / 2, b) - log_beta(a, b))


def moment_tangent_quadrature(c: CaseTriple, alpha: float) -> float:
    """E r^α by direct quadrature of the tangent density over (1, ∞)."""
    if alpha >= c.gamma + 1:
        return math.inf

    b = (c.n - c.q) / 2
    const = fixed_subspace_constant(c)

    # (1 - r⁻²)^{b-1} = (r - 1)^{b-1} (r + 1)^{b-1} r^{-2(b-1)}; (r - 1)^{b-1} is the weight
    def near(r: float) -> float:
        return const * r ** (alpha - c.gamma - 2 - 2 * (b - 1)) * (r + 1) ** (b - 1)

    def far(r: float) -> float:
        return r**alpha * density_tangent(c, r)

    return _quad(near, 1.0, 2.0, weight="alg", wvar=(b - 1, 0.0)) + _quad(far, 2.0, math.inf)


def mean_tangent_limit(gamma: int) -> float:
    """Limit of E d(o, E ∩ L) / √n under the tangent law, ω_{γ+1} / (ω_γ √(2π))."""
    if gamma < 1:
        error_msg = f"the limit is finite for gamma >= 1, got {gamma}"
        raise DomainError(error_msg)

    return math.exp(log_omega(gamma + 1) - log_omega(gamma)) / math.sqrt(2 * math.pi)


def intersection_measure(c: CaseTriple, H: WeightProfile, delta: float) -> float:
    """
    Weighted measure of the pairs (E, L) with d(o, E ∩ L) <= δ,
    D ω_{n-γ} ∫_0^δ r^{q-γ-1} J_H(r) dr.

    The same value is obtained with L held fixed and the constant
    ω_{γ+1} ω_{n-q} ω_{q-γ} / ω_{n-(q-γ)+1}.
    """
    _check_nonnegative("delta", delta)
    if delta == 0.0:
        return 0.0

    front = d_constant(c) * omega(c.n - c.gamma)
    inner_limit = delta if H.kind is WeightKind.CONSTANT else min(delta, H.h)
    inner = ball_weight_constant(c.n, c.q) * inner_limit**c.codim / c.codim

    if H.kind is WeightKind.CONSTANT or (H.kind is WeightKind.BALL_INDICATOR and delta <= H.h):
        return front * inner

    def integrand(r: float) -> float:
        return r ** (c.codim - 1) * j_weight(H, c.q, c.n, r)

    if H.kind is WeightKind.BALL_INDICATOR:
        return front * (inner + _quad(integrand, H.h, delta))

    points = [H.support] if H.support < delta else None
    return front * _quad(integrand, 0.0, delta, points=points)


class DistanceFamily(str, Enum):
    BALL = "ball"
    TANGENT = "tangent"
    FIXED = "fixed"


@dataclass(frozen=True)
class RadialDensity:
    """
    Vectorized law of d(o, E ∩ L) for one family.

    The ball family is scaled to radius `h`; a fixed subspace gives the ball law.
    """

    case: CaseTriple
    family: DistanceFamily = DistanceFamily.BALL
    h: float = 1.0

    def __post_init__(self) -> None:
        if not (0 < self.h < math.inf):
            error_msg = f"h must be positive and finite, got {self.h}"
            raise DomainError(error_msg)

    @property
    def _is_tangent(self) -> bool:
        return self.family is DistanceFamily.TANGENT

    def _shapes(self) -> tuple[float, float, float]:
        c = self.case
        return (c.gamma + 1) / 2, (c.q + 1) / 2, (c.n - c.q) / 2

    def pdf(self, x: npt.ArrayLike) -> FloatArray:
        c = self.case
        t = np.asarray(x, dtype=np.float64)
        _, a, b = self._shapes()

        if self._is_tangent:
            u = np.where(t > 1, 1.0 / np.maximum(t, 1.0) ** 2, 0.5)
            values = fixed_subspace_constant(c) * u ** ((c.gamma + 2) / 2) * (1 - u) ** (b - 1)
            return np.where(t > 1, values, 0.0)

        s = t / self.h
        k = _ball_normalization(c)
        safe = np.maximum(s, 1.0)
        inside = k * ball_weight_constant(c.n, c.q) * np.maximum(s, 0.0) ** (c.codim - 1)
        tail = special.betainc(a, b, safe**-2) * special.beta(a, b)
        outside = 0.5 * k * safe ** (c.codim - 1) * tail
        values = np.where(s <= 1, inside, outside) / self.h
        return np.where(s >= 0, values, 0.0)

    def sf(self, x: npt.ArrayLike) -> FloatArray:
        c = self.case
        t = np.asarray(x, dtype=np.float64)
        a_t, a, b = self._shapes()

        if self._is_tangent:
            u = 1.0 / np.maximum(t, 1.0) ** 2
            return np.where(t > 1, special.betainc(a_t, b, u), 1.0)

        s = np.maximum(t / self.h, 0.0)
        safe = np.maximum(s, 1.0)
        u = safe**-2
        k = _ball_normalization(c)
        outside = (
            k
            / (2 * c.codim)
            * (
                special.betainc(a_t, b, u) * special.beta(a_t, b)
                - safe**c.codim * special.betainc(a, b, u) * special.beta(a, b)
            )
        )
        inside = 1.0 - hit_probability(c) * s**c.codim
        return np.clip(np.where(s <= 1, inside, outside), 0.0, 1.0)

    def cdf(self, x: npt.ArrayLike) -> FloatArray:
        return 1.0 - self.sf(x)

    def moment(self, alpha: float) -> float:
        if self._is_tangent:
            return moment_tangent(self.case, alpha)

        return moment_ball(self.case, alpha) * self.h**alpha
