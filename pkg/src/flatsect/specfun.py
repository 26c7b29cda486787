"""
Special functions and the named constants of the intersection formulas.

Every Γ-product is evaluated as a sum of log-gamma terms followed by a single
exponential, which keeps the constants finite up to ambient dimension 500.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

from scipy import special

from flatsect.exceptions import DomainError, InvalidCaseError

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

LOG_PI = math.log(math.pi)
LOG_TWO = math.log(2.0)
# relative agreement required of the two hit-probability forms
FORM_AGREEMENT = 1e-12

# continued fraction controls for the incomplete beta function
CF_TOLERANCE = 1e-14
CF_MAX_ITERATIONS = 300
_FPMIN = 1e-300


@dataclass(frozen=True)
class CaseTriple:
    """
    Dimension triple of the intersection problem.

    A random `q`-dimensional linear subspace of R^n meets an affine flat of
    dimension `n - q + gamma`; their intersection is a `gamma`-dimensional flat.
    """

    n: int
    q: int
    gamma: int

    def __post_init__(self) -> None:
        for value in (self.n, self.q, self.gamma):
            if isinstance(value, bool) or not isinstance(value, int):
                raise InvalidCaseError(self.n, self.q, self.gamma)

        if self.n < 2 or not 1 <= self.q <= self.n - 1 or not 0 <= self.gamma <= self.q - 1:
            raise InvalidCaseError(self.n, self.q, self.gamma)

    @property
    def affine_dim(self) -> int:
        """Dimension n - q + gamma of the intersected affine flat."""
        return self.n - self.q + self.gamma

    @property
    def codim(self) -> int:
        """Codimension q - gamma of the affine flat, equal to the radial exponent + 1."""
        return self.q - self.gamma

    def __str__(self) -> str:
        return f"({self.n},{self.q},{self.gamma})"


def log_gamma(x: float) -> float:
    if not x > 0 or not math.isfinite(x):
        error_msg = f"log_gamma is defined for positive finite x, got {x!r}"
        raise DomainError(error_msg)

    return float(special.gammaln(x))


def log_omega(n: int) -> float:
    if n < 1:
        error_msg = f"omega_n is defined for n >= 1, got {n}"
        raise DomainError(error_msg)

    return LOG_TWO + 0.5 * n * LOG_PI - log_gamma(0.5 * n)


def omega(n: int) -> float:
    """
    Surface content of the unit sphere S^{n-1}, 2 π^{n/2} / Γ(n/2).

    Args:
        n (int): Ambient dimension, n >= 1.

    Returns:
        float: ω_n, e.g. ω_1 = 2, ω_2 = 2π, ω_3 = 4π.
    """
    return math.exp(log_omega(n))


def log_kappa(n: int) -> float:
    if n < 0:
        error_msg = f"kappa_n is defined for n >= 0, got {n}"
        raise DomainError(error_msg)

    return 0.5 * n * LOG_PI - log_gamma(0.5 * n + 1.0)


def kappa(n: int) -> float:
    """Volume of the unit ball B^n; kappa(0) = 1."""
    return math.exp(log_kappa(n))


def log_beta(a: float, b: float) -> float:
    if not a > 0 or not b > 0:
        error_msg = f"beta parameters must be positive, got a={a!r}, b={b!r}"
        raise DomainError(error_msg)

    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)


def beta_complete(a: float, b: float) -> float:
    return math.exp(log_beta(a, b))


def _beta_continued_fraction(x: float, a: float, b: float) -> float:
    # modified Lentz evaluation of the incomplete beta continued fraction
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0

    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d

    for m in range(1, CF_MAX_ITERATIONS + 1):
        m2 = 2 * m

        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c

        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta

        if abs(delta - 1.0) < CF_TOLERANCE:
            return h

    error_msg = (
        f"Incomplete beta continued fraction did not converge in "
        f"{CF_MAX_ITERATIONS} iterations (x={x}, a={a}, b={b})"
    )
    raise ArithmeticError(error_msg)


def _check_beta_args(x: float, a: float, b: float) -> None:
    if not 0.0 <= x <= 1.0:
        error_msg = f"incomplete beta argument must lie in [0, 1], got {x!r}"
        raise DomainError(error_msg)

    if not a > 0 or not b > 0:
        error_msg = f"beta parameters must be positive, got a={a!r}, b={b!r}"
        raise DomainError(error_msg)


def beta_incomplete(x: float, a: float, b: float) -> float:
    """
    Unnormalized incomplete beta function B(x; a, b) = ∫_0^x t^{a-1} (1-t)^{b-1} dt.

    Evaluated by the continued fraction, switching to the complementary tail
    B(a, b) - B(1 - x; b, a) when x >= (a + 1) / (a + b + 2).

    Args:
        x (float): Upper integration limit in [0, 1].
        a (float): First shape parameter, positive.
        b (float): Second shape parameter, positive.

    Returns:
        float: B(x; a, b), nondecreasing in x with B(1; a, b) = B(a, b).
    """
    _check_beta_args(x, a, b)

    if x == 0.0:
        return 0.0

    if x == 1.0:
        return beta_complete(a, b)

    if x < (a + 1.0) / (a + b + 2.0):
        front = math.exp(a * math.log(x) + b * math.log1p(-x))
        return front * _beta_continued_fraction(x, a, b) / a

    front = math.exp(b * math.log1p(-x) + a * math.log(x))
    tail = front * _beta_continued_fraction(1.0 - x, b, a) / b
    return max(beta_complete(a, b) - tail, 0.0)


def beta_regularized(x: float, a: float, b: float) -> float:
    """Normalized incomplete beta I_x(a, b), the CDF of Beta(a, b) at x."""
    _check_beta_args(x, a, b)

    if x in (0.0, 1.0):
        return x

    log_front = a * math.log(x) + b * math.log1p(-x) - log_beta(a, b)

    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _beta_continued_fraction(x, a, b) / a

    return 1.0 - math.exp(log_front) * _beta_continued_fraction(1.0 - x, b, a) / b


def _exp_omega_ratio(numerator: Iterable[int], denominator: Iterable[int]) -> float:
    top, bottom = list(numerator), list(denominator)
    if min(top + bottom, default=1) < 1:
        error_msg = f"omega_n is defined for n >= 1, got {min(top + bottom)}"
        raise DomainError(error_msg)

    # ω_i = 2 π^{i/2} / Γ(i/2): powers of 2 and π are collected exactly
    return math.exp(
        math.fsum(
            [
                (len(top) - len(bottom)) * LOG_TWO,
                0.5 * (sum(top) - sum(bottom)) * LOG_PI,
                *(-log_gamma(0.5 * i) for i in top),
                *(log_gamma(0.5 * i) for i in bottom),
            ],
        ),
    )


def d_constant(c: CaseTriple) -> float:
    """Leading constant ω_{γ+1} ω_{q-γ} ω_{n-q} / (ω_{n-(q-γ)+1} ω_{n-γ})."""
    n, q, g = c.n, c.q, c.gamma
    return _exp_omega_ratio((g + 1, q - g, n - q), (n - (q - g) + 1, n - g))


def d_tilde_constant(c: CaseTriple) -> float:
    """Constant of the unrestricted flat measure, ω_{n+1} ω_{γ+1} ω_{q-γ} / (...)."""
    n, q, g = c.n, c.q, c.gamma
    return _exp_omega_ratio((n + 1, g + 1, q - g), (n - (q - g) + 1, n - g, q + 1))


def ball_weight_constant(n: int, q: int) -> float:
    """Value ω_{n+1} / (ω_{q+1} ω_{n-q}) of the weight J inside the ball."""
    if not 1 <= q <= n - 1:
        error_msg = f"expected 1 <= q <= n-1, got n={n}, q={q}"
        raise DomainError(error_msg)

    return _exp_omega_ratio((n + 1,), (q + 1, n - q))


def fixed_subspace_constant(c: CaseTriple) -> float:
    """ω_{γ+1} ω_{n-q} / ω_{n-(q-γ)+1}, shared by the fixed-subspace and tangent laws."""
    n, q, g = c.n, c.q, c.gamma
    return _exp_omega_ratio((g + 1, n - q), (n - (q - g) + 1,))


def hug_moment_constant(n: int, k: int, r: int, alpha: float) -> float:
    """
    Moment ∫ [F, L]^α ν_k(dL) of the subspace determinant against a fixed F ∈ G(n, r).

    The product over i = 0, ..., n - r - 1 is empty (equal to 1) when r = n.
    `r = 0` is accepted so the hyperplane counterpart is defined for every p.
    """
    if not 1 <= k <= n or not 0 <= r <= n or r + k < n:
        error_msg = f"expected r, k in [1, n] with r + k >= n, got n={n}, k={k}, r={r}"
        raise DomainError(error_msg)

    if alpha < 0:
        error_msg = f"alpha must be non-negative, got {alpha}"
        raise DomainError(error_msg)

    log_value = 0.0
    for i in range(n - r):
        log_value += (
            log_gamma((n - i) / 2)
            + log_gamma((k - i + alpha) / 2)
            - log_gamma((n - i + alpha) / 2)
            - log_gamma((k - i) / 2)
        )

    return math.exp(log_value)


def axis_moment_constant(n: int, p: int, q: int, alpha: float) -> float:
    """Constant a(n, p, q, α) of the subspace-determinant moment over G(span u, q)."""
    if not 1 <= p <= n - 1 or not 1 <= q <= n - 1 or p + q > n:
        error_msg = f"expected p, q in [1, n-1] with p + q <= n, got n={n}, p={p}, q={q}"
        raise DomainError(error_msg)

    if alpha < 0:
        error_msg = f"alpha must be non-negative, got {alpha}"
        raise DomainError(error_msg)

    log_value = 0.0
    for i in range(1, p + 1):
        log_value += (
            log_gamma((n - i) / 2)
            + log_gamma((n - q - i + alpha + 1) / 2)
            - log_gamma((n - i + alpha) / 2)
            - log_gamma((n - q - i + 1) / 2)
        )

    return math.exp(log_value)


def _log_b_coefficient(i: int, j: int) -> float:
    if not 1 <= j <= i:
        error_msg = f"b_(i,j) needs 1 <= j <= i, got i={i}, j={j}"
        raise DomainError(error_msg)

    return sum(log_omega(m) for m in range(i - j + 1, i + 1)) - sum(
        log_omega(m) for m in range(1, j + 1)
    )


def b_coefficient(i: int, j: int) -> float:
    """b_{i,j} = ω_{i-j+1} ··· ω_i / (ω_1 ··· ω_j)."""
    return math.exp(_log_b_coefficient(i, j))


def bar_b(c: CaseTriple) -> float:
    n, q, g = c.n, c.q, c.gamma
    return math.exp(
        _log_b_coefficient(n, n - g)
        + _log_b_coefficient(n - g, n - q)
        + _log_b_coefficient(n - g, q - g)
        - _log_b_coefficient(n, n - q)
        - _log_b_coefficient(n, q - g),
    )


def pivot_constant(c: CaseTriple) -> float:
    """
    Constant obtained by pivoting through the affine Blaschke-Petkantschin formula.

    Equals bar_b · c_1 · ω_{n-q} ω_{q-γ} / ω_{n-γ} with
    c_1 = a(n-γ, n-q, q-γ, γ+1) ω_{q-γ} / ω_{n-γ}; it must coincide with `d_constant`.
    """
    n, q, g = c.n, c.q, c.gamma
    c1 = axis_moment_constant(n - g, n - q, q - g, g + 1) * omega(q - g) / omega(n - g)
    return bar_b(c) * c1 * omega(n - q) * omega(q - g) / omega(n - g)


def hit_probability_omega_form(c: CaseTriple) -> float:
    n, q, g = c.n, c.q, c.gamma
    return _exp_omega_ratio((g + 1, n + 1), (q + 1, n - (q - g) + 1))


def hit_probability_gamma_form(c: CaseTriple) -> float:
    n, q, g = c.n, c.q, c.gamma
    return math.exp(
        math.fsum(
            [
                log_gamma((q + 1) / 2),
                log_gamma((n - (q - g) + 1) / 2),
                -log_gamma((g + 1) / 2),
                -log_gamma((n + 1) / 2),
            ],
        ),
    )


def hit_probability(c: CaseTriple) -> float:
    """
    Probability that the intersection of the random flat and subspace meets the unit ball.

    Args:
        c (CaseTriple): Dimension triple.

    Returns:
        float: p_{n,q,γ} = ω_{γ+1} ω_{n+1} / (ω_{q+1} ω_{n-(q-γ)+1}), e.g. 2/π for (2,1,0).

    Raises:
        ArithmeticError: if the ω-form and the Γ-form disagree beyond 1e-12 relative.
    """
    by_omega = hit_probability_omega_form(c)
    by_gamma = hit_probability_gamma_form(c)

    if not math.isclose(by_omega, by_gamma, rel_tol=FORM_AGREEMENT):
        error_msg = f"hit probability forms disagree for {c}: {by_omega!r} vs {by_gamma!r}"
        raise ArithmeticError(error_msg)

    return by_gamma


def hit_probability_asymptotic(c: CaseTriple) -> float:
    """
    Leading term of p_{n,q,γ} as n → ∞ with q and γ fixed.

    Γ((q+1)/2) / Γ((γ+1)/2) · (2/n)^{(q-γ)/2}, which is
    (ω_{γ+1} / ω_{q+1}) (2π/n)^{(q-γ)/2} in ω-notation.
    """
    n, q, g = c.n, c.q, c.gamma
    return math.exp(
        log_gamma((q + 1) / 2)
        - log_gamma((g + 1) / 2)
        + 0.5 * (q - g) * (LOG_TWO - math.log(n)),
    )


def crofton_constant(n: int, k: int, i: int) -> float:
    """
    Factor ω_{n+1} ω_{i+1} / (ω_{k+1} ω_{n-k+i+1}) of the Crofton formula,
    0 <= i <= k <= n-1.
    """
    if not 0 <= i <= k <= n - 1:
        error_msg = f"expected 0 <= i <= k <= n-1, got n={n}, k={k}, i={i}"
        raise DomainError(error_msg)

    return _exp_omega_ratio((n + 1, i + 1), (k + 1, n - k + i + 1))


def multiple_intersection_constant(n: int, flat_dims: Sequence[int], affine_dim: int) -> float:
    """
    Factor c with ∫···∫ f(E_1 ∩ ... ∩ E_m) μ_{p_m}(dE_m)···μ_{p_1}(dE_1) = c ∫ f dμ_k.

    Obtained by applying the Crofton formula once per flat and telescoping:
    c = ω_{n+1}^{m-1} ω_{k+1} / (ω_{p_1+1} ··· ω_{p_m+1}) with k = Σp_j - (m-1)n.
    """
    m = len(flat_dims)
    if m < 1 or any(not 0 <= p <= n - 1 for p in flat_dims):
        error_msg = f"expected at least one flat dimension in [0, n-1], got {list(flat_dims)}"
        raise DomainError(error_msg)

    if sum(flat_dims) - (m - 1) * n != affine_dim or affine_dim < 0:
        error_msg = (
            f"flat dimensions {list(flat_dims)} intersect in dimension "
            f"{sum(flat_dims) - (m - 1) * n}, not {affine_dim}"
        )
        raise DomainError(error_msg)

    return _exp_omega_ratio(
        [n + 1] * (m - 1) + [affine_dim + 1],
        [p + 1 for p in flat_dims],
    )


def blaschke_petkantschin_constant(n: int, k: int, r: int) -> float:
    """
    Factor ω_{n-k} / ω_{r-k} pivoting k-flats through r-dimensional subspaces,
    0 <= k < r < n.
    """
    if not 0 <= k < r < n:
        error_msg = f"expected 0 <= k < r < n, got n={n}, k={k}, r={r}"
        raise DomainError(error_msg)

    return _exp_omega_ratio((n - k,), (r - k,))


def half_probability_cases(n: int) -> list[CaseTriple]:
    """Triples with hit probability exactly 1/2 from the two odd-dimensional families."""
    if n < 3 or n % 2 == 0:
        error_msg = f"the families are defined for odd n >= 3, got {n}"
        raise DomainError(error_msg)

    gamma = (n - 1) // 2 - 1
    cases: list[CaseTriple] = []
    for q in sorted({(n - 1) // 2 + 1, n - 2}):
        if gamma >= 0 and 1 <= q <= n - 1 and gamma <= q - 1:
            cases.append(CaseTriple(n, q, gamma))

    return cases
