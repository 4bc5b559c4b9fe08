"""Closed-form results: the exact one-cookie asymmetric speed, the stationary
PGF as a convergent infinite product, and the same-drift slowdown
constructions with their thresholds.

Threshold formulas are evaluated in exact rational arithmetic whenever the
inputs are exact, because the worked-example checks (N = 7, 697/1100) demand
exact equality.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .params import as_probability


def _check_open(p, lo, hi, name, allow_hi=False):
    ok = lo < p < hi or (allow_hi and p == hi)
    if not ok:
        top = "]" if allow_hi else ")"
        raise ValueError(f"{name} must lie in ({lo}, {hi}{top}, got {p}")


def exact_speed_earw(p0, p1):
    """Limiting speed of the one-cookie asymmetric walk:
    (2 p0 - 1) / (2 p0 - 1 + 2 (1 - p1)).

    p1 = 1 is accepted as the closure point (speed 2 p0 - 1 ... = 1 only when
    the denominator degenerates to the numerator).
    """
    p0 = as_probability(p0)
    p1 = as_probability(p1)
    _check_open(p0, Fraction(1, 2), 1, "p0", allow_hi=True)
    _check_open(p1, 0, 1, "p1", allow_hi=True)
    return (2 * p0 - 1) / (2 * p0 - 1 + 2 * (1 - p1))


def expected_Z0(p0, p1):
    """Stationary mean of the associated chain: (1 - p1) / (2 p0 - 1).

    Returns +inf at the symmetric boundary p0 = 1/2 (divergence sentinel).
    """
    p0 = as_probability(p0)
    p1 = as_probability(p1)
    if p0 == Fraction(1, 2):
        return math.inf
    _check_open(p0, Fraction(1, 2), 1, "p0", allow_hi=True)
    _check_open(p1, 0, 1, "p1", allow_hi=True)
    return (1 - p1) / (2 * p0 - 1)


@dataclass
class PgfEvaluation:
    s: float
    value: float
    factors_used: int
    tail_bound: float


def pgf_eval(p0, p1, s, tol=1e-10):
    """Stationary PGF G(s) = E[s^Z] as a truncated infinite product.

    The recursion G(s) = prefactor(s) * G(phi(s)) with
    phi(s) = p0 / (1 - s (1 - p0)) iterates toward the fixed point 1 at
    contraction rate (1 - p0) / p0 < 1, and G(t) >= 1 - E[Z] (1 - t) gives a
    computable bound on the dropped factor.
    """
    p0 = float(p0)
    p1 = float(p1)
    if not 0.5 < p0 <= 1:
        raise ValueError("p0 must lie in (1/2, 1]")
    if not 0 < p1 <= 1:
        raise ValueError("p1 must lie in (0, 1]")
    if not 0 <= s <= 1:
        raise ValueError("s must lie in [0, 1]")
    if tol <= 0:
        raise ValueError("tol must be positive")
    ez = (1 - p1) / (2 * p0 - 1)
    product = 1.0
    si = s
    i = 0
    while True:
        bound = product * ez * (1 - si)
        if bound <= tol:
            break
        product *= (p1 + si * (p0 - p1)) / (1 - si * (1 - p0))
        si = p0 / (1 - si * (1 - p0))
        i += 1
        if i > 1_000_000:
            raise RuntimeError("PGF product failed to converge")
    return PgfEvaluation(s=s, value=product, factors_used=i, tail_bound=bound)


def pgf_derivative_at_one(p0, p1, h=1e-5, tol=1e-13):
    """Numerical left derivative of G at 1 (second-order one-sided stencil)."""
    g0 = pgf_eval(p0, p1, 1.0, tol).value
    g1 = pgf_eval(p0, p1, 1.0 - h, tol).value
    g2 = pgf_eval(p0, p1, 1.0 - 2 * h, tol).value
    return (3 * g0 - 4 * g1 + g2) / (2 * h)


def p_i_strength(M, p, i):
    """Equal-drift weakened strength: 1/2 + M (2p - 1) / (2 (M + i)).

    Spreading the same total drift over M + i cookies; exact for exact p.
    """
    if M < 3:
        raise ValueError("construction requires M >= 3")
    if i < 0:
        raise ValueError("i must be >= 0")
    p = as_probability(p)
    _check_open(p, Fraction(1, 2), 1, "p")
    return Fraction(1, 2) + M * (2 * p - 1) / (2 * (M + i)) if isinstance(p, Fraction) \
        else 0.5 + M * (2 * p - 1) / (2 * (M + i))


@dataclass(frozen=True)
class MonotonicityWitness:
    """A base (M, p) constant cookie vector and its drift-preserving
    weakening with M + i cookies of strength p^(i)."""

    M: int
    p: object
    i: int

    @property
    def derived_strength(self):
        return p_i_strength(self.M, self.p, self.i)

    @property
    def derived_vector(self):
        return (self.derived_strength,) * (self.M + self.i)


def speed_lower_bound_3cookie(q):
    """Lower bound f(q) on the speed of the 3-cookie walk (q, q, q), q > 5/6:
    (6q - 5)(q^2 - 2q - 1) / (24 q^4 - 42 q^3 - 3 q^2 + 28 q - 9).
    """
    q = as_probability(q)
    _check_open(q, Fraction(5, 6), 1, "q", allow_hi=True)
    num = (6 * q - 5) * (q * q - 2 * q - 1)
    den = 24 * q ** 4 - 42 * q ** 3 - 3 * q * q + 28 * q - 9
    return num / den


def speed_lower_bound_3cookie_closure(q):
    """f(q) extended to the closure points q = 5/6 and q = 1."""
    q = as_probability(q)
    if q == Fraction(5, 6):
        return Fraction(0) if isinstance(q, Fraction) else 0.0
    return speed_lower_bound_3cookie(q)


def corollary_threshold_N(p, q):
    """Smallest integer N with
    N >= 6 (p D + 2 (-6q^4 + 9q^3 + 5q^2 - 8q + 1)) / ((6q - 5)(q^2 - 2q - 1))
    where D = 24q^4 - 42q^3 - 3q^2 + 28q - 9; beyond N the weakened walks are
    provably slower than the 3-cookie (q, q, q) walk.
    """
    p = as_probability(p)
    q = as_probability(q)
    if not Fraction(5, 6) < q < p < 1:
        raise ValueError("need 5/6 < q < p < 1")
    D = 24 * q ** 4 - 42 * q ** 3 - 3 * q * q + 28 * q - 9
    E = -6 * q ** 4 + 9 * q ** 3 + 5 * q * q - 8 * q + 1
    denom = (6 * q - 5) * (q * q - 2 * q - 1)
    bound = 6 * (p * D + 2 * E) / denom
    N = math.ceil(bound)
    # defining property: beyond N the simple-walk envelope drops below f(q)
    fq = speed_lower_bound_3cookie(q)
    if not 3 * (2 * p - 1) / (3 + N + 1) < fq:
        raise AssertionError("threshold N failed its defining inequality")
    return N


def epsilon_upper_bound(p, q):
    """Largest admissible tilt: epsilon < (1 - p) f(q) / (1 - f(q))."""
    p = as_probability(p)
    q = as_probability(q)
    if not Fraction(5, 6) < q < p < 1:
        raise ValueError("need 5/6 < q < p < 1")
    fq = speed_lower_bound_3cookie(q)
    return (1 - p) * fq / (1 - fq)


def proposition_bounds(p, q, epsilon=None):
    """(epsilon_max, minimal_M) for the slow-but-strong-first-cookie build.

    minimal_M is the least M making the drift of (p, 1/2+eps, ..., 1/2+eps)
    exceed 2, which is the condition the worked example actually satisfies;
    the verification v*(1/2+eps, p) < f(q) is asserted internally.
    """
    p = as_probability(p)
    q = as_probability(q)
    eps_max = epsilon_upper_bound(p, q)
    if epsilon is None:
        epsilon = eps_max / 2
    else:
        epsilon = as_probability(epsilon)
    if not 0 < epsilon < eps_max:
        raise ValueError(f"epsilon must lie in (0, {eps_max})")
    # v*(1/2 + eps, p) = eps / (eps + (1 - p)) < f(q) for eps below the bound
    v_star = epsilon / (epsilon + (1 - p))
    if not v_star < speed_lower_bound_3cookie(q):
        raise AssertionError("tilted speed failed to drop below f(q)")
    # drift of (p, 1/2+eps, ..., 1/2+eps) with M cookies: (2p-1) + (M-1) 2 eps
    threshold = (2 - (2 * p - 1)) / (2 * epsilon)
    minimal_M = math.floor(threshold) + 2
    return eps_max, minimal_M


def order_counterexample_gap(p):
    """(p^(2))^5 - (p^(1))^4 / 2 for the 3-cookie base, two ways.

    Computes the direct difference ((3p+1)/5)^5 - ((6p+1)/8)^4 / 2 and the
    factored form 9 (2p-1)^2 (55296 p^3 + 34956 p^2 + 7572 p + 563) / 25600000
    and asserts their agreement (exactly for exact p, to 1e-12 otherwise).
    The value is positive for p > 1/2, which breaks the coupling partial order
    between the i = 1 and i = 2 weakenings.
    """
    p = as_probability(p)
    if not Fraction(1, 2) <= p < 1:
        raise ValueError("p must lie in [1/2, 1)")
    direct = ((3 * p + 1) / 5) ** 5 - ((6 * p + 1) / 8) ** 4 / 2
    factored = (9 * (2 * p - 1) ** 2
                * (55296 * p ** 3 + 34956 * p * p + 7572 * p + 563)) / 25600000
    if isinstance(p, Fraction):
        if direct != factored:
            raise AssertionError("factored identity failed in exact arithmetic")
    elif abs(direct - factored) > 1e-12:
        raise AssertionError("factored identity disagreed beyond 1e-12")
    return direct


def figure3_rows(p1_list=(0.8, 0.9, 0.99), grid=99):
    """(p0, p1, v_star) rows for the three-curve speed figure."""
    rows = []
    for p1 in p1_list:
        for k in range(1, grid + 1):
            p0 = 0.5 + 0.5 * k / (grid + 1)
            rows.append((p0, float(p1), float(exact_speed_earw(p0, p1))))
    return rows
