"""Gambler's-ruin probabilities and the stationary-mass series.

pi(0) is an exact infinite product over excursion windows; pi(1) is a series
whose printed form is ambiguous in one inner ruin-probability argument, so
both readings are evaluated and a Monte Carlo oracle selects between them.
Products are accumulated in log space.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from .params import as_probability


@dataclass(frozen=True)
class RuinQuery:
    """Biased walk from z: probability of hitting x before y (y <= z <= x, y < x)."""

    p: float
    x: int
    y: int
    z: int

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise ValueError("p must lie in (0, 1)")
        if self.x == self.y:
            raise ValueError("degenerate barriers x = y")
        if not self.y <= self.z <= self.x:
            raise ValueError("need y <= z <= x")
        if not self.y < self.x:
            raise ValueError("need y < x")


def ruin_probability(query):
    """h(p, x, y, z): (1 - r^(z-y)) / (1 - r^(x-y)) with r = (1-p)/p, or the
    linear (z - y)/(x - y) at p = 1/2."""
    p, x, y, z = query.p, query.x, query.y, query.z
    p = as_probability(p) if isinstance(p, (str, Fraction)) else p
    if p == Fraction(1, 2) or p == 0.5:
        return Fraction(z - y, x - y) if isinstance(p, Fraction) else (z - y) / (x - y)
    r = (1 - p) / p
    return (1 - r ** (z - y)) / (1 - r ** (x - y))


def ruin(p, x, y, z):
    return ruin_probability(RuinQuery(p=p, x=x, y=y, z=z))


@dataclass
class SeriesResult:
    value: float
    terms_used: int
    tail_bound: float
    method: str
    converged: bool = True

    def to_dict(self):
        def clean(x):
            # inf/nan are not valid strict JSON; report them as strings
            return x if math.isfinite(x) else str(x)

        return {"value": clean(self.value), "terms_used": self.terms_used,
                "tail_bound": clean(self.tail_bound), "method": self.method,
                "converged": self.converged}


def _window_factor(p0, p1, k):
    """p1 + (1 - p1) h(p0, k+1, -1, k-1): no left step from 0 during window k."""
    h = ruin(p0, k + 1, -1, k - 1) if k >= 1 else ruin(p0, 1, -1, -1)
    return p1 + (1 - p1) * h


def pi0_product(p0, p1, tol=1e-12, max_terms=1_000_000):
    """pi(0) = P(never step 0 -> -1) as the window product.

    The per-factor deficit decays like r^k with r = (1-p0)/p0, giving a
    geometric bound on the dropped log mass.
    """
    p0 = float(p0)
    p1 = float(p1)
    if not 0.5 < p0 <= 1:
        raise ValueError("p0 must lie in (1/2, 1]")
    if not 0 < p1 <= 1:
        raise ValueError("p1 must lie in (0, 1]")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if p0 == 1.0:
        # only the k = 0 factor differs from 1
        return SeriesResult(value=p1, terms_used=1, tail_bound=0.0,
                            method="product_A2")
    r = (1 - p0) / p0
    log_value = 0.0
    k = 0
    while True:
        deficit_cap = (1 - p1) * r ** k  # 1 - factor_k <= (1-p1) r^k
        if deficit_cap < 1:
            tail_log = deficit_cap / ((1 - r) * (1 - deficit_cap))
            if tail_log < tol:
                value = math.exp(log_value)
                return SeriesResult(value=value, terms_used=k,
                                    tail_bound=value * math.expm1(tail_log),
                                    method="product_A2")
        log_value += math.log(_window_factor(p0, p1, k))
        k += 1
        if k > max_terms:
            raise RuntimeError("pi(0) product failed to converge")


def pi1_sum(p0, p1, tol=1e-12, max_terms=1_000_000):
    """Both readings of the pi(1) series; returns (variant_A, variant_B).

    The printed inner ruin term has its barriers swapped. Variant A reads it
    as the probability of hitting -1 before k+1 (1 - h); its terms then
    approach a positive constant and the series diverges, which is reported
    rather than summed. Variant B reuses h as in the pi(0) factor and
    converges geometrically; it also matches the derivation of the preceding
    display equations.
    """
    p0 = float(p0)
    p1 = float(p1)
    if not 0.5 < p0 <= 1:
        raise ValueError("p0 must lie in (1/2, 1]")
    if not 0 < p1 <= 1:
        raise ValueError("p1 must lie in (0, 1]")
    if tol <= 0:
        raise ValueError("tol must be positive")
    pi0 = pi0_product(p0, p1, tol=min(tol, 1e-13)).value

    if p1 == 1.0:
        a = SeriesResult(value=0.0, terms_used=0, tail_bound=0.0,
                         method="sum_A6_variantA")
        b = SeriesResult(value=0.0, terms_used=0, tail_bound=0.0,
                         method="sum_A6_variantB")
        return a, b

    if p0 == 1.0:
        # r = 0 limit: only the k = 0 window contributes to variant B, giving
        # pi0 (1 - p1) / p1 = 1 - p1; variant A's terms are constant for k >= 1
        a = SeriesResult(value=math.inf, terms_used=0, tail_bound=math.inf,
                         method="sum_A6_variantA", converged=False)
        b = SeriesResult(value=1.0 - p1, terms_used=1, tail_bound=0.0,
                         method="sum_A6_variantB")
        return a, b

    r = (1 - p0) / p0

    # variant A diverges: its k-th term tends to pi0 (1 - p1)(1 - r) > 0
    limit_term = pi0 * (1 - p1) * (1 - r)
    variant_a = SeriesResult(value=math.inf, terms_used=0, tail_bound=math.inf,
                             method="sum_A6_variantA", converged=False)
    assert limit_term > 0

    total = 0.0
    k = 0
    while True:
        h_inner = ruin(p0, k + 1, -1, k - 1) if k >= 1 else ruin(p0, 1, -1, -1)
        h_escape = ruin(p0, k + 1, -1, 0)
        factor = p1 + (1 - p1) * h_inner
        term = pi0 * (1 - p1) * (1 - h_inner) * h_escape / factor
        total += term
        k += 1
        # term_k <= pi0 (1-p1) r^k / p1, geometric tail
        tail = pi0 * (1 - p1) * r ** k / (p1 * (1 - r))
        if tail < tol:
            variant_b = SeriesResult(value=total, terms_used=k, tail_bound=tail,
                                     method="sum_A6_variantB")
            return variant_a, variant_b
        if k > max_terms:
            raise RuntimeError("pi(1) series failed to converge")


def pi1_report(p0, p1, tol=1e-12, paths=100_000, barrier=200, seed=0):
    """Evaluate both pi(1) readings and compare against a Monte Carlo oracle.

    The oracle is the empirical frequency of exactly one 0 -> -1 step before
    the walk first hits `barrier`. Returns a dict with both series results,
    the MC estimate with its standard error, and which variant (if either)
    falls within 3 SE.
    """
    from . import walk as walk_mod
    from .params import excited_asymmetric_walk

    variant_a, variant_b = pi1_sum(p0, p1, tol=tol)
    config = excited_asymmetric_walk([p1], p0)
    samples, resampled = walk_mod.left_step_counts_at_zero(
        config, barrier, paths, seed)
    phat = float((samples == 1).mean())
    se = math.sqrt(max(phat * (1 - phat), 1e-300) / paths)
    verdicts = {}
    for res in (variant_a, variant_b):
        if res.converged and abs(res.value - phat) <= 3 * se:
            verdicts[res.method] = "matches MC within 3 SE"
        elif res.converged:
            verdicts[res.method] = (
                f"mismatch: |{res.value:.6g} - {phat:.6g}| > 3 SE ({3 * se:.2g})")
        else:
            verdicts[res.method] = "diverges (terms tend to a positive constant)"
    matching = [m for m, v in verdicts.items() if v.startswith("matches")]
    return {
        "variant_A": variant_a.to_dict(),
        "variant_B": variant_b.to_dict(),
        "mc_estimate": phat,
        "mc_se": se,
        "mc_paths": paths,
        "mc_barrier": barrier,
        "mc_resampled": resampled,
        "seed": seed,
        "verdicts": verdicts,
        "selected_variant": matching[0] if matching else None,
    }
