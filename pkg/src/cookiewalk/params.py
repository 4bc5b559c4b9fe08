"""Walk configurations, the delta drift parameter, and qualitative classification."""

import json
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction


class WalkKind(str, Enum):
    SIMPLE = "simple"
    EXCITED_SYMMETRIC = "excited_symmetric"
    EXCITED_ASYMMETRIC = "excited_asymmetric"


class WalkClass(str, Enum):
    RECURRENT_ZERO_SPEED = "recurrent_zero_speed"
    TRANSIENT_RIGHT_ZERO_SPEED = "transient_right_zero_speed"
    TRANSIENT_RIGHT_POSITIVE_SPEED = "transient_right_positive_speed"
    # Mirrored from the right-transient case by symmetry; the source results
    # only state the delta > 1 / delta > 2 thresholds for the right side.
    TRANSIENT_LEFT = "transient_left"


def as_probability(value):
    """Coerce a probability given as float, Fraction, int or string.

    Strings ("0.85", "697/1100") become exact Fractions; floats stay floats so
    callers control whether arithmetic is exact.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("probability cannot be a bool")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        return value
    raise TypeError(f"cannot interpret {value!r} as a probability")


def _check_unit(p, name, closed_top=True):
    if not (0 < p <= 1 if closed_top else 0 < p < 1):
        top = "]" if closed_top else ")"
        raise ValueError(f"{name} must lie in (0, 1{top}, got {p}")


@dataclass(frozen=True)
class CookieVector:
    """Ordered per-site cookie strengths p_1..p_M.

    Strengths must lie in (0, 1]; the right endpoint is admitted so that
    degenerate always-step-right examples and limit checks stay expressible.
    M = 0 degenerates to a simple/biased walk.
    """

    strengths: tuple

    def __init__(self, strengths=()):
        coerced = tuple(as_probability(p) for p in strengths)
        for p in coerced:
            _check_unit(p, "cookie strength")
        object.__setattr__(self, "strengths", coerced)

    @property
    def M(self):
        return len(self.strengths)

    def __iter__(self):
        return iter(self.strengths)

    def __len__(self):
        return len(self.strengths)


def constant_cookies(M, p):
    return CookieVector((as_probability(p),) * M)


def delta(cookies):
    """Total per-site drift: sum of (2 p_i - 1) over the cookie vector.

    Exact (Fraction) when every strength is a Fraction, float otherwise.
    """
    total = Fraction(0)
    for p in cookies:
        total = total + (2 * p - 1)
    return total


def classify(cookies):
    """Qualitative class of the standard (symmetric-tail) excited walk.

    Thresholds: transient right iff delta > 1, positive speed iff delta > 2,
    zero speed on the closed band [-2, 2]; the left side mirrors by symmetry.
    """
    d = delta(cookies)
    if d > 2:
        return WalkClass.TRANSIENT_RIGHT_POSITIVE_SPEED
    if d > 1:
        return WalkClass.TRANSIENT_RIGHT_ZERO_SPEED
    if d >= -1:
        return WalkClass.RECURRENT_ZERO_SPEED
    return WalkClass.TRANSIENT_LEFT


@dataclass(frozen=True)
class WalkConfig:
    """A walk model: cookie vector, post-cookie bias, and model kind."""

    cookies: CookieVector
    bias: object
    kind: WalkKind

    def __init__(self, cookies, bias, kind):
        if not isinstance(cookies, CookieVector):
            cookies = CookieVector(cookies)
        bias = as_probability(bias)
        kind = WalkKind(kind)
        _check_unit(bias, "bias")
        if kind is WalkKind.SIMPLE and cookies.M != 0:
            raise ValueError("a simple walk has no cookies (M = 0)")
        if kind is WalkKind.EXCITED_SYMMETRIC and bias != Fraction(1, 2):
            raise ValueError("a standard excited walk has bias 1/2")
        if kind is WalkKind.EXCITED_ASYMMETRIC and not bias > Fraction(1, 2):
            raise ValueError("an excited asymmetric walk requires bias > 1/2")
        object.__setattr__(self, "cookies", cookies)
        object.__setattr__(self, "bias", bias)
        object.__setattr__(self, "kind", kind)

    @property
    def M(self):
        return self.cookies.M

    def step_right_probability(self, visit_number):
        """Probability of stepping right on the given (1-based) visit to a site."""
        if visit_number < 1:
            raise ValueError("visit numbers are 1-based")
        if visit_number <= self.cookies.M:
            return self.cookies.strengths[visit_number - 1]
        return self.bias

    def classify(self):
        if self.kind is WalkKind.EXCITED_ASYMMETRIC:
            raise ValueError(
                "delta-based classification applies to symmetric-tail walks only"
            )
        return classify(self.cookies)


def simple_walk(p):
    return WalkConfig(CookieVector(), p, WalkKind.SIMPLE)


def excited_walk(strengths):
    return WalkConfig(CookieVector(strengths), Fraction(1, 2), WalkKind.EXCITED_SYMMETRIC)


def excited_asymmetric_walk(strengths, bias):
    return WalkConfig(CookieVector(strengths), bias, WalkKind.EXCITED_ASYMMETRIC)


def _number_to_json(p):
    if isinstance(p, Fraction):
        if p.denominator == 1:
            return float(p) if p in (0, 1) else f"{p.numerator}/1"
        return f"{p.numerator}/{p.denominator}"
    return p


def config_to_dict(config):
    return {
        "kind": config.kind.value,
        "cookies": [_number_to_json(p) for p in config.cookies],
        "bias": _number_to_json(config.bias),
    }


def parse_config(source):
    """Parse the JSON config format shared by the CLI and the library.

    Accepts a dict, a JSON string, or anything with a .read() method.
    Numbers may be floats or "num/den" strings (parsed exactly).
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, str):
        source = json.loads(source)
    if not isinstance(source, dict):
        raise ValueError("config must be a JSON object")
    try:
        kind = WalkKind(source["kind"])
        cookies = CookieVector(source.get("cookies", ()))
        bias = source["bias"]
    except KeyError as exc:
        raise ValueError(f"config is missing field {exc}") from None
    return WalkConfig(cookies, bias, kind)
