"""
Rounded arithmetic over N_eps = {0} u {(1+eps)^x : x >= 0}.

Values are stored as exponent codes: -1 is zero, x >= 0 is (1+eps)^x.
Exact powers of (1+eps) are huge rationals for small eps, so every
comparison is decided in log space first and only falls back to exact
Fraction arithmetic when the two sides are within a certified margin.
Results are therefore exactly those of rational arithmetic.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

from twapprox.errors import ConfigurationError

ZERO = -1

# Relative slack on the magnitudes entering a log-space comparison
_MARGIN = 1e-12


def _log(q: Fraction) -> tuple[float, float]:
    """(log q, magnitude of the terms it was computed from)."""
    a, b = math.log(q.numerator), math.log(q.denominator)
    return a - b, abs(a) + abs(b)


def ceil_log2(n: int) -> int:
    return max(1, (n - 1).bit_length())


class EpsilonArithmetic:
    """
    Operations on exponent codes for a fixed rational eps > 0.

    Example:
        ar = EpsilonArithmetic(Fraction(1, 2))
        ar.round_down(Fraction(5))       # 3, i.e. 1.5**3 = 3.375
        ar.add(0, 0)                     # 1, i.e. [1 + 1] = 1.5
    """

    def __init__(self, eps: Fraction):
        eps = Fraction(eps)
        if eps <= 0:
            raise ConfigurationError("epsilon must be positive", detail=str(eps))
        self.eps = eps
        self.base = 1 + eps
        self._log_base = math.log1p(float(eps))
        self.exact_fallbacks = 0

    def value(self, code: int) -> Fraction:
        """Exact value of a code; only sensible for small exponents."""
        return Fraction(0) if code == ZERO else self.base**code

    def approx_value(self, code: int) -> float:
        return 0.0 if code == ZERO else math.exp(code * self._log_base)

    def _decide(self, lhs_log: float, rhs_log: float, scale: float = 0.0) -> int | None:
        diff = lhs_log - rhs_log
        if abs(diff) > _MARGIN * (abs(lhs_log) + abs(rhs_log) + scale) + 1e-300:
            return 1 if diff > 0 else -1
        return None

    def compare(self, code: int, q: Fraction | int) -> int:
        """Sign of value(code) - q."""
        q = Fraction(q)
        if code == ZERO:
            return (q < 0) - (q > 0)
        if q <= 0:
            return 1
        rhs, scale = _log(q)
        sign = self._decide(code * self._log_base, rhs, scale)
        if sign is not None:
            return sign
        self.exact_fallbacks += 1
        lhs = self.base**code
        return (lhs > q) - (lhs < q)

    def round_down(self, a: Fraction | int) -> int:
        """[a]: largest member of N_eps that is <= a, as a code."""
        a = Fraction(a)
        if a < 0:
            raise ValueError("round_down needs a >= 0")
        if a < 1:
            return ZERO
        x = max(0, math.floor(_log(a)[0] / self._log_base))
        while x > 0 and self.compare(x, a) > 0:
            x -= 1
        while self.compare(x + 1, a) <= 0:
            x += 1
        return x

    def add(self, a: int, b: int) -> int:
        """[value(a) + value(b)] as a code."""
        if a == ZERO:
            return b
        if b == ZERO:
            return a
        hi, lo = max(a, b), min(a, b)
        t = lo - hi  # <= 0
        # Largest j with (1+eps)^j <= 1 + (1+eps)^t; the sum is (1+eps)^hi times that
        rhs_log = math.log1p(math.exp(t * self._log_base))
        j = max(0, math.floor(rhs_log / self._log_base))
        while j > 0 and self._cmp_shifted(j, t) > 0:
            j -= 1
        while self._cmp_shifted(j + 1, t) <= 0:
            j += 1
        return hi + j

    def _cmp_shifted(self, j: int, t: int) -> int:
        """Sign of (1+eps)^j - (1 + (1+eps)^t) for t <= 0."""
        sign = self._decide(
            j * self._log_base, math.log1p(math.exp(t * self._log_base))
        )
        if sign is not None:
            return sign
        self.exact_fallbacks += 1
        # multiply through by (1+eps)^-t to stay with non-negative exponents
        lhs = self.base ** (j - t)
        rhs = self.base ** (-t) + 1
        return (lhs > rhs) - (lhs < rhs)

    def increment(self, code: int) -> int:
        """[value(code) + 1]."""
        return self.add(code, 0)

    def similar(self, code: int, n: Fraction | int, gamma: Fraction) -> bool:
        """value(code) ~_gamma n, i.e. n/(1+gamma) <= value <= (1+gamma) n."""
        n = Fraction(n)
        if code == ZERO or n == 0:
            return code == ZERO and n == 0
        return self.compare(code, n * (1 + gamma)) <= 0 and self.compare(code, n / (1 + gamma)) >= 0

    def at_least(self, code: int, q: Fraction | int) -> bool:
        """value(code) >= q."""
        return self.compare(code, q) >= 0

    def ceil_div(self, code: int, gamma: Fraction) -> int:
        """Smallest integer m with m >= value(code) / (1+gamma)."""
        if code == ZERO:
            return 0
        scale = 1 + gamma
        m = max(0, math.ceil(self.approx_value(code) / float(scale)))
        while m > 0 and self.compare(code, (m - 1) * scale) <= 0:
            m -= 1
        while self.compare(code, m * scale) > 0:
            m += 1
        return m


def similar_exact(a: Fraction | int, b: Fraction | int, gamma: Fraction) -> bool:
    """a ~_gamma b for plain rationals."""
    a, b = Fraction(a), Fraction(b)
    return b / (1 + gamma) <= a <= (1 + gamma) * b


def default_epsilon(w: int, n: int) -> Fraction:
    """1 / (w^2 * ceil(log2 n))^3, with w >= 1 and n >= 2."""
    w, n = max(w, 1), max(n, 2)
    return Fraction(1, (w * w * ceil_log2(n)) ** 3)


@dataclass(frozen=True)
class ErrorSchedule:
    """Per-height error bounds eps_h = 2h*eps and delta_h = 4(h+1)h*eps."""

    eps: Fraction
    h0: int

    def eps_h(self, h: int) -> Fraction:
        return 2 * max(h, 0) * self.eps

    def delta_h(self, h: int) -> Fraction:
        h = max(h, 0)
        return 4 * (h + 1) * h * self.eps

    @property
    def delta_h0(self) -> Fraction:
        return self.delta_h(self.h0)

    @property
    def ratio_bound(self) -> Fraction:
        """(1 + delta_h0)^2, the guaranteed approximation factor."""
        return (1 + self.delta_h0) ** 2


def schedule(w: int, n: int, h0: int, epsilon: Fraction | None = None) -> ErrorSchedule:
    """
    Error schedule for a decomposition of width w and root height h0.

    Without an override 1/(w^2 * ceil(log2 n))^3 is used, shrunk when the
    measured height would push delta_h0 to 1/2 or beyond. An override is
    used as given and must keep delta_h0 < 1.

    Args:
        w: Width of the decomposition.
        n: Number of vertices.
        h0: Height of the root.
        epsilon: Optional override of the rounding parameter.

    Returns:
        ErrorSchedule with eps, the per-height error terms and ratio_bound.

    Raises:
        ConfigurationError: If the override is not positive or too large.
    """
    if epsilon is None:
        w1, n1 = max(w, 1), max(n, 2)
        eps = default_epsilon(w1, n1)
        if h0 > 0:
            eps = min(eps, Fraction(1, 8 * h0 * (h0 + 1) * w1 * w1 * ceil_log2(n1)))
    else:
        eps = Fraction(epsilon)
        if eps <= 0:
            raise ConfigurationError("epsilon must be positive", detail=str(eps))
    result = ErrorSchedule(eps=eps, h0=h0)
    if result.delta_h0 >= 1:
        raise ConfigurationError(
            "epsilon too large for this decomposition height",
            detail=f"epsilon={eps}, h0={h0}, delta_h0={result.delta_h0}",
        )
    return result


def parse_epsilon(text: str) -> Fraction:
    """Rational from 'p/q' or a decimal string."""
    try:
        eps = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ConfigurationError("epsilon must be a rational like 1/100", detail=text) from None
    if eps <= 0:
        raise ConfigurationError("epsilon must be positive", detail=text)
    return eps
