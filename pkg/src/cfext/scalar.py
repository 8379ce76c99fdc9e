"""Scalars in one of two arithmetic modes.

Exact mode wraps :class:`fractions.Fraction`.  Complex-float mode wraps an
mpmath ``mpc`` living in a private context with a fixed number of decimal
digits, so arithmetic never depends on the global ``mpmath.mp`` state and
is safe to use from several threads.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import mpmath

from .errors import ModeError, ParseError

MIN_DIGITS = 30

EXACT = "exact-rational"
COMPLEX = "complex-float"


@lru_cache(maxsize=None)
def context(digits: int) -> mpmath.MPContext:
    """Shared mpmath context for a digit count (never mutated after creation)."""
    if digits < MIN_DIGITS:
        raise ValueError(f"precision_digits must be >= {MIN_DIGITS}, got {digits}")
    ctx = mpmath.MPContext()
    ctx.dps = digits
    return ctx


def _to_mpc(value, ctx):
    if isinstance(value, float):
        value = Fraction(value)
    if isinstance(value, Rational):
        q = Fraction(value)
        re_ = mpmath.libmp.from_rational(q.numerator, q.denominator, ctx.prec, "n")
        return ctx.make_mpc((re_, mpmath.libmp.fzero))
    # mpf/mpc from another context: rebind, then round to this context
    if hasattr(value, "_mpf_"):
        return +ctx.make_mpc((value._mpf_, mpmath.libmp.fzero))
    return +ctx.make_mpc(value._mpc_)


class Scalar:
    """An immutable number in exact-rational or complex-float mode.

    ``digits`` is ``None`` in exact mode.  ``mixed`` is set once a value has
    been produced from operands of different precisions.
    """

    __slots__ = ("value", "digits", "mixed")

    def __init__(self, value, digits: int | None = None, mixed: bool = False):
        if digits is None:
            if not isinstance(value, Rational):
                raise ModeError(f"exact scalar needs a rational value, got {type(value).__name__}")
            value = Fraction(value)
        else:
            value = _to_mpc(value, context(digits))
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "digits", digits)
        object.__setattr__(self, "mixed", mixed)

    @classmethod
    def _raw(cls, value, digits, mixed=False):
        obj = object.__new__(cls)
        object.__setattr__(obj, "value", value)
        object.__setattr__(obj, "digits", digits)
        object.__setattr__(obj, "mixed", mixed)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("Scalar is immutable")

    @property
    def mode(self) -> str:
        return EXACT if self.digits is None else COMPLEX

    @property
    def is_exact(self) -> bool:
        return self.digits is None

    @property
    def ctx(self):
        return context(self.digits)

    # -- construction / conversion ---------------------------------------

    @classmethod
    def exact(cls, value) -> Scalar:
        return cls(Fraction(value))

    @classmethod
    def complex(cls, re, im=0, digits: int = 50) -> Scalar:
        ctx = context(digits)
        return cls._raw(_to_mpc(re, ctx) + _to_mpc(im, ctx) * ctx.j, digits)

    @classmethod
    def parse(cls, text: str, digits: int | None = None) -> Scalar:
        return parse_scalar(text, digits)

    def to_complex(self, digits: int) -> Scalar:
        """Explicit conversion into complex-float mode at ``digits``."""
        if self.digits is None:
            return Scalar(self.value, digits)
        return Scalar._raw(_to_mpc(self.value, context(digits)), digits, self.mixed)

    def like(self, value) -> Scalar:
        """Lift a Python int/Fraction (or compatible Scalar) into this scalar's mode."""
        if isinstance(value, Scalar):
            self._check_mode(value)
            return value
        return Scalar(value, self.digits)

    # -- arithmetic --------------------------------------------------------

    def _check_mode(self, other: Scalar):
        if (self.digits is None) != (other.digits is None):
            raise ModeError(
                f"cannot mix {self.mode} and {other.mode} scalars without explicit conversion"
            )

    def _coerce(self, other):
        if isinstance(other, Scalar):
            self._check_mode(other)
            if self.digits is None or self.digits == other.digits:
                return self.value, other.value, self.digits, self.mixed or other.mixed
            d = min(self.digits, other.digits)
            ctx = context(d)
            return _to_mpc(self.value, ctx), _to_mpc(other.value, ctx), d, True
        if isinstance(other, Rational):
            if self.digits is None:
                return self.value, Fraction(other), None, self.mixed
            return self.value, _to_mpc(other, self.ctx), self.digits, self.mixed
        return NotImplemented

    def _binary(self, other, op, reflected=False):
        coerced = self._coerce(other)
        if coerced is NotImplemented:
            return NotImplemented
        x, y, d, mixed = coerced
        if reflected:
            x, y = y, x
        return Scalar._raw(op(x, y), d, mixed)

    def __add__(self, other):
        return self._binary(other, lambda x, y: x + y)

    def __radd__(self, other):
        return self._binary(other, lambda x, y: x + y, True)

    def __sub__(self, other):
        return self._binary(other, lambda x, y: x - y)

    def __rsub__(self, other):
        return self._binary(other, lambda x, y: x - y, True)

    def __mul__(self, other):
        return self._binary(other, lambda x, y: x * y)

    def __rmul__(self, other):
        return self._binary(other, lambda x, y: x * y, True)

    def __truediv__(self, other):
        return self._binary(other, _divide)

    def __rtruediv__(self, other):
        return self._binary(other, _divide, True)

    def __neg__(self):
        return Scalar._raw(-self.value, self.digits, self.mixed)

    def __pos__(self):
        return self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0 and self.is_zero():
            raise ZeroDivisionError("zero to a negative power")
        return Scalar._raw(self.value**n, self.digits, self.mixed)

    def __abs__(self):
        if self.digits is None:
            return Scalar._raw(abs(self.value), None, self.mixed)
        ctx = self.ctx
        return Scalar._raw(ctx.mpc(abs(self.value)), self.digits, self.mixed)

    def reciprocal(self) -> Scalar:
        return 1 / self

    # -- predicates and comparison ----------------------------------------

    def is_zero(self) -> bool:
        return self.value == 0

    def is_real(self) -> bool:
        return self.digits is None or self.value.imag == 0

    def __eq__(self, other):
        if isinstance(other, Scalar):
            if (self.digits is None) != (other.digits is None):
                return False
            return self.value == other.value
        if isinstance(other, Rational):
            if self.digits is None:
                return self.value == other
            return self.value == _to_mpc(other, self.ctx)
        return NotImplemented

    def __hash__(self):
        if self.digits is None:
            return hash(self.value)
        return hash((self.value.real, self.value.imag))

    def _real_key(self, other):
        coerced = self._coerce(other)
        if coerced is NotImplemented:
            raise TypeError(f"cannot compare Scalar with {type(other).__name__}")
        x, y, d, _ = coerced
        if d is not None:
            if x.imag != 0 or y.imag != 0:
                raise TypeError("ordering is only defined for real values")
            x, y = x.real, y.real
        return x, y

    def __lt__(self, other):
        x, y = self._real_key(other)
        return x < y

    def __le__(self, other):
        x, y = self._real_key(other)
        return x <= y

    def __gt__(self, other):
        x, y = self._real_key(other)
        return x > y

    def __ge__(self, other):
        x, y = self._real_key(other)
        return x >= y

    # -- parts and elementary functions -------------------------------------

    @property
    def real(self) -> Scalar:
        if self.digits is None:
            return self
        return Scalar._raw(self.ctx.mpc(self.value.real), self.digits, self.mixed)

    @property
    def imag(self) -> Scalar:
        if self.digits is None:
            return Scalar._raw(Fraction(0), None, self.mixed)
        return Scalar._raw(self.ctx.mpc(self.value.imag), self.digits, self.mixed)

    def conjugate(self) -> Scalar:
        if self.digits is None:
            return self
        return Scalar._raw(self.ctx.conj(self.value), self.digits, self.mixed)

    def sqrt(self, digits: int | None = None) -> Scalar:
        """Principal square root.

        Exact inputs stay exact when they are perfect squares of
        non-negative rationals; otherwise ``digits`` selects the
        complex-float result precision (required).
        """
        if self.digits is None:
            root = _exact_sqrt(self.value)
            if root is not None:
                return Scalar._raw(root, None, self.mixed)
            if digits is None:
                raise ModeError(f"sqrt({self}) is not rational; pass digits for a float result")
            return self.to_complex(digits).sqrt()
        return Scalar._raw(self.ctx.sqrt(self.value), self.digits, self.mixed)

    def float_value(self):
        """mpc value (float mode only)."""
        if self.digits is None:
            raise ModeError("exact scalar has no float value; convert first")
        return self.value

    def __complex__(self):
        return complex(self.value)

    def __float__(self):
        if not self.is_real():
            raise TypeError("complex scalar has no float value")
        return float(self.value.real) if self.digits is not None else float(self.value)

    def scaled_by_power_of_two(self, k: int) -> Scalar:
        """Multiply by 2**k without rounding (float mode)."""
        if self.digits is None:
            return Scalar._raw(self.value * Fraction(2) ** k, None, self.mixed)
        ctx = self.ctx
        return Scalar._raw(self.value * ctx.ldexp(ctx.mpf(1), k), self.digits, self.mixed)

    def magnitude_bits(self) -> int | None:
        """Approximate log2|x| (None for zero); float mode."""
        if self.value == 0:
            return None
        if self.digits is None:
            q = abs(self.value)
            return q.numerator.bit_length() - q.denominator.bit_length()
        return int(self.ctx.mag(self.value))

    # -- text --------------------------------------------------------------

    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        return f"Scalar({format_scalar(self)!r}{'' if self.digits is None else f', digits={self.digits}'})"

    def __reduce__(self):
        if self.digits is None:
            return (Scalar, (self.value, None, self.mixed))
        return (_from_parts, (self.value._mpc_, self.digits, self.mixed))


def _from_parts(parts, digits, mixed):
    return Scalar._raw(context(digits).make_mpc(parts), digits, mixed)


def _divide(x, y):
    if y == 0:
        raise ZeroDivisionError("scalar division by zero")
    return x / y


def _exact_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    from math import isqrt

    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


# -- functions that only make sense on complex floats --------------------------


def _float_pair(x: Scalar, y: Scalar):
    x._check_mode(y)
    if x.digits is None:
        raise ModeError("operation requires complex-float scalars")
    d = min(x.digits, y.digits)
    ctx = context(d)
    return ctx, _to_mpc(x.value, ctx), _to_mpc(y.value, ctx), d, x.mixed or y.mixed or x.digits != y.digits


def cpow(base: Scalar, exponent: Scalar) -> Scalar:
    """base**exponent with the principal logarithm: exp(exponent*log(base)).

    ``0**e`` is 0 when Re(e) > 0 and an error otherwise.
    """
    ctx, b, e, d, mixed = _float_pair(base, exponent)
    if b == 0:
        if e.real > 0:
            return Scalar._raw(ctx.mpc(0), d, mixed)
        raise ValueError("0**e needs Re(e) > 0")
    return Scalar._raw(ctx.exp(e * ctx.log(b)), d, mixed)


def clog(x: Scalar) -> Scalar:
    return Scalar._raw(x.ctx.log(x.float_value()), x.digits, x.mixed)


def cgamma(x: Scalar) -> Scalar:
    return Scalar._raw(x.ctx.gamma(x.float_value()), x.digits, x.mixed)


# -- text forms ----------------------------------------------------------------

_NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?:/\d+)?"
_BIG_RATIONAL = re.compile(r"\d+(?:/\d+)?")
_TERM = re.compile(rf"([+-]?)({_NUM})?(i)?(?:/(\d+))?")


def _split_terms(text: str) -> list[str]:
    parts, start = [], 0
    for k in range(1, len(text)):
        if text[k] in "+-" and text[k - 1] not in "eE":
            parts.append(text[start:k])
            start = k
    parts.append(text[start:])
    return parts


def parse_parts(text: str) -> tuple[Fraction, Fraction]:
    """Parse scalar text into exact (real, imaginary) parts.

    Accepted forms: ``p``, ``p/q``, decimals with optional exponent, and
    complex sums such as ``1.5-2i``, ``i/2``, ``-i``, ``3+1/2i``.
    """
    if not isinstance(text, str):
        raise ParseError(f"scalar must be given as a string, got {type(text).__name__}")
    s = text.strip().replace(" ", "")
    if not s:
        raise ParseError("empty scalar text")
    re_part, im_part = Fraction(0), Fraction(0)
    for token in _split_terms(s):
        m = _TERM.fullmatch(token)
        if not m or (m.group(2) is None and m.group(3) is None):
            raise ParseError(f"malformed scalar text {text!r}")
        sign, num, unit, div = m.groups()
        if div is not None and unit is None:
            raise ParseError(f"malformed scalar text {text!r}")
        try:
            if num is None:
                value = Fraction(1)
            elif _BIG_RATIONAL.fullmatch(num):
                p, _, q = num.partition("/")
                value = Fraction(_str_int(p), _str_int(q) if q else 1)
            else:
                value = Fraction(num)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"malformed scalar text {text!r}") from exc
        if div is not None:
            if int(div) == 0:
                raise ParseError(f"zero divisor in {text!r}")
            value /= int(div)
        if sign == "-":
            value = -value
        if unit:
            im_part += value
        else:
            re_part += value
    return re_part, im_part


def is_rational_text(text: str) -> bool:
    return parse_parts(text)[1] == 0


def parse_scalar(text: str, digits: int | None = None) -> Scalar:
    re_part, im_part = parse_parts(text)
    if digits is None:
        if im_part != 0:
            raise ParseError(f"{text!r} is complex; exact-rational mode holds real rationals only")
        return Scalar(re_part)
    return Scalar.complex(re_part, im_part, digits)


_CHUNK = 1000


def _int_str(n: int) -> str:
    """Decimal text of an int of any size (str() refuses very large ints)."""
    if n < 0:
        return "-" + _int_str(-n)
    if n < 10**_CHUNK:
        return str(n)
    half = len(_int_str_rough(n)) // 2
    hi, lo = divmod(n, 10**half)
    return _int_str(hi) + _int_str(lo).rjust(half, "0")


def _int_str_rough(n: int) -> str:
    # only the length matters: digits ~ bits * log10(2)
    return "0" * max(int(n.bit_length() * 0.30103), 1)


def _str_int(s: str) -> int:
    if len(s) <= _CHUNK:
        return int(s)
    half = len(s) // 2
    return _str_int(s[:-half]) * 10**half + _str_int(s[-half:])


def _fmt_float(ctx, x) -> str:
    # repr_dps digits guarantee a lossless text round trip
    n = mpmath.libmp.repr_dps(ctx.prec)
    s = ctx.nstr(x, n, min_fixed=-5, max_fixed=n + 1)
    if s.endswith(".0"):
        s = s[:-2]
    return s


def format_scalar(x: Scalar) -> str:
    if x.digits is None:
        q = x.value
        num = _int_str(q.numerator)
        return num if q.denominator == 1 else f"{num}/{_int_str(q.denominator)}"
    ctx = x.ctx
    re_s = _fmt_float(ctx, x.value.real)
    if x.value.imag == 0:
        return re_s
    im = x.value.imag
    im_s = _fmt_float(ctx, abs(im))
    return f"{re_s}{'-' if im < 0 else '+'}{im_s}i"


SHORT_TEXT = 60


def short_text(x: Scalar, digits: int = 20) -> str:
    """``format_scalar`` unless an exact value's text is long; then ``~`` plus a decimal approximation."""
    if x.digits is not None:
        return format_scalar(x)
    q = x.value
    if q.numerator.bit_length() + q.denominator.bit_length() < SHORT_TEXT * 3:
        text = format_scalar(x)
        if len(text) <= SHORT_TEXT:
            return text
    ctx = context(max(digits, MIN_DIGITS))
    approx = ctx.mpf(q.numerator) / q.denominator
    return "~" + ctx.nstr(approx, digits, min_fixed=-5, max_fixed=digits + 1)


def approx_text(x: Scalar, digits: int = 6) -> str:
    """Short decimal rendering for human reading (lossy)."""
    if x.digits is None:
        ctx = context(MIN_DIGITS)
        v = ctx.mpf(x.value.numerator) / x.value.denominator
    else:
        ctx, v = x.ctx, x.value
    re_s = ctx.nstr(ctx.re(v), digits)
    im = ctx.im(v)
    if im == 0:
        return re_s
    return f"{re_s}{'-' if im < 0 else '+'}{ctx.nstr(abs(im), digits)}i"
