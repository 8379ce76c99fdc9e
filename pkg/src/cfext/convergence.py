"""Convergence certificates (Worpitzky, Lange, Wall-style) and empirical limits.

Certificates are depth-stamped evidence: the inequalities were checked for
every index up to ``depth``.  They are marked ``exhaustive`` only when the
coefficients are constant, so that the finite check covers every index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .core import CoefficientSource, ProjectiveValue, iter_convergents, tail
from .errors import DomainError
from .scalar import Scalar, parse_scalar, short_text

DEFAULT_DIGITS = 50


@dataclass(frozen=True)
class ConvergenceCertificate:
    criterion: str
    start_index: int
    depth: int
    witness: dict
    exhaustive: bool = False

    verdict = "certified"

    def to_json(self) -> dict:
        return {
            "criterion": self.criterion,
            "verdict": self.verdict,
            "start_index": self.start_index,
            "depth": self.depth,
            "exhaustive": self.exhaustive,
            "witness": {k: _text(v) for k, v in self.witness.items()},
        }


@dataclass(frozen=True)
class Refusal:
    """A criterion that does not apply, with the first failing index and inequality."""

    criterion: str
    index: int | None
    inequality: str
    observed: Scalar | None = None
    depth: int = 0

    verdict = "refused"

    def to_json(self) -> dict:
        return {
            "criterion": self.criterion,
            "verdict": self.verdict,
            "depth": self.depth,
            "index": self.index,
            "inequality": self.inequality,
            "observed": None if self.observed is None else short_text(self.observed),
        }


def _text(v):
    if isinstance(v, Scalar):
        return short_text(v)
    if isinstance(v, (list, tuple)):
        return [_text(x) for x in v]
    return v


def _is_constant_family(src: CoefficientSource) -> bool:
    return src.descriptor.get("family") == "constant"


# -- Worpitzky ------------------------------------------------------------------


def worpitzky_check(src: CoefficientSource, depth: int, start: int = 1):
    """Certify K(a_n/1) from index ``start`` when |a_n| <= 1/4 up to ``depth``.

    Also checks that every approximant of that tail lies in |w| < 1/2 and
    records the largest modulus seen.  ``src.b0`` is ignored.
    """
    body = tail(src, start)
    quarter, half = body.b0.like(Fraction(1, 4)), body.b0.like(Fraction(1, 2))
    sup_a = body.b0.like(0)
    for n in range(1, depth + 1):
        a, b = body.term(n)
        if b != 1:
            raise DomainError(
                f"worpitzky_check needs unit denominators; b_{n + start - 1} = {b} "
                "(apply equivalence_transform first)"
            )
        mag = abs(a)
        if mag > quarter:
            return Refusal("worpitzky", n + start - 1, "|a_n| <= 1/4", mag, depth)
        sup_a = max(sup_a, mag)
    max_mod = body.b0.like(0)
    for conv in iter_convergents(body, depth):
        if conv.N == 0:
            continue
        f = conv.value()
        if f is None or abs(f) >= half:
            return Refusal("worpitzky", conv.N, "|f_N| < 1/2", None if f is None else abs(f), depth)
        max_mod = max(max_mod, abs(f))
    witness = {"sup_abs_a": sup_a, "max_abs_approximant": max_mod}
    return ConvergenceCertificate("worpitzky", start, depth, witness, _is_constant_family(src))


# -- Lange ----------------------------------------------------------------------


def _as_float(x, digits):
    if isinstance(x, Scalar):
        return x if x.digits is not None else x.to_complex(digits)
    if isinstance(x, str):
        return parse_scalar(x, digits)
    return Scalar(x, digits)


def _slack(digits: int) -> Scalar:
    return Scalar(Fraction(1, 10 ** (digits - 2)), digits)


def lange_check(
    c: Callable[[int], Scalar],
    alpha,
    rho,
    depth: int,
    digits: int | None = None,
    start: int = 1,
):
    """Twin-region test for K(c_n^2/1).

    Certificate iff |alpha| < rho < |alpha+1| and, for n = 1..depth,
    |c_{2n-1} +- i alpha| <= rho and |c_{2n} +- i(1+alpha)| >= rho.  The
    non-strict inequalities allow a relative slack of 10**(2-digits) so the
    equality case survives rounding.
    """
    if digits is None:
        digits = next((x.digits for x in (alpha, rho) if isinstance(x, Scalar) and x.digits), DEFAULT_DIGITS)
    alpha, rho = _as_float(alpha, digits), _as_float(rho, digits)
    i = Scalar.complex(0, 1, digits)
    tol = rho * _slack(digits)
    if not (abs(alpha) < rho):
        return Refusal("lange", None, "|alpha| < rho", abs(alpha), depth)
    if not (rho < abs(alpha + 1)):
        return Refusal("lange", None, "rho < |alpha+1|", abs(alpha + 1), depth)
    worst_odd = Scalar(0, digits)
    best_even = None
    for n in range(1, depth + 1):
        c_odd = _as_float(c(2 * n - 1), digits)
        for sign in (1, -1):
            m = abs(c_odd + sign * i * alpha)
            if m > rho + tol:
                return Refusal("lange", 2 * n - 1, f"|c_(2n-1) {'+' if sign > 0 else '-'} i*alpha| <= rho", m, depth)
            worst_odd = max(worst_odd, m)
        c_even = _as_float(c(2 * n), digits)
        for sign in (1, -1):
            m = abs(c_even + sign * i * (1 + alpha))
            if m < rho - tol:
                return Refusal("lange", 2 * n, f"|c_(2n) {'+' if sign > 0 else '-'} i*(1+alpha)| >= rho", m, depth)
            best_even = m if best_even is None else min(best_even, m)
    witness = {
        "alpha": alpha,
        "rho": rho,
        "max_odd_distance": worst_odd,
        "min_even_distance": best_even,
        "slack": tol,
    }
    return ConvergenceCertificate("lange", start, depth, witness)


def lange_find_params(a, digits: int | None = None) -> tuple[Scalar, Scalar]:
    """Witness (alpha, rho) for odd coefficients c_{2k-1} = sqrt(1/a).

    With sqrt(1/a) = c + i d (principal root, c > 0):
    alpha = ((c^2+d^2)/2)(1 + i d/c),
    rho = sqrt(((c^2+d^2)/(4c^2)) ((c^2+d^2)^2 + 4c^2)).
    """
    if digits is None:
        digits = a.digits if isinstance(a, Scalar) and a.digits else DEFAULT_DIGITS
    a = _as_float(a, digits)
    if a.is_zero():
        raise DomainError("a = 0 has no square root of 1/a")
    root = (1 / a).sqrt()
    c, d = root.real, root.imag
    if not (c > 0):
        raise DomainError(f"a = {a} lies on the excluded ray (-inf, 0]")
    i = Scalar.complex(0, 1, digits)
    r2 = c * c + d * d
    alpha = (r2 / 2) * (1 + i * d / c)
    rho = ((r2 / (4 * c * c)) * (r2 * r2 + 4 * c * c)).sqrt()
    tol = rho * _slack(digits)
    assert abs(alpha) < rho < abs(alpha + 1), "Lange sandwich failed"
    assert abs(abs(alpha + 1) - (rho * rho + 1).sqrt()) <= tol, "|alpha+1| != sqrt(rho^2+1)"
    return alpha, rho


def lange_tail_start(
    c_even: Callable[[int], Scalar],
    alpha,
    rho,
    window: int = 1000,
    max_start: int = 10**6,
    digits: int | None = None,
) -> int:
    """Smallest m with |c_even(j) +- i(1+alpha)| >= rho for j = m .. m+window-1.

    ``c_even(j)`` is the even-position coefficient indexed so that the tail
    starting at ``m`` uses j = m, m+1, ...
    """
    if digits is None:
        digits = next((x.digits for x in (alpha, rho) if isinstance(x, Scalar) and x.digits), DEFAULT_DIGITS)
    alpha, rho = _as_float(alpha, digits), _as_float(rho, digits)
    shift = Scalar.complex(0, 1, digits) * (1 + alpha)
    m, run, j = 1, 0, 1
    while run < window:
        ce = _as_float(c_even(j), digits)
        if abs(ce + shift) >= rho and abs(ce - shift) >= rho:
            run += 1
        else:
            m, run = j + 1, 0
            if m > max_start:
                raise DomainError(f"no Lange tail start found below {max_start}")
        j += 1
    return m


# -- empirical limit ------------------------------------------------------------


@dataclass(frozen=True)
class LimitDiagnostics:
    depth: int
    last_index: int
    max_gap_final_quarter: Scalar | None
    even_last: Scalar | None
    odd_last: Scalar | None
    even_odd_diff: Scalar | None
    even_gap: Scalar | None
    odd_gap: Scalar | None
    max_abs_approximant: Scalar
    max_abs_even_numerator: Scalar
    infinite_count: int
    decay: str
    decay_exponent: float | None
    converged: bool
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        out = {}
        for k, v in self.__dict__.items():
            out[k] = _text(v) if not isinstance(v, float) else round(v, 6)
        return out


def log_abs(x: Scalar) -> float:
    """log|x| as a float, safe for exact values far outside the float range."""
    if x.digits is None:
        q = abs(x.value)
        return math.log(q.numerator) - math.log(q.denominator)
    return float(x.ctx.log(abs(x.value)))


def classify_decay(g_mid: Scalar | None, g_end: Scalar | None, n_mid: int, n_end: int):
    """Rough decay class from two gap magnitudes: 'exact', 'geometric', 'algebraic' or 'stalled'."""
    if g_end is None or g_mid is None:
        return "unknown", None
    if g_end.is_zero():
        return "exact", None
    if g_mid.is_zero():
        return "stalled", None
    drop = log_abs(g_mid) - log_abs(g_end)
    p = drop / math.log(n_end / n_mid) if n_end > n_mid else None
    if p is None:
        return "unknown", None
    if p > 20:
        return "geometric", p
    if p > 0.2:
        return "algebraic", p
    return "stalled", p


def as_tolerance(tol, like: Scalar) -> Scalar:
    if isinstance(tol, Scalar):
        return tol if tol.digits == like.digits else (tol.to_complex(like.digits) if like.digits else tol)
    if isinstance(tol, str):
        return parse_scalar(tol, like.digits)
    return like.like(Fraction(tol))


def empirical_limit(src: CoefficientSource, depth: int, tol) -> tuple[ProjectiveValue, LimitDiagnostics]:
    """Last finite approximant plus Cauchy and even/odd diagnostics.

    ``converged`` is set iff the last finite even- and odd-indexed
    approximants differ by less than ``tol``.
    """
    if depth < 4:
        raise ValueError("empirical_limit needs depth >= 4")
    tol = as_tolerance(tol, src.b0)
    quarter_start = depth - depth // 4
    n_mid = depth // 2
    zero = src.b0.like(0)
    last_conv = None
    prev_f = None
    last_f = {0: None, 1: None}
    last_gap = {0: None, 1: None}
    max_gap = None
    max_abs = zero
    max_a_even = zero
    infinite = 0
    g_mid = g_end = None
    for conv in iter_convergents(src, depth):
        N = conv.N
        if N >= 2 and N % 2 == 0:
            max_a_even = max(max_a_even, abs(src.term(N)[0]))
        f = conv.value()
        if f is None:
            infinite += 1
            prev_f = None
            continue
        last_conv = conv
        max_abs = max(max_abs, abs(f))
        par = N % 2
        if last_f[par] is not None:
            last_gap[par] = abs(f - last_f[par])
        last_f[par] = f
        if prev_f is not None:
            gap = abs(f - prev_f)
            if N >= quarter_start:
                max_gap = gap if max_gap is None else max(max_gap, gap)
            if N <= n_mid:
                g_mid = gap
            g_end = gap
        prev_f = f
    if last_conv is None:
        raise ZeroDivisionError("every approximant is at infinity")
    even, odd = last_f[0], last_f[1]
    diff = abs(even - odd) if (even is not None and odd is not None) else None
    decay, p = classify_decay(g_mid, g_end, max(n_mid, 1), depth)
    diag = LimitDiagnostics(
        depth=depth,
        last_index=last_conv.N,
        max_gap_final_quarter=max_gap,
        even_last=even,
        odd_last=odd,
        even_odd_diff=diff,
        even_gap=last_gap[0],
        odd_gap=last_gap[1],
        max_abs_approximant=max_abs,
        max_abs_even_numerator=max_a_even,
        infinite_count=infinite,
        decay=decay,
        decay_exponent=p,
        converged=diff is not None and diff < tol,
    )
    return last_conv.projective, diag


def wall_check(src: CoefficientSource, depth: int, tol):
    """Wall-style empirical certificate: bounded approximants, bounded even
    numerators, and even/odd parts agreeing to ``tol`` at ``depth``."""
    estimate, diag = empirical_limit(src, depth, tol)
    if not diag.converged:
        return Refusal("wall-empirical", depth, "|even - odd| < tol", diag.even_odd_diff, depth)
    witness = {
        "M": diag.max_abs_approximant,
        "L": diag.max_abs_even_numerator,
        "subsequence": "even indices",
        "even_odd_diff": diag.even_odd_diff,
        "estimate": estimate.value(),
    }
    return ConvergenceCertificate("wall-empirical", 1, depth, witness)
