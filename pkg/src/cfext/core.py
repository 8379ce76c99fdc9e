"""Coefficient sources, canonical convergents, tails and equivalence transforms."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Sequence

from .errors import DomainError, ParseError, SourceExhausted
from .scalar import Scalar, format_scalar, parse_scalar

Term = tuple[Scalar, Scalar]


@dataclass(frozen=True)
class CoefficientSource:
    """b0 + K(a_n/b_n) given by a pure term function.

    ``term_fn(n)`` must return the same ``(a_n, b_n)`` for the same ``n``.
    ``length`` is ``None`` for unbounded sources.
    """

    b0: Scalar
    term_fn: Callable[[int], Term] = field(repr=False)
    length: int | None = None
    descriptor: Mapping = field(default_factory=dict, compare=False)

    def term(self, n: int) -> Term:
        if n < 1:
            raise IndexError(f"terms are indexed from 1, got {n}")
        if self.length is not None and n > self.length:
            raise SourceExhausted(f"source has {self.length} terms; term {n} requested")
        return self.term_fn(n)

    def terms(self, count: int) -> list[Term]:
        return [self.term(n) for n in range(1, count + 1)]

    @property
    def digits(self) -> int | None:
        return self.b0.digits

    def has_terms(self, n: int) -> bool:
        return self.length is None or n <= self.length


def from_terms(b0: Scalar, terms: Sequence[Term], descriptor: Mapping | None = None) -> CoefficientSource:
    """Finite source from an explicit list of ``(a_n, b_n)`` pairs."""
    frozen = tuple((a, b) for a, b in terms)
    if descriptor is None:
        descriptor = {"b0": format_scalar(b0), "terms": [[format_scalar(a), format_scalar(b)] for a, b in frozen]}
    return CoefficientSource(b0, lambda n: frozen[n - 1], len(frozen), descriptor)


class memoized:
    """Thread-safe memo table for a term function computed by forward recursion.

    ``step(n, previous)`` receives the list of already computed values
    ``[v_1, ..., v_{n-1}]``.
    """

    def __init__(self, step):
        self._step = step
        self._values: list = []
        self._lock = threading.Lock()

    def __call__(self, n: int):
        with self._lock:
            while len(self._values) < n:
                self._values.append(self._step(len(self._values) + 1, self._values))
            return self._values[n - 1]


@dataclass(frozen=True)
class ProjectiveValue:
    """A point A : B of the extended complex plane."""

    A: Scalar
    B: Scalar

    def __post_init__(self):
        if self.A.is_zero() and self.B.is_zero():
            raise ValueError("projective value 0:0 is undefined")

    @property
    def is_infinite(self) -> bool:
        return self.B.is_zero()

    def value(self) -> Scalar | None:
        """A/B, or ``None`` at infinity."""
        return None if self.B.is_zero() else self.A / self.B

    def same_point(self, other: ProjectiveValue) -> bool:
        return (self.A * other.B - other.A * self.B).is_zero()

    def __str__(self):
        v = self.value()
        return "inf" if v is None else format_scalar(v)


@dataclass(frozen=True)
class Convergent:
    """Canonical numerator/denominator state after N terms.

    ``renorm_log`` counts the power of two removed from both pairs; it is
    always 0 in exact mode.
    """

    N: int
    A: Scalar
    A_prev: Scalar
    B: Scalar
    B_prev: Scalar
    renorm_log: int = 0

    @property
    def projective(self) -> ProjectiveValue:
        return ProjectiveValue(self.A, self.B)

    def value(self) -> Scalar | None:
        return None if self.B.is_zero() else self.A / self.B


def _window_bits(digits: int) -> int:
    # 10**(digits/2) expressed in bits
    return int(digits * 3.3219280948873626 / 2)


def iter_convergents(src: CoefficientSource, N_max: int, renormalize: bool = True) -> Iterator[Convergent]:
    """Yield convergents N = 0..N_max from A_{-1}=1, B_{-1}=0, A_0=b_0, B_0=1."""
    if N_max < 0:
        raise ValueError("N_max must be >= 0")
    if not src.has_terms(N_max):
        raise SourceExhausted(f"source has {src.length} terms; {N_max} requested")
    b0 = src.b0
    one, zero = b0.like(1), b0.like(0)
    A_prev, A, B_prev, B = one, b0, zero, one
    shift = 0
    window = _window_bits(b0.digits) if (renormalize and b0.digits is not None) else None
    yield Convergent(0, A, A_prev, B, B_prev, 0)
    for n in range(1, N_max + 1):
        a, b = src.term(n)
        A_prev, A = A, b * A + a * A_prev
        B_prev, B = B, b * B + a * B_prev
        if window is not None:
            mags = [m for m in (A.magnitude_bits(), B.magnitude_bits()) if m is not None]
            top = max(mags) if mags else None
            if top is not None and (top > window or top < -window):
                A, A_prev = A.scaled_by_power_of_two(-top), A_prev.scaled_by_power_of_two(-top)
                B, B_prev = B.scaled_by_power_of_two(-top), B_prev.scaled_by_power_of_two(-top)
                shift += top
        yield Convergent(n, A, A_prev, B, B_prev, shift)


def convergents(src: CoefficientSource, N_max: int, renormalize: bool = True) -> list[Convergent]:
    return list(iter_convergents(src, N_max, renormalize))


def value_at(src: CoefficientSource, N: int) -> ProjectiveValue:
    last = None
    for last in iter_convergents(src, N):
        pass
    return last.projective


def approximants(src: CoefficientSource, N_max: int) -> list[Scalar | None]:
    """f_0..f_{N_max}; ``None`` where B_N = 0."""
    return [c.value() for c in iter_convergents(src, N_max)]


def determinant_residual(src: CoefficientSource, N: int) -> tuple[Scalar, Scalar]:
    """Residuals of the two determinant identities at index N.

    A_N B_{N-1} - A_{N-1} B_N = (-1)^{N-1} prod_{i<=N} a_i
    A_{N+1} B_{N-1} - A_{N-1} B_{N+1} = (-1)^{N-1} b_{N+1} prod_{i<=N} a_i
    """
    if N < 1:
        raise ValueError("determinant identities need N >= 1")
    conv = convergents(src, N + 1, renormalize=False)
    prod = src.b0.like(1)
    for n in range(1, N + 1):
        prod = prod * src.term(n)[0]
    sign = 1 if (N - 1) % 2 == 0 else -1
    c_N, c_N1 = conv[N], conv[N + 1]
    first = c_N.A * c_N.B_prev - c_N.A_prev * c_N.B - sign * prod
    b_next = src.term(N + 1)[1]
    second = c_N1.A * c_N.B_prev - c_N.A_prev * c_N1.B - sign * b_next * prod
    return first, second


def approximant_gap(src: CoefficientSource, N: int) -> Scalar:
    """f_N - f_{N-1} via (-1)^{N-1} prod a_i / (B_N B_{N-1})."""
    if N < 1:
        raise ValueError("gap needs N >= 1")
    conv = convergents(src, N, renormalize=False)
    B, B_prev = conv[N].B, conv[N].B_prev
    if B.is_zero() or B_prev.is_zero():
        raise ZeroDivisionError(f"approximant at N={N if B.is_zero() else N - 1} is infinite; gap undefined")
    prod = src.b0.like(1)
    for n in range(1, N + 1):
        prod = prod * src.term(n)[0]
    sign = 1 if (N - 1) % 2 == 0 else -1
    return sign * prod / (B * B_prev)


def tail(src: CoefficientSource, m: int) -> CoefficientSource:
    """K_{n>=m}(a_n/b_n) as a source with b0 = 0 (tail(src, 1) drops only b0)."""
    if m < 1:
        raise ValueError("tail index m must be >= 1")
    if src.length is not None and m > src.length:
        raise SourceExhausted(f"tail({m}) of a {src.length}-term source")
    length = None if src.length is None else src.length - m + 1
    desc = {"transform": "tail", "m": m, "of": dict(src.descriptor)}
    return CoefficientSource(src.b0.like(0), lambda n: src.term(n + m - 1), length, desc)


def equivalence_transform(src: CoefficientSource, r: Callable[[int], Scalar]) -> CoefficientSource:
    """a'_n = r(n) r(n-1) a_n, b'_n = r(n) b_n with r(0) = 1; approximants are unchanged."""

    def r_checked(n):
        if n == 0:
            return src.b0.like(1)
        v = r(n)
        if v.is_zero():
            raise DomainError(f"equivalence factor r({n}) is zero")
        return v

    def term(n):
        a, b = src.term(n)
        rn = r_checked(n)
        return rn * r_checked(n - 1) * a, rn * b

    desc = {"transform": "equivalence", "of": dict(src.descriptor)}
    return CoefficientSource(src.b0, term, src.length, desc)


def fold_prefix(src: CoefficientSource, m: int, tail_value: Scalar) -> Scalar | None:
    """Collapse b0 + a_1/(b_1 + ... + a_{m-1}/(b_{m-1} + t)) from the bottom up.

    ``t`` is the value of ``tail(src, m)``.  Returns ``None`` if the result
    is infinite.
    """
    value: Scalar | None = tail_value
    for n in range(m - 1, 0, -1):
        a, b = src.term(n)
        if value is None:
            value = b.like(0)
            continue
        denom = b + value
        value = None if denom.is_zero() else a / denom
    if value is None:
        return None
    return src.b0 + value


# -- serialization -------------------------------------------------------------

FamilyBuilder = Callable[[Mapping[str, str], "int | None"], CoefficientSource]
_FAMILIES: dict[str, FamilyBuilder] = {}
_TRANSFORM_LOADERS: dict[str, Callable] = {}


def register_family(name: str):
    def deco(fn: FamilyBuilder) -> FamilyBuilder:
        _FAMILIES[name] = fn
        return fn

    return deco


def register_transform(name: str):
    def deco(fn):
        _TRANSFORM_LOADERS[name] = fn
        return fn

    return deco


def family_names() -> list[str]:
    return sorted(_FAMILIES)


def family_source(name: str, params: Mapping[str, str], digits: int | None = None) -> CoefficientSource:
    try:
        builder = _FAMILIES[name]
    except KeyError:
        raise ParseError(f"unknown family {name!r}") from None
    return builder(params, digits)


@register_family("golden")
def _golden(params, digits):
    if params:
        raise ParseError("family 'golden' takes no parameters")
    one = Scalar(1, digits)
    return CoefficientSource(
        one - 1, lambda n: (one, one), None, {"family": "golden", "params": {}}
    )


@register_family("constant")
def _constant(params, digits):
    unknown = set(params) - {"a", "b"}
    if unknown or "a" not in params:
        raise ParseError("family 'constant' takes params a (required) and b (default 1)")
    a = parse_scalar(params["a"], digits)
    b = parse_scalar(params.get("b", "1"), digits)
    return CoefficientSource(
        a.like(0), lambda n: (a, b), None, {"family": "constant", "params": dict(params)}
    )


def source_from_json(obj: Mapping, digits: int | None = None) -> CoefficientSource:
    """Build a source from its JSON descriptor.

    ``{"b0": s, "terms": [[a1, b1], ...]}``, ``{"b0": s, "family": name,
    "params": {...}}`` or ``{"transform": kind, "of": <source>}``.
    ``digits=None`` selects exact-rational mode.
    """
    if not isinstance(obj, Mapping):
        raise ParseError("source must be a JSON object")
    if "transform" in obj:
        kind = obj["transform"]
        loader = _TRANSFORM_LOADERS.get(kind.split(":")[0] if isinstance(kind, str) else None)
        if loader is None:
            raise ParseError(f"unknown transform {kind!r}")
        return loader(obj, digits)
    if "terms" in obj:
        extra = set(obj) - {"b0", "terms"}
        if extra:
            raise ParseError(f"unexpected keys in source: {sorted(extra)}")
        pairs = obj["terms"]
        if not isinstance(pairs, list) or not all(isinstance(p, list) and len(p) == 2 for p in pairs):
            raise ParseError("'terms' must be a list of [a, b] pairs")
        b0 = parse_scalar(obj.get("b0", "0"), digits)
        terms = [(parse_scalar(a, digits), parse_scalar(b, digits)) for a, b in pairs]
        return from_terms(b0, terms, {"b0": obj.get("b0", "0"), "terms": [list(p) for p in pairs]})
    if "family" in obj:
        extra = set(obj) - {"b0", "family", "params"}
        if extra:
            raise ParseError(f"unexpected keys in source: {sorted(extra)}")
        params = obj.get("params", {})
        if not isinstance(params, Mapping) or not all(isinstance(v, str) for v in params.values()):
            raise ParseError("family params must map names to scalar strings")
        src = family_source(obj["family"], params, digits)
        if "b0" in obj:
            b0 = parse_scalar(obj["b0"], digits)
            desc = dict(src.descriptor)
            desc["b0"] = obj["b0"]
            src = CoefficientSource(b0, src.term_fn, src.length, desc)
        return src
    raise ParseError("source needs one of 'terms', 'family' or 'transform'")


@register_transform("tail")
def _load_tail(obj, digits):
    m = obj.get("m")
    if not isinstance(m, int) or isinstance(m, bool):
        raise ParseError("tail transform needs integer 'm'")
    if "of" not in obj:
        raise ParseError("transform 'tail' needs 'of'")
    return tail(source_from_json(obj["of"], digits), m)


def source_to_json(src: CoefficientSource) -> dict:
    """Descriptor of ``src`` with ``b0`` filled in where the format carries it."""
    desc = dict(src.descriptor)
    if "transform" not in desc:
        desc = {"b0": format_scalar(src.b0), **{k: v for k, v in desc.items() if k != "b0"}}
    return desc


def sources_agree(x: CoefficientSource, y: CoefficientSource, count: int) -> bool:
    """Term-by-term equality of b0 and the first ``count`` terms."""
    if x.b0 != y.b0:
        return False
    return all(x.term(n) == y.term(n) for n in range(1, count + 1))
