"""Even/odd contractions, the four extension schemes, Bernoulli/Euler transforms
and zero-denominator collapse."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .core import (
    CoefficientSource,
    from_terms,
    memoized,
    register_transform,
    source_from_json,
)
from .errors import ContractionError, ParseError
from .scalar import Scalar, format_scalar, parse_scalar

SCHEMES = ("cor1", "cor2", "cor3", "cor7")


def _nonzero_b(src: CoefficientSource, n: int, what: str) -> Scalar:
    b = src.term(n)[1]
    if b.is_zero():
        raise ContractionError(f"{what} does not exist: b_{n} = 0")
    return b


def even_part(src: CoefficientSource) -> CoefficientSource:
    """Canonical contraction with C_k = A_{2k}, D_k = B_{2k}.

    Terms are produced lazily; b_{2k} != 0 is checked only for the terms
    actually requested.
    """

    def term(k):
        if k == 1:
            a1, b1 = src.term(1)
            a2, b2 = src.term(2)
            _nonzero_b(src, 2, "even part")
            return b2 * a1, b2 * b1 + a2
        b_lo = _nonzero_b(src, 2 * k - 2, "even part")
        a_lo = src.term(2 * k - 2)[0]
        a_mid, b_mid = src.term(2 * k - 1)
        a_hi, b_hi = src.term(2 * k)
        if b_hi.is_zero():
            raise ContractionError(f"even part does not exist: b_{2 * k} = 0")
        return -a_lo * a_mid * b_hi / b_lo, a_hi + b_mid * b_hi + a_mid * b_hi / b_lo

    length = None if src.length is None else src.length // 2
    desc = {"transform": "even", "of": dict(src.descriptor)}
    return CoefficientSource(src.b0, term, length, desc)


def odd_part(src: CoefficientSource) -> CoefficientSource:
    """Canonical contraction with C_0 = A_1/B_1, C_k = A_{2k+1}, D_k = B_{2k+1}."""
    a1, b1 = src.term(1)
    if b1.is_zero():
        raise ContractionError("odd part does not exist: b_1 = 0")

    def term(k):
        if k == 1:
            a2, b2 = src.term(2)
            a3, b3 = src.term(3)
            _nonzero_b(src, 3, "odd part")
            return -a1 * a2 * b3 / b1, b1 * (a3 + b2 * b3) + a2 * b3
        b_lo = _nonzero_b(src, 2 * k - 1, "odd part")
        a_lo = src.term(2 * k - 1)[0]
        a_mid, b_mid = src.term(2 * k)
        a_hi, b_hi = src.term(2 * k + 1)
        if b_hi.is_zero():
            raise ContractionError(f"odd part does not exist: b_{2 * k + 1} = 0")
        num = -a_lo * a_mid * b_hi / b_lo
        if k == 2:
            # the first denominator above carries an extra factor b_1
            num = num * b1
        return num, a_hi + b_mid * b_hi + a_mid * b_hi / b_lo

    length = None if src.length is None else (src.length - 1) // 2
    desc = {"transform": "odd", "of": dict(src.descriptor)}
    return CoefficientSource((src.b0 * b1 + a1) / b1, term, length, desc)


@dataclass(frozen=True)
class ExtensionScheme:
    """Which extension to build.

    cor1, cor2 and cor7 derive everything from the target.  cor3 needs the
    a-sequence of the target written as ``b0 + a1/(b1+a2) - a2 a3/(a4+a3) - ...``
    in ``params``: ``{"b1": Scalar, "a": callable n -> Scalar}`` (or a list
    under ``"a"`` for a finite sequence).
    """

    kind: str
    params: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in SCHEMES:
            raise ParseError(f"unknown extension scheme {self.kind!r}; expected one of {SCHEMES}")


def _target_terms(target: CoefficientSource):
    def c(n):
        return target.term(n)[0]

    def d(n):
        return target.term(n)[1]

    return c, d


def _extend_cor1(target):
    c, d = _target_terms(target)
    L = target.length

    def c_or_zero(n):
        # past the end of a finite target the phantom c_{L+1} = 0 keeps the last term intact
        return target.b0.like(0) if (L is not None and n > L) else c(n)

    def term(n):
        if n == 1:
            return c(1), d(1) - c_or_zero(2)
        k, r = divmod(n, 2)
        one = target.b0.like(1)
        if r == 0:
            return c_or_zero(k + 1), one
        return -one, d(k + 1) - c_or_zero(k + 2) + 1

    return term, None if L is None else 2 * L


def _extend_cor2(target):
    c, d = _target_terms(target)
    L = target.length

    def term(n):
        one = target.b0.like(1)
        if n == 1:
            return c(1), d(1) + 1
        k, r = divmod(n, 2)
        if r == 0:
            return -one, one
        return c(k + 1), d(k + 1) - c(k + 1) + 1

    return term, None if L is None else 2 * L


def _cor3_sequence(scheme, target):
    try:
        b1 = scheme.params["b1"]
        a = scheme.params["a"]
    except KeyError:
        raise ContractionError("cor3 needs params 'b1' and the a-sequence 'a'") from None
    if callable(a):
        return b1, a, None
    seq = tuple(a)
    return b1, (lambda n: seq[n - 1]), len(seq)


def _cor3_target(b0, b1, a, count):
    """The contracted form b0 + a1/(b1+a2) - a2a3/(a4+a3) - ... (first ``count`` terms)."""
    out = [(a(1), b1 + a(2))]
    for k in range(2, count + 1):
        out.append((-a(2 * k - 2) * a(2 * k - 1), a(2 * k) + a(2 * k - 1)))
    return out


def _extend_cor3(target, scheme, check_terms=8):
    b1, a, a_len = _cor3_sequence(scheme, target)
    L = a_len
    count = check_terms if L is None else min(check_terms, L // 2)
    if target.length is not None:
        count = min(count, target.length)
    expected = _cor3_target(target.b0, b1, a, count)
    for k, (want, got) in enumerate(zip(expected, target.terms(count)), start=1):
        if want != got:
            raise ContractionError(f"target term {k} is {got}, cor3 a-sequence gives {want}")

    def term(n):
        if n == 1:
            return a(1), b1
        return a(n), b1.like(1 if n % 2 == 0 else 0)

    return term, L


def _extend_cor7(target):
    zero = target.b0.like(0)

    def step(n, prev):
        # c_1 = b0 and c_{n} = a_{n-1} / c_{n-1} from the numerators c_{n-1} c_n
        if n == 1:
            value = target.b0
        else:
            a, b = target.term(n - 1)
            if b != 1:
                raise ContractionError(f"cor7 target needs unit denominators; b_{n - 1} = {b}")
            if prev[-1].is_zero():
                raise ContractionError(f"cor7 target has c_{n - 1} = 0")
            value = a / prev[-1]
        return value

    c = memoized(step)
    L = target.length

    def term(n):
        one = target.b0.like(1)
        if n == 1:
            return c(1), one
        k, r = divmod(n, 2)
        return (-c(k + 1) if r == 0 else c(k + 1)), one

    return zero, term, None if L is None else 2 * L + 1


def extend(target: CoefficientSource, scheme: ExtensionScheme) -> CoefficientSource:
    """A continued fraction whose even part (cor1/cor2/cor3) or odd part (cor7) is ``target``."""
    b0 = target.b0
    if scheme.kind == "cor1":
        term, length = _extend_cor1(target)
    elif scheme.kind == "cor2":
        term, length = _extend_cor2(target)
    elif scheme.kind == "cor3":
        term, length = _extend_cor3(target, scheme)
    else:
        b0, term, length = _extend_cor7(target)
    desc = {"transform": f"extend:{scheme.kind}", "of": dict(target.descriptor)}
    if scheme.kind == "cor3":
        desc["b1"] = format_scalar(scheme.params["b1"])
        a = scheme.params["a"]
        if not callable(a):
            desc["a"] = [format_scalar(v) for v in a]
    return CoefficientSource(b0, term, length, desc)


def contraction_for(scheme_kind: str) -> Callable[[CoefficientSource], CoefficientSource]:
    return odd_part if scheme_kind == "cor7" else even_part


def bernoulli_cf(K: Sequence[Scalar]) -> CoefficientSource:
    """Finite CF whose N-th approximant is K_N."""
    K = tuple(K)
    if not K:
        raise ValueError("need at least K_0")
    for i in range(1, len(K)):
        if K[i] == K[i - 1]:
            raise ContractionError(f"K_{i} == K_{i - 1}; consecutive values must differ")
    terms = []
    for n in range(1, len(K)):
        if n == 1:
            terms.append((K[1] - K[0], K[0].like(1)))
        elif n == 2:
            terms.append((K[1] - K[2], K[2] - K[0]))
        else:
            terms.append(((K[n - 2] - K[n - 3]) * (K[n - 1] - K[n]), K[n] - K[n - 2]))
    desc = {"transform": "bernoulli", "K": [format_scalar(k) for k in K]}
    return from_terms(K[0], terms, desc)


def euler_cf(a: Sequence[Scalar]) -> CoefficientSource:
    """Finite CF whose N-th approximant is a_0 + ... + a_N."""
    a = tuple(a)
    if not a:
        raise ValueError("need at least a_0")
    for i in range(1, len(a)):
        if a[i].is_zero():
            raise ContractionError(f"a_{i} = 0; partial sums must differ")
    terms = []
    for n in range(1, len(a)):
        if n == 1:
            terms.append((a[1], a[0].like(1)))
        elif n == 2:
            terms.append((-a[2], a[2] + a[1]))
        else:
            terms.append((-a[n - 2] * a[n], a[n] + a[n - 1]))
    desc = {"transform": "euler", "a": [format_scalar(x) for x in a]}
    return from_terms(a[0], terms, desc)


def collapse_zeros(src: CoefficientSource) -> CoefficientSource:
    """Merge every interior zero denominator: 1/(x + 1/(0 + 1/(y + T))) = 1/((x+y) + T).

    Needs a finite source with unit partial numerators.  A zero at b_1
    merges into b_0.
    """
    if src.length is None:
        raise ValueError("collapse_zeros needs a finite source")
    pairs = src.terms(src.length)
    for n, (a, _) in enumerate(pairs, start=1):
        if a != 1:
            raise ContractionError(f"collapse_zeros needs unit numerators; a_{n} = {a}")
    bs = [src.b0] + [b for _, b in pairs]
    j = 1
    while j < len(bs):
        if bs[j].is_zero():
            if j == len(bs) - 1:
                raise ContractionError("trailing zero denominator has no successor to merge")
            bs[j - 1:j + 2] = [bs[j - 1] + bs[j + 1]]
            j = max(j - 1, 1)
        else:
            j += 1
    one = src.b0.like(1)
    desc = {"transform": "collapse", "of": dict(src.descriptor)}
    return from_terms(bs[0], [(one, b) for b in bs[1:]], desc)


# -- descriptor loaders --------------------------------------------------------


def _of(obj, digits):
    if "of" not in obj:
        raise ParseError(f"transform {obj['transform']!r} needs 'of'")
    return source_from_json(obj["of"], digits)


@register_transform("even")
def _load_even(obj, digits):
    return even_part(_of(obj, digits))


@register_transform("odd")
def _load_odd(obj, digits):
    return odd_part(_of(obj, digits))


@register_transform("extend")
def _load_extend(obj, digits):
    kind = obj["transform"].partition(":")[2]
    params = {}
    if kind == "cor3":
        try:
            params = {
                "b1": parse_scalar(obj["b1"], digits),
                "a": [parse_scalar(v, digits) for v in obj["a"]],
            }
        except KeyError as exc:
            raise ParseError(f"extend:cor3 needs {exc.args[0]!r}") from None
    return extend(_of(obj, digits), ExtensionScheme(kind, params))


@register_transform("bernoulli")
def _load_bernoulli(obj, digits):
    return bernoulli_cf([parse_scalar(v, digits) for v in obj.get("K", [])])


@register_transform("euler")
def _load_euler(obj, digits):
    return euler_cf([parse_scalar(v, digits) for v in obj.get("a", [])])


@register_transform("collapse")
def _load_collapse(obj, digits):
    return collapse_zeros(_of(obj, digits))
