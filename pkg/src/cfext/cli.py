"""``cf`` command line: evaluate, contract, extend, certify, verify and sweep.

Exit status: 0 on success or pass, 1 on a failed verification or refused
certificate, 2 on invalid input.  Records go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Annotated, Any, Literal, Optional

from pydantic import AfterValidator, BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from . import identities
from .convergence import Refusal, lange_check, wall_check, worpitzky_check
from .core import CoefficientSource, iter_convergents, source_from_json, source_to_json
from .errors import CFError
from .scalar import approx_text, format_scalar, is_rational_text, parse_parts, parse_scalar
from .transforms import SCHEMES, ExtensionScheme, even_part, extend, odd_part

ACTIONS = ("eval", "contract", "extend", "certify", "verify", "sweep")
EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

try:
    from importlib.metadata import version as _dist_version

    VERSION = _dist_version("artifact")
except Exception:  # pragma: no cover - running from a source tree
    VERSION = "0+unknown"


class InputError(Exception):
    """Invalid job specification; ``path`` is a JSON pointer into the spec."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path or '/'}: {message}")
        self.path = path


def _scalar_text(value: str) -> str:
    parse_parts(value)
    return value


def _param_text(value: str) -> str:
    # bare words (entry7a's y_kind) pass through; everything else must be a scalar
    return value if value.isalpha() and value != "i" else _scalar_text(value)


ScalarText = Annotated[str, AfterValidator(_scalar_text)]
ParamText = Annotated[str, AfterValidator(_param_text)]


class Scheme(BaseModel):
    model_config = ConfigDict(extra="forbid", strict=True)
    kind: Literal["cor1", "cor2", "cor3", "cor7"]
    b1: Optional[ScalarText] = None
    a: Optional[list[ScalarText]] = None

    @model_validator(mode="after")
    def _cor3(self):
        if self.kind == "cor3" and (self.b1 is None or self.a is None):
            raise ValueError("cor3 needs b1 and a")
        return self


class JobSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", strict=True)

    action: Literal["eval", "contract", "extend", "certify", "verify", "sweep"]
    source: Optional[dict[str, Any]] = None
    id: Optional[str] = None
    params: dict[str, ParamText] = Field(default_factory=dict)
    depth: int = 200
    precision_digits: int = 50
    tol: ScalarText = "1e-30"
    mode: Literal["auto", "exact", "float"] = "auto"
    kind: Optional[Literal["even", "odd"]] = None
    scheme: Optional[Scheme] = None
    terms: int = 10
    criterion: Optional[Literal["worpitzky", "lange", "wall"]] = None
    start: int = 1
    alpha: Optional[ScalarText] = None
    rho: Optional[ScalarText] = None
    grid: Optional[dict[str, list[ParamText]]] = None
    override: bool = False
    format: Literal["json", "csv", "table"] = "json"

    @field_validator("depth", "terms", "start")
    @classmethod
    def _positive(cls, v):
        if v < 1:
            raise ValueError("must be >= 1")
        return v

    @field_validator("precision_digits")
    @classmethod
    def _digits(cls, v):
        if v < 30:
            raise ValueError("must be >= 30")
        return v

    @model_validator(mode="after")
    def _requirements(self):
        needs_source = self.action in ("eval", "contract", "extend", "certify")
        if needs_source and self.source is None:
            raise InputError("/source", f"action {self.action!r} needs a source")
        if self.action in ("verify", "sweep"):
            if self.id is None:
                raise InputError("/id", f"action {self.action!r} needs an identity id")
            if self.id not in (*identities.IDENTITY_IDS, identities.FOOTNOTE_ID):
                raise InputError("/id", f"unknown identity id {self.id!r}")
        if self.action == "contract" and self.kind is None:
            raise InputError("/kind", "contract needs kind 'even' or 'odd'")
        if self.action == "extend" and self.scheme is None:
            raise InputError("/scheme", "extend needs a scheme")
        if self.action == "certify":
            if self.criterion is None:
                raise InputError("/criterion", "certify needs a criterion")
            if self.criterion == "lange" and (self.alpha is None or self.rho is None):
                raise InputError("/alpha" if self.alpha is None else "/rho", "lange needs alpha and rho")
        if self.action == "sweep" and not self.grid:
            raise InputError("/grid", "sweep needs a non-empty grid")
        if self.grid:
            for k, values in self.grid.items():
                if not values:
                    raise InputError(f"/grid/{k}", "empty value list")
        if self.source is not None:
            try:
                source_from_json(self.source, self.precision_digits)
            except CFError as exc:
                raise InputError("/source", str(exc)) from None
        return self


def _pointer(loc) -> str:
    return "".join(f"/{part}" for part in loc)


def parse_spec(text: str | dict) -> JobSpec:
    """Validate a JSON job spec; raises :class:`InputError` with a JSON-pointer path."""
    if isinstance(text, str):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError("", f"malformed JSON: {exc}") from None
    else:
        data = text
    if not isinstance(data, dict):
        raise InputError("", "spec must be a JSON object")
    try:
        return JobSpec.model_validate(data)
    except InputError:
        raise
    except ValidationError as exc:
        err = exc.errors()[0]
        ctx_err = (err.get("ctx") or {}).get("error")
        if isinstance(ctx_err, InputError):
            raise ctx_err from None
        msg = err["msg"]
        if err["type"] == "int_type":
            msg = "must be an integer" + (", not a string" if isinstance(err.get("input"), str) else "")
        raise InputError(_pointer(err["loc"]), msg) from None


def resolved(job: JobSpec) -> dict:
    return job.model_dump(mode="json", exclude_none=True)


# -- actions ----------------------------------------------------------------------


def _load_source(job: JobSpec, depth: int) -> CoefficientSource:
    if job.mode != "float" and depth <= identities.EXACT_DEPTH_LIMIT:
        try:
            src = source_from_json(job.source, None)
            if src.has_terms(1):
                src.term(1)
            return src
        except CFError:
            if job.mode == "exact":
                raise
    return source_from_json(job.source, job.precision_digits)


def _terms_record(src: CoefficientSource, count: int) -> dict:
    n = count if src.length is None else min(count, src.length)
    return {
        "b0": format_scalar(src.b0),
        "terms": [[format_scalar(a), format_scalar(b)] for a, b in src.terms(n)],
        "descriptor": source_to_json(src),
    }


def run_eval(job: JobSpec):
    src = _load_source(job, job.depth)
    depth = job.depth if src.length is None else min(job.depth, src.length)
    last = None
    for last in iter_convergents(src, depth):
        pass
    value = last.value()
    record = {
        "action": "eval",
        "depth": depth,
        "mode": src.b0.mode,
        "value": "inf" if value is None else format_scalar(value),
    }
    return [record], EXIT_OK


def run_contract(job: JobSpec):
    src = _load_source(job, 2 * job.terms + 1)
    part = even_part(src) if job.kind == "even" else odd_part(src)
    record = {"action": "contract", "kind": job.kind, **_terms_record(part, job.terms)}
    return [record], EXIT_OK


def run_extend(job: JobSpec):
    src = _load_source(job, job.terms)
    params = {}
    if job.scheme.kind == "cor3":
        digits = src.b0.digits
        params = {"b1": parse_scalar(job.scheme.b1, digits), "a": [parse_scalar(v, digits) for v in job.scheme.a]}
    ext = extend(src, ExtensionScheme(job.scheme.kind, params))
    record = {"action": "extend", "scheme": job.scheme.kind, **_terms_record(ext, job.terms)}
    return [record], EXIT_OK


def run_certify(job: JobSpec):
    src = _load_source(job, job.depth)
    depth = job.depth if src.length is None else min(job.depth, src.length - job.start + 1)
    if job.criterion == "worpitzky":
        result = worpitzky_check(src, depth, start=job.start)
    elif job.criterion == "wall":
        result = wall_check(src, depth, parse_scalar(job.tol, src.b0.digits))
    else:
        digits = job.precision_digits
        fsrc = src if src.b0.digits else source_from_json(job.source, digits)

        def c(n):
            a, b = fsrc.term(job.start + n - 1)
            if not (b - 1).is_zero():
                raise CFError(f"lange needs unit denominators; b_{job.start + n - 1} = {format_scalar(b)}")
            return a.sqrt()

        half = depth // 2
        result = lange_check(
            c, parse_scalar(job.alpha, digits), parse_scalar(job.rho, digits), half, digits, start=job.start
        )
    record = {"action": "certify", **result.to_json()}
    return [record], EXIT_FAIL if isinstance(result, Refusal) else EXIT_OK


def _verify_record(report: identities.VerificationReport) -> dict:
    return {"action": "verify", **report.to_json()}


def run_verify(job: JobSpec):
    report = identities.verify(
        job.id, job.params, job.depth, job.precision_digits, job.tol, job.mode, job.override
    )
    return [_verify_record(report)], EXIT_OK if report.passed else EXIT_FAIL


def sweep_cells(job: JobSpec) -> list[dict]:
    keys = list(job.grid)
    return [{**job.params, **dict(zip(keys, combo))} for combo in itertools.product(*(job.grid[k] for k in keys))]


def run_sweep(job: JobSpec, jobs: int = 1):
    cells = sweep_cells(job)

    def one(params):
        return identities.verify(
            job.id, params, job.depth, job.precision_digits, job.tol, job.mode, job.override
        )

    with ThreadPoolExecutor(max_workers=max(jobs, 1)) as pool:
        reports = list(pool.map(one, cells))
    ok = all(r.passed for r in reports)
    return [_verify_record(r) for r in reports], EXIT_OK if ok else EXIT_FAIL


def run(job: JobSpec, jobs: int = 1):
    """Execute a validated job; returns (records, exit status)."""
    if job.action == "sweep":
        return run_sweep(job, jobs)
    return {
        "eval": run_eval,
        "contract": run_contract,
        "extend": run_extend,
        "certify": run_certify,
        "verify": run_verify,
    }[job.action](job)


# -- output ----------------------------------------------------------------------


def _flat(record: dict) -> dict:
    return {k: (v if isinstance(v, str) or v is None else json.dumps(v)) for k, v in record.items()}


def _approx(text: str | None) -> str:
    if not text or text in ("infinity", "inf"):
        return text or ""
    return approx_text(parse_scalar(text, None if is_rational_text(text) and "." not in text else 60), 12)


def _rows(job: JobSpec, records: list[dict], short: bool = False) -> tuple[list[str], list[list[str]]]:
    if job.action in ("verify", "sweep"):
        cols = list(identities.VerificationReport.CSV_COLUMNS)
        rows = []
        show = _approx if short else (lambda t: t or "")
        for r in records:
            params = ";".join(f"{k}={v}" for k, v in r["params"].items())
            digits = "" if r["precision_digits"] is None else str(r["precision_digits"])
            rows.append([r["id"], params, str(r["depth"]), digits, show(r["target"]), show(r["estimate"]), show(r["abs_diff"]), r["verdict"]])
        return cols, rows
    cols = list(records[0])
    return cols, [[("" if v is None else str(v)) for v in _flat(r).values()] for r in records]


def render(job: JobSpec, records: list[dict], header: bool = True) -> str:
    out = io.StringIO()
    head = {"cf": VERSION, "spec": resolved(job)}
    if job.format == "json":
        if header:
            out.write(json.dumps({"header": head}) + "\n")
        for r in records:
            out.write(json.dumps(r) + "\n")
        return out.getvalue()
    if header:
        out.write("# " + json.dumps(head) + "\n")
    cols, rows = _rows(job, records, short=job.format == "table")
    if job.format == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(cols)
        writer.writerows(rows)
        return out.getvalue()
    widths = [max(len(c), *(len(r[i]) for r in rows)) for i, c in enumerate(cols)]
    out.write("  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip() + "\n")
    for r in rows:
        out.write("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() + "\n")
    return out.getvalue()


# -- argument parsing ---------------------------------------------------------------


def _kv(text: str) -> tuple[str, str]:
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    return key, value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--spec", help="JSON job spec file ('-' for stdin)")
    g.add_argument("--depth", type=int)
    g.add_argument("--digits", type=int, dest="precision_digits", help="complex-float precision in decimal digits")
    g.add_argument("--tol")
    g.add_argument("--mode", choices=("auto", "exact", "float"))
    g.add_argument("--format", choices=("json", "csv", "table"))
    g.add_argument("--jobs", type=int, default=1, help="parallel sweep workers")
    g.add_argument("--no-header", action="store_true", help="omit the resolved-spec header")
    s = common.add_argument_group("job options")
    s.add_argument("--source", help="coefficient source as inline JSON")
    s.add_argument("--id", help="identity id")
    s.add_argument("--param", action="append", type=_kv, default=[], metavar="NAME=VALUE")
    s.add_argument("--kind", choices=("even", "odd"))
    s.add_argument("--scheme", choices=SCHEMES)
    s.add_argument("--b1", help="cor3: b1 of the target")
    s.add_argument("--a-seq", help="cor3: comma-separated a-sequence")
    s.add_argument("--terms", type=int, help="number of terms to print")
    s.add_argument("--criterion", choices=("worpitzky", "lange", "wall"))
    s.add_argument("--start", type=int)
    s.add_argument("--alpha")
    s.add_argument("--rho")
    s.add_argument("--grid", action="append", type=_kv, default=[], metavar="NAME=V1,V2,...")
    s.add_argument("--override", action="store_true", default=None, help="skip the validity predicate")

    parser = argparse.ArgumentParser(prog="cf", description="Continued fraction toolkit.")
    sub = parser.add_subparsers(dest="action", required=True)
    for name in ACTIONS:
        p = sub.add_parser(name, parents=[common])
        if name in ("verify", "sweep"):
            p.add_argument("ident", nargs="?", help="identity id (same as --id)")
    return parser


def spec_from_args(args) -> dict:
    data: dict = {}
    if args.spec:
        text = sys.stdin.read() if args.spec == "-" else open(args.spec, encoding="utf-8").read()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError("", f"malformed JSON in {args.spec}: {exc}") from None
        if not isinstance(data, dict):
            raise InputError("", "spec must be a JSON object")
        if data.get("action", args.action) != args.action:
            raise InputError("/action", f"spec action {data['action']!r} does not match subcommand {args.action!r}")
    data["action"] = args.action
    for key in ("depth", "precision_digits", "tol", "mode", "format", "id", "kind", "terms", "criterion", "start", "alpha", "rho", "override"):
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    if getattr(args, "ident", None):
        data["id"] = args.ident
    if args.source is not None:
        try:
            data["source"] = json.loads(args.source)
        except json.JSONDecodeError as exc:
            raise InputError("/source", f"malformed JSON: {exc}") from None
    if args.param:
        data["params"] = {**data.get("params", {}), **dict(args.param)}
    if args.grid:
        data["grid"] = {**data.get("grid", {}), **{k: v.split(",") for k, v in args.grid}}
    if args.scheme is not None:
        scheme = {"kind": args.scheme}
        if args.b1 is not None:
            scheme["b1"] = args.b1
        if args.a_seq is not None:
            scheme["a"] = args.a_seq.split(",")
        data["scheme"] = scheme
    return data


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        job = parse_spec(spec_from_args(args))
        records, status = run(job, args.jobs)
    except InputError as exc:
        print(f"cf: invalid spec: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CFError, OSError, ValueError, ZeroDivisionError) as exc:
        print(f"cf: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(render(job, records, header=not args.no_header))
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
