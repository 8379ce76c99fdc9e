"""Acceptance criteria 1-13, one test per criterion.

Each test records a single PASS/FAIL line (printed in the pytest terminal
summary, and to stdout when run as a script) and then asserts.  Tolerances
are the stated ones; nothing here is loosened to make a criterion pass.
"""

import cmath
import json
import random
import shutil
import subprocess
import sys
import time
from fractions import Fraction

import mpmath
import pytest

from cfext.convergence import ConvergenceCertificate, lange_find_params, worpitzky_check
from cfext.core import approximants, determinant_residual, family_source, from_terms, sources_agree
from cfext.identities import (
    entry10_lange_params,
    entry12_unit_form,
    entry13_footnote,
    hill_ratio,
    hyp2f1_partial_sum,
    proof_extension,
    verify,
    cf_source,
)
from cfext.scalar import Scalar
from cfext.transforms import ExtensionScheme, bernoulli_cf, contraction_for, euler_cf, even_part, extend, odd_part

from conftest import ACCEPTANCE_LINES, bottom_up, random_rational, random_source, same_point


class Criterion:
    def __init__(self, number, title):
        self.number, self.title = number, title
        self.checks = []

    def check(self, name, ok, detail=""):
        self.checks.append((name, bool(ok), detail))
        return ok

    def finish(self):
        failed = [(n, d) for n, ok, d in self.checks if not ok]
        status = "PASS" if not failed else "FAIL"
        line = f"criterion {self.number:>2}: {status}  {self.title} ({len(self.checks) - len(failed)}/{len(self.checks)} checks)"
        if failed:
            line += "  failed: " + "; ".join(f"{n} {d}".strip() for n, d in failed[:4])
            if len(failed) > 4:
                line += f"; ... {len(failed) - 4} more"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert not failed, line


def S(x, digits=None):
    return Scalar(Fraction(x), digits)


def below(x, tol):
    """|x| < tol with tol given as decimal text; x may be exact or float."""
    return x is not None and abs(x) < (S(Fraction(tol)) if x.digits is None else Scalar.parse(tol, x.digits))


def fmt(x):
    return "None" if x is None else mpmath.nstr(mpmath.mpf(complex(x).real) if x.is_real() else complex(x), 3)


def test_criterion_01_contraction_subsequence():
    c = Criterion(1, "even/odd parts reproduce f_2k / f_2k+1 on 500 random sources in < 10 s")
    rng = random.Random(1)
    t0 = time.perf_counter()
    bad = 0
    for _ in range(500):
        src, b0, terms = random_source(rng, 15)
        ev = approximants(even_part(src), 7)
        od = approximants(odd_part(src), 7)
        ok = all(same_point(bottom_up(b0, terms, 2 * k), ev[k]) for k in range(8))
        ok &= all(same_point(bottom_up(b0, terms, 2 * k + 1), od[k]) for k in range(8))
        bad += not ok
    elapsed = time.perf_counter() - t0
    c.check("subsequence", bad == 0, f"{bad} sources mismatched")
    c.check("runtime", elapsed < 10, f"{elapsed:.1f}s")
    c.finish()


def test_criterion_02_round_trip_extensions():
    c = Criterion(2, "cor1/cor2/cor7 extensions contract back to 200 random targets")
    rng = random.Random(2)
    for kind in ("cor1", "cor2", "cor7"):
        bad = 0
        for _ in range(200):
            if kind == "cor7":
                src, b0, _ = random_source(rng, 12, unit_b=True)
                if b0 == 0:
                    src = from_terms(S(random_rational(rng)), src.terms(12))
            else:
                src, _, _ = random_source(rng, 12)
            back = contraction_for(kind)(extend(src, ExtensionScheme(kind)))
            bad += not sources_agree(back, src, 12)
        c.check(kind, bad == 0, f"{bad}/200 mismatched")
    c.finish()


def test_criterion_03_determinant_identity():
    c = Criterion(3, "determinant residuals (0,0) for N <= 25, sign (-1)^(N-1)")
    rng = random.Random(3)
    bad = 0
    for _ in range(60):
        src, _, _ = random_source(rng, 26)
        for N in range(1, 26):
            r1, r2 = determinant_residual(src, N)
            bad += not (r1.is_zero() and r2.is_zero())
    c.check("residuals", bad == 0, f"{bad} nonzero")
    c.finish()


def test_criterion_04_entry7():
    c = Criterion(4, "Entry 7 / 7a within 1e-20 at depth 40 (50 digits); odd approximants of the extension are 1")
    for x in ("1", "1/2", "2+i"):
        r = verify("entry7", {"x": x}, depth=40, precision_digits=50, tol="1e-20", mode="float")
        c.check(f"entry7 x={x}", below(r.abs_diff, "1e-20"), fmt(r.abs_diff))
    sequences = [
        {"y_kind": "constant", "value": "5"},
        {"y_kind": "linear", "slope": "2", "offset": "1"},
        {"y_kind": "geometric", "first": "1", "ratio": "2"},
    ]
    for p in sequences:
        r = verify("entry7a", p, depth=40, precision_digits=50, tol="1e-20", mode="float")
        c.check(f"entry7a {p['y_kind']}", below(r.abs_diff, "1e-20"), fmt(r.abs_diff))
        f = approximants(proof_extension("entry7a", p), 81)
        c.check(f"odd=1 {p['y_kind']}", all(f[k] == S(1) for k in range(1, 82, 2)))
    c.finish()


def test_criterion_05_entry9():
    c = Criterion(5, "Entry 9 within 1e-15 at depth 500 on 6 pairs; a=0, |x|=2 empirically")
    grid = [("1", "2"), ("1/2", "3"), ("2", "1/3"), ("3/2", "-1/2"), ("1", "10"), ("1+i", "1/2")]
    for a, x in grid:
        r = verify("entry9", {"a": a, "x": x}, depth=500, tol="1e-15")
        c.check(f"(a,x)=({a},{x})", below(r.abs_diff, "1e-15") and r.passed, fmt(r.abs_diff))
    for x in ("2", "-2"):
        r = verify("entry9", {"a": "0", "x": x}, depth=500, tol="1e-15")
        c.check(f"a=0 x={x}", r.passed, fmt(r.abs_diff))
    c.finish()


def test_criterion_06_entry10():
    c = Criterion(6, "Entry 10 passes with abs_diff < 1e-20 for n = 1..6; interior b = 0 handled projectively")
    for n in range(1, 7):
        r = verify("entry10", {"n": str(n)}, tol="1e-20")
        c.check(f"n={n}", r.passed and below(r.abs_diff, "1e-20") and r.estimate is not None, fmt(r.abs_diff))
    c.finish()


def test_criterion_07_entry12():
    c = Criterion(7, "Entry 12 within 1e-15 at depth 300; odd approximants of the unit-numerator form are 1 to depth 81")
    for a, x in (("1", "1"), ("2", "1/2"), ("1", "1+i")):
        r = verify("entry12", {"a": a, "x": x}, depth=300, tol="1e-15")
        c.check(f"(a,x)=({a},{x})", below(r.abs_diff, "1e-15"), f"abs_diff={fmt(r.abs_diff)}")
        digits = None if "i" not in x else 50
        f = approximants(entry12_unit_form({"a": a, "x": x}, digits), 81)
        if digits is None:
            ok = all(f[k] == S(1) for k in range(1, 82, 2))
        else:
            ok = all(below(f[k] - 1, "1e-45") for k in range(1, 82, 2))
        c.check(f"odd=1 ({a},{x})", ok)
    c.finish()


def test_criterion_08_entry13():
    c = Criterion(8, "Entry 13 with one-level extrapolation; a=b and d=0 at 1e-10; footnote (2,1,1) -> b")
    for a, b, d in (("1", "2", "1"), ("1", "3", "2")):
        r = verify("entry13", {"a": a, "b": b, "d": d}, depth=10_000, tol="1e-3")
        c.check(f"({a},{b},{d})", below(r.abs_diff, "1e-3"), fmt(r.abs_diff))
    r = verify("entry13", {"a": "1", "b": "1", "d": "1"}, depth=10_000, tol="1e-10")
    c.check("a=b (1,1,1)", below(r.abs_diff, "1e-10"), f"abs_diff={fmt(r.abs_diff)}")
    r = verify("entry13", {"a": "1", "b": "2", "d": "0"}, depth=10_000, tol="1e-10")
    c.check("d=0 (1,2,0)", below(r.abs_diff, "1e-10"), fmt(r.abs_diff))
    r = entry13_footnote(depth=10_000)
    c.check("footnote -> 1", below(r.estimate - Scalar(1, 50), "1e-3"), fmt(r.estimate))
    c.finish()


def test_criterion_09_rogers_ramanujan():
    c = Criterion(9, "|bb(q,alpha) - rr(q)| < 1e-30 at depth 200 (50 digits); bb_even = even_part(bb) for 40 terms")
    for q in ("0.1", "-0.4", "0.3+0.2i"):
        for alpha in ("0", "1/2", "i/2"):
            r = verify("bb", {"q": q, "alpha": alpha}, depth=200, precision_digits=50, tol="1e-30", mode="float")
            c.check(f"q={q} alpha={alpha}", below(r.abs_diff, "1e-30"), fmt(r.abs_diff))
            ev = cf_source("bb_even", {"q": q, "alpha": alpha}, 50)
            ep = even_part(cf_source("bb", {"q": q, "alpha": alpha}, 50))
            same = ev.b0 == ep.b0 and all(
                below(x - y, "1e-48") for k in range(1, 41) for x, y in zip(ev.term(k), ep.term(k))
            )
            c.check(f"bb_even q={q} alpha={alpha}", same)
    for q in ("1/10", "-2/5"):
        ev, ep = cf_source("bb_even", {"q": q, "alpha": "0"}), even_part(cf_source("bb", {"q": q, "alpha": "0"}))
        c.check(f"bb_even exact q={q}", sources_agree(ev, ep, 40))
    c.finish()


def test_criterion_10_certificates():
    c = Criterion(10, "Worpitzky boundary, Lange sandwich on 100 samples, worked Lange parameters exact")
    half = S(Fraction(1, 2))
    for a in ("1/4", "-1/4"):
        src = family_source("constant", {"a": a})
        cert = worpitzky_check(src, 100)
        fs = approximants(src, 100)[1:]
        c.check(f"worpitzky {a}", isinstance(cert, ConvergenceCertificate) and all(abs(f) < half for f in fs))
    rng = random.Random(10)
    bad = 0
    for _ in range(100):
        z = cmath.rect(10 ** rng.uniform(-2, 2), rng.uniform(-3.1, 3.1))
        alpha, rho = lange_find_params(Scalar.complex(Fraction(z.real), Fraction(z.imag), 50))
        bad += not (abs(alpha) < rho < abs(alpha + 1))
    c.check("sandwich", bad == 0, f"{bad}/100")
    alpha, rho = lange_find_params(S(1))
    c.check("entry9 a=1", alpha == S(Fraction(1, 2), 50) and rho == (S(5, 50) / 4).sqrt())
    alpha, rho = entry10_lange_params(3)
    c.check("entry10 m=3", alpha == S(Fraction(1, 4)) and rho == S(Fraction(3, 4)))
    c.finish()


def test_criterion_11_hill_and_partial_sums():
    c = Criterion(11, "hill_ratio within 0.05 of 1 at k=1e4; partial sums match direct summation on 50 sets")
    for abc in ((1, 2, 2), (1, 1, 2)):
        r = hill_ratio(*(S(v) for v in abc), 10**4)
        c.check(f"hill {abc}", abs(r - 1) < Scalar.parse("0.05", 50), f"ratio={fmt(r)}")
    rng = random.Random(11)
    mp = mpmath.MPContext()
    mp.dps = 70
    bad = 0
    for t in range(50):
        k = rng.randint(1, 100)
        if t % 2 == 0:
            a, b, c_ = (Fraction(rng.randint(1, 30), rng.randint(1, 6)) for _ in range(3))
            direct, term = Fraction(1), Fraction(1)
            for i in range(k):
                term = term * (a + i) * (b + i) / ((c_ + i) * (i + 1))
                direct += term
            bad += hyp2f1_partial_sum(S(a), S(b), S(c_), k).value != direct
        else:
            z = [mp.mpc(rng.uniform(-3, 3), rng.uniform(-3, 3)) for _ in range(3)]
            args = [Scalar.complex(Fraction(float(v.real)), Fraction(float(v.imag)), 50) for v in z]
            zz = [mp.mpc(mp.mpf(Fraction(float(v.real)).numerator) / Fraction(float(v.real)).denominator,
                         mp.mpf(Fraction(float(v.imag)).numerator) / Fraction(float(v.imag)).denominator) for v in z]
            direct = mp.fsum(mp.rf(zz[0], i) * mp.rf(zz[1], i) / (mp.rf(zz[2], i) * mp.factorial(i)) for i in range(k + 1))
            ours = hyp2f1_partial_sum(*args, k)
            scale = max(mp.fsum(abs(mp.rf(zz[0], i) * mp.rf(zz[1], i) / (mp.rf(zz[2], i) * mp.factorial(i))) for i in range(k + 1)), 1)
            bad += abs(mp.mpc(ours.value) - direct) > mp.mpf(10) ** -45 * scale
    c.check("partial sums", bad == 0, f"{bad}/50 mismatched")
    c.finish()


def test_criterion_12_bernoulli_euler():
    c = Criterion(12, "bernoulli_cf reproduces K_N, euler_cf reproduces partial sums, both agree on 100 series")
    rng = random.Random(12)
    bad_b = bad_e = bad_agree = 0
    for _ in range(100):
        a = [S(random_rational(rng, nonzero=False))] + [S(random_rational(rng)) for _ in range(9)]
        sums, acc = [], S(0)
        for v in a:
            acc = acc + v
            sums.append(acc)
        bad_b += approximants(bernoulli_cf(sums), 9) != sums
        bad_e += approximants(euler_cf(a), 9) != sums
        bad_agree += approximants(bernoulli_cf(sums), 9) != approximants(euler_cf(a), 9)
    c.check("bernoulli", bad_b == 0, f"{bad_b}")
    c.check("euler", bad_e == 0, f"{bad_e}")
    c.check("agree", bad_agree == 0, f"{bad_agree}")
    c.finish()


def _cf(*args):
    exe = shutil.which("cf")
    cmd = [exe, *args] if exe else [sys.executable, "-m", "cfext.cli", *args]
    return subprocess.run(cmd, capture_output=True, text=True, check=False)


def test_criterion_13_cli(tmp_path):
    c = Criterion(13, "CLI determinism and exit-status matrix end to end")
    argv = ["sweep", "bb", "--grid", "q=0.1,0.2,0.3", "--grid", "alpha=0,1/2,i/2", "--jobs", "3"]
    first, second = _cf(*argv), _cf(*argv)
    c.check("sweep exit 0", first.returncode == 0, str(first.returncode))
    c.check("byte-identical", first.stdout == second.stdout and first.stdout != "")
    lines = first.stdout.splitlines()
    c.check("9 records + header", len(lines) == 10 and all(json.loads(l)["verdict"] == "pass" for l in lines[1:]))
    spec = tmp_path / "bad.json"
    spec.write_text('{"action":"eval","source":{"b0":"0","terms":[["1","1"]]},"depth":"5"}')
    matrix = [
        (["verify", "entry10", "--param", "n=3", "--depth", "100", "--tol", "1e-20"], 0),
        (["certify", "--source", '{"family":"constant","params":{"a":"0.3"}}', "--criterion", "worpitzky"], 1),
        (["verify", "entry12", "--param", "a=1", "--param", "x=1", "--depth", "100", "--tol", "1e-15"], 1),
        (["eval", "--spec", str(spec)], 2),
        (["eval", "--source", '{"family":"unknown"}'], 2),
        (["verify", "entry9", "--param", "a=1", "--param", "x=-2"], 2),
    ]
    for args, expected in matrix:
        proc = _cf(*args)
        c.check(f"{args[0]}->{expected}", proc.returncode == expected, f"got {proc.returncode}")
    c.finish()


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
