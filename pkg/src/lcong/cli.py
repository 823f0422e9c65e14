"""Command-line front end.

Subcommands:
    coeffs        build/inspect the integer coefficient cache for a form
    table-row     one twisted row: L*-rationals and 3-adic columns
    verify        consistency suite for (form, m): root numbers, rationality,
                  sigma/rho congruences, lambda bookkeeping, periods
    lambda        Iwasawa lambda-invariant with the per-place classification
    root-numbers  epsilon factors: closed formula vs the solved value

Exit codes: 0 all checks pass, 1 hard mismatch, 2 inconclusive at the
requested precision, 3 refused (projected work exceeds --budget).
"""

import argparse
import hashlib
import json
import math
import os
import sys
from fractions import Fraction

DEFAULT_BUDGET = 3 * 10 ** 7
_FORM_IDS = ("5w4", "7w4", "5w6", "121w4")

PASS, FAIL, INCONCLUSIVE, REFUSED = 0, 1, 2, 3


def fmt_factored(x):
    """Signed factored form: -2^5*5^3*7*13, fractions with a / part."""
    from .exact import factorize

    fr = Fraction(x)
    if fr == 0:
        return "0"
    sign = "-" if fr < 0 else ""

    def side(n):
        if n == 1:
            return "1"
        return "*".join(
            f"{q}^{e}" if e > 1 else str(q) for q, e in sorted(factorize(n).items())
        )

    num = side(abs(fr.numerator))
    if fr.denominator == 1:
        return sign + num
    den = side(fr.denominator)
    if "*" in den:
        den = f"({den})"
    return f"{sign}{num}/{den}"


def _stub_n(m):
    """Enough coefficients for local-factor lookups at the primes of m."""
    top = max([q for q in range(2, (m or 2) + 1) if (m or 2) % q == 0] or [2])
    return max(64, top + 1)


def _rep(kind, m):
    from . import artin

    if kind == "sigma":
        return artin.sigma_rep()
    if m is None:
        raise SystemExit("this command needs --m")
    return artin.rho_rep(m)


def _demand(form, rep, digits):
    """Coefficient count the AFE evaluation will request."""
    from . import afe, lfunc

    k = form.weight
    cond = lfunc.conductor_twisted(form, rep)
    A = math.sqrt(cond) / (2 * math.pi) ** 2
    wb = lfunc.work_bits(digits)
    return afe.plan_tail(A, float(1 / lfunc.TAU), k, list(range(1, k)), wb)[1] + 8


def _govern(form, rep, digits, budget, out):
    """Refuse up front when the twisted sum wants more than the budget."""
    from . import artin

    need = _demand(form, rep, digits)
    if need <= budget:
        return None
    feasible = []
    for m in range(2, 200):
        try:
            r = artin.rho_rep(m)
        except ValueError:
            continue
        if _demand(form, r, digits) <= budget:
            feasible.append(m)
    msg = (
        f"refused: {rep.label()} twist of {form.form_id} at digits={digits} "
        f"needs ~{need:,} coefficients (budget {budget:,})."
    )
    if feasible:
        msg += f" {len(feasible)} twists m < 200 fit at these settings, " \
               f"largest m = {max(feasible)}."
    else:
        msg += " No twist m < 200 fits; raise --budget or lower --digits."
    out["refusal"] = {"needed": need, "budget": budget}
    print(msg)
    return REFUSED


def _emit(args, out, code):
    out["exit"] = code
    if args.format == "json":
        print(json.dumps(out, indent=2, default=str))
    return code


# ---------------------------------------------------------------------------
# subcommands

def cmd_coeffs(args):
    from . import qseries

    out = {"command": "coeffs", "form": args.form}
    n = args.n or 1000
    if n > args.budget:
        print(f"refused: {n:,} coefficients exceeds budget {args.budget:,}")
        out["refusal"] = {"needed": n, "budget": args.budget}
        return _emit(args, out, REFUSED)
    f = qseries.build_form(args.form, n)
    head = [int(f.coeff(i)) for i in range(1, min(n, 30) + 1)]
    digest = hashlib.sha256(",".join(map(str, head)).encode()).hexdigest()
    out.update({
        "n_max": f.n_max,
        "layout": "hi/lo int64 pair" if f.wide else "int64",
        "a_1..a_30": head,
        "sha256_first30": digest,
    })
    if args.format != "json":
        print(f"{args.form}: {f.n_max} coefficients cached ({out['layout']})")
        print("a_1..a_30 :", " ".join(map(str, head)))
        print("sha256    :", digest)
    return _emit(args, out, PASS)


def _row_points(args, form, rho):
    """Shared by table-row and verify: lstar + 3-adic columns per n."""
    from . import artin, lfunc, padic

    k = form.weight
    sig = artin.sigma_rep()
    pts = []
    for n in range(1, k):
        st_r = lfunc.lstar(form, rho, n, args.digits)
        st_s = lfunc.lstar(form, sig, n, args.digits)
        if st_r.rational is None or st_s.rational is None:
            return pts, n
        ell_r = padic.script_l(form, rho, n, st_r.rational)
        ell_s = padic.script_l(form, sig, n, st_s.rational, m=rho.m)
        pts.append((n, st_r, st_s, ell_r, ell_s))
    return pts, None


def cmd_table_row(args):
    from . import lfunc, qseries

    out = {"command": "table-row", "form": args.form, "m": args.m}
    form = qseries.build_form(args.form, _stub_n(args.m))
    rho = _rep("rho", args.m)
    code = _govern(form, rho, args.digits, args.budget, out)
    if code is not None:
        return _emit(args, out, code)
    cond = lfunc.conductor_twisted(form, rho)
    out["conductor_rho"] = {"value": str(cond), "factored": fmt_factored(cond)}
    pts, stuck = _row_points(args, form, rho)
    rows = []
    for n, st_r, st_s, ell_r, ell_s in pts:
        if args.n is not None and n != args.n:
            continue
        rows.append({
            "n": n,
            "lstar_rho": {
                "rational": str(st_r.rational),
                "factored": fmt_factored(st_r.rational),
            },
            "L3_rho": ell_r.value.table_string(2),
            "L3_sigma": ell_s.value.table_string(2),
            "p3_column": fmt_factored(ell_r.p3_column),
        })
    out["rows"] = rows
    if args.format != "json":
        print(f"{args.form}  m={args.m}  cond(rho) = {fmt_factored(cond)}")
        hdr = f"{'n':>2}  {'L*(rho,n)':>28}  {'L3(rho,n)':>16}  {'L3(sigma,n)':>16}"
        print(hdr)
        for r in rows:
            print(f"{r['n']:>2}  {r['lstar_rho']['factored']:>28}  "
                  f"{r['L3_rho']:>16}  {r['L3_sigma']:>16}")
    if stuck is not None:
        print(f"inconclusive: rational reconstruction failed at n={stuck}; "
              f"raise --digits (currently {args.digits})")
        return _emit(args, out, INCONCLUSIVE)
    return _emit(args, out, PASS)


def cmd_verify(args):
    from . import artin, iwasawa, lfunc, padic, qseries

    out = {"command": "verify", "form": args.form, "m": args.m, "checks": []}
    form = qseries.build_form(args.form, _stub_n(args.m))
    rho = _rep("rho", args.m)
    sig = artin.sigma_rep()
    code = _govern(form, rho, args.digits, args.budget, out)
    if code is not None:
        return _emit(args, out, code)

    worst = PASS
    def check(name, ok, detail=""):
        nonlocal worst
        verdict = {True: "pass", False: "FAIL", None: "inconclusive"}[ok]
        out["checks"].append({"name": name, "verdict": verdict, "detail": detail})
        if args.format != "json":
            print(f"  [{verdict:>12}] {name}" + (f"  ({detail})" if detail else ""))
        if ok is False:
            worst = FAIL
        elif ok is None and worst != FAIL:
            worst = INCONCLUSIVE

    if args.format != "json":
        print(f"verify {args.form} m={args.m} at digits={args.digits}")

    # root numbers: the epsilon-factor formula against the solved sign.
    # critical_lambdas raises if they disagree or the FE residual is large.
    try:
        lam_s = lfunc.critical_lambdas(form, sig, args.digits)
        lam_r = lfunc.critical_lambdas(form, rho, args.digits)
        check("root numbers + functional equation",
              True, f"w(sigma)={lam_s.w_formula}, w(rho)={lam_r.w_formula}, "
                    f"fe bits >= {min(lam_s.fe_agreement_bits, lam_r.fe_agreement_bits):.0f}")
    except ArithmeticError as e:
        check("root numbers + functional equation", False, str(e))
        return _emit(args, out, FAIL)

    pts, stuck = _row_points(args, form, rho)
    check("L* rational reconstruction",
          None if stuck is not None else True,
          f"failed at n={stuck}" if stuck is not None else
          f"{len(pts)} critical points")

    tri = {"pass": True, "fail": False, "inconclusive": None}
    for n, st_r, st_s, ell_r, ell_s in pts:
        verdict, detail = padic.verify_congruence(ell_s, ell_r, 1)
        check(f"congruence mod 3 at n={n}", tri[verdict], detail)
    sc = padic.canonical_scale(form)
    for n, st_r, st_s, ell_r, ell_s in pts:
        er = ell_r if sc == 1 else ell_r._replace(value=ell_r.value * sc)
        es = ell_s if sc == 1 else ell_s._replace(value=ell_s.value * sc)
        verdict, detail = padic.verify_congruence(es, er, 2)
        name = f"congruence mod 9 at n={n}" + ("" if sc == 1 else " (canonical scale)")
        if verdict == "pass":
            check(name, True, detail)
        else:
            # mod 9 is a sharpening that only some rows satisfy; report, don't fail
            out["checks"].append({"name": name, "verdict": "not satisfied",
                                  "detail": detail})
            if args.format != "json":
                print(f"  [{'no (mod 3 only)':>12}] {name}")

    lam, places = iwasawa.lambda_for_m(form, args.m)
    ok = all(
        iwasawa.euler_divisibility_crosscheck(form, 3, pc.q, range(1, form.weight), args.m)
        for pc in places
    )
    check("lambda place classification vs local factors", ok,
          f"lambda = {lam}, places: " + (", ".join(
              f"q={pc.q}:{pc.membership or '-'}" for pc in places) or "none"))

    if args.periods:
        if args.form == "121w4":
            rp, rm = lfunc.cm_period_ratios(form, max(args.digits, 40))
            ok = rp == Fraction(1, 22) and rm == Fraction(3)
            check("canonical CM period ratios", ok, f"plus {rp}, minus {rm}")
        else:
            check("canonical CM period ratios", None,
                  "only known for 121w4")

    return _emit(args, out, worst)


def cmd_lambda(args):
    from . import iwasawa, qseries

    out = {"command": "lambda", "form": args.form, "m": args.m}
    form = qseries.build_form(args.form, _stub_n(args.m))
    lam, places = iwasawa.lambda_for_m(form, args.m)
    out["lambda"] = lam
    out["places"] = [
        {"q": pc.q, "order": pc.r_q, "count": pc.place_count,
         "trace": str(pc.b_v), "class": pc.membership or "generic"}
        for pc in places
    ]
    if args.format != "json":
        print(f"{args.form}, m={args.m}: lambda = {lam}")
        if places:
            print(f"{'q':>6} {'ord(q mod 3)':>13} {'places':>7} {'trace':>22} class")
            for pc in places:
                print(f"{pc.q:>6} {pc.r_q:>13} {pc.place_count:>7} "
                      f"{str(pc.b_v):>22} {pc.membership or 'generic'}")
    return _emit(args, out, PASS)


def cmd_root_numbers(args):
    from . import artin, lfunc, qseries

    out = {"command": "root-numbers", "form": args.form, "m": args.m}
    form = qseries.build_form(args.form, _stub_n(args.m))
    reps = [("sigma", artin.sigma_rep())]
    if args.m is not None:
        reps.append((f"rho_{args.m}", artin.rho_rep(args.m)))
    worst = PASS
    res = []
    for label, rep in reps:
        code = _govern(form, rep, args.digits, args.budget, out)
        if code is not None:
            return _emit(args, out, code)
        w_f = artin.global_root_number(form, rep)
        try:
            lam = lfunc.critical_lambdas(form, rep, args.digits)
            gap = abs(lam.w_solved - w_f)
            ok = gap < 1e-10
            res.append({"rep": label, "formula": w_f,
                        "solved": lam.w_solved, "gap": gap})
            if args.format != "json":
                print(f"w({args.form} x {label}) = {w_f:+d}   "
                      f"solved {lam.w_solved:+.12f}   gap {gap:.2e}")
            if not ok:
                worst = FAIL
        except ArithmeticError as e:
            res.append({"rep": label, "formula": w_f, "error": str(e)})
            print(f"w({args.form} x {label}): FAIL ({e})")
            worst = FAIL
    out["results"] = res
    return _emit(args, out, worst)


# ---------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(
        prog="lcong",
        description="Twisted L-values, 3-adic congruences, and Iwasawa "
                    "invariants for the wired-in eigenforms.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p, need_m=False):
        p.add_argument("--form", required=True, choices=_FORM_IDS)
        p.add_argument("--m", type=int, required=need_m,
                       help="twist: cube root of m generates the layer")
        p.add_argument("--digits", type=int, default=30)
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                       help="max coefficients to build before refusing")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--cache-dir", default=None)

    p = sub.add_parser("coeffs", help="build/inspect coefficient cache")
    common(p)
    p.add_argument("--n", type=int, default=None, help="coefficients to build")
    p.set_defaults(fn=cmd_coeffs)

    p = sub.add_parser("table-row", help="L*-rationals and 3-adic columns")
    common(p, need_m=True)
    p.add_argument("--n", type=int, default=None, help="only this critical point")
    p.set_defaults(fn=cmd_table_row)

    p = sub.add_parser("verify", help="consistency suite for (form, m)")
    common(p, need_m=True)
    p.add_argument("--periods", action="store_true",
                   help="also certify canonical CM period ratios")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("lambda", help="Iwasawa lambda for the degree-3 layer")
    common(p, need_m=True)
    p.set_defaults(fn=cmd_lambda)

    p = sub.add_parser("root-numbers", help="epsilon formula vs solved sign")
    common(p)
    p.set_defaults(fn=cmd_root_numbers)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.cache_dir:
        os.environ["LCONG_CACHE_DIR"] = args.cache_dir
    try:
        return args.fn(args)
    except (ValueError, KeyError, NotImplementedError) as e:
        print(f"error: {e}", file=sys.stderr)
        return FAIL


if __name__ == "__main__":
    sys.exit(main())
