"""Command-line surface: one subcommand per experiment.

Output is JSON (sorted keys, resolved config embedded) or, where a row
layout exists, CSV whose first line is `# config {...}`.  Floats in CSV use
15 significant digits.  Exit codes: 0 success, 1 validation error, 2
numerical-tolerance failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .audit import audit_constants
from .family import FamilySpec, PolyOverFq, VARIANTS, PRIME_TO_P, \
    family_coeff_matrix
from .fields import build_field
from .lfun import (IntegralityError, char_sums_batch, l_polynomial,
                   point_count, point_count_from_zeta, trace_histograms,
                   zeta_numerator)
from .moments import (covariance_report, gaussian_experiment,
                      mean_square_check, moments_report, variance_trend)
from .selberg import (build_pair, coefficient_sums, constant_c_limit,
                      constant_c_truncated, decay_sums)
from .zeros import (curve_angles, discrepancy_check, explicit_formula_check,
                    find_angles, prime_power_check)


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad arguments; here that's a validation error
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_q(q: int):
    """Split a prime power into (p, r)."""
    if q < 2:
        raise ValueError("q must be at least 2")
    p = next(v for v in range(2, q + 1) if q % v == 0)
    m, r = q, 0
    while m % p == 0:
        m //= p
        r += 1
    if m != 1:
        raise ValueError(f"q = {q} is not a prime power")
    return p, r


def _poly_from_args(args) -> PolyOverFq:
    p, r = _parse_q(args.q)
    if getattr(args, "f", None):
        f = PolyOverFq.parse(args.f, p, r)
        if f.degree % p == 0:
            raise ValueError(
                f"p divides deg f = {f.degree}; reduce the representative")
        return f
    if getattr(args, "d", None):
        if args.d % p == 0:
            raise ValueError(f"p divides d (p = {p}, d = {args.d})")
        spec = FamilySpec(p, r, args.d, args.variant)
        code = getattr(args, "member", 0)
        if not 0 <= code < spec.size():
            raise ValueError(f"member index outside 0..{spec.size() - 1}")
        return spec.decode(code)
    raise ValueError("give either --f or --d")


def _spec_from_args(args) -> FamilySpec:
    p, r = _parse_q(args.q)
    if args.d % p == 0:
        raise ValueError(f"p divides d (p = {p}, d = {args.d})")
    return FamilySpec(p, r, args.d, args.variant)


def _c2l(z) -> list:
    return [float(z.real), float(z.imag)]


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".15g")
    return str(v)


def _emit(args, config: dict, report: dict, csv_header=None, csv_rows=None):
    if getattr(args, "format", "json") == "csv":
        if csv_rows is None:
            raise ValueError("this subcommand has no CSV layout; use json")
        lines = ["# config " + json.dumps(config, sort_keys=True)]
        lines.append(",".join(csv_header))
        lines.extend(",".join(_cell(v) for v in row) for row in csv_rows)
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps({"config": config, "report": report},
                          sort_keys=True, indent=2) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_lpoly(args) -> int:
    f = _poly_from_args(args)
    hs = [args.h] if args.h else list(range(1, f.p))
    ls = {h: l_polynomial(f, h) for h in hs}
    config = {"subcommand": "lpoly", "q": f.q, "f": f.serialize(), "h": hs}
    report = {"degree": f.degree,
              "L": {str(h): [_c2l(c) for c in l.coeffs]
                    for h, l in ls.items()}}
    _emit(args, config, report)
    return 0


def cmd_zeta(args) -> int:
    f = _poly_from_args(args)
    z = zeta_numerator(f)
    config = {"subcommand": "zeta", "q": f.q, "f": f.serialize()}
    report = {"P": [int(c) for c in z.coeffs], "genus": z.genus,
              "rounding_residual": z.rounding_residual,
              "functional_equation_ok": True}
    _emit(args, config, report)
    return 0


def cmd_zeros(args) -> int:
    f = _poly_from_args(args)
    sets = curve_angles(f) if args.h is None \
        else [find_angles(l_polynomial(f, args.h))]
    config = {"subcommand": "zeros", "q": f.q, "f": f.serialize()}
    report = {"angles": {str(a.h): {"thetas": a.thetas.tolist(),
                                    "rh_residual": a.rh_residual}
                         for a in sets}}
    rows = [a.serialize_row() for a in sets]
    _emit(args, config, report,
          csv_header=("f", "h", "thetas", "rh_residual"), csv_rows=rows)
    return 0


def cmd_points(args) -> int:
    f = _poly_from_args(args)
    z = zeta_numerator(f)
    counts = {}
    for n in range(1, args.nmax + 1):
        brute = point_count(f, n)
        from_zeta = point_count_from_zeta(z, n)
        if brute != from_zeta:
            raise IntegralityError(
                f"point count mismatch at n = {n}: {brute} vs {from_zeta}")
        counts[str(n)] = brute
    config = {"subcommand": "points", "q": f.q, "f": f.serialize(),
              "nmax": args.nmax}
    _emit(args, config, {"counts": counts, "cross_checked": True,
                         "P": [int(c) for c in z.coeffs]})
    return 0


def cmd_family_avg(args) -> int:
    spec = _spec_from_args(args)
    rows = family_coeff_matrix(spec)
    p, q = spec.p, spec.q
    s_mean, n_mean, predicted = {}, {}, {}
    for k in range(1, args.kmax + 1):
        field = build_field(spec.p, spec.r, k)
        sums = char_sums_batch(field, rows).mean(axis=0)
        hists = trace_histograms(field, rows)
        s_mean[str(k)] = {str(h): _c2l(sums[h - 1]) for h in range(1, p)}
        n_mean[str(k)] = 1 + p * float(hists[:, 0].mean())
        pred = float(q ** (k // p)) if k % p == 0 else 0.0
        predicted[str(k)] = {"s_mean": pred,
                             "point_count_mean": q ** k + 1 + (p - 1) * pred}
    config = {"subcommand": "family-avg", "q": q, "d": spec.d,
              "variant": spec.variant, "kmax": args.kmax}
    _emit(args, config, {"size": spec.size(), "s_mean": s_mean,
                         "point_count_mean": n_mean, "predicted": predicted})
    return 0


def cmd_bs(args) -> int:
    p, r = _parse_q(args.q)
    pair = build_pair(args.K, args.beta)
    report = {
        "mass_plus": pair.mass("+"), "mass_minus": pair.mass("-"),
        "mass_targets": [args.beta + 1 / (args.K + 1),
                         args.beta - 1 / (args.K + 1)],
        "coefficients": {str(k): [pair.coefficient("+", k),
                                  pair.coefficient("-", k)]
                         for k in range(0, args.K + 1)},
        "decay_sums": decay_sums(pair, args.q),
        "constant_c": {
            "plus": constant_c_truncated(pair, "+", p, args.q),
            "minus": constant_c_truncated(pair, "-", p, args.q),
            "limit": constant_c_limit(args.beta, p, args.q)},
    }
    if args.K * args.beta > 1:
        report["coefficient_sums"] = coefficient_sums(pair)
    config = {"subcommand": "bs", "q": args.q, "K": args.K,
              "beta": args.beta}
    rows = [(k, pair.coefficient("+", k), pair.coefficient("-", k))
            for k in range(0, args.K + 1)]
    _emit(args, config, report,
          csv_header=("k", "ihat_plus", "ihat_minus"), csv_rows=rows)
    return 0


def cmd_explicit_check(args) -> int:
    f = _poly_from_args(args)
    rng = np.random.default_rng(args.seed)
    K = args.K if args.K else min(4, f.degree - 1)
    hat = {0: float(rng.normal())}
    for k in range(1, K + 1):
        a = complex(rng.normal(), rng.normal())
        hat[k] = a
        hat[-k] = a.conjugate()
    res = explicit_formula_check(f, args.h, hat)
    primes = {}
    ok = res["ok"]
    for n in range(1, args.nmax + 1):
        pres = prime_power_check(f, args.h, n)
        primes[str(n)] = {"residual": pres["residual"], "ok": pres["ok"]}
        ok = ok and pres["ok"]
    config = {"subcommand": "explicit-check", "q": f.q, "f": f.serialize(),
              "h": args.h, "K": K, "seed": args.seed, "nmax": args.nmax}
    _emit(args, config, {
        "test_function": {"residual": res["residual"], "ok": res["ok"]},
        "prime_powers": primes, "ok": ok})
    return 0 if ok else 2


def cmd_discrepancy(args) -> int:
    f = _poly_from_args(args)
    report = discrepancy_check(f, args.h, args.beta, args.K,
                               args.b1, args.b2)
    config = {"subcommand": "discrepancy", "q": f.q, "f": f.serialize(),
              "h": args.h, "beta": args.beta, "K": report["K"],
              "b1": args.b1, "b2": args.b2}
    _emit(args, config, report)
    return 0 if report["ok"] else 2


def cmd_covariance(args) -> int:
    spec = _spec_from_args(args)
    report = covariance_report(spec, args.K, args.beta, args.mode,
                               args.samples, args.seed, args.workers)
    config = {"subcommand": "covariance", "q": spec.q, "d": spec.d,
              "variant": spec.variant, "K": args.K, "beta": args.beta,
              "mode": args.mode, "samples": args.samples, "seed": args.seed}
    _emit(args, config, report)
    return 0


def cmd_moments(args) -> int:
    spec = _spec_from_args(args)
    report = moments_report(spec, args.K, args.beta, args.n_max, args.mode,
                            args.samples, args.seed, args.workers)
    config = {"subcommand": "moments", "q": spec.q, "d": spec.d,
              "variant": spec.variant, "K": args.K, "beta": args.beta,
              "n_max": args.n_max, "mode": args.mode,
              "samples": args.samples, "seed": args.seed}
    _emit(args, config, report)
    return 0


def cmd_gaussian(args) -> int:
    spec = _spec_from_args(args)
    report = gaussian_experiment(spec, args.beta, args.samples, args.seed,
                                 args.workers, args.k_cap)
    config = {"subcommand": "gaussian", "q": spec.q, "d": spec.d,
              "variant": spec.variant, "beta": args.beta,
              "samples": args.samples, "seed": args.seed,
              "k_cap": args.k_cap, "K_used": report["K"]}
    sp = report["per_sample"]["s_plus"]
    sm = report["per_sample"]["s_minus"]
    rows = [(i, args.seed, sp[i], sm[i], None) for i in range(len(sp))]
    _emit(args, config, report,
          csv_header=("sample_index", "seed", "S_plus", "S_minus", "N_I"),
          csv_rows=rows)
    return 0


def cmd_mean_square(args) -> int:
    spec = _spec_from_args(args)
    report = mean_square_check(spec, args.K, args.beta)
    consts = audit_constants()["mean_square"]
    bound = consts["constant"] * report["scale"]
    ok = (report["sandwich_holds"] and report["first_moment_ok"]
          and report["mean_square_plus"] <= bound
          and report["mean_square_minus"] <= bound)
    report["bound"] = bound
    report["ok"] = bool(ok)
    config = {"subcommand": "mean-square", "q": spec.q, "d": spec.d,
              "variant": spec.variant, "K": args.K, "beta": args.beta}
    _emit(args, config, report)
    return 0 if ok else 2


def cmd_trend(args) -> int:
    pinned = audit_constants()["variance_trend"]
    p, r = _parse_q(args.q)
    report = variance_trend(p, r, args.beta, tuple(args.d), args.samples,
                            args.seed, args.workers,
                            pinned["k_cap"], pinned["k_div"])
    lo, hi = pinned["ratio_band"]
    in_band = all(lo <= row["ratio_exact_to_main"] <= hi
                  for row in report["rows"])
    report["ratio_band"] = [lo, hi]
    report["ratios_in_band"] = bool(in_band)
    ok = report["increasing"] and report["mc_within_3se"] and in_band
    config = {"subcommand": "trend", "q": args.q, "beta": args.beta,
              "d": list(args.d), "samples": args.samples, "seed": args.seed}
    _emit(args, config, report)
    return 0 if ok else 2


def cmd_calibrate(args) -> int:
    pinned = audit_constants()
    measured = {"prop_fr_max_dev": 0.0, "decay_max": 0.0}
    for K in (5, 10, 50, 200):
        for beta in (0.1, 0.25, 0.5, 0.9):
            pair = build_pair(K, beta)
            if K * beta > 1:
                sums = coefficient_sums(pair)
                dev = max(abs(sums[k]) for k in sums if k.startswith("dev"))
                measured["prop_fr_max_dev"] = max(
                    measured["prop_fr_max_dev"], dev)
            dmax = max(decay_sums(pair, args.q).values())
            measured["decay_max"] = max(measured["decay_max"], dmax)
    p, _ = _parse_q(args.q)
    measured["constant_c_limit_half"] = constant_c_limit(0.5, p, args.q)
    out = {"pinned": pinned, "measured": measured}
    path = args.out or "audit_constants.json"
    with open(path, "w") as fh:
        json.dump(out, fh, sort_keys=True, indent=2)
        fh.write("\n")
    sys.stdout.write(f"wrote {path}\n")
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_output(sp, csv_ok=True):
    sp.add_argument("--out", help="write output to this path")
    choices = ("json", "csv") if csv_ok else ("json",)
    sp.add_argument("--format", choices=choices, default="json")


def _add_poly_args(sp):
    sp.add_argument("--q", type=int, required=True, help="field size p^r")
    sp.add_argument("--f", help="coefficients, constant first, e.g. 0,0,1")
    sp.add_argument("--d", type=int, help="family degree (with --member)")
    sp.add_argument("--member", type=int, default=0,
                    help="family member index when --d is used")
    sp.add_argument("--variant", choices=VARIANTS, default=PRIME_TO_P)


def _add_family_args(sp):
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--variant", choices=VARIANTS, default=PRIME_TO_P)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aszeta",
                     description="zeta functions and zero statistics of "
                                 "y^p - y = f(x) covers")
    sub = parser.add_subparsers(dest="subcommand", required=True,
                                parser_class=_Parser)

    sp = sub.add_parser("lpoly", help="L-polynomials per character")
    _add_poly_args(sp)
    sp.add_argument("--h", type=int)
    _add_output(sp, csv_ok=False)
    sp.set_defaults(func=cmd_lpoly)

    sp = sub.add_parser("zeta", help="integer zeta numerator")
    _add_poly_args(sp)
    _add_output(sp, csv_ok=False)
    sp.set_defaults(func=cmd_zeta)

    sp = sub.add_parser("zeros", help="zero angles and RH residual")
    _add_poly_args(sp)
    sp.add_argument("--h", type=int)
    _add_output(sp)
    sp.set_defaults(func=cmd_zeros)

    sp = sub.add_parser("points", help="point counts with zeta cross-check")
    _add_poly_args(sp)
    sp.add_argument("--nmax", type=int, default=4)
    _add_output(sp, csv_ok=False)
    sp.set_defaults(func=cmd_points)

    sp = sub.add_parser("family-avg", help="exhaustive family averages")
    _add_family_args(sp)
    sp.add_argument("--kmax", type=int, default=4)
    _add_output(sp, csv_ok=False)
    sp.set_defaults(func=cmd_family_avg)

    sp = sub.add_parser("bs", help="sign-function test pair report")
    sp.add_argument("--q", type=int, default=3)
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--beta", type=float, required=True)
    _add_output(sp)
    sp.set_defaults(func=cmd_bs)

    sp = sub.add_parser("explicit-check",
                        help="explicit formula on random test functions")
    _add_poly_args(sp)
    sp.add_argument("--h", type=int, default=1)
    sp.add_argument("--K", type=int, default=0)
    sp.add_argument("--nmax", type=int, default=3)
    sp.add_argument("--seed", type=int, default=0)
    _add_output(sp, csv_ok=False)
    sp.set_defaults(func=cmd_explicit_check)

    sp = sub.add_parser("discrepancy", help="zero-count discrepancy audit")
    _add_poly_args(sp)
    et = audit_constants()["erdos_turan"]
    sp.add_argument("--h", type=int, default=1)
    sp.add_argument("--beta", type=float, default=0.5)
    sp.add_argument("--K", type=int, default=0)
    sp.add_argument("--b1", type=float, default=et["b1"])
    sp.add_argument("--b2", type=float, default=et["b2"])
    _add_output(sp, csv_ok=False)
    sp.set_defaults(func=cmd_discrepancy)

    for name, fn, nmax_flag in (("covariance", cmd_covariance, False),
                                ("moments", cmd_moments, True)):
        sp = sub.add_parser(name, help=f"family {name} report")
        _add_family_args(sp)
        sp.add_argument("--K", type=int, required=True)
        sp.add_argument("--beta", type=float, required=True)
        if nmax_flag:
            sp.add_argument("--n-max", type=int, default=4)
        sp.add_argument("--mode", choices=("exhaustive", "monte_carlo"),
                        default="exhaustive")
        sp.add_argument("--samples", type=int, default=2000)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--workers", type=int, default=1)
        _add_output(sp, csv_ok=False)
        sp.set_defaults(func=fn)

    sp = sub.add_parser("gaussian", help="normalized distribution experiment")
    _add_family_args(sp)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--samples", type=int, required=True)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--k-cap", type=int, default=10)
    _add_output(sp)
    sp.set_defaults(func=cmd_gaussian)

    sp = sub.add_parser("mean-square", help="zero-count mean-square audit")
    _add_family_args(sp)
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--beta", type=float, required=True)
    _add_output(sp, csv_ok=False)
    sp.set_defaults(func=cmd_mean_square)

    sp = sub.add_parser("trend", help="variance growth across degrees")
    sp.add_argument("--q", type=int, default=3)
    sp.add_argument("--beta", type=float, default=0.5)
    sp.add_argument("--d", type=int, nargs="+", default=[22, 41, 82])
    sp.add_argument("--samples", type=int, default=300)
    sp.add_argument("--seed", type=int, default=11)
    sp.add_argument("--workers", type=int, default=1)
    _add_output(sp, csv_ok=False)
    sp.set_defaults(func=cmd_trend)

    sp = sub.add_parser("calibrate", help="write the audit-constant file")
    sp.add_argument("--q", type=int, default=3)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_calibrate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (IntegralityError, ArithmeticError) as exc:
        print(f"tolerance failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
