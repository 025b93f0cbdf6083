"""Command-line surface.

Subcommands: eval, valuation, certify, search, tau-verify, suite,
conjecture.  All numeric output is exact; exit status 0 on success, 1 when
a certificate is refuted or an asserted suite row fails, 2 on usage or
config errors.
"""

from __future__ import annotations

import argparse
import sys
from datetime import datetime, timezone

from . import classify, tau as tau_mod
from .arith import ArithError
from .config import ConfigError, RunConfig, load_config
from .engine import REFUTED, certify_congruence, scan_valuation
from .functions import CoverageError, DocumentError, load_custom, phi, sigma, tau_descriptor
from .reporting import render_json, render_search_csv, report_document, write_report

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key-value config file")
    p.add_argument("--horizon", type=int, help="index scan bound (default 100000)")
    p.add_argument("--exp-horizon", type=int, dest="exponent_horizon",
                   help="exponent scan bound (default 64)")
    p.add_argument("--witness-budget", type=int, help="prime witnesses to try (default 25)")
    p.add_argument("--candidate-bound", type=int,
                   help="largest prime candidate examined (default 1000000)")
    p.add_argument("--jobs", type=int, help="parallel workers (default 1)")
    p.add_argument("--out", dest="output", help="report file (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), help="report format")
    p.add_argument("--cache-dir", help="tau table cache directory")
    p.add_argument("--backend", choices=("numba", "numpy"), help="kernel backend")
    p.add_argument("--stamp", action="store_true",
                   help="include a timestamp in report metadata")


def _add_fn(p: argparse.ArgumentParser) -> None:
    p.add_argument("--fn", default="sigma", help="sigma | phi | tau | custom")
    p.add_argument("--k-param", type=int, default=0,
                   help="subscript k for the sigma family")
    p.add_argument("--custom", help="custom-function document (with --fn custom)")
    p.add_argument("--tau-horizon", type=int, default=10_000,
                   help="tau table horizon when --fn tau")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="multcong",
        description="valuation profiles and congruence certificates for "
                    "multiplicative functions on progressions",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate f(n) exactly, or mod M")
    _add_fn(p)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--mod", type=int)
    _add_common(p)

    p = sub.add_parser("valuation", help="scan min nu_p(f(A n + B))")
    _add_fn(p)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--A", type=int, required=True)
    p.add_argument("--B", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("certify", help="certificate for f(A n + B) = 0 mod p^pow")
    _add_fn(p)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--pow", type=int, required=True,
                   help="modulus exponent (distinct from --k-param)")
    p.add_argument("--A", type=int, required=True)
    p.add_argument("--B", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("search", help="grid search A <= A-max, 1 <= B <= A")
    _add_fn(p)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--pow", type=int, required=True)
    p.add_argument("--A-max", type=int, required=True)
    p.add_argument("--diagnostics", action="store_true",
                   help="also confirm near misses (scan value exactly pow-1); "
                        "costs a full scan per refuted candidate")
    _add_common(p)

    p = sub.add_parser("tau-verify", help="build the tau table and check the "
                                          "exceptional divisor-sum congruences")
    p.add_argument("--N", type=int, default=2000, help="index bound")
    _add_common(p)

    p = sub.add_parser("suite", help="fixed small-prime divisor-sum checks "
                                     "and the two-squares audit")
    p.add_argument("--odd-k", default="1,3,5,7,9,11")
    p.add_argument("--two-squares-N", type=int, default=10_000)
    p.add_argument("--two-squares-k", default="1,3")
    _add_common(p)

    p = sub.add_parser("conjecture", help="divisibility-structure audit of "
                                          "divisor-count hits mod 2^k")
    p.add_argument("--A-max", type=int, default=400)
    p.add_argument("--pow-list", default="2,3")
    p.add_argument("--phi-evidence", action="store_true",
                   help="instead search for totient congruences mod odd primes")
    p.add_argument("--phi-A-max", type=int, default=200)
    _add_common(p)

    return ap


def _config_from_args(args) -> RunConfig:
    overrides = {
        "horizon": getattr(args, "horizon", None),
        "exponent_horizon": getattr(args, "exponent_horizon", None),
        "witness_budget": getattr(args, "witness_budget", None),
        "candidate_bound": getattr(args, "candidate_bound", None),
        "jobs": getattr(args, "jobs", None),
        "format": getattr(args, "format", None),
        "output": getattr(args, "output", None),
        "cache_dir": getattr(args, "cache_dir", None),
        "backend": getattr(args, "backend", None),
    }
    return load_config(getattr(args, "config", None), overrides)


def _descriptor(args, cfg: RunConfig):
    name = args.fn
    if name == "sigma":
        return sigma(args.k_param)
    if name == "phi":
        return phi()
    if name == "tau":
        table = tau_mod.cached_tau_table(args.tau_horizon, cfg.cache_dir or None)
        return tau_descriptor(table)
    if name == "custom":
        if not args.custom:
            raise ConfigError("--fn custom needs --custom FILE")
        with open(args.custom, encoding="utf-8") as fh:
            return load_custom(fh.read())
    raise ConfigError(f"unknown function {name!r}")


def _emit(body: dict, cfg: RunConfig, args, *, csv_render=None) -> None:
    stamp = None
    if getattr(args, "stamp", False):
        stamp = datetime.now(timezone.utc).isoformat()
    # parallelism degree is run detail, not result-determining config
    cfg_dict = {"horizon": cfg.horizon, "exponent_horizon": cfg.exponent_horizon,
                "witness_budget": cfg.witness_budget,
                "candidate_bound": cfg.candidate_bound}
    if cfg.format == "csv" and csv_render is not None:
        data = csv_render(body, config=cfg_dict, stamp=stamp)
    else:
        data = render_json(report_document(body, config=cfg_dict, stamp=stamp))
    if cfg.output:
        write_report(data, cfg.output)
    else:
        sys.stdout.write(data.decode("ascii"))


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        return _dispatch(args, cfg)
    except (ConfigError, DocumentError, CoverageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ArithError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _dispatch(args, cfg: RunConfig) -> int:
    engine_cfg = cfg.engine()

    if args.command == "eval":
        fn = _descriptor(args, cfg)
        from .functions import eval_fn, eval_mod
        if args.mod is not None:
            print(eval_mod(fn, args.n, args.mod))
        else:
            print(eval_fn(fn, args.n))
        return EXIT_OK

    if args.command == "valuation":
        fn = _descriptor(args, cfg)
        scan = scan_valuation(fn, args.p, args.A, args.B, cfg.horizon,
                              config=engine_cfg)
        _emit({"schema": "multcong.valuation/1", "fn": fn.to_json(),
               "p": args.p, "A": args.A, "B": args.B, **scan.to_json()},
              cfg, args)
        return EXIT_OK

    if args.command == "certify":
        fn = _descriptor(args, cfg)
        cert = certify_congruence(fn, args.p, args.pow, args.A, args.B, engine_cfg)
        _emit(cert.to_json(), cfg, args)
        return EXIT_FAILED if cert.status == REFUTED else EXIT_OK

    if args.command == "search":
        fn = _descriptor(args, cfg)
        report = classify.search_congruences(fn, args.p, args.pow, args.A_max,
                                             engine_cfg,
                                             diagnostics=args.diagnostics)
        _emit(report.to_json(), cfg, args, csv_render=render_search_csv)
        return EXIT_FAILED if report.errors else EXIT_OK

    if args.command == "tau-verify":
        table = tau_mod.cached_tau_table(8 * args.N + 7, cfg.cache_dir or None)
        reports = tau_mod.verify_sd_congruences(table, args.N)
        checks = tau_mod.table_self_checks(table, min(table.horizon, 10_000))
        body = {
            "schema": "multcong.tau-verify/1",
            "N": args.N,
            "table_horizon": table.horizon,
            "self_checks": checks,
            "congruences": [r.to_json() for r in reports],
        }
        _emit(body, cfg, args)
        bad = any(r.failed for r in reports) or not checks["ok"]
        return EXIT_FAILED if bad else EXIT_OK

    if args.command == "suite":
        odd_k = tuple(int(x) for x in args.odd_k.split(","))
        ksq = tuple(int(x) for x in args.two_squares_k.split(","))
        suite = classify.sigma_suite(odd_k, engine_cfg)
        squares = classify.two_squares_audit(args.two_squares_N, ksq)
        body = {"schema": "multcong.suite/1", "sigma": suite, "two_squares": squares}
        _emit(body, cfg, args)
        failed = any(row["pass"] is False for row in suite["rows"] + suite["mod7"])
        return EXIT_FAILED if failed or not squares["ok"] else EXIT_OK

    if args.command == "conjecture":
        if args.phi_evidence:
            body = classify.phi_congruence_evidence(A_max=args.phi_A_max,
                                                    config=engine_cfg)
            _emit(body, cfg, args)
            return EXIT_OK if body["ok"] else EXIT_FAILED
        k_values = tuple(int(x) for x in args.pow_list.split(","))
        body = classify.structure_audit(k_values, args.A_max, engine_cfg)
        _emit(body, cfg, args)
        bad = any(r["structure_failures"] or r["errors"] for r in body["results"])
        return EXIT_FAILED if bad else EXIT_OK

    raise ConfigError(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
