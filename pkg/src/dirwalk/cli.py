"""Command line front end: ``dirwalk <subcommand> [flags]``.

Every run prints (or writes with --json) a document ``{"meta": ..., "results": ...}``.
Tabular data goes to --csv when given.  Exit status: 0 ok, 1 failed check,
2 bad flags or arguments outside a function's domain.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__, kernels
from .characters import Character, build_table
from .errors import DirwalkError
from .io import dump_json, write_csv
from .primes import PrimeSieve, default_cache, set_default_sieve


def character_record(c: Character) -> dict:
    codes = c.angle_codes
    return {
        "q": c.q,
        "j": c.j,
        "r": c.order(),
        "a": c.parity(),
        "real": c.is_real,
        "values": [None if codes[n % c.q] < 0 else int(codes[n % c.q]) for n in range(1, c.q + 1)],
    }


def character_from_record(rec: dict) -> Character:
    """Rebuild a character from a ``chars --json`` record, checking its values."""
    c = build_table(int(rec["q"]))[int(rec["j"])]
    if character_record(c)["values"] != list(rec["values"]):
        raise ValueError(f"record for j={rec['j']} does not match the character table mod {rec['q']}")
    return c


def _threads(text: str) -> int:
    if text == "auto":
        return os.cpu_count() or 1
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("threads must be >= 1 or 'auto'")
    return n


def _int_like(text: str) -> int:
    """Integers, also written as 1e6."""
    v = float(text)
    if v != int(v):
        raise argparse.ArgumentTypeError(f"{text} is not an integer")
    return int(v)


def _int_list(text: str) -> list[int]:
    return [_int_like(t) for t in text.split(",") if t.strip()]


def _character(args) -> Character:
    if getattr(args, "char_file", None):
        with open(args.char_file, encoding="utf-8") as fh:
            doc = json.load(fh)
        recs = doc.get("results", doc).get("characters", doc) if isinstance(doc, dict) else doc
        for rec in recs:
            if int(rec["j"]) == args.char:
                return character_from_record(rec)
        raise ValueError(f"no record with j={args.char} in {args.char_file}")
    return build_table(args.q)[args.char]


def cmd_chars(args):
    tab = build_table(args.q)
    recs = [character_record(c) for c in tab]
    if args.csv:
        rows = [{**r, "values": " ".join("Z" if v is None else str(v) for v in r["values"])} for r in recs]
        write_csv(args.csv, ["q", "j", "r", "a", "real", "values"], rows)
    return {"q": tab.q, "primitive_root": tab.primitive_root, "angle_unit": f"2*pi/{tab.phi}",
            "characters": recs}


def cmd_primes(args, sieve):
    if args.nth is not None:
        return {"n": args.nth, "p": sieve.nth_prime(args.nth)}
    if args.upto is None:
        raise ValueError("give --upto or --nth")
    x = int(np.ceil(args.upto))
    if args.count_only:
        return {"x": args.upto, "pi": sieve.count_below(x)}
    ps = sieve.primes_in(2, x) if x > 2 else np.empty(0, dtype=np.uint64)
    if args.csv:
        write_csv(args.csv, ["p"], ([int(p)] for p in ps))
        return {"x": args.upto, "pi": len(ps)}
    return {"x": args.upto, "pi": len(ps), "primes": ps}


def cmd_pairs(args, sieve):
    from .residue_stats import los_predicted, pair_counts, write_pairs_csv
    m = pair_counts(args.q, args.k, args.upto, sieve)
    los = los_predicted(args.q, args.k, args.upto) if args.los else None
    if args.csv:
        write_pairs_csv(args.csv, m, los)
    out = {"q": m.q, "k": m.k, "x": m.x, "n_primes": m.n_primes, "dropped_pairs": m.dropped_pairs,
           "residues": list(range(1, m.q)), "counts": m.counts,
           "diag_mean": m.diag_mean(), "sym_offdiag_mean": m.sym_offdiag_mean()}
    if los is not None:
        out["los"] = {"diag": los.diag, "sym_offdiag": los.sym_offdiag, "offdiag": los.offdiag}
    return out


def cmd_freq(args, sieve):
    from .residue_stats import frequencies
    c = _character(args)
    f = frequencies(c, args.upto, sieve)
    if args.csv:
        write_csv(args.csv, ["i", "count", "freq"],
                  [{"i": i, "count": int(n), "freq": float(v)} for i, (n, v) in enumerate(zip(f.counts, f.freqs))])
    return {"q": c.q, "j": c.j, "x": f.x, "r": f.r, "n_primes": f.n_primes,
            "counts": f.counts, "freqs": f.freqs, "max_deviation": f.max_deviation()}


def cmd_walk(args, sieve):
    from .walk import walk
    c = _character(args)
    ws = walk(c, args.n, start=args.start, mode=args.mode, checkpoints=args.checkpoints, sieve=sieve)
    if args.mode == "complex":
        rows = ({"n": int(n), "C_re": v.real, "C_im": v.imag} for n, v in zip(ws.n, ws.values))
        header = ["n", "C_re", "C_im"]
    else:
        rows = ({"n": int(n), "C_n": float(v)} for n, v in zip(ws.n, ws.values))
        header = ["n", "C_n"]
    out = {"q": c.q, "j": c.j, "start": args.start, "mode": args.mode, "N": args.n, "points": len(ws)}
    if args.csv:
        write_csv(args.csv, header, rows)
    else:
        out["n"] = ws.n
        out["C"] = ws.values
    if len(ws):
        out["final"] = ws.final
    return out


def cmd_ensemble(args, sieve):
    from .ensemble import (EnsembleSpec, block_sigma2, build, histogram, moments, normality_test,
                           parse_spacing)
    from .errors import PrincipalNotSupported
    c = _character(args)
    spec = EnsembleSpec(args.n1, args.N, parse_spacing(args.spacing), args.M, args.seed)
    ens = build(c, spec, sieve)
    mo = moments(ens)
    out = {"q": c.q, "j": c.j, "n1": spec.n1, "N": spec.block_len, "spacing": str(spec.spacing),
           "M": spec.m_blocks, "seed": spec.seed, "p_mode": args.p_mode,
           "mean": mo.mean, "variance": mo.variance, "skew": mo.skew,
           "excess_kurtosis": mo.excess_kurtosis, "diagnostics": ens.diagnostics}
    try:
        s2 = block_sigma2(ens, args.p_mode)
        z = ens.blocks / np.sqrt(s2)
        nt = normality_test(z)
        out.update({"theory_variance": float(s2.mean()), "variance_ratio": mo.variance / float(s2.mean()),
                    "ks_statistic": nt.ks_statistic, "ks_pvalue": nt.ks_pvalue,
                    "fitted_mean": nt.fitted_mean, "fitted_std": nt.fitted_std})
    except PrincipalNotSupported:
        z = np.full(len(ens.blocks), np.nan)
    if args.csv:
        write_csv(args.csv, ["block_index", "start", "C_N", "normalized"],
                  ({"block_index": i, "start": int(s), "C_N": float(b), "normalized": float(v)}
                   for i, (s, b, v) in enumerate(zip(ens.starts, ens.blocks, z))))
    else:
        out["blocks"] = ens.blocks
    if args.hist_bins:
        h = histogram(z, args.hist_bins)
        rows = [{"bin_center": a, "count": int(b), "normal_pdf_reference": r}
                for a, b, r in zip(h["bin_center"], h["count"], h["normal_pdf_reference"])]
        if args.hist_csv:
            write_csv(args.hist_csv, ["bin_center", "count", "normal_pdf_reference"], rows)
        else:
            out["histogram"] = rows
    return out


def cmd_lfunc(args, sieve):
    from .lfunc import (ComplexPoint, LFuncEvaluator, euler_split, euler_tail_bound,
                        functional_equation_residual, residue_at_one)
    c = _character(args)
    sp = ComplexPoint.parse(args.s)
    out = {"q": c.q, "j": c.j, "s": {"sigma": sp.sigma, "t": sp.t}}
    ev = LFuncEvaluator(c, tol=args.tol)
    val, err = ev.value(sp)
    out["value"] = val
    out["error_estimate"] = err
    if args.fe_check:
        out["fe_residual"] = functional_equation_residual(c, sp, args.tol)
    if args.residue:
        out["residue_at_1"] = residue_at_one(c, args.tol)
    if args.euler_n:
        es = euler_split(c, sp, args.euler_n, sieve=sieve)
        e = {"N": es.N, "p_N": es.p_N, "X": es.X, "R": es.R, "log_l": es.log_l, "residual": es.residual}
        if sp.sigma > 1:
            e["tail_bound"] = euler_tail_bound(sp.sigma, es.p_N)
        out["euler"] = e
    return out


def cmd_check(args):
    from .acceptance import run_all
    ids = args.only or None
    res = run_all(ids, echo=lambda s: print(s, file=sys.stderr, flush=True))
    print(f"{sum(r.passed for r in res)}/{len(res)} criteria passed", file=sys.stderr)
    return {"level": args.level,
            "criteria": [{"id": r.id, "name": r.name, "passed": r.passed, "seconds": r.seconds,
                          "detail": r.detail} for r in res],
            "all_passed": all(r.passed for r in res)}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dirwalk", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"dirwalk {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="write the result document here instead of stdout")
    common.add_argument("--threads", type=_threads, default=1, help="sieve worker threads, or 'auto'")
    common.add_argument("--no-cache", action="store_true", help="ignore DIRWALK_CACHE_DIR")
    common.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="cmd", required=True)

    def char_flags(sp):
        sp.add_argument("--q", type=int, default=7)
        sp.add_argument("--char", type=int, required=True, help="character label j")
        sp.add_argument("--char-file", help="JSON from `chars --json` to take the character from")

    s = sub.add_parser("chars", parents=[common], help="character table")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--csv", metavar="PATH")

    s = sub.add_parser("primes", parents=[common], help="sieve primes")
    s.add_argument("--upto", type=float)
    s.add_argument("--count-only", action="store_true")
    s.add_argument("--nth", type=_int_like)
    s.add_argument("--csv", metavar="PATH")

    s = sub.add_parser("pairs", parents=[common], help="lag-k residue pair counts")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--upto", type=float, required=True)
    s.add_argument("--los", action="store_true", help="add LOS predictions")
    s.add_argument("--csv", metavar="PATH")

    s = sub.add_parser("freq", parents=[common], help="value frequencies of a character")
    char_flags(s)
    s.add_argument("--upto", type=float, required=True)
    s.add_argument("--csv", metavar="PATH")

    s = sub.add_parser("walk", parents=[common], help="partial sums C_n")
    char_flags(s)
    s.add_argument("--n", type=_int_like, required=True)
    s.add_argument("--start", type=_int_like, default=1)
    s.add_argument("--mode", choices=["cos", "sin", "complex"], default="cos")
    s.add_argument("--checkpoints", type=_int_list)
    s.add_argument("--csv", metavar="PATH")

    s = sub.add_parser("ensemble", parents=[common], help="block-sum ensemble")
    char_flags(s)
    s.add_argument("--n1", type=_int_like, default=10 ** 6)
    s.add_argument("--N", type=_int_like, required=True)
    s.add_argument("--spacing", default="fixed:10")
    s.add_argument("--M", type=_int_like, default=2000)
    s.add_argument("--p-mode", choices=["block", "first"], default="block",
                   help="prime at which the variance formula is evaluated")
    s.add_argument("--hist-bins", type=int)
    s.add_argument("--hist-csv", metavar="PATH")
    s.add_argument("--csv", metavar="PATH")

    s = sub.add_parser("lfunc", parents=[common], help="L(s, chi) and its checks")
    char_flags(s)
    s.add_argument("--s", required=True, help="sigma[,t]")
    s.add_argument("--tol", type=float, default=1e-12)
    s.add_argument("--euler-n", type=_int_like)
    s.add_argument("--fe-check", action="store_true")
    s.add_argument("--residue", action="store_true")

    s = sub.add_parser("check", parents=[common], help="run the acceptance suite")
    s.add_argument("--level", choices=["desk"], default="desk")
    s.add_argument("--only", type=_int_list, help="comma-separated criterion ids")
    return p


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.time()
    sieve = PrimeSieve(cache=None if args.no_cache else default_cache(), threads=args.threads)
    set_default_sieve(sieve)
    try:
        if args.cmd == "chars":
            results = cmd_chars(args)
        elif args.cmd == "check":
            results = cmd_check(args)
        else:
            results = globals()[f"cmd_{args.cmd}"](args, sieve)
    except (DirwalkError, ValueError, ZeroDivisionError, IndexError) as e:
        parser.print_usage(sys.stderr)
        print(f"dirwalk {args.cmd}: error: {e}", file=sys.stderr)
        return 2
    config = {k: v for k, v in vars(args).items() if k not in ("json",)}
    meta = {"tool": "dirwalk", "version": __version__, "command": args.cmd, "config": config,
            "backend": kernels.BACKEND, "started": t0, "wall_time_s": time.time() - t0}
    dump_json({"meta": meta, "results": results}, args.json)
    if args.cmd == "check" and not results["all_passed"]:
        return 1
    return 0


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
