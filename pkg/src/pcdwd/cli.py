"""Command-line interface: ``pcdwd {wd,expand,oracle,selftest,bench}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from .code import (
    CRC,
    PAC,
    DEFAULT_PARITY_TAPS,
    DEFAULT_PAC_MEMORY,
    CodeSpec,
    Explicit,
    Identity,
    ParityCheck,
    RandomUpper,
    ReliabilityError,
    build_info_set,
    load_reliability_sequence,
    make_code,
    nr_reliability_sequence,
)
from .engine import DEFAULT_MAX_LAMBDA, EngineStats, ResourceLimitError, WeightDistribution, compute_wd
from .equivalence import class_member, monte_carlo_reduction, optimize_pretransform
from .expansion import baseline_expansion_size, expanded_information_set
from .gf2 import BitVector, UnitUpperTriangularMatrix
from .identities import run_identities
from .oracle import OracleLimitError, OracleLimits, brute_force_wd

log = logging.getLogger("pcdwd")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RESOURCE = 2
EXIT_SELFTEST = 3

BENCH_RATES = {
    "table1": (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9),
    "table2": (0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9),
    "table3": (0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _add_code_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, required=True, help="log2 of the block length")
    p.add_argument("--k", type=int, help="number of information positions")
    p.add_argument("--frozen", type=_int_list, help="explicit 1-based frozen positions (overrides --seq/--k)")
    p.add_argument("--seq", type=Path, help="reliability sequence file (default: bundled 5G NR sequence)")
    p.add_argument(
        "--pretransform",
        choices=["identity", "pac", "pc", "crc", "random", "explicit"],
        default="identity",
    )
    p.add_argument("--memory", help="PAC memory as a bit string, e.g. 10101011")
    p.add_argument("--taps", type=_int_list, default=list(DEFAULT_PARITY_TAPS), help="parity-check back-offsets")
    p.add_argument("--parity-positions", type=_int_list, help="parity positions (default: every frozen index)")
    p.add_argument("--crc-poly", help="CRC polynomial bits, highest degree first, e.g. 1011")
    p.add_argument("--density", type=float, default=0.5, help="random pre-transform density")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--matrix", type=Path, help="explicit T: one row of 0/1 characters per line")


def _add_output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", "-o", type=Path, help="write the spectrum here instead of stdout")
    p.add_argument("--format", choices=["csv", "json"], default="csv")


def _load_seq(path: Path | None, N: int):
    if path is None:
        return nr_reliability_sequence()
    with open(path, "rb") as fh:
        return load_reliability_sequence(fh)


def _recipe(args):
    kind = args.pretransform
    if kind == "identity":
        return Identity()
    if kind == "pac":
        if not args.memory:
            raise UsageError("--pretransform pac needs --memory")
        return PAC(BitVector.from_string(args.memory))
    if kind == "pc":
        positions = frozenset(args.parity_positions) if args.parity_positions is not None else None
        return ParityCheck(tuple(args.taps), positions)
    if kind == "crc":
        if not args.crc_poly:
            raise UsageError("--pretransform crc needs --crc-poly")
        return CRC(BitVector.from_string(args.crc_poly))
    if kind == "random":
        return RandomUpper(args.density, args.seed)
    if kind == "explicit":
        if not args.matrix:
            raise UsageError("--pretransform explicit needs --matrix")
        rows = [line.strip() for line in args.matrix.read_text().splitlines() if line.strip()]
        return Explicit(UnitUpperTriangularMatrix.from_rows([[int(c) for c in r.replace(" ", "")] for r in rows]))
    raise UsageError(f"unknown pretransform {kind}")


def build_code(args) -> CodeSpec:
    if args.n < 0 or args.n > 10:
        raise UsageError("--n must lie in [0, 10]")
    N = 1 << args.n
    recipe = _recipe(args)
    if args.frozen is not None:
        return make_code(args.n, recipe, frozen=args.frozen)
    if args.k is None:
        raise UsageError("give --k (with an optional --seq) or --frozen")
    return make_code(args.n, recipe, K=args.k, seq=_load_seq(args.seq, N))


# ---------------------------------------------------------------- output


def format_spectrum(wd: WeightDistribution, fmt: str, *, n: int, k: int, lam: int | None) -> str:
    if fmt == "json":
        obj = {
            "n": n,
            "N": 1 << n,
            "k": k,
            "lambda": lam,
            "spectrum": [{"w": w, "count": str(c)} for w, c in wd.nonzero()],
        }
        return json.dumps(obj, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["weight", "count"])
    for w, c in wd.nonzero():
        writer.writerow([w, str(c)])
    return buf.getvalue()


def _emit(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        path.write_text(text)


def _table_csv(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# ---------------------------------------------------------------- commands


def cmd_wd(args) -> int:
    code = build_code(args)
    stats = EngineStats()
    info: dict = {"N": code.N, "K": code.K, "lambda_baseline": baseline_expansion_size(code)}
    target = code
    if args.optimize:
        report = optimize_pretransform(code)
        info.update(report.as_dict())
        target = class_member(code, report.j_star)
    exp = expanded_information_set(target)
    info["lambda"] = exp.lam
    # report the plan before enumerating so a resource-guard exit still shows it
    print(json.dumps({"plan": info}, sort_keys=True), file=sys.stderr, flush=True)
    wd = compute_wd(
        target,
        workers=args.workers,
        use_cache=not args.no_cache,
        max_lambda=args.max_lambda,
        stats=stats,
        expansion=exp,
    )
    info.update(stats.as_dict())
    _emit(format_spectrum(wd, args.format, n=code.n, k=code.K, lam=stats.lam), args.output)
    print(json.dumps(info, sort_keys=True), file=sys.stderr)
    return EXIT_OK


def cmd_expand(args) -> int:
    code = build_code(args)
    exp = expanded_information_set(code)
    out = {"N": code.N, "K": code.K, "n1": baseline_expansion_size(code), "n2": exp.lam}
    if args.optimize:
        report = optimize_pretransform(code)
        out["n3"] = report.lam_star
        out["j_star"] = report.j_star
        out["memory_star"] = report.memory_star.to_string() if report.memory_star else None
    if args.json:
        _emit(json.dumps(out, sort_keys=True) + "\n", args.output)
    else:
        _emit("".join(f"{key}: {value}\n" for key, value in out.items()), args.output)
    return EXIT_OK


def cmd_oracle(args) -> int:
    code = build_code(args)
    wd = brute_force_wd(code, OracleLimits(max_k=args.max_k))
    _emit(format_spectrum(wd, args.format, n=code.n, k=code.K, lam=None), args.output)
    return EXIT_OK


def _faulty_row(n: int, i: int) -> int:
    from .gf2 import kernel_row_bits

    row = kernel_row_bits(n, i)
    return row ^ (1 << ((1 << n) - 1)) if n >= 2 and i == 3 else row


def cmd_selftest(args) -> int:
    if not 0 <= args.max_n <= 10:
        raise UsageError("--max-n must lie in [0, 10]")
    row = _faulty_row if args.inject_fault else None
    results = run_identities(args.max_n, seed=args.seed, samples=args.samples, row=row)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.ok]
    print(f"{len(results) - len(failed)}/{len(results)} identity checks passed")
    return EXIT_SELFTEST if failed else EXIT_OK


def _ks(args, table: str, N: int) -> list[int]:
    if args.k:
        return args.k
    return [int(N * r) for r in BENCH_RATES[table]]


def cmd_bench(args) -> int:
    table = args.table
    if table in ("table1", "table3"):
        n = args.n or 7
        N = 1 << n
        seq = _load_seq(args.seq, N)
        rows = []
        for K in _ks(args, table, N):
            if table == "table1":
                code = make_code(n, ParityCheck(tuple(args.taps)), K=K, seq=seq)
                rows.append([K, baseline_expansion_size(code), expanded_information_set(code).lam])
            else:
                code = make_code(n, PAC(BitVector.from_string(args.memory)), K=K, seq=seq)
                rep = optimize_pretransform(code)
                mem = rep.memory_star.to_string() if rep.memory_star else ""
                rows.append([K, rep.baseline, rep.lam_original, rep.lam_star, rep.j_star, mem])
        if table == "table1":
            header = ["K", "n1", "n2"]
            print("parity positions: every frozen index; taps " + ",".join(map(str, args.taps)), file=sys.stderr)
        else:
            header = ["K", "n1", "n2", "n3", "j_star", "memory_star"]
        _emit(_table_csv(header, rows), args.output)
        return EXIT_OK
    n = args.n or 7
    N = 1 << n
    seq = _load_seq(args.seq, N)

    def progress(K, done, total):
        if done == total or done % 2000 < 1:
            log.info("N=%d K=%d %d/%d", N, K, done, total)

    result = monte_carlo_reduction(
        N, _ks(args, table, N), args.samples, seed=args.seed, density=args.density, seq=seq, progress=progress
    )
    rows = [[r.N, r.K, r.samples, f"{100 * r.r1:.2f}", f"{100 * r.r2:.2f}"] for r in result]
    _emit(_table_csv(["N", "K", "samples", "r1_percent", "r2_percent"], rows), args.output)
    return EXIT_OK


# ---------------------------------------------------------------- entry point


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pcdwd", description="Exact weight distributions of pre-transformed polar codes.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("wd", help="compute the exact weight distribution")
    _add_code_args(p)
    _add_output_args(p)
    p.add_argument("--optimize", action="store_true", help="switch to the cheapest equivalent pre-transform first")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-cache", action="store_true")
    p.add_argument("--max-lambda", type=int, default=DEFAULT_MAX_LAMBDA)
    p.set_defaults(func=cmd_wd)

    p = sub.add_parser("expand", help="report expanded information set sizes")
    _add_code_args(p)
    p.add_argument("--optimize", action="store_true")
    p.add_argument("--json", action="store_true")
    p.add_argument("--output", "-o", type=Path)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("oracle", help="brute-force weight distribution")
    _add_code_args(p)
    _add_output_args(p)
    p.add_argument("--max-k", type=int, default=OracleLimits.max_k)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("selftest", help="check the kernel identities")
    p.add_argument("--max-n", type=int, default=6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("bench", help="regenerate the expansion-size tables")
    p.add_argument("table", choices=["table1", "table2", "table3"])
    p.add_argument("--seq", type=Path)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=_int_list, help="override the list of dimensions")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--taps", type=_int_list, default=list(DEFAULT_PARITY_TAPS))
    p.add_argument("--memory", default=DEFAULT_PAC_MEMORY)
    p.add_argument("--output", "-o", type=Path)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ResourceLimitError, OracleLimitError) as exc:
        print(f"pcdwd: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (UsageError, ReliabilityError, ValueError, IndexError, OSError) as exc:
        print(f"pcdwd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
