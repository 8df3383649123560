"""Command-line entry point: ``permrank <subcommand> ...``.

Exit codes: 0 success, 1 a verification found a violation, 2 usage or input
error (including exceeded budgets).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .errors import BudgetExceededError, MatrixFormatError
from .experiments import Kind, append_csv, append_jsonl, mc_estimate, run_exact
from .field import field_from_order
from .linalg import Subspace, format_matrix, read_matrix
from .parallel import default_workers
from .permanent import per_naive, per_ryser, prk
from .permanull import (
    is_jointly_permanull_brute,
    is_permanull_brute,
    is_permanull_poly,
    manyfriends_counterexamples,
    puv_dimension,
    verify_c1_classification,
    verify_char_threshold,
    verify_manyfriends,
)
from .rng import RNG_ID
from .wellspread import certify_full_prk, greedy_partition


class CliError(Exception):
    pass


def _load(path: str, q: int | None):
    spec = field_from_order(q) if q is not None else None
    return read_matrix(path, spec)


def _emit(args, text: str, payload) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _verdict_payload(v) -> dict:
    return {
        "permanull": v.is_permanull,
        "method": v.method.value,
        "alpha": None if v.alpha is None else list(v.alpha),
        "witness": None if v.witness is None else v.witness.tolist(),
    }


def _verdict_text(v) -> str:
    lines = ["permanull" if v.is_permanull else "not permanull"]
    if v.alpha is not None:
        lines.append("alpha " + " ".join(str(j) for j in v.alpha))
    if v.witness is not None:
        lines.append(format_matrix(v.witness).rstrip("\n"))
    return "\n".join(lines)


def cmd_per(args) -> int:
    M = _load(args.file, args.q)
    if not M.is_square:
        raise CliError(f"per needs a square matrix, got shape {M.nrows}x{M.ncols}")
    value = int((per_naive if args.method == "naive" else per_ryser)(M))
    _emit(args, str(value), {"per": value})
    return 0


def cmd_prk(args) -> int:
    r = prk(_load(args.file, args.q))
    rows, cols = r.witness if r.witness else ((), ())
    text = f"{r.value}\nrows {' '.join(map(str, rows))}\ncols {' '.join(map(str, cols))}"
    _emit(args, text, {"prk": r.value, "rows": list(rows), "cols": list(cols)})
    return 0


def cmd_nullcheck(args) -> int:
    S = Subspace.from_matrix(_load(args.file, args.q))
    v = is_permanull_poly(S) if args.method == "poly" else is_permanull_brute(S)
    _emit(args, _verdict_text(v), _verdict_payload(v))
    return 0


def cmd_joint(args) -> int:
    spaces = [Subspace.from_matrix(_load(f, args.q)) for f in args.files]
    v = is_jointly_permanull_brute(spaces)
    _emit(args, _verdict_text(v), _verdict_payload(v))
    return 0


def cmd_wellspread(args) -> int:
    cert = greedy_partition(_load(args.file, args.q)).to_json()
    print(json.dumps(cert, sort_keys=True))
    return 0


def cmd_certify(args) -> int:
    token = certify_full_prk(_load(args.file, args.q)).value
    _emit(args, token, {"certificate": token})
    return 0


def cmd_puv(args) -> int:
    U = Subspace.from_matrix(_load(args.u, args.q))
    V = Subspace.from_matrix(_load(args.v, args.q))
    dim = puv_dimension(U, V)
    _emit(args, str(dim), {"dim": dim})
    return 0


def cmd_verify(args) -> int:
    spec = field_from_order(args.q)
    if args.theorem == "c1":
        report = verify_c1_classification(spec, args.n, args.workers)
    elif args.theorem == "manyfriends":
        if args.n < 3:
            report = manyfriends_counterexamples(spec, args.n, args.workers)
        else:
            report = verify_manyfriends(spec, args.n, args.workers)
    else:
        if args.d is None:
            raise CliError("--theorem charthreshold needs --d")
        report = verify_char_threshold(spec, args.n, args.d, args.workers)
    payload = report.to_json()
    line = json.dumps(payload, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(line + "\n")
    print(line)
    return 0 if report.ok else 1


def _record_out(args, record) -> None:
    if args.out:
        append_jsonl(args.out, record)
    if args.csv:
        append_csv(args.csv, record)
    print(json.dumps(record.to_json(), sort_keys=True))


def cmd_mc(args) -> int:
    kind = Kind(args.kind)
    if kind.is_exact:
        raise CliError(f"{kind.value} is exact; use the 'exact' subcommand")
    record = mc_estimate(kind, args.q, args.n, args.k, args.samples, args.seed, args.workers)
    _record_out(args, record)
    return 0


def cmd_exact(args) -> int:
    kind = Kind(args.kind)
    if not kind.is_exact:
        raise CliError(f"{kind.value} is Monte-Carlo; use the 'mc' subcommand")
    _record_out(args, run_exact(kind, args.q, args.n, args.k, args.workers))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # accepted before or after the subcommand
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="JSON header and JSON results")
    common.add_argument("--q", type=int, help="field order (checked against matrix headers)")
    common.add_argument("--workers", type=int, default=default_workers())

    parser = argparse.ArgumentParser(prog="permrank", description="Permanents over odd-characteristic finite fields.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--json", action="store_true", help="JSON header and JSON results")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("per", parents=[common], help="permanent of a square matrix")
    p.add_argument("file")
    p.add_argument("--method", choices=["ryser", "naive"], default="ryser")
    p.set_defaults(func=cmd_per)

    p = sub.add_parser("prk", parents=[common], help="permanental rank with witness")
    p.add_argument("file")
    p.set_defaults(func=cmd_prk)

    p = sub.add_parser("nullcheck", parents=[common], help="is the row space permanull?")
    p.add_argument("file")
    p.add_argument("--method", choices=["poly", "brute"], default="poly")
    p.set_defaults(func=cmd_nullcheck)

    p = sub.add_parser("joint", parents=[common], help="is the list of row spaces jointly permanull?")
    p.add_argument("files", nargs="+")
    p.set_defaults(func=cmd_joint)

    p = sub.add_parser("wellspread", parents=[common], help="greedy partition certificate (JSON)")
    p.add_argument("file")
    p.set_defaults(func=cmd_wellspread)

    p = sub.add_parser("certify", parents=[common], help="certify full permanental rank")
    p.add_argument("file")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("puv", parents=[common], help="dim P(U, V) for subspaces of F^3")
    p.add_argument("u")
    p.add_argument("v")
    p.set_defaults(func=cmd_puv)

    p = sub.add_parser("verify", parents=[common], help="exhaustive classification checks")
    p.add_argument("--theorem", choices=["c1", "manyfriends", "charthreshold"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=cmd_verify)

    for name, func, kinds in (
        ("mc", cmd_mc, [k.value for k in Kind if not k.is_exact]),
        ("exact", cmd_exact, [k.value for k in Kind if k.is_exact]),
    ):
        p = sub.add_parser(name, parents=[common], help=f"{name} experiment record")
        p.add_argument("--kind", choices=kinds, required=True)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--k", type=int)
        p.add_argument("--out", help="append the JSON-lines record here")
        p.add_argument("--csv", help="append a CSV summary row here")
        if name == "mc":
            p.add_argument("--samples", type=int, default=10_000)
            p.add_argument("--seed", type=int, default=0)
        p.set_defaults(func=func)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("verify", "mc", "exact") and args.q is None:
        parser.error(f"{args.command} needs --q")
    if args.workers < 1:
        parser.error("--workers must be positive")
    if args.json:
        shown = {k: v for k, v in vars(args).items() if k != "func"}
        header = {"tool_version": __version__, "rng_id": RNG_ID, "args": shown}
        print(json.dumps(header, sort_keys=True))
    try:
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"error: budget exceeded: {exc}", file=sys.stderr)
    except (MatrixFormatError, CliError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
