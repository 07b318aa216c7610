"""Command-line harness: ``partcs <subcommand> [options]``.

Sweeps are written as CSV (with a leading ``#`` metadata line), single
objects as JSON. Validation errors exit with status 2.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .channel import ChannelProfile
from .codec import CodecConfig, Payload, detect, encode, params_to_payload
from .construct import SeparationVector
from .enumeration import rank_sep_dist, unrank_sep_dist
from .seqcore import seq_from_json, seq_to_json
from .sim import bler_curve, ccdf, dmin_rows, enumerate_rows, pmepr_samples, qpsk_pmepr_samples

log = logging.getLogger("partcs")


def _int_list(text: str) -> list[int]:
    """Parse ``"1,2,5"`` or ``"3:9"`` (inclusive range)."""
    out: list[int] = []
    for part in text.split(","):
        if ":" in part:
            a, b = part.split(":")
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    return out


def _float_list(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p]


def _add_code_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--M", type=int, required=True, help="number of subcarriers")
    p.add_argument("--m", type=int, required=True, help="log2 of the number of nonzero elements")
    p.add_argument("--H", type=int, default=4, help="PSK alphabet size")
    p.add_argument("--l", type=int, default=0, help="distance level")
    p.add_argument("--nmax", type=int, default=10000, help="separations kept after preparation")
    p.add_argument("--nbest", type=int, default=400, help="survivors per decoder level")


def _config(args) -> CodecConfig:
    return CodecConfig(args.M, args.m, args.H, args.l, args.nmax, args.nbest)


def _meta(args, **extra) -> str:
    fields = {"version": __version__, "command": args.command, "seed": args.seed, **extra}
    return "# " + " ".join(f"{k}={v}" for k, v in fields.items())


def _csv(rows: list[dict], meta: str) -> str:
    buf = io.StringIO()
    buf.write(meta + "\n")
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


def _emit(args, rows: list[dict] | None = None, obj=None, **meta) -> None:
    if obj is None:
        text = json.dumps(rows, indent=2) + "\n" if args.format == "json" else _csv(rows, _meta(args, **meta))
    else:
        text = json.dumps(obj, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _bits_from_hex(text: str, n_bits: int) -> tuple[int, ...]:
    value = int(text, 16)
    if value >> n_bits:
        raise ValueError(f"hex payload {text} does not fit in {n_bits} bits")
    return tuple((value >> (n_bits - 1 - j)) & 1 for j in range(n_bits))


def _hex(payload: Payload) -> str:
    return format(payload.to_int(), "x")


# --- subcommands -------------------------------------------------------------


def cmd_enumerate(args) -> None:
    ls = _int_list(args.ls) if args.ls else None
    rows = enumerate_rows(_int_list(args.Ms), _int_list(args.ms), args.H, ls)
    if not rows:
        raise ValueError("no feasible (M, m) combination in the requested grid")
    _emit(args, rows, H=args.H)


def cmd_dmin_scan(args) -> None:
    _emit(args, dmin_rows(_int_list(args.ms), _int_list(args.Zs), args.H), H=args.H)


def cmd_rank(args) -> None:
    vec = _int_list(args.sep)
    sep = SeparationVector(vec[0], tuple(vec[1:]))
    n = rank_sep_dist(sep, args.Z, args.m, args.l)
    _emit(args, obj={"rank": n, "s0": sep.s0, "sep": list(sep.sep), "Z": args.Z, "m": args.m, "l": args.l})


def cmd_unrank(args) -> None:
    sep = unrank_sep_dist(args.n, args.Z, args.m, args.l)
    _emit(args, obj={"rank": args.n, "s0": sep.s0, "sep": list(sep.sep), "Z": args.Z, "m": args.m, "l": args.l})


def cmd_encode(args) -> None:
    cfg = _config(args)
    payload = Payload.from_bits(_bits_from_hex(args.bits, cfg.n_bits), cfg)
    params, frame = encode(payload, cfg)
    _emit(args, obj={"bits": _hex(payload), "n_bits": cfg.n_bits, "params": params.to_json(), "sequence": seq_to_json(frame)})


def cmd_decode(args) -> None:
    cfg = _config(args)
    obj = json.loads(Path(args.input).read_text() if args.input != "-" else sys.stdin.read())
    # accept either a bare sequence or the output of `encode`
    y = seq_from_json(obj.get("sequence", obj))
    gains = seq_from_json(json.loads(Path(args.gains).read_text())) if args.gains else np.ones(cfg.M)
    det = detect(y, gains, cfg)
    payload = params_to_payload(det.params, det.sep_rank, cfg)
    _emit(args, obj={"bits": _hex(payload), "n_bits": cfg.n_bits, "params": det.params.to_json(), "sep_rank": det.sep_rank})


def cmd_pmepr(args) -> None:
    if args.n < 1:
        raise ValueError("--n must be >= 1")
    if args.control == "qpsk":
        values = qpsk_pmepr_samples(args.M, args.n, args.seed, args.oversample)
        meta = {"control": "qpsk", "M": args.M}
    else:
        cfg = _config(args)
        values = pmepr_samples(cfg, args.n, args.seed, args.oversample)
        meta = {"M": cfg.M, "m": cfg.m, "H": cfg.H, "l": cfg.l}
    rows = [{"pmepr_db": x, "ccdf": p} for x, p in ccdf(values)]
    _emit(args, rows, n=args.n, oversample=args.oversample, **meta)


def cmd_bler(args) -> None:
    cfg = _config(args)
    ebn0 = _float_list(args.ebn0)
    if not ebn0:
        raise ValueError("--ebn0 needs at least one value")
    if args.trials < 1 or args.max_errors < 1 or args.workers < 1:
        raise ValueError("--trials, --max-errors and --workers must be >= 1")
    if args.profile:
        profile = ChannelProfile.load(args.profile)
    elif args.channel == "fading":
        profile = ChannelProfile.default_fading()
    else:
        profile = ChannelProfile(args.channel)
    points = bler_curve(cfg, profile, ebn0, args.trials, args.seed, args.max_errors, args.workers)
    rows = [{"ebn0_db": p.ebn0_db, "trials": p.trials, "block_errors": p.block_errors, "bler": p.bler} for p in points]
    _emit(args, rows, M=cfg.M, m=cfg.m, H=cfg.H, l=cfg.l, nmax=cfg.n_max, nbest=cfg.n_best, channel=profile.kind)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="partcs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", parents=[common], help="bit budgets over an (M, m, l) grid")
    p.add_argument("--Ms", default="64,128,256,512")
    p.add_argument("--ms", default="1:9")
    p.add_argument("--ls", default="0", help="distance levels (default 0; 'all' scans 0..m-1)")
    p.add_argument("--H", type=int, default=4)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("dmin-scan", parents=[common], help="distance bound versus spectral efficiency")
    p.add_argument("--ms", default="3:8")
    p.add_argument("--Zs", default="0:256")
    p.add_argument("--H", type=int, default=4)
    p.set_defaults(func=cmd_dmin_scan)

    for name, func in (("rank", cmd_rank), ("unrank", cmd_unrank)):
        p = sub.add_parser(name, parents=[common], help=f"{name} a separation vector")
        p.add_argument("--Z", type=int, required=True)
        p.add_argument("--m", type=int, required=True)
        p.add_argument("--l", type=int, default=0)
        if name == "rank":
            p.add_argument("--sep", required=True, help="s0,g1,...,gm")
        else:
            p.add_argument("--n", type=int, required=True, help="1-based rank")
        p.set_defaults(func=func)

    p = sub.add_parser("encode", parents=[common], help="payload (hex) to sequence")
    _add_code_flags(p)
    p.add_argument("--bits", required=True, help="payload as hex, bits_nonzero then bits_index")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", parents=[common], help="received sequence to payload (hex)")
    _add_code_flags(p)
    p.add_argument("--input", required=True, help="sequence JSON file, or - for stdin")
    p.add_argument("--gains", help="channel gains as sequence JSON (default: all ones)")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("pmepr", parents=[common], help="PMEPR CCDF of random codewords")
    _add_code_flags(p)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--oversample", type=int, default=8)
    p.add_argument("--control", choices=("none", "qpsk"), default="none")
    p.set_defaults(func=cmd_pmepr)

    p = sub.add_parser("bler", parents=[common], help="block error rate Monte Carlo")
    _add_code_flags(p)
    p.add_argument("--ebn0", required=True, help="comma-separated Eb/N0 values in dB")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--max-errors", type=int, default=200)
    p.add_argument("--channel", choices=("flat", "iid-rayleigh", "fading"), default="flat")
    p.add_argument("--profile", help="tapped-delay profile file (JSON or TOML)")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_bler)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "ls", None) == "all":
        args.ls = None
    try:
        args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        log.error("%s", exc)
        print(f"partcs {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
