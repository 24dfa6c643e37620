"""Command-line front end.

Subcommands: simplify, encode, decode, validate, tokenize, detokenize,
bpe-train, generate, stats.  Exit codes: 0 ok, 1 validation failure,
2 I/O or format error, 3 configuration error.  ``--report machine``
switches reports to one key=value per line.  ``PSCKIT_THREADS`` bounds
the worker pool used when loading many corpus files.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import bpe as bpe_mod
from . import formats, generate, meshfile, psc as psc_mod, tokenizer
from .complex import SimplicialComplex
from .quadrics import PenaltyConfig
from .simplify import simplify


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 3
        raise ConfigError(message)


class Reporter:
    def __init__(self, fmt: str):
        self.machine = fmt == "machine"

    def emit(self, key: str, value) -> None:
        if isinstance(value, float):
            value = f"{value:.17g}"
        if self.machine:
            print(f"{key}={value}")
        else:
            print(f"{key}: {value}")


def _parse_penalties(text: str) -> PenaltyConfig:
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigError(f"--penalties expects V,E,F, got {text!r}")
    try:
        v, e, f = (float(p) for p in parts)
        return PenaltyConfig(v, e, f)
    except ValueError as exc:
        raise ConfigError(f"bad --penalties {text!r}: {exc}") from exc


def _parse_root(text: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigError(f"--root expects X,Y,Z, got {text!r}")
    try:
        return np.array([float(p) for p in parts])
    except ValueError as exc:
        raise ConfigError(f"bad --root {text!r}: {exc}") from exc


_MODE_BY_FLAG = {"delaunay": "edges+delaunay", "knn": "edges+knn", "none": "edges-only"}


def _stop_criterion(args) -> int | None:
    if args.target_vertices is not None and args.full:
        raise ConfigError("give exactly one of --target-vertices or --full")
    if args.target_vertices is None and not args.full:
        raise ConfigError("give exactly one of --target-vertices or --full")
    return args.target_vertices


def _read_psc_file(path: str) -> psc_mod.PSC:
    with open(path, "rb") as fh:
        return formats.read_psc(fh.read())


def _log_to_json(log) -> dict:
    return {
        "snapshot_id": log.snapshot_id,
        "root_position": None if log.root_position is None else list(log.root_position),
        "records": [
            {
                "step": r.step,
                "pair": list(r.pair),
                "survivor": r.survivor,
                "placement": r.placement,
                "position": list(r.position),
                "cost": r.cost,
                "diff": {" ".join(map(str, k)): v for k, v in r.diff.items()},
            }
            for r in log.records
        ],
    }


def cmd_simplify(args, rep: Reporter) -> int:
    target = _stop_criterion(args)
    mesh = meshfile.read_mesh(args.input)
    result, log = simplify(
        mesh,
        penalties=_parse_penalties(args.penalties),
        mode=_MODE_BY_FLAG[args.virtual_edges],
        target_vertices=target,
        knn_k=args.knn_k,
    )
    meshfile.write_mesh(args.output, result)
    if args.log:
        import json

        with open(args.log, "w", encoding="utf-8") as fh:
            json.dump(_log_to_json(log), fh)
    rep.emit("input_vertices", log.initial.n_vertices)
    rep.emit("output_vertices", result.n_vertices)
    rep.emit("collapses", len(log.records))
    rep.emit("snapshot_id", log.snapshot_id)
    return 0


def cmd_encode(args, rep: Reporter) -> int:
    mesh = meshfile.read_mesh(args.input)
    _, log = simplify(
        mesh,
        penalties=_parse_penalties(args.penalties),
        mode=_MODE_BY_FLAG[args.virtual_edges],
        target_vertices=None,
        knn_k=args.knn_k,
    )
    p = psc_mod.reverse_log(log)
    with open(args.output, "wb") as fh:
        fh.write(formats.write_psc(p, quantized=args.quantize))
    rep.emit("vertices", p.n_vertices)
    rep.emit("splits", len(p.splits))
    rep.emit("root", ",".join(f"{x:.17g}" for x in p.root_position))
    rep.emit("quantized", int(args.quantize))
    return 0


def cmd_decode(args, rep: Reporter) -> int:
    if (args.lod is None) == (args.steps is None):
        raise ConfigError("give exactly one of --lod or --steps")
    p = _read_psc_file(args.input)
    mesh = psc_mod.reconstruct(p, steps=args.steps, ratio=args.lod)
    meshfile.write_mesh(args.output, mesh)
    rep.emit("splits_applied", mesh.n_vertices - 1)
    rep.emit("vertices", mesh.n_vertices)
    rep.emit("edges", mesh.n_edges)
    rep.emit("triangles", mesh.n_triangles)
    return 0


def cmd_validate(args, rep: Reporter) -> int:
    p = _read_psc_file(args.input)
    try:
        mesh = psc_mod.reconstruct(p)
    except psc_mod.ReplayError as exc:
        rep.emit("valid", 0)
        rep.emit("step", exc.step)
        cause = exc.cause
        if isinstance(cause, psc_mod.RuleViolationError):
            rep.emit("rule", f"R{cause.violation.rule}")
        rep.emit("error", str(cause))
        return 1
    flags = mesh.validate()
    rep.emit("valid", 1)
    rep.emit("vertices", mesh.n_vertices)
    rep.emit("degenerate_flags", len(flags))
    return 0


def cmd_tokenize(args, rep: Reporter) -> int:
    p = _read_psc_file(args.input)
    stream = tokenizer.encode_psc(p)
    base_len = len(stream)
    if args.vocab:
        with open(args.vocab, "r", encoding="utf-8") as fh:
            vocab = bpe_mod.Vocabulary.from_text(fh.read())
        stream = bpe_mod.bpe_apply(stream, vocab)
    with open(args.output, "wb") as fh:
        fh.write(formats.write_tokens(stream.ids))
    rep.emit("splits", len(p.splits))
    rep.emit("base_tokens", base_len)
    rep.emit("tokens", len(stream))
    rep.emit("root", ",".join(f"{x:.17g}" for x in p.root_position))
    return 0


def cmd_detokenize(args, rep: Reporter) -> int:
    with open(args.input, "rb") as fh:
        ids = formats.read_tokens(fh.read())
    stream = tokenizer.TokenStream(tuple(ids), base=args.vocab is None)
    if args.vocab:
        with open(args.vocab, "r", encoding="utf-8") as fh:
            vocab = bpe_mod.Vocabulary.from_text(fh.read())
        stream = bpe_mod.bpe_decode(stream, vocab)
    root = _parse_root(args.root)
    p, _ = tokenizer.decode_tokens(stream.ids, root)
    with open(args.output, "wb") as fh:
        fh.write(formats.write_psc(p, quantized=args.quantize))
    rep.emit("splits", len(p.splits))
    rep.emit("vertices", p.n_vertices)
    return 0


def _load_token_file(path: str) -> list[int]:
    with open(path, "rb") as fh:
        return formats.read_tokens(fh.read())


def cmd_bpe_train(args, rep: Reporter) -> int:
    if not args.inputs:
        raise ConfigError("bpe-train needs at least one input token file")
    workers = int(os.environ.get("PSCKIT_THREADS", "0")) or min(8, len(args.inputs))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        streams = list(pool.map(_load_token_file, args.inputs))  # input order kept
    vocab = bpe_mod.bpe_train(streams, target=args.vocab)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(vocab.to_text())
    base_total = sum(len(s) for s in streams)
    compressed = sum(
        len(bpe_mod.bpe_apply(tokenizer.TokenStream(tuple(s), base=True), vocab))
        for s in streams
    )
    rep.emit("corpus_files", len(args.inputs))
    rep.emit("base_tokens", base_total)
    rep.emit("compressed_tokens", compressed)
    rep.emit("ratio", compressed / base_total if base_total else 1.0)
    rep.emit("vocab_size", vocab.size)
    return 0


def cmd_generate(args, rep: Reporter) -> int:
    if args.scorer != "uniform":
        raise ConfigError(f"unknown scorer {args.scorer!r} (available: uniform)")
    stream, mesh = generate.constrained_generate(
        generate.uniform_scorer, seed=args.seed, max_splits=args.max_splits
    )
    if args.output:
        meshfile.write_mesh(args.output, mesh)
    if args.tokens:
        with open(args.tokens, "wb") as fh:
            fh.write(formats.write_tokens(stream.ids))
    rep.emit("seed", args.seed)
    rep.emit("tokens", len(stream))
    rep.emit("vertices", mesh.n_vertices)
    rep.emit("edges", mesh.n_edges)
    rep.emit("triangles", mesh.n_triangles)
    return 0


def _stats_mesh(mesh: SimplicialComplex, rep: Reporter) -> None:
    rep.emit("vertices", mesh.n_vertices)
    rep.emit("edges", mesh.n_edges)
    rep.emit("triangles", mesh.n_triangles)


def cmd_stats(args, rep: Reporter) -> int:
    ext = os.path.splitext(args.input)[1].lower()
    if ext in (".obj", ".off"):
        rep.emit("kind", "mesh")
        _stats_mesh(meshfile.read_mesh(args.input), rep)
    elif ext == ".psc":
        p = _read_psc_file(args.input)
        rep.emit("kind", "psc")
        rep.emit("vertices", p.n_vertices)
        rep.emit("splits", len(p.splits))
        base = sum(9 + len(vs.labels) for vs in p.splits)
        rep.emit("record_tokens", base)
        rep.emit("stream_tokens", base + 2 if p.splits else base)
    elif ext == ".tok":
        with open(args.input, "rb") as fh:
            ids = formats.read_tokens(fh.read())
        rep.emit("kind", "tokens")
        rep.emit("tokens", len(ids))
        if args.vocab:
            with open(args.vocab, "r", encoding="utf-8") as fh:
                vocab = bpe_mod.Vocabulary.from_text(fh.read())
            base = bpe_mod.bpe_decode(
                tokenizer.TokenStream(tuple(ids), base=False), vocab
            )
            records = sum(1 for t in base.ids if t in (tokenizer.MID_FALSE, tokenizer.MID_TRUE))
            rep.emit("base_tokens", len(base))
            rep.emit("splits", records)
            rep.emit("tokens_per_vertex", len(ids) / (records + 1))
        else:
            records = sum(1 for t in ids if t in (tokenizer.MID_FALSE, tokenizer.MID_TRUE))
            rep.emit("splits", records)
            rep.emit("tokens_per_vertex", len(ids) / (records + 1))
    else:
        raise ConfigError(f"unsupported input extension {ext!r}")
    return 0


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--report", choices=("text", "machine"), default="text")


def build_parser() -> _Parser:
    parser = _Parser(prog="psckit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simplify", help="greedy quadric simplification")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--log", help="write the collapse log as JSON")
    p.add_argument("--target-vertices", type=int)
    p.add_argument("--full", action="store_true", help="simplify to a single point")
    p.add_argument("--penalties", default="0,1,1", help="V,E,F weights")
    p.add_argument("--virtual-edges", choices=sorted(_MODE_BY_FLAG), default="delaunay")
    p.add_argument("--knn-k", type=int, default=8)
    _add_common(p)
    p.set_defaults(func=cmd_simplify)

    p = sub.add_parser("encode", help="mesh -> PSC by reversing a full simplification")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--penalties", default="0,1,1")
    p.add_argument("--virtual-edges", choices=sorted(_MODE_BY_FLAG), default="delaunay")
    p.add_argument("--knn-k", type=int, default=8)
    p.add_argument("--quantize", action="store_true", help="store offsets as binary16")
    _add_common(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="PSC -> mesh at a level of detail")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--lod", type=float, help="ratio of splits to apply, 0..1")
    p.add_argument("--steps", type=int, help="number of splits to apply")
    _add_common(p)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("validate", help="replay a PSC with full rule checking")
    p.add_argument("--input", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("tokenize", help="PSC -> token file")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--vocab", help="merge table to compress with")
    _add_common(p)
    p.set_defaults(func=cmd_tokenize)

    p = sub.add_parser("detokenize", help="token file -> PSC")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--vocab", help="merge table to expand with")
    p.add_argument("--root", default="0,0,0", help="root position X,Y,Z")
    p.add_argument("--quantize", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_detokenize)

    p = sub.add_parser("bpe-train", help="train a merge table on token files")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--vocab", type=int, default=16384, help="target vocabulary size")
    _add_common(p)
    p.set_defaults(func=cmd_bpe_train)

    p = sub.add_parser("generate", help="sample a random valid complex")
    p.add_argument("--scorer", default="uniform")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-splits", type=int, default=16)
    p.add_argument("--output", help="mesh file (.obj/.off)")
    p.add_argument("--tokens", help="token file to write")
    _add_common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("stats", help="report counts for a mesh/PSC/token file")
    p.add_argument("--input", required=True)
    p.add_argument("--vocab", help="merge table for compressed token files")
    _add_common(p)
    p.set_defaults(func=cmd_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        rep = Reporter(args.report)
        return args.func(args, rep)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    except (formats.FormatError, meshfile.MeshFileError, OSError, UnicodeDecodeError) as exc:
        print(f"i/o or format error: {exc}", file=sys.stderr)
        return 2
    except (
        psc_mod.ReplayError,
        psc_mod.RuleViolationError,
        tokenizer.TokenError,
        ValueError,
        KeyError,
        RuntimeError,
    ) as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
