"""Command-line front end for the pipeline.

Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 I/O error.
All subcommands print human-readable text; --json switches to stable
machine-readable JSON on stdout. The data directory comes from --data-dir
or the TERMSPACE_DATA environment variable (default ./data).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import graphexport, vectorstore
from .embeddings import TrainingConfig, train
from .errors import DataError, TermspaceError
from .lexicon import load_lexicon_dir
from .termex import AnnotatedRepository, annotate_corpus
from .textcore import CorpusRepository, ingest

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_IO = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage failures exit 1, not argparse's 2
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="termspace", description=__doc__)
    parser.add_argument(
        "--data-dir",
        default=os.environ.get("TERMSPACE_DATA", "data"),
        help="repository root (env TERMSPACE_DATA)",
    )
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate-lexicon", help="load and validate a lexicon directory")
    p.add_argument("lexicon")

    p = sub.add_parser("ingest", help="create a corpus from text files")
    p.add_argument("files", nargs="+")
    p.add_argument("--corpus", required=True)

    p = sub.add_parser("annotate", help="run the annotation pipeline over a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--lexicon", required=True)

    p = sub.add_parser("train", help="train a term vector model from an annotated corpus")
    p.add_argument("--annotated", required=True)
    p.add_argument("--model", default=None, help="model id (default <annotated>-model)")
    p.add_argument("--algorithm", default="SGNS", choices=["SGNS", "CBOW"])
    p.add_argument("--dim", type=int, default=100)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--min-count", type=int, default=5)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--learning-rate", type=float, default=0.025)

    p = sub.add_parser("query", help="query a trained model")
    p.add_argument("operation", choices=["sim", "neighbors", "analogy", "centroid"])
    p.add_argument("--model", required=True)
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--y")
    p.add_argument("--term")
    p.add_argument("--positive", help="comma-separated term list")
    p.add_argument("--topn", type=int, default=10)
    p.add_argument("--pos")
    p.add_argument("--min-freq", type=int, default=None)

    p = sub.add_parser("graph", help="export a semantic map as JSON")
    p.add_argument("--model", required=True)
    p.add_argument("--terms", required=True, help="comma-separated seed terms")
    p.add_argument("--topn", type=int, default=graphexport.DEFAULT_TOPN)
    p.add_argument("--threshold", type=float, default=graphexport.DEFAULT_THRESHOLD)
    p.add_argument("--depth", type=int, default=graphexport.DEFAULT_DEPTH)
    p.add_argument("--out", required=True)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=int(os.environ.get("TERMSPACE_PORT", "8765")))
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--static", default=None, help="directory with the webapp bundle")
    p.add_argument(
        "--lexicon", default=None, help="lexicon directory (default <data-dir>/lexicon)"
    )
    # also accepted after the subcommand; overrides the global flag
    p.add_argument("--data-dir", dest="data_dir", default=argparse.SUPPRESS)

    return parser


def _emit(args, payload: dict, human: str) -> None:
    if args.json:
        print(json.dumps(payload, ensure_ascii=False))
    else:
        print(human)


def _load_model(args):
    directory = Path(args.data_dir) / "models" / args.model
    if not (directory / vectorstore.VECTORS_FILE).is_file():
        raise DataError(f"unknown model id: {args.model!r}")
    return vectorstore.load_model(directory)


def _require(args, names: list[str]) -> None:
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise _UsageError(f"missing required flags: {', '.join('--' + n for n in missing)}")


def _cmd_validate_lexicon(args) -> int:
    lexicon = load_lexicon_dir(args.lexicon)
    payload = {
        "stems": lexicon.stem_count,
        "inflexions": len(lexicon.inflexions),
        "determinants": len(lexicon.determinants),
        "correlators": len(lexicon.correlators),
        "function_words": len(lexicon.function_words),
        "stopwords": len(lexicon.stopwords),
        "abbreviations": len(lexicon.abbreviations),
    }
    _emit(
        args,
        payload,
        "lexicon ok: {stems} stems, {inflexions} inflexions, {determinants} determinants, "
        "{correlators} correlators".format(**payload),
    )
    return EXIT_OK


def _cmd_ingest(args) -> int:
    repo = CorpusRepository(Path(args.data_dir))
    corpus = ingest(args.files, args.corpus, repo)
    payload = {"id": corpus.id, "documents": len(corpus.documents)}
    _emit(args, payload, f"corpus {corpus.id!r}: {len(corpus.documents)} documents ingested")
    return EXIT_OK


def _cmd_annotate(args) -> int:
    root = Path(args.data_dir)
    corpora = CorpusRepository(root)
    annotated_repo = AnnotatedRepository(root)
    lexicon = load_lexicon_dir(args.lexicon)
    corpus = corpora.load(args.corpus)
    annotated = annotate_corpus(corpus, lexicon, annotated_repo, corpora)
    payload = {
        "id": corpus.id,
        "sentences": len(annotated.sentences),
        "vocabulary": len(annotated.vocabulary),
    }
    _emit(
        args,
        payload,
        f"annotated {corpus.id!r}: {payload['sentences']} sentences, "
        f"{payload['vocabulary']} vocabulary entries",
    )
    return EXIT_OK


def _cmd_train(args) -> int:
    root = Path(args.data_dir)
    annotated_repo = AnnotatedRepository(root)
    stream = annotated_repo.stream_path(args.annotated).read_text(encoding="utf-8").splitlines()
    vocab = annotated_repo.load_vocab(args.annotated)
    config = TrainingConfig(
        algorithm=args.algorithm,
        dim=args.dim,
        window=args.window,
        negatives=args.negatives,
        epochs=args.epochs,
        min_count=args.min_count,
        seed=args.seed,
        initial_learning_rate=args.learning_rate,
    )
    config.validate()
    model = train(stream, config, {k: v.head_pos for k, v in vocab.items()})
    model_id = args.model or f"{args.annotated}-model"
    vectorstore.save_model(model, root / "models" / model_id)
    payload = {"id": model_id, "vocab_size": len(model.vocabulary), "dim": model.dim}
    _emit(
        args,
        payload,
        f"model {model_id!r}: {payload['vocab_size']} terms, dim {model.dim}",
    )
    return EXIT_OK


def _cmd_query(args) -> int:
    model = _load_model(args)
    if args.operation == "sim":
        _require(args, ["a", "b"])
        value = vectorstore.similarity(model, args.a, args.b)
        _emit(args, {"similarity": value}, f"similarity({args.a}, {args.b}) = {value:.6f}")
        return EXIT_OK
    if args.operation == "neighbors":
        _require(args, ["term"])
        found = vectorstore.neighbors(
            model,
            args.term,
            args.topn,
            vectorstore.QueryFilter(pos=args.pos, min_freq=args.min_freq),
        )
        payload = {"neighbors": [{"term": n.term, "similarity": n.similarity} for n in found]}
        lines = [f"{n.term}\t{n.similarity:.6f}" for n in found]
        _emit(args, payload, "\n".join(lines) if lines else "(no neighbors)")
        return EXIT_OK
    if args.operation == "analogy":
        _require(args, ["y", "a", "b"])
        found = vectorstore.analogy(model, args.y, args.a, args.b, args.topn)
        payload = {"neighbors": [{"term": n.term, "similarity": n.similarity} for n in found]}
        lines = [f"{n.term}\t{n.similarity:.6f}" for n in found]
        _emit(args, payload, "\n".join(lines) if lines else "(no results)")
        return EXIT_OK
    _require(args, ["positive"])
    terms = [t.strip() for t in args.positive.split(",") if t.strip()]
    vector, found = vectorstore.centroid(model, terms, args.topn)
    payload = {
        "vector": [float(x) for x in vector],
        "neighbors": [{"term": n.term, "similarity": n.similarity} for n in found],
    }
    lines = [f"{n.term}\t{n.similarity:.6f}" for n in found]
    _emit(args, payload, "\n".join(lines) if lines else "(no results)")
    return EXIT_OK


def _cmd_graph(args) -> int:
    model = _load_model(args)
    seeds = [t.strip() for t in args.terms.split(",") if t.strip()]
    built = graphexport.build_map(model, seeds, args.topn, args.threshold, args.depth)
    document = built.to_json()
    document["params"]["model"] = args.model
    Path(args.out).write_text(
        json.dumps(document, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )
    payload = {"nodes": len(built.nodes), "edges": len(built.edges), "out": args.out}
    _emit(
        args,
        payload,
        f"map written to {args.out}: {payload['nodes']} nodes, {payload['edges']} edges",
    )
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    root = Path(args.data_dir)
    app = create_app(root, lexicon_dir=args.lexicon, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


_COMMANDS = {
    "validate-lexicon": _cmd_validate_lexicon,
    "ingest": _cmd_ingest,
    "annotate": _cmd_annotate,
    "train": _cmd_train,
    "query": _cmd_query,
    "graph": _cmd_graph,
    "serve": _cmd_serve,
}


def run(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TermspaceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
