"""Command-line entry points: the authoring service and offline survey scoring."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="storyloom",
        description="Storyboard-driven multi-chapter story generation")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the authoring service")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--data-dir", default="./storyloom-data")
    serve.add_argument("--provider", choices=["mock", "openai-compatible"],
                       default="mock")
    serve.add_argument("--model", default=None, help="model name for real providers")
    serve.add_argument("--endpoint", default=None,
                       help="base URL of an OpenAI-compatible endpoint")
    serve.add_argument("--debug-prompts", action="store_true",
                       help="write compiled prompts to the transcript log")
    serve.add_argument("--vocab", default=None,
                       help="path to a custom genres/actions JSON file")
    serve.add_argument("--ui-dir", default=None,
                       help="serve a built frontend from this directory at /")

    metrics = sub.add_parser("metrics", help="score survey CSVs or text files")
    msub = metrics.add_subparsers(dest="instrument", required=True)
    sus = msub.add_parser("sus", help="score usability responses (columns q1..q10)")
    sus.add_argument("csv", type=Path)
    micsi = msub.add_parser("micsi", help="score creativity-support responses")
    micsi.add_argument("csv", type=Path)
    ttr_cmd = msub.add_parser("ttr", help="type-token ratio of a text file")
    ttr_cmd.add_argument("file", type=Path)
    return parser


def _serve(args) -> int:
    import uvicorn

    from .providers import make_provider
    from .service.app import create_app
    from .store import ProjectStore
    from .vocab import DEFAULT_VOCAB, load_vocab

    store = ProjectStore(args.data_dir)
    provider = make_provider(
        args.provider,
        endpoint=args.endpoint,
        model=args.model,
        api_key=os.environ.get("PROVIDER_API_KEY"),
        blob_resolver=store.find_blob,
    )
    vocab = load_vocab(args.vocab) if args.vocab else DEFAULT_VOCAB
    app = create_app(args.data_dir, provider=provider, vocab=vocab,
                     debug_prompts=args.debug_prompts, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def _metrics(args) -> int:
    from . import metrics

    if args.instrument == "sus":
        with open(args.csv, newline="", encoding="utf-8") as fh:
            report = metrics.sus_report(metrics.read_sus_csv(fh))
    elif args.instrument == "micsi":
        with open(args.csv, newline="", encoding="utf-8") as fh:
            report = metrics.micsi_report(metrics.read_micsi_csv(fh))
    else:
        text = args.file.read_text("utf-8")
        tokens = metrics.tokenize(text)
        report = {"ttr": metrics.ttr(text), "tokens": len(tokens),
                  "types": len(set(tokens))}
    json.dump(report, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return _serve(args)
    return _metrics(args)


if __name__ == "__main__":
    raise SystemExit(main())
