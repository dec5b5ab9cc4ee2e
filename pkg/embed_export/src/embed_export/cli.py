"""Command-line entry point: ``embed-export export ...``."""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, ExportError, ModelUnavailableError
from .exporter import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_MAX_TOKENS,
    DEFAULT_MODEL,
    MODES,
    export_cls,
    export_tokens,
    manifest_path,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # route usage problems to exit code 1
        raise ConfigError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="embed-export", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("export", help="write contextual embeddings for a tweet CSV")
    p.add_argument("--input", required=True, help="tweet CSV (id,keyword,location,text[,target])")
    p.add_argument("--mode", required=True, choices=MODES)
    p.add_argument("--out", required=True, help="output embedding file")
    p.add_argument(
        "--max-tokens",
        type=int,
        default=DEFAULT_MAX_TOKENS,
        help=f"token-sequence length cap in tokens mode (default {DEFAULT_MAX_TOKENS})",
    )
    p.add_argument(
        "--model",
        default=DEFAULT_MODEL,
        help=f"encoder name or local directory (default {DEFAULT_MODEL})",
    )
    p.add_argument(
        "--batch-size",
        type=int,
        default=DEFAULT_BATCH_SIZE,
        help=f"inference batch size (default {DEFAULT_BATCH_SIZE})",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.mode == "cls":
            manifest = export_cls(
                args.input, args.out, model=args.model, batch_size=args.batch_size
            )
        else:
            manifest = export_tokens(
                args.input,
                args.out,
                max_tokens=args.max_tokens,
                model=args.model,
                batch_size=args.batch_size,
            )
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ExportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ModelUnavailableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {args.out}")
    print(f"wrote {manifest_path(args.out)}")
    print(
        f"tweets={manifest.tweet_count} dimension={manifest.dimension} "
        f"warnings={len(manifest.warnings)}"
    )
    return 0


def entrypoint() -> None:
    raise SystemExit(main())
