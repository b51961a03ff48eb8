"""Command-line interface.

Exit codes: 0 success, 1 validation errors, 2 usage/IO problems, 3 backend
failure. Subcommands print canonical JSON on stdout; human-readable
diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from .dataset import Dataset, field_summary, ingest
from .diagnostics import Diagnostic, has_errors
from .errors import (
    DatascaffoldError,
    GatewayError,
    IngestError,
    InvalidScaffoldError,
    PredicateParseError,
    UnknownFieldError,
)
from .gateway import (
    GenerationConfig,
    MockBackendConfig,
    RemoteBackendConfig,
    Task,
    generate_validated,
)
from .scaffold import (
    ScaffoldSet,
    equal_width_bins,
    scaffold_groups_from_jsonable,
    validate_scaffold_set,
)
from .structure import build_structure, render_outline

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_BACKEND = 3


class UsageError(Exception):
    pass


def _read_file(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _detect_format(path: str, override: Optional[str]) -> str:
    if override:
        return override
    suffix = Path(path).suffix.lower()
    if suffix == ".csv":
        return "csv"
    if suffix == ".json":
        return "json-records"
    raise UsageError(f"cannot infer format of {path}; pass --format")


def _load_dataset(path: str, fmt: Optional[str]) -> Dataset:
    return ingest(_read_file(path), _detect_format(path, fmt))


def _dump(obj) -> None:
    print(json.dumps(obj, separators=(",", ":"), ensure_ascii=False))


def _report(diags: list[Diagnostic]) -> None:
    for diag in diags:
        where = f" (group {diag.group_index})" if diag.group_index is not None else ""
        print(f"{diag.severity}: {diag.code}{where}: {diag.message}", file=sys.stderr)


def _generation_config(args) -> GenerationConfig:
    if getattr(args, "mock", None):
        fixtures_dir = Path(args.fixtures_dir) if getattr(args, "fixtures_dir", None) else None
        backend = MockBackendConfig(args.mock, fixtures_dir)
    else:
        backend = RemoteBackendConfig()
    return GenerationConfig(backend=backend)


def _print_scaffold_result(
    scaffold_set: ScaffoldSet, diags: list[Diagnostic], attempts: Optional[int]
) -> int:
    _dump(scaffold_set.to_jsonable())
    _report(diags)
    if attempts is not None and attempts > 1:
        print(f"generated after {attempts} attempts", file=sys.stderr)
    return EXIT_VALIDATION if has_errors(diags) else EXIT_OK


def _cmd_ingest(args) -> int:
    d = _load_dataset(args.file, args.format)
    _dump(field_summary(d))
    return EXIT_OK


def _cmd_bins(args) -> int:
    d = _load_dataset(args.file, args.format)
    if args.k is not None:
        scaffold_set = equal_width_bins(d, args.field, args.k)
        diags = validate_scaffold_set(scaffold_set, d)
        return _print_scaffold_result(scaffold_set, diags, None)
    cfg = _generation_config(args)
    scaffold_set, diags, attempts = generate_validated(d, Task.bins(args.field), cfg)
    return _print_scaffold_result(scaffold_set, diags, attempts)


def _cmd_highlights(args) -> int:
    d = _load_dataset(args.file, args.format)
    cfg = _generation_config(args)
    scaffold_set, diags, attempts = generate_validated(d, Task.highlights(), cfg)
    return _print_scaffold_result(scaffold_set, diags, attempts)


def _load_scaffold_file(path: str):
    try:
        obj = json.loads(_read_file(path).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc
    try:
        return scaffold_groups_from_jsonable(obj)
    except (KeyError, ValueError, PredicateParseError) as exc:
        raise UsageError(f"{path} is not a valid scaffold file: {exc}") from exc


def _cmd_validate(args) -> int:
    d = _load_dataset(args.data, args.format)
    groups = _load_scaffold_file(args.scaffolds)
    if args.bins_field:
        scaffold_set = ScaffoldSet(kind="bins", groups=groups, field=args.bins_field)
    else:
        scaffold_set = ScaffoldSet(kind="highlights", groups=groups)
    diags = validate_scaffold_set(scaffold_set, d)
    _dump([diag.to_jsonable() for diag in diags])
    _report(diags)
    return EXIT_VALIDATION if has_errors(diags) else EXIT_OK


def _cmd_render(args) -> int:
    d = _load_dataset(args.file, args.format)
    highlights = None
    if args.scaffolds:
        groups = _load_scaffold_file(args.scaffolds)
        highlights = ScaffoldSet(kind="highlights", groups=groups)
    try:
        root = build_structure(d, highlights=highlights)
    except InvalidScaffoldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    depth = args.depth if args.depth is not None else 6  # tree height is at most 4
    print(render_outline(root, depth))
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    state_dir = Path(args.state_dir) if args.state_dir else None
    fixtures_dir = Path(args.fixtures_dir) if args.fixtures_dir else None
    app = create_app(state_dir=state_dir, fixtures_dir=fixtures_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="datascaffold",
        description="Generate, validate, and render semantic groupings of tabular data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument("--format", choices=["csv", "json-records"], default=None)

    p = sub.add_parser("ingest", help="parse a data file and print its field summary")
    p.add_argument("file")
    add_format(p)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("bins", help="produce a validated bin set for one field")
    p.add_argument("file")
    p.add_argument("--field", required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--k", type=int, help="equal-width bins instead of the model")
    group.add_argument("--mock", help="mock backend fixture id")
    p.add_argument("--fixtures-dir")
    add_format(p)
    p.set_defaults(func=_cmd_bins)

    p = sub.add_parser("highlights", help="produce validated multi-field highlights")
    p.add_argument("file")
    p.add_argument("--mock", help="mock backend fixture id")
    p.add_argument("--fixtures-dir")
    add_format(p)
    p.set_defaults(func=_cmd_highlights)

    p = sub.add_parser("validate", help="validate a scaffold file against a dataset")
    p.add_argument("scaffolds")
    p.add_argument("--data", required=True)
    p.add_argument("--bins-field", help="treat the groups as bins over this field")
    add_format(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("render", help="print the textual structure outline")
    p.add_argument("file")
    p.add_argument("--scaffolds", help="highlights scaffold file to include")
    p.add_argument("--depth", type=int, default=None)
    add_format(p)
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=7341)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--state-dir", help="directory for on-disk workspace snapshots")
    p.add_argument("--fixtures-dir")
    p.set_defaults(func=_cmd_serve)

    return parser


def cli_main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GatewayError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except (IngestError, UnknownFieldError, PredicateParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DatascaffoldError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
