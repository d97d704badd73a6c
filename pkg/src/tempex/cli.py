"""Command-line entry point: ``tempex extract | evaluate | learn | gen-corpus``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from .annotation import ConfigError, DomainSchema, Gazetteer, load_gazetteers, load_schema
from .corpus import CorpusSpec, generate_corpus
from .evaluation import evaluate, evaluate_corpus
from .learning import learn_loop
from .pipeline import ExtractionResult, StageError, canonical_json, extract_many

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2

log = logging.getLogger("tempex")


class _Invalid(Exception):
    """Bad input detected by the CLI itself."""


def _gazetteers(schema: DomainSchema, schema_path: Path, gdir: str | None) -> dict[str, Gazetteer]:
    if gdir is None:
        return load_gazetteers(schema, schema_path.parent)
    base = Path(gdir)
    if not base.is_dir():
        raise FileNotFoundError(f"gazetteer directory not found: {base}")
    out = {}
    for t in schema.types:
        if t.gazetteer is None:
            continue
        p = base / Path(t.gazetteer).name
        out[t.name] = Gazetteer.load(t.name, p) if p.exists() else Gazetteer(t.name)
    return out


def _page_files(args: argparse.Namespace, suffix: str = ".html") -> dict[str, Path]:
    files: list[Path] = [Path(p) for p in args.page or ()]
    if args.pages:
        d = Path(args.pages)
        if not d.is_dir():
            raise FileNotFoundError(f"page directory not found: {d}")
        files += sorted(d.glob(f"*{suffix}"))
    if not files:
        raise _Invalid("no input pages; pass --page or --pages")
    return {f.stem: f for f in files}


def _pivot(arg: str | None) -> str | list[str] | None:
    if arg is None:
        return None
    names = [p.strip() for p in arg.split(",") if p.strip()]
    return names[0] if len(names) == 1 else names


def cmd_extract(args: argparse.Namespace) -> int:
    schema_path = Path(args.schema)
    schema = load_schema(schema_path)
    gaz = _gazetteers(schema, schema_path, args.gazetteer_dir)
    files = _page_files(args)
    pages = {name: f.read_bytes() for name, f in files.items()}
    items = extract_many(pages, schema, gaz, _pivot(args.pivot), workers=args.workers)
    failed = [it for it in items if it.error is not None]
    for it in failed:
        print(f"error: {it.page}: {it.error}", file=sys.stderr)
    done = [it for it in items if it.result is not None]
    if len(files) == 1 and not args.pages:
        text = done[0].result.to_json() if done else None
        if text is not None:
            if args.out:
                Path(args.out).write_text(text, encoding="utf-8")
            else:
                sys.stdout.write(text)
    elif args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for it in done:
            (out / f"{it.page}.json").write_text(it.result.to_json(), encoding="utf-8")
    else:
        for it in done:
            sys.stdout.write(it.result.to_json())
    return EXIT_INVALID if failed else EXIT_OK


def _load_results(path: Path) -> dict[str, ExtractionResult]:
    if path.is_dir():
        return {f.stem: ExtractionResult.from_json(f.read_text(encoding="utf-8")) for f in sorted(path.glob("*.json"))}
    return {path.stem: ExtractionResult.from_json(path.read_text(encoding="utf-8"))}


def cmd_evaluate(args: argparse.Namespace) -> int:
    gold = _load_results(Path(args.gold))
    pred = _load_results(Path(args.pred))
    if len(gold) == 1 and len(pred) == 1:
        pairs = [(next(iter(pred.values())), next(iter(gold.values())))]
    else:
        missing = sorted(set(gold) - set(pred))
        if missing:
            log.warning("%d gold pages have no prediction; scored as empty", len(missing))
        pairs = [(pred.get(k, ExtractionResult(k)), gold[k]) for k in sorted(gold)]
    if args.page:
        if len(pairs) != 1:
            raise _Invalid("--page validation needs exactly one gold and one prediction file")
        from .dom import parse_html

        tree = parse_html(Path(args.page[0]).read_bytes())
        metrics = evaluate(pairs[0][0], pairs[0][1], tree)
        payload = metrics.to_dict()
    elif len(pairs) == 1:
        metrics = evaluate(*pairs[0])
        payload = metrics.to_dict()
    else:
        corpus = evaluate_corpus(pairs)
        metrics = corpus.micro
        payload = corpus.to_dict()
    print(metrics.table())
    if args.out:
        Path(args.out).write_text(canonical_json(payload), encoding="utf-8")
    return EXIT_OK


def cmd_learn(args: argparse.Namespace) -> int:
    schema_path = Path(args.schema)
    schema = load_schema(schema_path)
    seed = _gazetteers(schema, schema_path, args.gazetteer_dir)
    files = _page_files(args)
    pages = {name: f.read_bytes() for name, f in files.items()}
    gold = None
    if args.gold:
        gold = {k: [(a.node, a.type, a.value) for a in r.attributes()] for k, r in _load_results(Path(args.gold)).items()}
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / "report.jsonl"
    with report_path.open("w", encoding="utf-8") as fh:
        def emit(report):
            fh.write(canonical_json(report.to_dict()))
            print(f"round {report.round}: {len(report.learned)} learned, {len(report.dropped)} dropped,"
                  f" {report.extracted} extracted")

        run = learn_loop(pages, schema, seed, args.rounds, gold=gold, on_round=emit)
    for name, g in run.gazetteers.items():
        g.save(out / Path(schema.type(name).gazetteer).name)
    print("saturated" if run.saturated else f"stopped after {args.rounds} rounds without saturating")
    return EXIT_OK


def cmd_gen_corpus(args: argparse.Namespace) -> int:
    spec = CorpusSpec()
    if args.spec:
        spec = CorpusSpec.from_dict(json.loads(Path(args.spec).read_text(encoding="utf-8")))
    corpus = generate_corpus(spec, args.seed)
    out = corpus.write(args.out)
    print(f"wrote {len(corpus.pages)} pages to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tempex", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def pages(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--page", action="append", help="an HTML page; repeatable")
        sp.add_argument("--pages", help="a directory of .html pages")

    sp = sub.add_parser("extract", help="extract records and attributes from pages")
    sp.add_argument("--schema", required=True)
    sp.add_argument("--gazetteer-dir")
    pages(sp)
    sp.add_argument("--pivot", help="pivot type, or a comma-separated list of candidates")
    sp.add_argument("--out", help="output file (one page) or directory (several)")
    sp.add_argument("--workers", type=int, default=4)
    sp.set_defaults(func=cmd_extract)

    sp = sub.add_parser("evaluate", help="score predictions against gold standards")
    sp.add_argument("--gold", required=True, help="gold JSON file or directory")
    sp.add_argument("--pred", required=True, help="prediction JSON file or directory")
    sp.add_argument("--page", action="append", help="the HTML page, to validate node paths")
    sp.add_argument("--out", help="write metrics JSON here")
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("learn", help="bootstrap gazetteers over a set of pages")
    sp.add_argument("--schema", required=True)
    sp.add_argument("--gazetteer-dir", help="seed gazetteers")
    pages(sp)
    sp.add_argument("--rounds", type=int, default=10)
    sp.add_argument("--gold", help="gold directory, for per-round extraction counts")
    sp.add_argument("--out", default="learned")
    sp.set_defaults(func=cmd_learn)

    sp = sub.add_parser("gen-corpus", help="generate a synthetic corpus with gold standards")
    sp.add_argument("--spec", help="CorpusSpec JSON")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_gen_corpus)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, StageError, ValueError, KeyError, _Invalid) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
