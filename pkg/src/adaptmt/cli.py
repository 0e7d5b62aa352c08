"""Command-line front-end.

Every pipeline operation is independently scriptable; ``run`` chains them
according to the classified scenario.  Exit code 0 on success, 1 with a
stage-tagged diagnostic on failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from adaptmt import figures
from adaptmt.backtranslate import TranslatorKind, TranslatorSpec, back_translate
from adaptmt.corpus import (
    DomainTag,
    LanguageId,
    bpe_apply_corpus,
    bpe_train,
    load_bpe_model,
    load_corpus,
    save_bpe_model,
    save_corpus,
)
from adaptmt.evaluate import corpus_bleu
from adaptmt.ngram_lm import load_lm, save_lm, train_lm
from adaptmt.pipeline import PipelineError, load_config, run_pipeline
from adaptmt.planner import (
    assemble_finetune_corpora,
    classify_scenario,
    load_manifest,
    plan_methods,
    plan_to_dict,
    render_plan,
)
from adaptmt.scheduler import BatchWeightingSchedule, build_stream, save_stream_manifest
from adaptmt.selection import (
    ced_score,
    load_scores,
    save_scores,
    save_selection,
    select_lowest_k,
    size_matched_subsample,
)

log = logging.getLogger(__name__)


def _load_plain(path: str, language=LanguageId.L1, domain=DomainTag.OUT_OF_DOMAIN):
    return load_corpus(path, language, domain)


def cmd_plan(args) -> int:
    manifest = load_manifest(args.manifest)
    scenario = classify_scenario(manifest)
    plan = plan_methods(scenario, k=args.k)
    sys.stdout.write(render_plan(plan, manifest))
    if args.json_out:
        Path(args.json_out).write_text(
            json.dumps(plan_to_dict(plan, manifest), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
    return 0


def cmd_bpe_train(args) -> int:
    corpora = [_load_plain(p) for p in args.inputs]
    model = bpe_train(corpora, args.merges)
    save_bpe_model(model, args.output)
    print(f"learned {len(model.merges)} merges over {sum(len(c) for c in corpora)} sentences")
    return 0


def cmd_bpe_apply(args) -> int:
    model = load_bpe_model(args.model)
    corpus = _load_plain(args.input)
    encoded = bpe_apply_corpus(model, corpus)
    with open(args.output, "w", encoding="utf-8", newline="\n") as handle:
        for sentence in encoded.sentences:
            handle.write(" ".join(sentence.tokens) + "\n")
    return 0


def cmd_train_lm(args) -> int:
    corpora = [_load_plain(p) for p in args.inputs]
    model = train_lm(
        corpora,
        order=args.order,
        lidstone_alpha=args.alpha,
        interpolation_weights=args.weights,
        map_singletons_to_unk=args.map_singletons,
    )
    save_lm(model, args.output)
    print(f"trained order-{model.order} model, vocabulary {len(model.vocab)}")
    return 0


def cmd_score(args) -> int:
    in_lm = load_lm(args.in_lm)
    out_lm = load_lm(args.out_lm)
    corpus = _load_plain(args.input)
    scored = ced_score(in_lm, out_lm, corpus)
    save_scores(scored, args.output)
    if args.figure:
        figures.save_score_figure(scored, 0, args.figure)
    print(f"scored {len(scored)} sentences -> {args.output}")
    return 0


def cmd_select(args) -> int:
    scored = load_scores(args.scores)
    selected = select_lowest_k(scored, args.k)
    save_selection(selected, args.output, args.index_output)
    print(f"selected {len(selected)} of {len(scored)} sentences -> {args.output}")
    return 0


def cmd_subsample(args) -> int:
    corpus = _load_plain(args.input)
    sampled = size_matched_subsample(corpus, args.size, args.seed)
    save_corpus(sampled, args.output)
    print(f"sampled {len(sampled)} of {len(corpus)} sentences -> {args.output}")
    return 0


def cmd_backtranslate(args) -> int:
    corpus = load_corpus(args.input, LanguageId.L2, DomainTag.IN_DOMAIN)
    if args.lexicon:
        spec = TranslatorSpec(kind=TranslatorKind.DICTIONARY, lexicon_path=Path(args.lexicon))
    else:
        spec = TranslatorSpec(kind=TranslatorKind.EXTERNAL, command_template=args.command)
    pseudo = back_translate(corpus, spec)
    save_corpus(pseudo, args.output)
    print(f"back-translated {len(pseudo)} sentences -> {args.output}")
    return 0


def cmd_schedule(args) -> int:
    schedule = BatchWeightingSchedule(
        n_in=args.n_in, n_out=args.n_out, batch_size=args.batch_size
    )
    in_corpus = _load_plain(args.in_corpus, domain=DomainTag.IN_DOMAIN) if args.in_corpus else None
    out_corpus = _load_plain(args.out_corpus) if args.out_corpus else None
    stream = build_stream(schedule, in_corpus, out_corpus, args.batches, seed=args.seed)
    batches = save_stream_manifest(stream, args.output)
    if args.figure:
        figures.save_stream_figure([b.origin for b in batches], schedule, args.figure)
    print(f"wrote {len(batches)} batches -> {args.output}")
    return 0


def cmd_assemble_ft(args) -> int:
    manifest = load_manifest(args.manifest)
    scenario = classify_scenario(manifest)
    plan = plan_methods(scenario)
    selected = None
    if args.selected:
        selected = load_corpus(args.selected, LanguageId.L1, DomainTag.IN_DOMAIN)
    ft_l1, ft_l2 = assemble_finetune_corpora(plan, manifest, selected)
    save_corpus(ft_l1, args.out_l1)
    save_corpus(ft_l2, args.out_l2)
    print(f"fine-tune corpora: {len(ft_l1)} + {len(ft_l2)} sentences")
    return 0


def cmd_bleu(args) -> int:
    hyp = _load_plain(args.hypotheses)
    ref = _load_plain(args.references)
    report = corpus_bleu(list(hyp.sentences), list(ref.sentences))
    print(report.format_line())
    return 0


def cmd_run(args) -> int:
    config = load_config(args.config)
    result = run_pipeline(config)
    print(f"scenario: {result.scenario.label.value}"
          + (" (flipped orientation)" if result.scenario.flipped else ""))
    print("methods: " + (", ".join(m.value for m in result.plan.methods) or "none"))
    for warning in result.warnings:
        print(f"warning: {warning}")
    print(f"artifacts under {result.output_dir}:")
    for name in result.artifacts:
        print(f"  {name}")
    return 0


def _float_list(text: str) -> list[float]:
    return [float(part) for part in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adaptmt",
        description="Domain-adaptation planning, data selection and batch "
                    "weighting for unsupervised MT data pipelines.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="classify a manifest and print the adaptation plan")
    p.add_argument("--manifest", required=True)
    p.add_argument("--k", type=int, default=None, help="pseudo in-domain selection size")
    p.add_argument("--json-out", default=None, help="also write the machine-readable plan")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("bpe-train", help="learn a shared-vocabulary BPE model")
    p.add_argument("--input", dest="inputs", action="append", required=True,
                   help="corpus file (repeatable; all corpora are pooled)")
    p.add_argument("--merges", type=int, default=2000)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_bpe_train)

    p = sub.add_parser("bpe-apply", help="subword-encode a corpus")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_bpe_apply)

    p = sub.add_parser("train-lm", help="train an interpolated n-gram model")
    p.add_argument("--input", dest="inputs", action="append", required=True)
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--weights", type=_float_list, default=None,
                   help="per-order interpolation weights, e.g. '0.25 0.25 0.25 0.25'")
    p.add_argument("--map-singletons", action="store_true",
                   help="rewrite training tokens seen once to <unk>")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_train_lm)

    p = sub.add_parser("score", help="rank sentences by cross-entropy difference")
    p.add_argument("--in-lm", required=True)
    p.add_argument("--out-lm", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True, help="tab-separated scores file")
    p.add_argument("--figure", default=None, help="also render the score distribution")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("select", help="keep the lowest-scoring sentences")
    p.add_argument("--scores", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--index-output", required=True, help="sidecar file of original indices")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("subsample", help="seeded size-matched subsample of a corpus")
    p.add_argument("--input", required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_subsample)

    p = sub.add_parser("backtranslate", help="generate the pseudo in-domain corpus")
    p.add_argument("--input", required=True, help="the L2 in-domain corpus")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--lexicon", help="tab-separated word lexicon (dictionary mode)")
    group.add_argument("--command", help="shell template with {input}/{output} placeholders")
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_backtranslate)

    p = sub.add_parser("schedule", help="materialize a batch-weighted stream manifest")
    p.add_argument("--in-corpus", default=None)
    p.add_argument("--out-corpus", default=None)
    p.add_argument("--n-in", type=int, default=1)
    p.add_argument("--n-out", type=int, default=30)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--batches", type=int, required=True, help="total batches to emit")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.add_argument("--figure", default=None, help="also render the stream composition")
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("assemble-ft", help="build the fine-tuning corpus pair")
    p.add_argument("--manifest", required=True)
    p.add_argument("--selected", default=None, help="selected pseudo in-domain corpus")
    p.add_argument("--out-l1", required=True)
    p.add_argument("--out-l2", required=True)
    p.set_defaults(func=cmd_assemble_ft)

    p = sub.add_parser("bleu", help="case-sensitive 4-gram corpus BLEU")
    p.add_argument("--hypotheses", required=True)
    p.add_argument("--references", required=True)
    p.set_defaults(func=cmd_bleu)

    p = sub.add_parser("run", help="run the whole pipeline from a config file")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_run)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except PipelineError as exc:
        print(f"error {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
