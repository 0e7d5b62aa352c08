"""End-to-end pipeline: classify, preprocess, select, assemble, stream.

Executes the stages applicable to the classified scenario, writing every
artifact under one output directory together with a SHA-256 manifest so
reruns can be checked for byte-identical reproducibility.  Figures are
rendered next to the delimited outputs they illustrate.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from adaptmt import figures
from adaptmt.backtranslate import TranslatorKind, TranslatorSpec, back_translate
from adaptmt.corpus import (
    Corpus,
    DomainTag,
    LanguageId,
    Sentence,
    bpe_apply_corpus,
    bpe_train,
    load_corpus,
    save_bpe_model,
    save_corpus,
)
from adaptmt.ngram_lm import save_lm, train_lm
from adaptmt.planner import (
    AdaptationPlan,
    CorpusManifest,
    Method,
    Scenario,
    ScenarioLabel,
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
    save_scores,
    save_selection,
    select_lowest_k,
    size_matched_subsample,
)

log = logging.getLogger(__name__)


class PipelineError(RuntimeError):
    """A stage failure, tagged with the stage it happened in."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@dataclass(frozen=True)
class PipelineConfig:
    """Everything a run needs; unset fields take the documented defaults."""

    manifest_path: Path
    output_dir: Path
    merge_count: int = 2000
    lm_order: int = 4
    lm_alpha: float = 0.1
    lm_weights: tuple[float, ...] | None = None
    map_singletons: bool = False
    n_in: int = 1
    n_out: int = 30
    batch_size: int = 32
    k: int | None = None  # None: a tenth of the scored corpus
    seed: int = 0
    translator: TranslatorSpec | None = None
    main_batches: int = 310
    ft_batches: int = 100
    render_figures: bool = True


def load_config(path: str | Path) -> PipelineConfig:
    """Read a JSON config; relative paths resolve against the config's dir."""
    path = Path(path)
    with open(path, encoding="utf-8") as handle:
        doc = json.load(handle)
    base = path.parent

    def resolve(value: str) -> Path:
        p = Path(value)
        return p if p.is_absolute() else base / p

    if "manifest" not in doc or "output_dir" not in doc:
        raise ValueError(f"{path}: config requires 'manifest' and 'output_dir'")

    lm = doc.get("lm", {})
    schedule = doc.get("schedule", {})
    selection = doc.get("selection", {})
    stream = doc.get("stream", {})

    translator = None
    if "translator" in doc:
        spec = doc["translator"]
        kind = TranslatorKind(spec.get("kind", "dictionary"))
        translator = TranslatorSpec(
            kind=kind,
            lexicon_path=resolve(spec["lexicon"]) if "lexicon" in spec else None,
            command_template=spec.get("command"),
        )

    weights = lm.get("weights")
    return PipelineConfig(
        manifest_path=resolve(doc["manifest"]),
        output_dir=resolve(doc["output_dir"]),
        merge_count=int(doc.get("merge_count", 2000)),
        lm_order=int(lm.get("order", 4)),
        lm_alpha=float(lm.get("alpha", 0.1)),
        lm_weights=tuple(float(w) for w in weights) if weights is not None else None,
        map_singletons=bool(lm.get("map_singletons", False)),
        n_in=int(schedule.get("n_in", 1)),
        n_out=int(schedule.get("n_out", 30)),
        batch_size=int(schedule.get("batch_size", 32)),
        k=int(selection["k"]) if selection.get("k") is not None else None,
        seed=int(doc.get("seed", 0)),
        translator=translator,
        main_batches=int(stream.get("main_batches", 310)),
        ft_batches=int(stream.get("ft_batches", 100)),
        render_figures=bool(doc.get("figures", True)),
    )


@dataclass
class PipelineResult:
    scenario: Scenario
    plan: AdaptationPlan
    output_dir: Path
    artifacts: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    summary: dict = field(default_factory=dict)


@dataclass(frozen=True)
class _CanonicalView:
    """Manifest slots remapped so canonical L2 is the in-domain-bearing side."""

    l1_in: Path | None
    l2_in: Path | None
    l1_out: Path | None
    l2_out: Path | None

    @classmethod
    def of(cls, manifest: CorpusManifest, scenario: Scenario) -> "_CanonicalView":
        if scenario.flipped:
            return cls(l1_in=manifest.l2_in, l2_in=manifest.l1_in,
                       l1_out=manifest.l2_out, l2_out=manifest.l1_out)
        return cls(l1_in=manifest.l1_in, l2_in=manifest.l2_in,
                   l1_out=manifest.l1_out, l2_out=manifest.l2_out)


def run_pipeline(config: PipelineConfig) -> PipelineResult:
    """Execute the scenario's recipe end to end.

    Stage order: plan, BPE train/apply, back-translation, LM training,
    scoring, selection, fine-tune assembly, stream manifests, report.
    Stages not applicable to the scenario are skipped.  Module errors
    propagate wrapped in PipelineError with the failing stage's name.
    """
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[str] = []

    def emit(name: str) -> Path:
        written.append(name)
        return out / name

    # -- plan ---------------------------------------------------------------
    with _stage("plan"):
        manifest = load_manifest(config.manifest_path)
        scenario = classify_scenario(manifest)
        plan = plan_methods(scenario, k=config.k)
        emit("plan.txt").write_text(render_plan(plan, manifest), encoding="utf-8")
        emit("plan.json").write_text(
            json.dumps(plan_to_dict(plan, manifest), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
    result = PipelineResult(scenario=scenario, plan=plan, output_dir=out)
    canon = _CanonicalView.of(manifest, scenario)
    needs_selection = plan.selection_recipe is not None

    # -- corpora and shared-vocabulary BPE ------------------------------------
    with _stage("bpe"):
        slots = {}
        for name, path, language, domain in (
            ("l1_in", canon.l1_in, LanguageId.L1, DomainTag.IN_DOMAIN),
            ("l2_in", canon.l2_in, LanguageId.L2, DomainTag.IN_DOMAIN),
            ("l1_out", canon.l1_out, LanguageId.L1, DomainTag.OUT_OF_DOMAIN),
            ("l2_out", canon.l2_out, LanguageId.L2, DomainTag.OUT_OF_DOMAIN),
        ):
            if path is not None:
                slots[name] = load_corpus(path, language, domain)
        blank_total = sum(c.blank_lines for c in slots.values())
        if blank_total:
            result.warnings.append(f"dropped {blank_total} blank line(s) across input corpora")
        model = bpe_train(list(slots.values()), config.merge_count)
        save_bpe_model(model, emit("bpe.model"))
        encoded = {}
        for name, corpus in slots.items():
            encoded[name] = bpe_apply_corpus(model, corpus)
            _save_tokens(encoded[name], emit(f"{name}.bpe.txt"))
        result.summary["corpus_sizes"] = {name: len(c) for name, c in slots.items()}
        result.summary["bpe_merges"] = len(model.merges)

    # -- back-translation and data selection (IOO / IO only) -----------------
    selected_corpus = None
    if needs_selection:
        with _stage("backtranslate"):
            if config.translator is None:
                raise ValueError(
                    f"scenario {scenario.label.value} needs back-translation; "
                    "configure a translator"
                )
            pseudo = back_translate(slots["l2_in"], config.translator)
            save_corpus(pseudo, emit("backtranslated.txt"))
            pseudo_bpe = bpe_apply_corpus(model, pseudo)
            _save_tokens(pseudo_bpe, emit("backtranslated.bpe.txt"))

        with _stage("train-lm"):
            in_lm = train_lm(
                [encoded["l2_in"], pseudo_bpe],
                order=config.lm_order,
                lidstone_alpha=config.lm_alpha,
                interpolation_weights=config.lm_weights,
                map_singletons_to_unk=config.map_singletons,
            )
            target_size = len(slots["l2_in"])
            out_train = [size_matched_subsample(encoded["l1_out"], target_size, config.seed)]
            if scenario.label is ScenarioLabel.IOO:
                out_train.append(
                    size_matched_subsample(encoded["l2_out"], target_size, config.seed + 1)
                )
            out_lm = train_lm(
                out_train,
                order=config.lm_order,
                lidstone_alpha=config.lm_alpha,
                interpolation_weights=config.lm_weights,
                map_singletons_to_unk=config.map_singletons,
            )
            save_lm(in_lm, emit("lm_in.counts"))
            save_lm(out_lm, emit("lm_out.counts"))

        with _stage("score"):
            scored = ced_score(in_lm, out_lm, encoded["l1_out"])
            save_scores(scored, emit("scored.tsv"))

        with _stage("select"):
            k = config.k if config.k is not None else max(1, len(scored) // 10)
            if k > len(scored):
                result.warnings.append(
                    f"k={k} exceeds {len(scored)} scored sentences; selected all"
                )
            selected = select_lowest_k(scored, k)
            save_selection(selected, emit("selected.txt"), emit("selected.idx"))
            selected_corpus = Corpus(
                language=LanguageId.L1,
                domain=DomainTag.IN_DOMAIN,
                sentences=tuple(Sentence.from_raw(s.sentence.raw) for s in selected),
            )
            result.summary["scored"] = len(scored)
            result.summary["selected"] = len(selected)
            result.summary["k"] = k

        if config.render_figures:
            with _stage("figures"):
                figures.save_score_figure(scored, len(selected), emit("scores.png"))

    # -- fine-tune corpora ----------------------------------------------------
    if Method.FINE_TUNING in plan.methods:
        with _stage("assemble-ft"):
            ft_l1, ft_l2 = assemble_finetune_corpora(plan, manifest, selected_corpus)
            save_corpus(ft_l1, emit("finetune_l1.txt"))
            save_corpus(ft_l2, emit("finetune_l2.txt"))
            ft_l1_bpe = bpe_apply_corpus(model, ft_l1)
            ft_l2_bpe = bpe_apply_corpus(model, ft_l2)
            _save_tokens(ft_l1_bpe, emit("finetune_l1.bpe.txt"))
            _save_tokens(ft_l2_bpe, emit("finetune_l2.bpe.txt"))
            result.summary["finetune_sizes"] = {"l1": len(ft_l1), "l2": len(ft_l2)}

    # -- stream manifests ------------------------------------------------------
    if Method.BATCH_WEIGHTING in plan.methods:
        with _stage("schedule"):
            schedule = BatchWeightingSchedule(
                n_in=config.n_in, n_out=config.n_out, batch_size=config.batch_size
            )
            stream = build_stream(
                schedule, encoded["l2_in"], encoded["l1_out"],
                total_batches=config.main_batches, seed=config.seed,
            )
            batches = save_stream_manifest(stream, emit("stream_main.tsv"))
            if config.render_figures:
                figures.save_stream_figure(
                    [b.origin for b in batches], schedule, emit("stream_main.png")
                )
            result.summary["main_batches"] = len(batches)

    if Method.FINE_TUNING in plan.methods:
        with _stage("schedule"):
            ft_schedule = BatchWeightingSchedule(
                n_in=1, n_out=0, batch_size=config.batch_size
            )
            for side, corpus in (("l1", ft_l1_bpe), ("l2", ft_l2_bpe)):
                stream = build_stream(
                    ft_schedule, corpus, None,
                    total_batches=config.ft_batches, seed=config.seed,
                )
                save_stream_manifest(stream, emit(f"stream_ft_{side}.tsv"))

    # -- report and hash manifest ----------------------------------------------
    with _stage("report"):
        report_path = emit("report.txt")
        report_path.write_text(_render_report(result, manifest, written), encoding="utf-8")
        _write_hash_manifest(out, written, out / "MANIFEST.sha256")
        result.artifacts = sorted(written) + ["MANIFEST.sha256"]
    return result


class _stage:
    """Context manager tagging any failure with its pipeline stage."""

    def __init__(self, name: str):
        self.name = name

    def __enter__(self):
        log.info("stage %s", self.name)
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and not isinstance(exc, PipelineError):
            raise PipelineError(self.name, str(exc)) from exc
        return False


def _save_tokens(corpus: Corpus, path: Path) -> None:
    """Write the token view (subwords joined by spaces), one line per sentence."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for sentence in corpus.sentences:
            handle.write(" ".join(sentence.tokens) + "\n")


def _render_report(result: PipelineResult, manifest: CorpusManifest,
                   written: list[str]) -> str:
    lines = [
        "pipeline report",
        "===============",
        "",
        render_plan(result.plan, manifest).rstrip("\n"),
        "",
    ]
    for key in sorted(result.summary):
        lines.append(f"{key}: {json.dumps(result.summary[key], sort_keys=True)}")
    if result.warnings:
        lines.append("")
        lines.append("warnings:")
        lines.extend(f"  - {w}" for w in result.warnings)
    lines.append("")
    lines.append("artifacts:")
    lines.extend(f"  - {name}" for name in sorted(set(written)))
    return "\n".join(lines) + "\n"


def _write_hash_manifest(out_dir: Path, names: list[str], manifest_path: Path) -> None:
    lines = []
    for name in sorted(set(names)):
        digest = hashlib.sha256((out_dir / name).read_bytes()).hexdigest()
        lines.append(f"{name}\t{digest}")
    manifest_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
