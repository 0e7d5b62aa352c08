"""Scenario classification and adaptation planning.

A corpus manifest declares which of the four monolingual corpora exist
(two languages times in/out-of-domain).  Classification maps the
availability pattern onto one of six scenario labels, canonicalized so
that L2 is always the in-domain-bearing side; the original orientation is
kept so reports speak in the user's language names.  The plan lists the
applicable methods and the recipes for data selection and fine-tuning.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from adaptmt.corpus import Corpus, DomainTag, LanguageId, load_corpus


class ScenarioLabel(Enum):
    II = "II"
    OO = "OO"
    IIOO = "IIOO"
    IOO = "IOO"
    IIO = "IIO"
    IO = "IO"


class Method(Enum):
    BATCH_WEIGHTING = "batch-weighting"
    FINE_TUNING = "fine-tuning"


@dataclass(frozen=True)
class CorpusManifest:
    """Which of the four corpora exist and where, plus user language names."""

    l1_name: str = "L1"
    l2_name: str = "L2"
    l1_in: Path | None = None
    l2_in: Path | None = None
    l1_out: Path | None = None
    l2_out: Path | None = None

    def __post_init__(self):
        if self.l1_in is None and self.l1_out is None:
            raise ValueError(f"no corpus at all for {self.l1_name}: untrainable")
        if self.l2_in is None and self.l2_out is None:
            raise ValueError(f"no corpus at all for {self.l2_name}: untrainable")

    def availability(self) -> tuple[bool, bool, bool, bool]:
        """(l1_in, l2_in, l1_out, l2_out) presence bits."""
        return (
            self.l1_in is not None,
            self.l2_in is not None,
            self.l1_out is not None,
            self.l2_out is not None,
        )


@dataclass(frozen=True)
class Scenario:
    """A taxonomy label plus orientation.

    ``flipped`` means the user's L1 plays the canonical L2 role (the
    in-domain-bearing side for IOO/IO, the side lacking out-of-domain
    data for IIO).
    """

    label: ScenarioLabel
    flipped: bool = False

    def describe(self, manifest: CorpusManifest) -> str:
        primary = manifest.l1_name if self.flipped else manifest.l2_name
        other = manifest.l2_name if self.flipped else manifest.l1_name
        if self.label in (ScenarioLabel.IO, ScenarioLabel.IOO):
            return f"{self.label.value}: in-domain data exists only for {primary}"
        if self.label is ScenarioLabel.IIO:
            return f"{self.label.value}: out-of-domain data missing for {primary}"
        return f"{self.label.value}: symmetric availability for {other} and {primary}"


# Availability bits (l1_in, l2_in, l1_out, l2_out) -> (label, flipped).
_PATTERNS: dict[tuple[bool, bool, bool, bool], tuple[ScenarioLabel, bool]] = {
    (True, True, False, False): (ScenarioLabel.II, False),
    (False, False, True, True): (ScenarioLabel.OO, False),
    (True, True, True, True): (ScenarioLabel.IIOO, False),
    (False, True, True, True): (ScenarioLabel.IOO, False),
    (True, False, True, True): (ScenarioLabel.IOO, True),
    (True, True, True, False): (ScenarioLabel.IIO, False),
    (True, True, False, True): (ScenarioLabel.IIO, True),
    (False, True, True, False): (ScenarioLabel.IO, False),
    (True, False, False, True): (ScenarioLabel.IO, True),
}


def classify_scenario(manifest: CorpusManifest) -> Scenario:
    """Map the manifest's availability bits onto the scenario taxonomy.

    Patterns where one language has no corpus at all are rejected by the
    manifest itself; any remaining unknown pattern is rejected here.
    """
    bits = manifest.availability()
    if bits not in _PATTERNS:
        raise ValueError(f"unrecognized availability pattern {bits}")
    label, flipped = _PATTERNS[bits]
    return Scenario(label=label, flipped=flipped)


@dataclass(frozen=True)
class FinetuneRecipe:
    """Canonical corpus sources for the two fine-tuning sets."""

    l1_source: str
    l2_source: str


@dataclass(frozen=True)
class SelectionRecipe:
    """How the selection LMs are trained and what gets scored (canonical roles)."""

    in_lm_sources: tuple[str, ...]
    out_lm_sources: tuple[str, ...]
    scoring_target: str
    k: int | None


@dataclass(frozen=True)
class AdaptationPlan:
    scenario: Scenario
    methods: tuple[Method, ...]
    finetune_recipe: FinetuneRecipe | None
    selection_recipe: SelectionRecipe | None


_METHOD_TABLE: dict[ScenarioLabel, tuple[Method, ...]] = {
    ScenarioLabel.II: (),
    ScenarioLabel.OO: (),
    ScenarioLabel.IIOO: (Method.FINE_TUNING,),
    ScenarioLabel.IOO: (Method.FINE_TUNING,),
    ScenarioLabel.IIO: (Method.BATCH_WEIGHTING, Method.FINE_TUNING),
    ScenarioLabel.IO: (Method.BATCH_WEIGHTING, Method.FINE_TUNING),
}


def plan_methods(scenario: Scenario, k: int | None = None) -> AdaptationPlan:
    """Emit the method set and recipes applicable to a scenario.

    II and OO get empty plans: they are baseline settings, still runnable.
    ``k`` is the pseudo in-domain selection size; None defers to the
    runner's default.
    """
    methods = _METHOD_TABLE[scenario.label]

    finetune = None
    if Method.FINE_TUNING in methods:
        if scenario.label in (ScenarioLabel.IIOO, ScenarioLabel.IIO):
            finetune = FinetuneRecipe(l1_source="l1-in-domain", l2_source="l2-in-domain")
        else:
            finetune = FinetuneRecipe(
                l1_source="selected-pseudo-in-domain", l2_source="l2-in-domain"
            )

    selection = None
    if scenario.label in (ScenarioLabel.IOO, ScenarioLabel.IO):
        out_sources = (
            ("l1-out-domain-subsample", "l2-out-domain-subsample")
            if scenario.label is ScenarioLabel.IOO
            else ("l1-out-domain-subsample",)
        )
        selection = SelectionRecipe(
            in_lm_sources=("l2-in-domain", "backtranslated-pseudo-l1-in-domain"),
            out_lm_sources=out_sources,
            scoring_target="l1-out-domain",
            k=k,
        )

    return AdaptationPlan(
        scenario=scenario,
        methods=methods,
        finetune_recipe=finetune,
        selection_recipe=selection,
    )


def assemble_finetune_corpora(
    plan: AdaptationPlan,
    manifest: CorpusManifest,
    selected: Corpus | None = None,
) -> tuple[Corpus, Corpus]:
    """Build the (L1, L2) fine-tuning pair in the user's orientation.

    Scenarios with both in-domain corpora fine-tune on the genuine data;
    IOO/IO substitute the selected pseudo in-domain corpus for the side
    that has none, which is why ``selected`` is mandatory there.
    """
    if Method.FINE_TUNING not in plan.methods:
        raise ValueError(f"plan for {plan.scenario.label.value} does not include fine-tuning")

    label = plan.scenario.label
    if label in (ScenarioLabel.IIOO, ScenarioLabel.IIO):
        l1 = load_corpus(manifest.l1_in, LanguageId.L1, DomainTag.IN_DOMAIN)
        l2 = load_corpus(manifest.l2_in, LanguageId.L2, DomainTag.IN_DOMAIN)
        return l1, l2

    # IOO/IO: the canonical L2 side holds the genuine in-domain corpus.
    if selected is None:
        raise ValueError(f"scenario {label.value} requires the selected pseudo in-domain corpus")
    if plan.scenario.flipped:
        genuine = load_corpus(manifest.l1_in, LanguageId.L1, DomainTag.IN_DOMAIN)
        pseudo = _retag(selected, LanguageId.L2, DomainTag.IN_DOMAIN)
        return genuine, pseudo
    genuine = load_corpus(manifest.l2_in, LanguageId.L2, DomainTag.IN_DOMAIN)
    pseudo = _retag(selected, LanguageId.L1, DomainTag.IN_DOMAIN)
    return pseudo, genuine


def _retag(corpus: Corpus, language: LanguageId, domain: DomainTag) -> Corpus:
    return Corpus(
        language=language,
        domain=domain,
        sentences=corpus.sentences,
        source_path=corpus.source_path,
        blank_lines=corpus.blank_lines,
    )


# ---------------------------------------------------------------------------
# Manifest and plan documents
# ---------------------------------------------------------------------------


def load_manifest(path: str | Path) -> CorpusManifest:
    """Read a JSON manifest; corpus paths resolve relative to the file."""
    path = Path(path)
    with open(path, encoding="utf-8") as handle:
        doc = json.load(handle)
    base = path.parent

    def resolve(key: str) -> Path | None:
        value = doc.get(key)
        if value is None:
            return None
        p = Path(value)
        return p if p.is_absolute() else base / p

    return CorpusManifest(
        l1_name=doc.get("l1", "L1"),
        l2_name=doc.get("l2", "L2"),
        l1_in=resolve("l1_in"),
        l2_in=resolve("l2_in"),
        l1_out=resolve("l1_out"),
        l2_out=resolve("l2_out"),
    )


def _role_names(scenario: Scenario, manifest: CorpusManifest) -> dict[str, str]:
    """Map canonical corpus roles to the user's language names."""
    canonical_l1 = manifest.l2_name if scenario.flipped else manifest.l1_name
    canonical_l2 = manifest.l1_name if scenario.flipped else manifest.l2_name
    return {
        "l1-in-domain": f"{canonical_l1} in-domain corpus",
        "l2-in-domain": f"{canonical_l2} in-domain corpus",
        "l1-out-domain": f"{canonical_l1} out-of-domain corpus",
        "l2-out-domain": f"{canonical_l2} out-of-domain corpus",
        "l1-out-domain-subsample": f"size-matched subsample of the {canonical_l1} out-of-domain corpus",
        "l2-out-domain-subsample": f"size-matched subsample of the {canonical_l2} out-of-domain corpus",
        "backtranslated-pseudo-l1-in-domain": f"back-translated pseudo {canonical_l1} in-domain corpus",
        "selected-pseudo-in-domain": f"selected pseudo {canonical_l1} in-domain corpus",
    }


def render_plan(plan: AdaptationPlan, manifest: CorpusManifest) -> str:
    """Human-readable plan report using the user's original language names."""
    scenario = plan.scenario
    names = _role_names(scenario, manifest)
    lines = [
        f"languages: {manifest.l1_name} / {manifest.l2_name}",
        f"scenario: {scenario.describe(manifest)}",
    ]
    if plan.methods:
        lines.append("methods: " + ", ".join(m.value for m in plan.methods))
    else:
        lines.append("methods: none (baseline scenario)")
    if plan.selection_recipe:
        recipe = plan.selection_recipe
        k_text = str(recipe.k) if recipe.k is not None else "default"
        lines.append("data selection:")
        lines.append("  in-domain LM trained on: " + "; ".join(names[s] for s in recipe.in_lm_sources))
        lines.append("  out-of-domain LM trained on: " + "; ".join(names[s] for s in recipe.out_lm_sources))
        lines.append(f"  scored: every sentence of the {names[recipe.scoring_target]}")
        lines.append(f"  kept: lowest {k_text} by cross-entropy difference")
    if plan.finetune_recipe:
        recipe = plan.finetune_recipe
        lines.append("fine-tuning corpora:")
        lines.append(f"  {names[recipe.l1_source]}")
        lines.append(f"  {names[recipe.l2_source]}")
    return "\n".join(lines) + "\n"


def plan_to_dict(plan: AdaptationPlan, manifest: CorpusManifest) -> dict:
    """Machine-readable plan document for the pipeline runner."""
    doc = {
        "scenario": plan.scenario.label.value,
        "flipped": plan.scenario.flipped,
        "l1": manifest.l1_name,
        "l2": manifest.l2_name,
        "methods": [m.value for m in plan.methods],
        "finetune": None,
        "selection": None,
    }
    if plan.finetune_recipe:
        doc["finetune"] = {
            "l1_source": plan.finetune_recipe.l1_source,
            "l2_source": plan.finetune_recipe.l2_source,
        }
    if plan.selection_recipe:
        doc["selection"] = {
            "in_lm_sources": list(plan.selection_recipe.in_lm_sources),
            "out_lm_sources": list(plan.selection_recipe.out_lm_sources),
            "scoring_target": plan.selection_recipe.scoring_target,
            "k": plan.selection_recipe.k,
        }
    return doc
