"""Text serialization of a trained tagger.

Layout (UTF-8, tab-separated, one record per line)::

    UGTO-MODEL v1
    [meta]            key<TAB>value
    [labels]          label
    [induction]       threshold|uncommon|common<TAB>value
    [lexicon]         file-stem<TAB>word
    [clusters]        word<TAB>bits
    [transitions]     prev<TAB>cur<TAB>weight
    [state-features]  attribute<TAB>weight-per-label...
    [end]

Floats use ``repr`` so they read back bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import atomic_write_text
from .crf import CrfModel, FeatureSpace
from .errors import ModelFormatError, UnsupportedVersionError
from .induction import InductionModel
from .lexicon import ENTITY_CATEGORIES, TRIGGER_CATEGORIES, Lexicon

MAGIC = "UGTO-MODEL"
VERSION = "v1"
SECTIONS = ("meta", "labels", "induction", "lexicon", "clusters",
            "transitions", "state-features", "end")


@dataclass
class ModelBundle:
    crf: CrfModel
    induction: InductionModel | None = None
    lexicon: Lexicon | None = None
    clusters: dict | None = None
    settings: dict = field(default_factory=dict)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _lexicon_records(lex: Lexicon):
    for c in ENTITY_CATEGORIES:
        for w in sorted(lex.entity_tokens[c]):
            yield f"entity_tokens.{c.lower()}", w
    for w in sorted(lex.generic_modifiers):
        yield "modifiers.generic", w
    for c in TRIGGER_CATEGORIES:
        for w in sorted(lex.triggers[c]):
            yield f"triggers.{c.lower()}", w


def format_model(bundle: ModelBundle) -> str:
    m = bundle.crf
    sp = m.space
    lines = [f"{MAGIC} {VERSION}", "[meta]"]
    meta = {
        "num_labels": sp.num_labels,
        "num_attributes": sp.num_attributes,
        "has_induction": bundle.induction is not None,
        "has_lexicon": bundle.lexicon is not None,
        "has_clusters": bundle.clusters is not None,
    }
    for k in ("l2_coefficient", "iterations_run", "final_objective"):
        if k in m.training_meta:
            meta[k] = m.training_meta[k]
    for k, v in sorted(bundle.settings.items()):
        meta[f"setting.{k}"] = v
    lines += [f"{k}\t{_fmt(v)}" for k, v in meta.items()]

    lines.append("[labels]")
    lines += list(sp.labels)

    lines.append("[induction]")
    if bundle.induction is not None:
        ind = bundle.induction
        lines.append(f"threshold\t{ind.threshold!r}")
        lines += [f"uncommon\t{w}" for w in sorted(ind.uncommon_list)]
        lines += [f"common\t{w}" for w in sorted(ind.common_vocab)]

    lines.append("[lexicon]")
    if bundle.lexicon is not None:
        lines += [f"{k}\t{w}" for k, w in _lexicon_records(bundle.lexicon)]

    lines.append("[clusters]")
    if bundle.clusters is not None:
        lines += [f"{w}\t{b}" for w, b in sorted(bundle.clusters.items())]

    lines.append("[transitions]")
    T = m.transition_weights()
    for i, p in enumerate(sp.labels):
        for j, c in enumerate(sp.labels):
            lines.append(f"{p}\t{c}\t{float(T[i, j])!r}")

    lines.append("[state-features]")
    W = m.state_weights()
    for a, attr in enumerate(sp.attributes):
        lines.append(attr + "\t" + "\t".join(repr(float(v)) for v in W[a]))
    lines.append("[end]")
    return "\n".join(lines) + "\n"


def save_model(path, bundle: ModelBundle | CrfModel) -> None:
    if isinstance(bundle, CrfModel):
        bundle = ModelBundle(bundle)
    atomic_write_text(path, format_model(bundle))


def _parse_value(v: str):
    for conv in (int, float):
        try:
            return conv(v)
        except ValueError:
            pass
    return v


def parse_model(text: str, source="<model>") -> ModelBundle:
    try:
        return _parse(text, source)
    except (ValueError, KeyError) as exc:
        raise ModelFormatError(f"{source}: malformed model file ({exc})") from None


def _parse(text: str, source) -> ModelBundle:
    lines = text.split("\n")
    if not lines or not lines[0].startswith(MAGIC + " "):
        raise ModelFormatError(f"{source}: not a UGTO model file")
    version = lines[0][len(MAGIC) + 1:].strip()
    if version != VERSION:
        raise UnsupportedVersionError(f"{source}: unsupported model version {version!r}")

    sections: dict[str, list[str]] = {}
    current = None
    for lineno, line in enumerate(lines[1:], 2):
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1]
            if current not in SECTIONS or current in sections:
                raise ModelFormatError(f"{source}:{lineno}: unexpected section {line}")
            sections[current] = []
        elif line:
            if current is None or current == "end":
                raise ModelFormatError(f"{source}:{lineno}: record outside a section")
            sections[current].append(line)
    missing = [s for s in SECTIONS if s not in sections]
    if missing:
        raise ModelFormatError(f"{source}: truncated model file, missing sections {missing}")

    def split(rec, n, sec):
        cols = rec.split("\t")
        if len(cols) != n:
            raise ModelFormatError(f"{source}: bad record in [{sec}]: {rec!r}")
        return cols

    meta = {}
    for rec in sections["meta"]:
        k, v = split(rec, 2, "meta")
        meta[k] = v
    try:
        K = int(meta["num_labels"])
        A = int(meta["num_attributes"])
    except (KeyError, ValueError):
        raise ModelFormatError(f"{source}: meta lacks label/attribute counts") from None

    labels = sections["labels"]
    if len(labels) != K:
        raise ModelFormatError(f"{source}: expected {K} labels, found {len(labels)}")

    induction = None
    if meta.get("has_induction") == "1":
        t = None
        unc, com = [], []
        for rec in sections["induction"]:
            k, v = split(rec, 2, "induction")
            if k == "threshold":
                t = float(v)
            elif k == "uncommon":
                unc.append(v)
            elif k == "common":
                com.append(v)
            else:
                raise ModelFormatError(f"{source}: unknown induction record {k!r}")
        if t is None:
            raise ModelFormatError(f"{source}: induction section lacks threshold")
        induction = InductionModel(frozenset(unc), frozenset(com), t)

    lexicon = None
    if meta.get("has_lexicon") == "1":
        et = {c: set() for c in ENTITY_CATEGORIES}
        tr = {c: set() for c in TRIGGER_CATEGORIES}
        gen = set()
        for rec in sections["lexicon"]:
            k, w = split(rec, 2, "lexicon")
            kind, _, cat = k.partition(".")
            if kind == "entity_tokens" and cat.upper() in et:
                et[cat.upper()].add(w)
            elif kind == "triggers" and cat.upper() in tr:
                tr[cat.upper()].add(w)
            elif k == "modifiers.generic":
                gen.add(w)
            else:
                raise ModelFormatError(f"{source}: unknown lexicon record {k!r}")
        lexicon = Lexicon(et, gen, tr)

    clusters = None
    if meta.get("has_clusters") == "1":
        clusters = {}
        for rec in sections["clusters"]:
            w, b = split(rec, 2, "clusters")
            clusters[w] = b

    li = {y: i for i, y in enumerate(labels)}
    trans = np.zeros((K, K))
    if len(sections["transitions"]) != K * K:
        raise ModelFormatError(f"{source}: expected {K * K} transitions")
    for rec in sections["transitions"]:
        p, c, v = split(rec, 3, "transitions")
        trans[li[p], li[c]] = float(v)

    rows = sections["state-features"]
    if len(rows) != A:
        raise ModelFormatError(f"{source}: expected {A} state-feature rows, found {len(rows)}")
    attrs = []
    W = np.zeros((A, K))
    for a, rec in enumerate(rows):
        cols = split(rec, K + 1, "state-features")
        attrs.append(cols[0])
        W[a] = [float(v) for v in cols[1:]]

    space = FeatureSpace(tuple(labels), tuple(attrs))
    training_meta = {k: _parse_value(meta[k])
                     for k in ("l2_coefficient", "iterations_run", "final_objective") if k in meta}
    if "final_objective" in training_meta:
        training_meta["final_objective"] = float(training_meta["final_objective"])
    if "l2_coefficient" in training_meta:
        training_meta["l2_coefficient"] = float(training_meta["l2_coefficient"])
    settings = {k[len("setting."):]: _parse_value(v) for k, v in meta.items()
                if k.startswith("setting.")}
    crf = CrfModel(space, np.concatenate([W.ravel(), trans.ravel()]), training_meta)
    return ModelBundle(crf, induction, lexicon, clusters, settings)


def load_model(path) -> ModelBundle:
    """Read a model file; raises ModelFormatError on any malformed content."""
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise ModelFormatError(f"cannot read model file {path}: {exc}") from exc
    return parse_model(text, str(path))
