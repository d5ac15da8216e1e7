"""Command-line front end: ``ugto analyze | induce | train | tag | eval``.

Settings resolve from built-in defaults, then a ``key=value`` config file
(``--config``), then ``UGTO_<KEY>`` environment variables, then flags.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path

from . import __version__
from .analysis import pos_report, uncommon_report
from .corpus import (Corpus, atomic_write_text, load_conll, normalize_ontonotes,
                     spans_to_bio)
from .crf import TrainConfig
from .errors import ConfigError, UgtoError, UsageError
from .evaluation import score_corpora
from .features import FeatureConfig, load_clusters
from .induction import induce_uncommon_list
from .lexicon import Lexicon, load_lexicon, starter_lexicon
from .modelfile import load_model, save_model
from .pipeline import tag_corpus, train_tagger

log = logging.getLogger("ugto")

ENV_PREFIX = "UGTO_"


@dataclass
class Config:
    threshold_t: float = 1.0
    typed_labels: bool = True
    use_pretags: bool = True
    use_clusters: bool = True
    use_lexical: bool = True
    train: str = ""
    dev: str = ""
    test: str = ""
    lexicon_dir: str = "builtin"
    drop_lexicon: str = ""
    clusters: str = ""
    model: str = "ugto.model"
    output: str = ""
    l2: float = 1.0
    max_iterations: int = 200
    gradient_tolerance: float = 1e-5
    bio_variant: str = "IOB1"
    has_lemma_column: bool = False
    ontonotes: bool = False
    report: str = "all"
    scope: str = "entire"
    gold: str = ""
    pred: str = ""
    pred_bio_variant: str = "BIO"
    mode: str = "extraction"
    json: bool = False


_FIELDS = {f.name: f for f in fields(Config)}
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off", ""}


def _coerce(key: str, raw):
    f = _FIELDS.get(key)
    if f is None:
        raise ConfigError(f"unknown config key {key!r}")
    if not isinstance(raw, str):
        return raw
    kind = f.type
    try:
        if kind == "bool":
            v = raw.strip().lower()
            if v in _TRUE:
                return True
            if v in _FALSE:
                return False
            raise ValueError(raw)
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None
    return raw.strip()


def read_config_file(path) -> dict:
    out = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        k, v = line.split("=", 1)
        k = k.strip().replace("-", "_")
        out[k] = _coerce(k, v)
    return out


def resolve_config(file_path=None, env=None, overrides=None) -> Config:
    values = {}
    if file_path:
        values.update(read_config_file(file_path))
    env = os.environ if env is None else env
    for k, v in env.items():
        if k.startswith(ENV_PREFIX) and k != ENV_PREFIX + "CONFIG":
            key = k[len(ENV_PREFIX):].lower()
            if key in _FIELDS:
                values[key] = _coerce(key, v)
    for k, v in (overrides or {}).items():
        values[k] = _coerce(k, v)
    cfg = Config(**values)
    if not 0.0 < cfg.threshold_t <= 1.0:
        raise ConfigError(f"threshold_t must lie in (0, 1], got {cfg.threshold_t}")
    if cfg.bio_variant not in ("IOB1", "BIO") or cfg.pred_bio_variant not in ("IOB1", "BIO"):
        raise ConfigError("bio variants must be IOB1 or BIO")
    return cfg


# -- helpers -----------------------------------------------------------------


def _require(cfg: Config, *keys):
    missing = [k for k in keys if not getattr(cfg, k)]
    if missing:
        raise ConfigError("missing required setting(s): " + ", ".join(missing))


def _load(cfg: Config, path, split, labeled=True) -> Corpus:
    if not os.path.exists(path):
        raise UsageError(f"input file not found: {path}")
    c = load_conll(path, cfg.bio_variant, cfg.has_lemma_column, labeled, split)
    if cfg.ontonotes and labeled:
        c = normalize_ontonotes(c)
    return c


def _lexicon(cfg: Config) -> Lexicon:
    if cfg.lexicon_dir in ("", "none"):
        lex = Lexicon()
    elif cfg.lexicon_dir == "builtin":
        lex = starter_lexicon()
    else:
        lex = load_lexicon(cfg.lexicon_dir)
    if cfg.drop_lexicon:
        lex = lex.without_entity_tokens(c.strip() for c in cfg.drop_lexicon.split(",") if c.strip())
    return lex


def format_tagged(corpus: Corpus, raw_tags) -> str:
    """CoNLL lines ``surface pos raw-tag bio-tag``; the BIO column is last."""
    lines = []
    it = iter(raw_tags)
    for doc in corpus.documents:
        lines += ["-DOCSTART- -X- O O", ""]
        for s in doc:
            raw = next(it)
            bio = spans_to_bio(s.entities, len(s))
            lines += [f"{t.surface} {t.pos} {r} {b}" for t, r, b in zip(s.tokens, raw, bio)]
            lines.append("")
    return "\n".join(lines) + ("\n" if lines else "")


# -- commands ----------------------------------------------------------------


def cmd_analyze(cfg: Config, out=sys.stdout):
    splits = [(name, getattr(cfg, name)) for name in ("train", "dev", "test") if getattr(cfg, name)]
    if not splits:
        raise ConfigError("analyze needs at least one of train/dev/test")
    corpora = [_load(cfg, path, name) for name, path in splits]
    written = {}
    if cfg.report in ("uncommon", "all"):
        rep = uncommon_report(corpora, cfg.threshold_t, cfg.scope)
        print("Entities with at least one uncommon word (%)", file=out)
        print(rep.format_table(), file=out)
        written["uncommon.csv"] = rep.to_csv()
    if cfg.report in ("pos", "all"):
        rep = pos_report(corpora)
        print("POS tags inside entities", file=out)
        print(rep.format_table(top=10), file=out)
        written["pos.csv"] = rep.to_csv()
    if cfg.report not in ("uncommon", "pos", "all"):
        raise ConfigError(f"unknown report {cfg.report!r}")
    if cfg.output:
        os.makedirs(cfg.output, exist_ok=True)
        for name, text in written.items():
            atomic_write_text(os.path.join(cfg.output, name), text)
    return written


def cmd_induce(cfg: Config, out=sys.stdout):
    _require(cfg, "train")
    ind = induce_uncommon_list(_load(cfg, cfg.train, "train"), cfg.threshold_t)
    text = "".join(w + "\n" for w in sorted(ind.uncommon_list))
    if cfg.output:
        atomic_write_text(cfg.output, text)
    else:
        out.write(text)
    log.info("%d uncommon words", len(ind.uncommon_list))
    return ind


def cmd_train(cfg: Config, out=sys.stdout):
    _require(cfg, "train", "model")
    train = _load(cfg, cfg.train, "train")
    clusters = load_clusters(cfg.clusters) if cfg.clusters and cfg.use_clusters else None
    bundle = train_tagger(
        train, _lexicon(cfg), clusters, cfg.threshold_t, cfg.typed_labels,
        FeatureConfig(cfg.use_pretags, cfg.use_clusters, cfg.use_lexical),
        TrainConfig(cfg.l2, cfg.max_iterations, cfg.gradient_tolerance),
    )
    save_model(cfg.model, bundle)
    meta = bundle.crf.training_meta
    print(f"model written to {cfg.model} ({bundle.crf.space.num_weights} weights, "
          f"{meta.get('iterations_run')} iterations, objective {meta.get('final_objective'):.4f})",
          file=out)
    return bundle


def cmd_tag(cfg: Config, out=sys.stdout):
    _require(cfg, "model", "test")
    bundle = load_model(cfg.model)
    corpus = load_conll(cfg.test, cfg.bio_variant, cfg.has_lemma_column, labeled=False)
    predicted, raw = tag_corpus(bundle, corpus)
    text = format_tagged(predicted, raw)
    if cfg.output:
        atomic_write_text(cfg.output, text)
    else:
        out.write(text)
    return predicted


def cmd_eval(cfg: Config, out=sys.stdout):
    gold_path = cfg.gold or cfg.test
    if not gold_path or not cfg.pred:
        raise ConfigError("eval needs gold (or test) and pred files")
    gold = _load(cfg, gold_path, "test")
    if not os.path.exists(cfg.pred):
        raise UsageError(f"input file not found: {cfg.pred}")
    pred = load_conll(cfg.pred, cfg.pred_bio_variant, False, True, "test")
    if cfg.mode not in ("extraction", "recognition"):
        raise ConfigError(f"unknown mode {cfg.mode!r}")
    rep = score_corpora(gold, pred, cfg.mode)
    print(rep.format_table(), file=out)
    if cfg.json:
        print(json.dumps(rep.as_dict(), sort_keys=True), file=out)
    if cfg.output:
        atomic_write_text(cfg.output, json.dumps(rep.as_dict(), indent=2, sort_keys=True) + "\n")
    return rep


COMMANDS = {
    "analyze": cmd_analyze,
    "induce": cmd_induce,
    "train": cmd_train,
    "tag": cmd_tag,
    "eval": cmd_eval,
}


# -- argument parsing ------------------------------------------------------------


def _common(p: argparse.ArgumentParser):
    S = argparse.SUPPRESS
    p.add_argument("--config", default=S, help="key=value config file")
    p.add_argument("--train", default=S)
    p.add_argument("--dev", default=S)
    p.add_argument("--test", default=S, help="test/input CoNLL file")
    p.add_argument("--model", default=S)
    p.add_argument("--output", "-o", default=S)
    p.add_argument("--threshold", dest="threshold_t", type=float, default=S)
    p.add_argument("--bio-variant", dest="bio_variant", choices=["IOB1", "BIO"], default=S)
    p.add_argument("--lemma-column", dest="has_lemma_column", action="store_true", default=S)
    p.add_argument("--ontonotes", action="store_true", default=S,
                   help="apply OntoNotes* span normalization on load")
    p.add_argument("-v", "--verbose", action="count", default=0)


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    parser = argparse.ArgumentParser(prog="ugto", description="Named entity extraction with uncommon words")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="corpus characteristic reports")
    _common(p)
    p.add_argument("--report", choices=["uncommon", "pos", "all"], default=S)
    p.add_argument("--scope", choices=["entire", "per-split"], default=S)

    p = sub.add_parser("induce", help="write the uncommon-word list")
    _common(p)

    for name in ("train", "tag"):
        p = sub.add_parser(name, help=f"{name} a model")
        _common(p)
        if name == "train":
            p.add_argument("--lexicon-dir", dest="lexicon_dir", default=S,
                           help="lexicon directory, 'builtin' or 'none'")
            p.add_argument("--drop-lexicon", dest="drop_lexicon", default=S,
                           help="comma-separated entity-token categories to drop, e.g. per,loc")
            p.add_argument("--clusters", default=S)
            p.add_argument("--no-pretags", dest="use_pretags", action="store_false", default=S)
            p.add_argument("--no-clusters", dest="use_clusters", action="store_false", default=S)
            p.add_argument("--no-lexical", dest="use_lexical", action="store_false", default=S)
            p.add_argument("--untyped", dest="typed_labels", action="store_false", default=S)
            p.add_argument("--l2", type=float, default=S)
            p.add_argument("--max-iterations", dest="max_iterations", type=int, default=S)
            p.add_argument("--gradient-tolerance", dest="gradient_tolerance", type=float, default=S)

    p = sub.add_parser("eval", help="score predicted spans against gold")
    _common(p)
    p.add_argument("--gold", default=S)
    p.add_argument("--pred", default=S)
    p.add_argument("--pred-bio-variant", dest="pred_bio_variant", choices=["IOB1", "BIO"], default=S)
    p.add_argument("--mode", choices=["extraction", "recognition"], default=S)
    p.add_argument("--json", action="store_true", default=S)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    command = args.pop("command")
    verbose = args.pop("verbose", 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    config_path = args.pop("config", None) or os.environ.get(ENV_PREFIX + "CONFIG")
    try:
        cfg = resolve_config(config_path, overrides=args)
        COMMANDS[command](cfg, out=out)
    except (UgtoError, OSError) as exc:
        print(f"ugto {command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
