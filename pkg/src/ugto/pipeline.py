"""End-to-end glue: corpus -> features/labels -> CRF -> tagged spans."""

from __future__ import annotations

import logging

from . import crf
from .corpus import Corpus, Sentence
from .errors import UsageError
from .features import FeatureConfig, extract_features
from .induction import InductionModel, induce_uncommon_list
from .lexicon import Lexicon
from .modelfile import ModelBundle
from .scheme import extract_entities, label_sentence, pretag_sentence

log = logging.getLogger(__name__)


def sentence_features(s: Sentence, ind: InductionModel, lex: Lexicon, clusters, cfg: FeatureConfig):
    pretags = pretag_sentence(s, ind, lex)
    return extract_features(s, pretags, ind, lex, clusters, cfg)


def training_data(corpus: Corpus, ind: InductionModel, lex: Lexicon, clusters=None,
                  cfg: FeatureConfig = FeatureConfig(), typed: bool = True):
    if not corpus.labeled:
        raise UsageError("training data needs a labeled corpus")
    data = []
    for s in corpus.sentences:
        if len(s) == 0:
            continue
        data.append((sentence_features(s, ind, lex, clusters, cfg),
                     label_sentence(s, ind, lex, typed)))
    return data


def train_tagger(train: Corpus, lexicon: Lexicon | None = None, clusters=None,
                 threshold: float = 1.0, typed: bool = True,
                 feature_cfg: FeatureConfig = FeatureConfig(),
                 train_cfg: crf.TrainConfig = crf.TrainConfig()) -> ModelBundle:
    lexicon = lexicon if lexicon is not None else Lexicon()
    if not feature_cfg.use_clusters:
        clusters = None
    ind = induce_uncommon_list(train, threshold)
    log.info("induced %d uncommon words (t=%s)", len(ind.uncommon_list), threshold)
    data = training_data(train, ind, lexicon, clusters, feature_cfg, typed)
    model = crf.train(data, train_cfg)
    settings = {
        "typed": typed,
        "use_pretags": feature_cfg.use_pretags,
        "use_clusters": feature_cfg.use_clusters,
        "use_lexical": feature_cfg.use_lexical,
    }
    return ModelBundle(model, ind, lexicon, clusters, settings)


def bundle_feature_config(bundle: ModelBundle) -> FeatureConfig:
    s = bundle.settings
    return FeatureConfig(
        use_pretags=bool(s.get("use_pretags", True)),
        use_clusters=bool(s.get("use_clusters", True)),
        use_lexical=bool(s.get("use_lexical", True)),
    )


def tag_sentences(bundle: ModelBundle, sentences) -> list[list[str]]:
    """Decode raw UGTO label sequences for each sentence."""
    if bundle.induction is None:
        raise UsageError("model file carries no induction state")
    lex = bundle.lexicon if bundle.lexicon is not None else Lexicon()
    cfg = bundle_feature_config(bundle)
    sentences = list(sentences)
    xs = [sentence_features(s, bundle.induction, lex, bundle.clusters, cfg)
          for s in sentences if len(s)]
    decoded = iter(crf.viterbi_batch(bundle.crf, xs))
    return [next(decoded) if len(s) else [] for s in sentences]


def tag_corpus(bundle: ModelBundle, corpus: Corpus):
    """Return (predicted corpus, raw tags per sentence).

    The predicted corpus keeps tokens and document structure and replaces
    entity spans with the extracted ones.
    """
    sentences = corpus.sentences
    tags = tag_sentences(bundle, sentences)
    it = iter(tags)
    predicted = Corpus(
        tuple(tuple(s.with_entities(extract_entities(next(it))) for s in doc)
              for doc in corpus.documents),
        "test",
    )
    return predicted, tags
