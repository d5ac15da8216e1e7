"""Per-token feature strings for the CRF.

Every token gets binary indicator features, written as ``name[offset]=value``
strings, over a window of two words either side.  Positions past the
sentence edges read a ``<PAD>`` token.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .corpus import Sentence
from .errors import ClusterParseError, UsageError
from .induction import InductionModel
from .lexicon import Lexicon, match_word

PAD = "<PAD>"
WINDOW = (-2, -1, 0, 1, 2)
CLUSTER_PREFIXES = (4, 8, 12)

_BITS = re.compile(r"[01]+")


@dataclass(frozen=True)
class FeatureConfig:
    use_pretags: bool = True
    use_clusters: bool = True
    use_lexical: bool = True


def load_clusters(path) -> dict[str, str]:
    """Read a Brown-cluster file of ``bits<TAB>word[<TAB>count]`` lines."""
    paths: dict[str, str] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, 1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) < 2 or not _BITS.fullmatch(cols[0]) or not cols[1]:
                raise ClusterParseError(f"{path}:{lineno}: malformed cluster line {line!r}")
            paths[cols[1]] = cols[0]
    return paths


def cluster_prefix_features(clusters: dict[str, str], w: str) -> list[str]:
    path = clusters.get(w)
    if not path:
        return []
    return [f"cl{k}={path[:k]}" for k in CLUSTER_PREFIXES]


def _token_view(s: Sentence, pretags, lex: Lexicon | None):
    """Per-position attribute tuples used by every window offset."""
    view = []
    for i, tok in enumerate(s.tokens):
        w = tok.surface
        if lex is not None:
            m = match_word(lex, w)
            etok = int(m.is_entity_token)
            nathy = int("MISC" in m.entity_token_categories or m.is_hyphen_entity)
        else:
            etok = nathy = 0
        view.append((
            w, w.lower(), tok.lemma_or_lower, int(w[0].isupper()), int(i == 0), tok.pos,
            pretags[i] if pretags is not None else "O", etok, nathy,
        ))
    return view


_PAD_VIEW = (PAD, PAD.lower(), PAD.lower(), 0, 0, PAD, "O", 0, 0)


def extract_features(
    s: Sentence,
    pretags: Sequence[str] | None,
    ind: InductionModel | None = None,
    lex: Lexicon | None = None,
    clusters: dict[str, str] | None = None,
    cfg: FeatureConfig = FeatureConfig(),
) -> list[tuple[str, ...]]:
    """Feature strings per token, in a fixed order and without duplicates."""
    if pretags is not None and len(pretags) != len(s):
        raise UsageError(f"{len(pretags)} pre-tags for a sentence of {len(s)} tokens")
    if cfg.use_pretags and pretags is None:
        raise UsageError("pre-tag features enabled but no pre-tags given")
    view = _token_view(s, pretags, lex)
    n = len(view)
    out = []
    for i in range(n):
        feats = []
        for j in WINDOW:
            k = i + j
            w, lw, lm, cap, bos, pos, pt, etok, nathy = view[k] if 0 <= k < n else _PAD_VIEW
            if cfg.use_pretags:
                feats.append(f"pt[{j}]={pt}")
                feats.append(f"etok[{j}]={etok}")
                feats.append(f"nathy[{j}]={nathy}")
            if cfg.use_lexical:
                feats.append(f"w[{j}]={w}")
                feats.append(f"lw[{j}]={lw}")
                feats.append(f"lm[{j}]={lm}")
                feats.append(f"cap[{j}]={cap}")
                feats.append(f"bos[{j}]={bos}")
                feats.append(f"pos[{j}]={pos}")
        if cfg.use_clusters and clusters:
            feats.extend(cluster_prefix_features(clusters, view[i][0]))
        out.append(tuple(dict.fromkeys(feats)))
    return out


def _escape(attr: str) -> str:
    return attr.replace("\\", "\\\\").replace(":", "\\:")


def format_feature_dump(sequences) -> str:
    """Text training format: ``LABEL<TAB>feat...`` per token, blank line per sequence.

    ``sequences`` yields (features, labels) pairs.  Colons and backslashes
    in feature names are backslash-escaped since ``:`` separates weights.
    """
    lines = []
    for feats, labels in sequences:
        for fv, y in zip(feats, labels):
            lines.append("\t".join([y, *(_escape(a) for a in fv)]))
        lines.append("")
    return "\n".join(lines) + ("\n" if lines else "")
