"""Brute-force reference computations used to check the CRF and induction code.

Nothing here touches the encoded/vectorized paths in ugto.crf: scores are
summed directly from a plain dict of (attribute, label) -> weight.
"""

import itertools
import math
from collections import Counter

import numpy as np

from ugto.crf import CrfModel, FeatureSpace


def random_instance(rng, max_len=6, max_labels=4, max_weights=50, n_attrs=None):
    """Random CRF model and observation sequence within the given size limits."""
    K = int(rng.integers(1, max_labels + 1))
    n = int(rng.integers(1, max_len + 1))
    max_attrs = max(1, (max_weights - K * K) // K)
    A = int(rng.integers(1, max_attrs + 1)) if n_attrs is None else n_attrs
    labels = tuple(f"L{k}" for k in range(K))
    attrs = tuple(f"a{i}" for i in range(A))
    x = []
    for _ in range(n):
        m = int(rng.integers(0, min(A, 4) + 1))
        x.append(tuple(sorted(rng.choice(attrs, size=m, replace=False).tolist())))
    space = FeatureSpace(labels, attrs)
    state = {(a, y): float(rng.normal(scale=1.5)) for a in attrs for y in labels}
    trans = {(p, c): float(rng.normal(scale=1.5)) for p in labels for c in labels}
    w = np.zeros(space.num_weights)
    for (a, y), v in state.items():
        w[space.state_index(a, y)] = v
    for (p, c), v in trans.items():
        w[space.transition_index(p, c)] = v
    return CrfModel(space, w), x, state, trans


def brute_score(x, y, state, trans):
    s = 0.0
    for i, fv in enumerate(x):
        for a in fv:
            s += state.get((a, y[i]), 0.0)
    for p, c in zip(y, y[1:]):
        s += trans[(p, c)]
    return s


def all_sequences(labels, n):
    return itertools.product(labels, repeat=n)


def brute_log_partition(x, labels, state, trans):
    scores = [brute_score(x, y, state, trans) for y in all_sequences(labels, len(x))]
    m = max(scores)
    return m + math.log(math.fsum(math.exp(s - m) for s in scores))


def brute_max(x, labels, state, trans):
    return max(brute_score(x, y, state, trans) for y in all_sequences(labels, len(x)))


def recount_uncommon(sentences, t):
    """List L recomputed by walking every token and checking span membership."""
    ent, com = Counter(), Counter()
    for s in sentences:
        for i, tok in enumerate(s.tokens):
            inside = False
            for span in s.entities:
                if span.start <= i < span.end:
                    inside = True
            if inside:
                ent[tok.surface] += 1
            else:
                com[tok.surface] += 1
    return {w for w in ent if ent[w] / (ent[w] + com[w]) >= t}
