"""First-order linear-chain CRF with L2-regularized maximum likelihood training.

Weights live in one flat vector: state weights for every (observed
attribute, label) pair first, stored attribute-major, then the K*K label
transition weights.  A sequence's score is the sum of the state weights of
its attributes under each position's label, plus the transition weights
between consecutive labels.  All dynamic programming is in log space.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.optimize
import scipy.sparse

from .errors import NumericalError, TrainingError, UsageError

log = logging.getLogger(__name__)

# sequences per padded batch in forward-backward / viterbi
_BUCKET = 256


@dataclass
class FeatureSpace:
    labels: tuple[str, ...]
    attributes: tuple[str, ...]

    def __post_init__(self):
        self.labels = tuple(self.labels)
        self.attributes = tuple(self.attributes)
        self.label_index = {y: i for i, y in enumerate(self.labels)}
        self.attr_index = {a: i for i, a in enumerate(self.attributes)}
        if len(self.label_index) != len(self.labels) or len(self.attr_index) != len(self.attributes):
            raise UsageError("duplicate labels or attributes in feature space")

    @property
    def num_labels(self) -> int:
        return len(self.labels)

    @property
    def num_attributes(self) -> int:
        return len(self.attributes)

    @property
    def num_state_weights(self) -> int:
        return self.num_attributes * self.num_labels

    @property
    def num_weights(self) -> int:
        return self.num_state_weights + self.num_labels ** 2

    def state_index(self, attr: str, label: str) -> int | None:
        a = self.attr_index.get(attr)
        if a is None:
            return None
        return a * self.num_labels + self.label_index[label]

    def transition_index(self, prev: str, cur: str) -> int:
        K = self.num_labels
        return self.num_state_weights + self.label_index[prev] * K + self.label_index[cur]


@dataclass(frozen=True)
class TrainConfig:
    l2_coefficient: float = 1.0
    max_iterations: int = 200
    gradient_tolerance: float = 1e-5
    seed: int = 0  # unused; training is deterministic
    num_memories: int = 6

    def __post_init__(self):
        if self.l2_coefficient < 0:
            raise UsageError("l2_coefficient must be non-negative")
        if self.max_iterations < 0:
            raise UsageError("max_iterations must be non-negative")


@dataclass
class CrfModel:
    space: FeatureSpace
    weights: np.ndarray
    training_meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.shape != (self.space.num_weights,):
            raise UsageError(
                f"expected {self.space.num_weights} weights, got shape {self.weights.shape}"
            )
        if not np.all(np.isfinite(self.weights)):
            raise NumericalError("model weights must be finite")

    @classmethod
    def zeros(cls, space: FeatureSpace) -> "CrfModel":
        return cls(space, np.zeros(space.num_weights))

    @property
    def labels(self) -> tuple[str, ...]:
        return self.space.labels

    def state_weights(self) -> np.ndarray:
        """(num_attributes, num_labels) view of the state weights."""
        return self.weights[: self.space.num_state_weights].reshape(
            self.space.num_attributes, self.space.num_labels
        )

    def transition_weights(self) -> np.ndarray:
        K = self.space.num_labels
        return self.weights[self.space.num_state_weights:].reshape(K, K)


def build_feature_space(data) -> FeatureSpace:
    """Labels sorted lexicographically; attributes in order of first appearance."""
    labels = set()
    attrs: dict[str, None] = {}
    n = 0
    for feats, ys in data:
        if len(feats) != len(ys):
            raise UsageError(f"sequence has {len(feats)} feature vectors but {len(ys)} labels")
        labels.update(ys)
        for fv in feats:
            for a in fv:
                attrs.setdefault(a, None)
        n += 1
    if n == 0 or not labels:
        raise UsageError("cannot build a feature space from an empty dataset")
    return FeatureSpace(tuple(sorted(labels)), tuple(attrs))


# -- encoding ------------------------------------------------------------------


class Encoded:
    """A dataset mapped onto a feature space: one sparse row per token."""

    def __init__(self, space: FeatureSpace, xs: Sequence, ys: Sequence | None = None):
        indptr = [0]
        indices: list[int] = []
        lengths = []
        aidx = space.attr_index
        for x in xs:
            if len(x) == 0:
                raise UsageError("empty sequence")
            lengths.append(len(x))
            for fv in x:
                ids = sorted({aidx[a] for a in fv if a in aidx})
                indices.extend(ids)
                indptr.append(len(indices))
        self.space = space
        self.lengths = np.asarray(lengths, dtype=np.int64)
        self.offsets = np.concatenate([[0], np.cumsum(self.lengths)]).astype(np.int64)
        N = int(self.offsets[-1])
        self.X = scipy.sparse.csr_matrix(
            (np.ones(len(indices)), np.asarray(indices, dtype=np.int64), np.asarray(indptr)),
            shape=(N, space.num_attributes),
        )
        self.y = None
        if ys is not None:
            li = space.label_index
            try:
                self.y = np.asarray([li[t] for seq in ys for t in seq], dtype=np.int64)
            except KeyError as exc:
                raise UsageError(f"label {exc.args[0]!r} not in feature space") from None
            if len(self.y) != N:
                raise UsageError("labels and features disagree in length")
        order = np.argsort(self.lengths, kind="stable")
        self.buckets = [order[i:i + _BUCKET] for i in range(0, len(order), _BUCKET)]

    def pad(self, E: np.ndarray, seqs: np.ndarray):
        """Stack the emission rows of ``seqs`` into a (B, T, K) array."""
        lens = self.lengths[seqs]
        T = int(lens.max())
        K = E.shape[1]
        out = np.zeros((len(seqs), T, K))
        for b, s in enumerate(seqs):
            o = self.offsets[s]
            out[b, : lens[b]] = E[o:o + lens[b]]
        return out, lens


def _lse(a: np.ndarray, axis: int) -> np.ndarray:
    m = a.max(axis=axis, keepdims=True)
    return np.squeeze(m, axis) + np.log(np.exp(a - m).sum(axis=axis))


def _forward(E, lens, trans):
    B, T, K = E.shape
    alpha = np.empty_like(E)
    alpha[:, 0] = E[:, 0]
    for t in range(1, T):
        new = _lse(alpha[:, t - 1, :, None] + trans[None], axis=1) + E[:, t]
        alpha[:, t] = np.where((t < lens)[:, None], new, alpha[:, t - 1])
    return alpha


def _backward(E, lens, trans):
    B, T, K = E.shape
    beta = np.zeros_like(E)
    for t in range(T - 2, -1, -1):
        new = _lse(trans[None] + (E[:, t + 1] + beta[:, t + 1])[:, None, :], axis=2)
        beta[:, t] = np.where((t + 1 < lens)[:, None], new, 0.0)
    return beta


def _forward_backward(E, lens, trans):
    """Return log Z per sequence, unary marginals (B,T,K) and summed pairwise marginals (K,K)."""
    alpha = _forward(E, lens, trans)
    beta = _backward(E, lens, trans)
    logZ = _lse(alpha[:, -1], axis=1)
    B, T, K = E.shape
    valid = (np.arange(T)[None, :] < lens[:, None])
    unary = np.exp(alpha + beta - logZ[:, None, None]) * valid[:, :, None]
    pair = np.zeros((K, K))
    for t in range(1, T):
        m = valid[:, t]
        if not m.any():
            break
        lp = (alpha[m, t - 1, :, None] + trans[None]
              + (E[m, t] + beta[m, t])[:, None, :] - logZ[m, None, None])
        pair += np.exp(lp).sum(axis=0)
    return logZ, unary, pair


def _emissions(model: CrfModel, enc: Encoded) -> np.ndarray:
    return np.asarray(enc.X @ model.state_weights())


# -- public single-sequence operations -------------------------------------------


def encode(model_or_space, xs, ys=None) -> Encoded:
    space = model_or_space.space if isinstance(model_or_space, CrfModel) else model_or_space
    return Encoded(space, xs, ys)


def log_partition(model: CrfModel, x) -> float:
    """log of the sum of exp(score) over every label sequence of ``x``."""
    enc = Encoded(model.space, [x])
    E, lens = enc.pad(_emissions(model, enc), np.array([0]))
    alpha = _forward(E, lens, model.transition_weights())
    return float(_lse(alpha[:, -1], axis=1)[0])


def log_partition_backward(model: CrfModel, x) -> float:
    """log Z via the backward recursion, used to cross-check the forward pass."""
    enc = Encoded(model.space, [x])
    E, lens = enc.pad(_emissions(model, enc), np.array([0]))
    beta = _backward(E, lens, model.transition_weights())
    return float(_lse(E[0, 0] + beta[0, 0], axis=0))


def marginals(model: CrfModel, x):
    """Posterior marginals: unary (n, K) and pairwise (n-1, K, K)."""
    enc = Encoded(model.space, [x])
    E, lens = enc.pad(_emissions(model, enc), np.array([0]))
    trans = model.transition_weights()
    alpha = _forward(E, lens, trans)
    beta = _backward(E, lens, trans)
    logZ = _lse(alpha[:, -1], axis=1)[0]
    unary = np.exp(alpha[0] + beta[0] - logZ)
    pair = np.exp(alpha[0, :-1, :, None] + trans[None]
                  + (E[0, 1:] + beta[0, 1:])[:, None, :] - logZ)
    return unary, pair


def sequence_score(model: CrfModel, x, y: Sequence[str]) -> float:
    enc = Encoded(model.space, [x])
    E = _emissions(model, enc)
    idx = [model.space.label_index[t] for t in y]
    trans = model.transition_weights()
    s = sum(E[i, k] for i, k in enumerate(idx))
    s += sum(trans[p, c] for p, c in zip(idx, idx[1:]))
    return float(s)


def nll_and_gradient(model: CrfModel, data, l2: float, enc: Encoded | None = None):
    """Regularized negative log-likelihood of ``data`` and its gradient.

    objective = sum(log Z - gold score) + l2 * ||w||^2
    """
    if enc is None:
        data = list(data)
        if not data:
            raise UsageError("empty dataset")
        enc = Encoded(model.space, [x for x, _ in data], [y for _, y in data])
    return _objective(model.weights, model.space, enc, l2)


def _objective(w: np.ndarray, space: FeatureSpace, enc: Encoded, l2: float):
    A, K = space.num_attributes, space.num_labels
    W = w[: A * K].reshape(A, K)
    trans = w[A * K:].reshape(K, K)
    E = np.asarray(enc.X @ W)
    y = enc.y

    N = E.shape[0]
    gold = E[np.arange(N), y].sum()
    starts = np.zeros(N, dtype=bool)
    starts[enc.offsets[:-1]] = True
    cont = ~starts
    cont[0] = False
    prev_y, cur_y = y[np.flatnonzero(cont) - 1], y[cont]
    gold += trans[prev_y, cur_y].sum()
    gold_trans = np.zeros((K, K))
    np.add.at(gold_trans, (prev_y, cur_y), 1.0)

    logZ_total = 0.0
    P = np.zeros_like(E)
    pair_total = np.zeros((K, K))
    for seqs in enc.buckets:
        Ep, lens = enc.pad(E, seqs)
        logZ, unary, pair = _forward_backward(Ep, lens, trans)
        logZ_total += logZ.sum()
        pair_total += pair
        for b, s in enumerate(seqs):
            o = enc.offsets[s]
            P[o:o + lens[b]] = unary[b, : lens[b]]

    obj = logZ_total - gold + l2 * float(w @ w)
    if not math.isfinite(obj):
        raise NumericalError(f"non-finite objective {obj}")
    P[np.arange(N), y] -= 1.0
    g_state = np.asarray(enc.X.T @ P)
    g = np.concatenate([g_state.ravel(), (pair_total - gold_trans).ravel()]) + 2.0 * l2 * w
    if not np.all(np.isfinite(g)):
        raise NumericalError("non-finite gradient")
    return float(obj), g


# -- training ------------------------------------------------------------------


def train(data, cfg: TrainConfig = TrainConfig(), space: FeatureSpace | None = None) -> CrfModel:
    """Fit weights with L-BFGS on the regularized negative log-likelihood."""
    data = list(data)
    if not data:
        raise UsageError("cannot train on an empty dataset")
    if space is None:
        space = build_feature_space(data)
    enc = Encoded(space, [x for x, _ in data], [y for _, y in data])
    w0 = np.zeros(space.num_weights)
    l2 = cfg.l2_coefficient
    log.info("training CRF: %d sequences, %d labels, %d attributes, %d weights",
             len(data), space.num_labels, space.num_attributes, space.num_weights)

    if cfg.max_iterations == 0:
        obj, _ = _objective(w0, space, enc, l2)
        return CrfModel(space, w0, {"l2_coefficient": l2, "iterations_run": 0,
                                    "final_objective": obj})

    history = []

    def fg(w):
        return _objective(w, space, enc, l2)

    def callback(intermediate_result):
        f = float(intermediate_result.fun)
        if history and f > history[-1] + 1e-9 * max(1.0, abs(history[-1])):
            raise TrainingError(f"objective increased from {history[-1]} to {f}")
        history.append(f)
        log.debug("iteration %d: objective %.6f", len(history), f)

    res = scipy.optimize.minimize(
        fg, w0, jac=True, method="L-BFGS-B", callback=callback,
        options={"maxiter": cfg.max_iterations, "gtol": cfg.gradient_tolerance,
                 "ftol": 0.0, "maxcor": cfg.num_memories},
    )
    log.info("optimizer stopped after %d iterations: %s", res.nit, res.message)
    meta = {"l2_coefficient": l2, "iterations_run": int(res.nit), "final_objective": float(res.fun)}
    return CrfModel(space, res.x, meta)


# -- decoding ------------------------------------------------------------------


def _viterbi_padded(E, lens, trans):
    B, T, K = E.shape
    delta = E[:, 0].copy()
    bp = np.zeros((B, T, K), dtype=np.int64)
    ident = np.broadcast_to(np.arange(K), (B, K))
    for t in range(1, T):
        cand = delta[:, :, None] + trans[None]  # (B, prev, cur)
        best = cand.argmax(axis=1)  # first maximum wins ties
        new = np.take_along_axis(cand, best[:, None, :], axis=1)[:, 0] + E[:, t]
        live = (t < lens)[:, None]
        delta = np.where(live, new, delta)
        bp[:, t] = np.where(live, best, ident)
    paths = []
    for b in range(B):
        n = int(lens[b])
        k = int(delta[b].argmax())
        path = [k]
        for t in range(n - 1, 0, -1):
            k = int(bp[b, t, k])
            path.append(k)
        paths.append(path[::-1])
    return paths


def viterbi_batch(model: CrfModel, xs) -> list[list[str]]:
    xs = list(xs)
    if not xs:
        return []
    enc = Encoded(model.space, xs)
    E = _emissions(model, enc)
    trans = model.transition_weights()
    out: list[list[str] | None] = [None] * len(xs)
    labels = model.space.labels
    for seqs in enc.buckets:
        Ep, lens = enc.pad(E, seqs)
        for s, path in zip(seqs, _viterbi_padded(Ep, lens, trans)):
            out[s] = [labels[k] for k in path]
    return out


def viterbi(model: CrfModel, x) -> list[str]:
    """Highest-scoring label sequence; ties go to the lower label index."""
    return viterbi_batch(model, [x])[0]
