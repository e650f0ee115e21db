"""Adversarial spatial-consistency round.

One round pits a scoring generator (pushing the two shuffled views of an
image apart in feature space) against a frozen feature extractor whose
trainer would minimize that same distance.  The generator's scores reach a
permutation only through non-differentiable steps (argmax assignment), so
its parameters are updated with the score-function estimator: each sample
contributes ``D * grad log p`` where p averages the score entries the
assignment selected.
"""

import math
from dataclasses import dataclass

import numpy as np

from .assignment import as_score_matrix, hungarian_assign, permutation_from_matrix
from .errors import DomainError
from .shuffle import GridPermutation, apply_permutation, random_shuffle

POOL_SIDE = 8  # each image is summarized by an 8x8 grayscale block-mean


@dataclass(frozen=True)
class AdvStepReport:
    """Observables of one adversarial round."""

    d: float
    p: float
    log_p: float
    grad_norm: float
    g: int
    views: tuple | None = None

    def __post_init__(self):
        if self.d < 0:
            raise DomainError(f"consistency distance must be >= 0, got {self.d}")
        if not (0.0 < self.p <= 1.0):
            raise DomainError(f"selection probability must lie in (0, 1], got {self.p}")


def feature_distance(f1, f2):
    """Mean absolute difference between two feature vectors.

    Mean rather than sum, so the distance is invariant to feature
    dimensionality.
    """
    f1 = np.asarray(f1, dtype=np.float64)
    f2 = np.asarray(f2, dtype=np.float64)
    if f1.shape != f2.shape:
        raise DomainError(f"feature shape mismatch: {f1.shape} vs {f2.shape}")
    return float(np.abs(f1 - f2).mean())


def selection_probability(m, m_hat):
    """Average of the score entries selected by the assignment matrix."""
    m = np.asarray(m, dtype=np.float64)
    m_hat = np.asarray(m_hat)
    if m.shape != m_hat.shape:
        raise DomainError(f"shape mismatch: {m.shape} vs {m_hat.shape}")
    n = m.shape[0]
    return float((m * m_hat).sum() / n)


def reinforce_update(theta, samples, epsilon):
    """Score-function ascent step: ``theta + (epsilon/K) * sum(D_k * g_k)``."""
    if epsilon <= 0:
        raise DomainError(f"learning rate must be positive, got {epsilon}")
    samples = list(samples)
    if not samples:
        raise DomainError("need at least one (D, grad) sample")
    theta = np.asarray(theta, dtype=np.float64)
    step = np.zeros_like(theta)
    for d, grad in samples:
        grad = np.asarray(grad, dtype=np.float64)
        if grad.shape != theta.shape:
            raise DomainError(f"gradient shape {grad.shape} != theta {theta.shape}")
        step += d * grad
    return theta + (epsilon / len(samples)) * step


def _pooled_summary(pixels):
    """Standardized 8x8 block-mean of the grayscale image.

    Standardization (zero mean, unit variance) keeps the constant brightness
    component from dominating the scorer's logits, which would make the
    resulting assignment blind to the shuffled view.
    """
    pixels = np.asarray(pixels)
    h, w = pixels.shape[:2]
    if h % POOL_SIDE or w % POOL_SIDE:
        raise DomainError(f"image {h}x{w} not divisible into {POOL_SIDE}x{POOL_SIDE} blocks")
    gray = pixels.astype(np.float64).mean(axis=2) if pixels.ndim == 3 else pixels.astype(np.float64)
    blocks = gray.reshape(POOL_SIDE, h // POOL_SIDE, POOL_SIDE, w // POOL_SIDE)
    summary = blocks.mean(axis=(1, 3)).ravel() / 255.0
    summary -= summary.mean()
    scale = summary.std()
    return summary / scale if scale > 1e-9 else summary


class ReferenceExtractor:
    """Desk-scale stand-in for a backbone extractor.

    A fixed seeded random projection of the flattened image to `dim`
    features, squashed by tanh.  The projection entries are heavy-tailed
    (Cauchy) so a handful of dimensions dominate each feature: tanh turns
    those into sign-like responses, which spreads the pairwise distances of
    shuffled variants far more than a Gaussian projection would.
    Deterministic and never updated here.
    """

    def __init__(self, image_shape, dim=32, seed=0):
        self.image_shape = tuple(image_shape)
        self.dim = dim
        flat = int(np.prod(self.image_shape))
        rng = np.random.default_rng(seed)
        self._projection = rng.standard_cauchy(size=(dim, flat)) / math.sqrt(flat)

    def extract(self, pixels):
        pixels = np.asarray(pixels)
        if pixels.shape != self.image_shape:
            raise DomainError(
                f"extractor built for {self.image_shape}, got {pixels.shape}"
            )
        x = pixels.astype(np.float64).ravel() / 255.0 - 0.5
        return np.tanh(self._projection @ x)


class ReferenceScorer:
    """Linear reference generator over pooled image summaries.

    For each supported granularity g it holds a weight block mapping the
    128-dim summary (8x8 pooled grayscale of the original and the shuffled
    image, concatenated) to N*N logits; row-wise softmax yields the score
    matrix.  All blocks live in one flat parameter vector so the
    score-function update applies uniformly.
    """

    def __init__(self, granularities, seed=0, init_scale=0.05):
        self.granularities = tuple(sorted(set(int(g) for g in granularities)))
        if not self.granularities:
            raise DomainError("scorer needs at least one granularity")
        self.feature_dim = 2 * POOL_SIDE * POOL_SIDE
        rng = np.random.default_rng(seed)
        self._slices = {}
        start = 0
        for g in self.granularities:
            size = (g * g) ** 2 * self.feature_dim
            self._slices[g] = slice(start, start + size)
            start += size
        self._theta = rng.normal(0.0, init_scale, size=start)

    @property
    def theta(self):
        return self._theta

    @theta.setter
    def theta(self, value):
        value = np.asarray(value, dtype=np.float64)
        if value.shape != self._theta.shape:
            raise DomainError(f"theta shape {value.shape} != {self._theta.shape}")
        self._theta = value

    def _features(self, pixels, shuffled):
        return np.concatenate([_pooled_summary(pixels), _pooled_summary(shuffled)])

    def _weights(self, g):
        if g not in self._slices:
            raise DomainError(f"scorer has no block for granularity {g}")
        n = g * g
        return self._theta[self._slices[g]].reshape(n * n, self.feature_dim)

    def score(self, pixels, shuffled, g):
        """Row-stochastic N x N score matrix for the drawn granularity."""
        x = self._features(pixels, shuffled)
        n = g * g
        logits = (self._weights(g) @ x).reshape(n, n)
        logits -= logits.max(axis=1, keepdims=True)
        e = np.exp(logits)
        return e / e.sum(axis=1, keepdims=True)

    def grad_log_p(self, pixels, shuffled, m_hat, g):
        """Analytic gradient of log selection probability w.r.t. theta.

        The assignment m_hat is held fixed; gradients flow only through the
        softmax scores.
        """
        x = self._features(pixels, shuffled)
        m = self.score(pixels, shuffled, g)
        n = g * g
        cols = np.argmax(np.asarray(m_hat), axis=1)
        selected = m[np.arange(n), cols]
        total = selected.sum()
        d_logits = -(selected[:, None] * m)
        d_logits[np.arange(n), cols] += selected
        d_logits /= total
        grad = np.zeros_like(self._theta)
        grad[self._slices[g]] = np.outer(d_logits.ravel(), x).ravel()
        return grad


class ReinforceAccumulator:
    """Collects (D, grad) pairs and applies one update per K samples."""

    def __init__(self, batch_size):
        if batch_size < 1:
            raise DomainError(f"batch size must be >= 1, got {batch_size}")
        self.batch_size = batch_size
        self._pending = []

    def add(self, d, grad):
        self._pending.append((d, grad))
        return len(self._pending) >= self.batch_size

    def flush(self, scorer, epsilon):
        """Apply the pending update to the scorer; returns the step norm."""
        if not self._pending:
            return 0.0
        before = scorer.theta
        after = reinforce_update(before, self._pending, epsilon)
        scorer.theta = after
        self._pending = []
        return float(np.linalg.norm(after - before))


def advscm_round(
    extractor,
    scorer,
    image,
    rng,
    epsilon,
    granularities=(2, 4, 8),
    accumulator=None,
    update=True,
    collect_views=False,
):
    """Run one adversarial spatial-consistency round.

    Protocol: draw a random shuffle I_s1, score (I, I_s1), binarize the
    scores into a permutation via the assignment solver, build I_s2, and
    measure the feature distance D between both views.  The (D, grad log p)
    pair updates the scorer parameters immediately (or through the given
    accumulator at its batch boundary); the extractor is never touched, and
    D is returned for the caller's own consistency objective.

    Returns
    -------
    (AdvStepReport, ndarray, float)
        Round observables, the scorer parameters after the round, and D.
    """
    pixels = np.asarray(image.pixels if hasattr(image, "pixels") else image)
    i_s1, perm1 = random_shuffle(rng, pixels, granularities)
    g = perm1.g
    m = as_score_matrix(scorer.score(pixels, i_s1, g))
    m_hat = hungarian_assign(m)
    i_s2 = apply_permutation(pixels, permutation_from_matrix(m_hat))
    d = feature_distance(extractor.extract(i_s1), extractor.extract(i_s2))
    p = selection_probability(m, m_hat)
    grad = scorer.grad_log_p(pixels, i_s1, m_hat, g)
    applied = 0.0
    if update:
        if accumulator is None:
            before = scorer.theta
            scorer.theta = reinforce_update(before, [(d, grad)], epsilon)
            applied = float(np.linalg.norm(scorer.theta - before))
        elif accumulator.add(d, grad):
            applied = accumulator.flush(scorer, epsilon)
    report = AdvStepReport(
        d=d,
        p=p,
        log_p=math.log(p),
        grad_norm=applied,
        g=g,
        views=(i_s1, i_s2) if collect_views else None,
    )
    return report, scorer.theta, d


def make_contrast_images(rng, count, size):
    """Synthesize demo images: one bright blob on a dark background.

    A single dominant region makes feature distance hinge on where the
    blob lands, so permutation quality varies sharply: the adversarial
    game has something concrete to find.
    """
    yy, xx = np.meshgrid(
        np.linspace(0.0, 1.0, size), np.linspace(0.0, 1.0, size), indexing="ij"
    )
    images = []
    for _ in range(count):
        cy, cx = rng.uniform(0.2, 0.8, size=2)
        blob = np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / (2.0 * 0.10**2))
        field = np.clip(0.1 + 0.9 * blob, 0.0, 1.0)
        images.append(
            np.round(np.repeat(field[:, :, None], 3, axis=2) * 255.0).astype(np.uint8)
        )
    return images


def make_toy_images(rng, count, size):
    """Synthesize smooth structured test images (sinusoid mixtures).

    Strong low-frequency structure makes patch relocation clearly visible
    to linear feature extractors, unlike iid noise.
    """
    yy, xx = np.meshgrid(
        np.linspace(0.0, 1.0, size), np.linspace(0.0, 1.0, size), indexing="ij"
    )
    images = []
    for _ in range(count):
        img = np.zeros((size, size, 3))
        for c in range(3):
            wave = np.zeros_like(yy)
            for _ in range(3):
                fy, fx = rng.uniform(0.5, 3.0, size=2)
                phase = rng.uniform(0.0, 2.0 * np.pi)
                wave += rng.uniform(0.3, 1.0) * np.sin(
                    2.0 * np.pi * (fy * yy + fx * xx) + phase
                )
            wave += rng.uniform(-1.0, 1.0) * (xx - 0.5) + rng.uniform(-1.0, 1.0) * (yy - 0.5)
            lo, hi = wave.min(), wave.max()
            img[..., c] = (wave - lo) / (hi - lo + 1e-12)
        images.append(np.round(img * 255.0).astype(np.uint8))
    return images


def run_adv_demo(
    seed,
    rounds,
    eval_rounds=300,
    size=64,
    granularities=(2,),
    epsilon=0.02,
    batch_size=8,
    n_images=8,
    controls_per_eval=6,
):
    """Train the reference scorer for `rounds` mini-batches, then evaluate.

    Each training round processes `batch_size` samples and applies one
    score-function update over them.  Evaluation freezes the parameters;
    every evaluation round pairs the adversarially selected permutation
    with `controls_per_eval` uniformly random permutations of the same
    granularity, all measured against the same random view I_s1.

    Returns
    -------
    (list of dict, dict)
        Per-training-round observables (batch means) and a summary with
        the mean adversarial and random distances from the evaluation
        phase.
    """
    rng = np.random.default_rng(seed)
    images = make_contrast_images(rng, n_images, size)
    extractor = ReferenceExtractor((size, size, 3), seed=seed * 7919 + 1)
    scorer = ReferenceScorer(granularities, seed=seed * 104729 + 2)
    accumulator = ReinforceAccumulator(batch_size)
    rows = []
    sample = 0
    for t in range(rounds):
        batch = []
        for _ in range(batch_size):
            report, _, _ = advscm_round(
                extractor,
                scorer,
                images[sample % n_images],
                rng,
                epsilon,
                granularities,
                accumulator=accumulator,
            )
            sample += 1
            batch.append(report)
        rows.append(
            {
                "round": t,
                "g": batch[-1].g,
                "d": float(np.mean([r.d for r in batch])),
                "p": float(np.mean([r.p for r in batch])),
                "grad_norm": batch[-1].grad_norm,
            }
        )
    adv, rand = [], []
    for t in range(eval_rounds):
        pixels = images[t % n_images]
        report, _, d_adv = advscm_round(
            extractor,
            scorer,
            pixels,
            rng,
            epsilon,
            granularities,
            update=False,
            collect_views=True,
        )
        i_s1, _ = report.views
        f_s1 = extractor.extract(i_s1)
        for _ in range(controls_per_eval):
            control = GridPermutation(report.g, rng.permutation(report.g * report.g))
            rand.append(
                feature_distance(f_s1, extractor.extract(apply_permutation(pixels, control)))
            )
        adv.append(d_adv)
    adv_mean = float(np.mean(adv)) if adv else 0.0
    rand_mean = float(np.mean(rand)) if rand else 0.0
    summary = {
        "seed": seed,
        "adv_mean_d": adv_mean,
        "rand_mean_d": rand_mean,
        "advantage": adv_mean - rand_mean,
    }
    return rows, summary
