"""Sector mixing of face-centered images with hard/soft label assignment.

A mix is described by a reproducible recipe: an ordered list of sources, a
strictly descending list of sweep angles, and one base-ray angle shared by
every fold step.  Sharing the base is what guarantees each source keeps an
arc of its own; folding source k at sweep angle rho_k leaves it exactly the
arc (rho_{k+1}, rho_k].
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError
from .geometry import FaceCenter, angle_matrix, default_center, rebase_angles, sector_mask


@dataclass(frozen=True)
class LabeledImage:
    """An 8-bit color buffer with an authenticity label (0 real, 1 fake)."""

    pixels: np.ndarray = field(repr=False)
    label: int
    soft_label: float | None = None

    def __post_init__(self):
        pixels = np.asarray(self.pixels)
        if pixels.ndim != 3 or pixels.shape[2] != 3 or pixels.dtype != np.uint8:
            raise DomainError(
                f"pixels must be an HxWx3 uint8 buffer, got {pixels.shape} {pixels.dtype}"
            )
        object.__setattr__(self, "pixels", pixels)
        if self.label not in (0, 1):
            raise DomainError(f"label must be 0 or 1, got {self.label}")
        if self.soft_label is not None and not (0.0 <= self.soft_label <= 1.0):
            raise DomainError(f"soft_label must lie in [0, 1], got {self.soft_label}")

    @property
    def shape(self):
        return self.pixels.shape


@dataclass(frozen=True)
class MixRecipe:
    """Reproducible plan for an n-way mix.

    sweep_angles are strictly decreasing and one shorter than source_ids;
    rho_base is shared across every fold step.
    """

    source_ids: tuple
    sweep_angles: tuple
    rho_base: float
    center: FaceCenter

    def __post_init__(self):
        object.__setattr__(self, "source_ids", tuple(self.source_ids))
        angles = tuple(float(a) for a in self.sweep_angles)
        object.__setattr__(self, "sweep_angles", angles)
        n = len(self.source_ids)
        if not (1 <= n <= 4):
            raise DomainError(f"recipes cover 1 to 4 sources, got {n}")
        if len(angles) != n - 1:
            raise DomainError(
                f"{n} sources need {n - 1} sweep angles, got {len(angles)}"
            )
        if any(not (0.0 < a < 360.0) for a in angles):
            raise DomainError(f"sweep angles must lie in (0, 360), got {angles}")
        if any(a <= b for a, b in zip(angles, angles[1:])):
            raise DomainError(f"sweep angles must strictly decrease, got {angles}")
        if not (0.0 <= self.rho_base < 360.0):
            raise DomainError(f"rho_base must lie in [0, 360), got {self.rho_base}")

    @property
    def n_sources(self):
        return len(self.source_ids)

    def with_sources(self, source_ids):
        if len(tuple(source_ids)) != self.n_sources:
            raise DomainError("source id count does not match recipe")
        return replace(self, source_ids=tuple(source_ids))

    def area_fractions(self):
        """Expected area share of each source: arc (rho_k+1, rho_k] over 360."""
        bounds = (360.0,) + self.sweep_angles + (0.0,)
        return tuple((hi - lo) / 360.0 for hi, lo in zip(bounds, bounds[1:]))


def mix_label_hard(labels):
    """Fake iff any source is fake: 1 - prod(1 - y), i.e. boolean OR."""
    labels = tuple(labels)
    if not labels:
        raise DomainError("label list is empty")
    if any(y not in (0, 1) for y in labels):
        raise DomainError(f"hard labels must be 0 or 1, got {labels}")
    return int(any(labels))


def mix_label_soft(y_a, y_b, lam):
    """Linear label interpolation ``lam * y_a + (1 - lam) * y_b``.

    Ablation-only labeling mode; accepts soft inputs so n-way mixes can fold
    it step by step.
    """
    if not (0.0 <= lam <= 1.0):
        raise DomainError(f"lambda must lie in [0, 1], got {lam}")
    for y in (y_a, y_b):
        if math.isnan(y) or not (0.0 <= y <= 1.0):
            raise DomainError(f"labels must lie in [0, 1], got {y}")
    return lam * y_a + (1.0 - lam) * y_b


def clockmix_pair(a, b, rho, rho_base, center=None):
    """Mix two images: `b` fills the sector swept up to `rho`, `a` the rest.

    Every output pixel is copied verbatim from exactly one input; there is
    no blending at the seam.

    Parameters
    ----------
    a, b : LabeledImage
        Equal-shaped sources; `b` owns the swept sector.
    rho : float
        Sweep angle in (0, 360).
    rho_base : float
        Shared base-ray angle in [0, 360).
    center : FaceCenter, optional
        Sector pivot; defaults to the image center.

    Returns
    -------
    LabeledImage
        Mixed pixels with the hard (boolean OR) label.
    """
    if a.pixels.shape != b.pixels.shape:
        raise DomainError(f"shape mismatch: {a.pixels.shape} vs {b.pixels.shape}")
    h, w = a.pixels.shape[:2]
    if center is None:
        center = default_center(h, w)
    m_base = rebase_angles(angle_matrix(h, w, center), rho_base)
    mask = sector_mask(m_base, rho)
    out = np.where(mask[:, :, None], b.pixels, a.pixels)
    return LabeledImage(out, mix_label_hard((a.label, b.label)))


def clockmix_n(images, recipe):
    """Left-fold of :func:`clockmix_pair` over the recipe's sources.

    ``result_1 = images[0]``; step k mixes in ``images[k]`` at sweep angle
    ``rho_k`` with the recipe's shared base and center.  Descending angles
    keep a nonempty arc for every source.
    """
    images = list(images)
    if len(images) != recipe.n_sources:
        raise DomainError(
            f"recipe expects {recipe.n_sources} sources, got {len(images)}"
        )
    result = images[0]
    for img, rho in zip(images[1:], recipe.sweep_angles):
        result = clockmix_pair(result, img, rho, recipe.rho_base, recipe.center)
    label = mix_label_hard([img.label for img in images])
    return LabeledImage(result.pixels, label)


def evenly_spaced_angles(n_sources):
    """Fallback sweep angles giving each of n sources a 360/n arc."""
    return tuple(360.0 * (n_sources - k) / n_sources for k in range(1, n_sources))


def sample_recipe(rng, n_sources, config, source_ids=None, center=None):
    """Draw a random mix recipe from a per-sample stream.

    Angles are drawn uniformly from ``config.angle_range``, sorted
    descending, and redrawn until consecutive gaps reach
    ``config.min_sector`` (bounded by ``config.sample_retry`` attempts, then
    falling back to evenly spaced angles).  One shared base angle is drawn
    uniformly from [0, 360).  Draw order is part of the determinism
    contract: angles (with retries) first, then the base.

    Parameters
    ----------
    rng : numpy.random.Generator
    n_sources : int
        Mix size, in {1, 2, 3, 4}.
    config : AugConfig-like
        Supplies angle_range, min_sector, sample_retry and image_size.
    source_ids : sequence, optional
        Provenance ids; defaults to 0..n-1 placeholders.
    center : FaceCenter, optional
        Defaults to the center of a config.image_size square.
    """
    if n_sources not in (1, 2, 3, 4):
        raise DomainError(f"n_sources must be in {{1,2,3,4}}, got {n_sources}")
    lo, hi = config.angle_range
    angles = ()
    if n_sources > 1:
        for _ in range(int(config.sample_retry)):
            draw = np.sort(rng.uniform(lo, hi, size=n_sources - 1))[::-1]
            if np.all(np.diff(draw[::-1]) >= config.min_sector):
                angles = tuple(float(a) for a in draw)
                break
        else:
            angles = evenly_spaced_angles(n_sources)
    rho_base = float(rng.uniform(0.0, 360.0))
    if center is None:
        center = default_center(config.image_size, config.image_size)
    if source_ids is None:
        source_ids = tuple(range(n_sources))
    return MixRecipe(tuple(source_ids), angles, rho_base, center)
