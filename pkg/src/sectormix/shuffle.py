"""Grid partition and patch permutation.

Patch shuffling relocates equal tiles of an image without touching the
pixels inside each tile, so texture and fine-grained statistics survive
while the spatial layout changes.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


@dataclass(frozen=True, eq=False)
class GridPermutation:
    """Bijective mapping of N patch indices; patch i lands at mapping[i].

    `g` is the patch count per image side (N = g*g).  It is None for
    permutations recovered from assignment matrices whose size is not a
    perfect square; such permutations cannot be applied to an image grid.
    """

    g: int | None
    mapping: np.ndarray = field(repr=False)

    def __post_init__(self):
        mapping = np.asarray(self.mapping, dtype=np.int64)
        object.__setattr__(self, "mapping", mapping)
        n = mapping.shape[0]
        if mapping.ndim != 1 or n == 0:
            raise DomainError("mapping must be a nonempty 1-D index array")
        if self.g is not None:
            if self.g < 1:
                raise DomainError(f"granularity must be >= 1, got {self.g}")
            if self.g * self.g != n:
                raise DomainError(
                    f"mapping length {n} does not match granularity {self.g}"
                )
        counts = np.bincount(mapping, minlength=n)
        if mapping.min() < 0 or mapping.max() >= n or not (counts == 1).all():
            raise DomainError("mapping is not a bijection on {0..N-1}")

    @property
    def n_patches(self):
        return self.mapping.shape[0]


def identity_permutation(g):
    return GridPermutation(g, np.arange(g * g, dtype=np.int64))


def _check_divisible(shape, g):
    h, w = shape[0], shape[1]
    if g < 1:
        raise DomainError(f"granularity must be >= 1, got {g}")
    if h % g != 0 or w % g != 0:
        raise DomainError(f"image of {h}x{w} is not divisible into {g}x{g} tiles")


def _to_patches(image, g):
    # (g, ph, g, pw, ...) -> (N, ph, pw, ...) in row-major patch order
    h, w = image.shape[0], image.shape[1]
    ph, pw = h // g, w // g
    tail = image.shape[2:]
    x = image.reshape(g, ph, g, pw, *tail)
    x = np.moveaxis(x, 2, 1)
    return x.reshape(g * g, ph, pw, *tail)


def _from_patches(patches, g):
    n, ph, pw = patches.shape[0], patches.shape[1], patches.shape[2]
    tail = patches.shape[3:]
    x = patches.reshape(g, g, ph, pw, *tail)
    x = np.moveaxis(x, 1, 2)
    return x.reshape(g * ph, g * pw, *tail)


def partition(image, g):
    """Split an image into N = g*g equal tiles, listed row-major.

    Dimensions must divide exactly; no padding is performed.
    """
    image = np.asarray(image)
    _check_divisible(image.shape, g)
    return list(_to_patches(image, g))


def apply_permutation(image, perm):
    """Reassemble an image with patch i relocated to position mapping[i]."""
    image = np.asarray(image)
    if perm.g is None:
        raise DomainError("permutation has no grid granularity; cannot be applied")
    _check_divisible(image.shape, perm.g)
    src = _to_patches(image, perm.g)
    dst = np.empty_like(src)
    dst[perm.mapping] = src
    return _from_patches(dst, perm.g)


def invert(perm):
    """Permutation undoing `perm`: apply(invert(p), apply(p, I)) == I."""
    inverse = np.empty_like(perm.mapping)
    inverse[perm.mapping] = np.arange(perm.n_patches, dtype=np.int64)
    return GridPermutation(perm.g, inverse)


def random_shuffle(rng, image, granularities):
    """Shuffle an image with a random granularity and patch permutation.

    Parameters
    ----------
    rng : numpy.random.Generator
        Source of randomness; the draw order (granularity, then
        permutation) is part of the determinism contract.
    image : ndarray
        HxW or HxWxC pixel buffer; H and W must divide every granularity.
    granularities : iterable of int
        Candidate patch counts per side; one is drawn uniformly.

    Returns
    -------
    (ndarray, GridPermutation)
        The shuffled image and the permutation that produced it.
    """
    image = np.asarray(image)
    choices = sorted(set(int(g) for g in granularities))
    if not choices:
        raise DomainError("granularity set is empty")
    for g in choices:
        _check_divisible(image.shape, g)
    g = choices[int(rng.integers(len(choices)))]
    perm = GridPermutation(g, rng.permutation(g * g))
    return apply_permutation(image, perm), perm
