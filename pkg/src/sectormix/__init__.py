"""Deterministic sector-mix augmentation and spatial-consistency toolkit."""

from .advscm import (
    AdvStepReport,
    ReferenceExtractor,
    ReferenceScorer,
    ReinforceAccumulator,
    advscm_round,
    feature_distance,
    make_contrast_images,
    make_toy_images,
    reinforce_update,
    run_adv_demo,
    selection_probability,
)
from .assignment import (
    as_score_matrix,
    assignment_score,
    brute_force_assign,
    hungarian_assign,
    matrix_from_permutation,
    permutation_from_matrix,
)
from .clockmix import (
    LabeledImage,
    MixRecipe,
    clockmix_n,
    clockmix_pair,
    mix_label_hard,
    mix_label_soft,
    sample_recipe,
)
from .errors import ConfigError, DataError, DomainError, InputOutputError, SectorMixError
from .geometry import (
    FaceCenter,
    angle_matrix,
    compute_angle_matrix,
    default_center,
    rebase_angles,
    sector_mask,
)
from .objectives import Prediction, batch_mean, bce_loss
from .pipeline import (
    AugConfig,
    AugmentedSample,
    ManifestRecord,
    augment_batch,
    derive_stream,
    emit_outputs,
    load_image,
    load_manifest,
    replay_recipe,
    run_augment,
    write_synthetic_dataset,
)
from .shuffle import (
    GridPermutation,
    apply_permutation,
    identity_permutation,
    invert,
    partition,
    random_shuffle,
)

__version__ = "0.1.0"

__all__ = [
    "AdvStepReport",
    "AugConfig",
    "AugmentedSample",
    "ConfigError",
    "DataError",
    "DomainError",
    "FaceCenter",
    "GridPermutation",
    "InputOutputError",
    "LabeledImage",
    "ManifestRecord",
    "MixRecipe",
    "Prediction",
    "ReferenceExtractor",
    "ReferenceScorer",
    "ReinforceAccumulator",
    "SectorMixError",
    "advscm_round",
    "angle_matrix",
    "apply_permutation",
    "as_score_matrix",
    "assignment_score",
    "augment_batch",
    "batch_mean",
    "bce_loss",
    "brute_force_assign",
    "clockmix_n",
    "clockmix_pair",
    "compute_angle_matrix",
    "default_center",
    "derive_stream",
    "emit_outputs",
    "feature_distance",
    "hungarian_assign",
    "identity_permutation",
    "invert",
    "load_image",
    "load_manifest",
    "make_contrast_images",
    "make_toy_images",
    "matrix_from_permutation",
    "mix_label_hard",
    "mix_label_soft",
    "partition",
    "permutation_from_matrix",
    "random_shuffle",
    "rebase_angles",
    "reinforce_update",
    "replay_recipe",
    "run_adv_demo",
    "run_augment",
    "sample_recipe",
    "sector_mask",
    "selection_probability",
    "write_synthetic_dataset",
]
