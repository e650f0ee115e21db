"""Manifest-driven batch augmentation with per-sample determinism.

Every sample owns a random stream derived from (global seed, sample id), so
results never depend on processing order or worker count.  Outputs are
written losslessly (PNG) together with a JSONL manifest carrying enough
provenance (source ids, sweep angles, base, center) to re-derive every
emitted image bit for bit.
"""

import hashlib
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np
from PIL import Image

from .clockmix import LabeledImage, MixRecipe, clockmix_n, sample_recipe
from .errors import ConfigError, DataError, DomainError, InputOutputError
from .geometry import FaceCenter, default_center
from .shuffle import random_shuffle

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

log = logging.getLogger("sectormix")

_MIX_COUNTS = (1, 2, 3, 4)


@dataclass(frozen=True)
class ManifestRecord:
    """One input image: unique id, file path, label, optional face center."""

    id: str
    path: str
    label: int
    center: FaceCenter | None = None


@dataclass(frozen=True)
class AugConfig:
    """Run parameters; every field can come from TOML or CLI flags."""

    seed: int = 0
    mix_count_set: tuple = _MIX_COUNTS
    angle_range: tuple = (45.0, 315.0)
    min_sector: float = 30.0
    p_mix: float = 0.5
    label_mode: str = "hard"
    granularities: tuple = (2, 4, 8)
    epsilon: float = 0.0002
    batch_size: int = 32
    output_dir: str = "out"
    image_size: int = 256
    sample_retry: int = 100
    attach_views: bool = False
    threads: int = 1

    def __post_init__(self):
        object.__setattr__(self, "mix_count_set", tuple(sorted(set(self.mix_count_set))))
        object.__setattr__(self, "granularities", tuple(sorted(set(self.granularities))))
        object.__setattr__(self, "angle_range", tuple(self.angle_range))
        self.validate()

    def validate(self):
        lo, hi = self.angle_range
        if not (0.0 < lo < hi < 360.0):
            raise ConfigError(f"angle_range must satisfy 0 < lo < hi < 360, got {self.angle_range}")
        if not self.mix_count_set or any(n not in _MIX_COUNTS for n in self.mix_count_set):
            raise ConfigError(f"mix_count_set must be a nonempty subset of {{1,2,3,4}}, got {self.mix_count_set}")
        if not (0.0 <= self.p_mix <= 1.0):
            raise ConfigError(f"p_mix must lie in [0, 1], got {self.p_mix}")
        if self.label_mode not in ("hard", "soft"):
            raise ConfigError(f"label_mode must be 'hard' or 'soft', got {self.label_mode!r}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.image_size < 1:
            raise ConfigError(f"image_size must be >= 1, got {self.image_size}")
        if self.epsilon <= 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.min_sector < 0:
            raise ConfigError(f"min_sector must be >= 0, got {self.min_sector}")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        if not (-(2**63) <= int(self.seed) < 2**64):
            raise ConfigError(f"seed must fit in 64 bits, got {self.seed}")
        for g in self.granularities:
            if g < 1:
                raise ConfigError(f"granularities must be >= 1, got {self.granularities}")
            if self.attach_views and self.image_size % g:
                raise ConfigError(
                    f"image_size {self.image_size} not divisible by granularity {g}"
                )


def config_from_file(path):
    """Load an AugConfig from a TOML file of flat keys."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise InputOutputError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"bad TOML in {path}: {exc}") from exc
    known = {f.name for f in fields(AugConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys in {path}: {sorted(unknown)}")
    return AugConfig(**data)


@dataclass(frozen=True)
class AugmentedSample:
    """One output slot: mixed (or passed-through) pixels plus provenance."""

    id: str
    pixels: np.ndarray = field(repr=False)
    label: float
    source_ids: tuple
    recipe: MixRecipe | None
    views: dict | None = None


def load_manifest(path):
    """Parse a JSONL manifest into validated records.

    Each line holds {"id": str, "path": str, "label": 0|1, "center": [x, y]?}.
    Malformed lines and duplicate ids are rejected with the line number.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise InputOutputError(f"manifest not found: {path}") from exc
    except OSError as exc:
        raise InputOutputError(f"cannot read manifest {path}: {exc}") from exc
    records = []
    seen = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
        if not isinstance(obj, dict):
            raise DataError(f"{path}:{lineno}: record must be a JSON object")
        try:
            rec_id = obj["id"]
            rec_path = obj["path"]
            label = obj["label"]
        except KeyError as exc:
            raise DataError(f"{path}:{lineno}: missing field {exc}") from exc
        if not isinstance(rec_id, str) or not rec_id:
            raise DataError(f"{path}:{lineno}: id must be a nonempty string")
        if isinstance(label, bool) or label not in (0, 1):
            raise DataError(f"{path}:{lineno}: label must be 0 or 1, got {label!r}")
        center = None
        if obj.get("center") is not None:
            raw = obj["center"]
            if not (
                isinstance(raw, list)
                and len(raw) == 2
                and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw)
            ):
                raise DataError(f"{path}:{lineno}: center must be [x, y] numbers")
            center = FaceCenter(float(raw[0]), float(raw[1]))
        if rec_id in seen:
            raise DataError(f"{path}:{lineno}: duplicate id {rec_id!r}")
        seen.add(rec_id)
        records.append(ManifestRecord(rec_id, str(rec_path), int(label), center))
    return records


def derive_stream(seed, sample_id):
    """Per-sample random stream from a stable 64-bit hash of (seed, id).

    Independent of processing order and worker count: the stream depends
    only on the two inputs.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(int(seed).to_bytes(8, "little", signed=False) if seed >= 0
             else int(seed).to_bytes(8, "little", signed=True))
    h.update(b"\x1f")
    h.update(str(sample_id).encode("utf-8"))
    value = int.from_bytes(h.digest(), "little")
    return np.random.Generator(np.random.PCG64(value))


def load_image(path, image_size):
    """Read an image file, convert to RGB, and resize (bilinear) to a square."""
    try:
        with Image.open(path) as img:
            img = img.convert("RGB")
            if img.size != (image_size, image_size):
                img = img.resize((image_size, image_size), Image.BILINEAR)
            return np.asarray(img, dtype=np.uint8)
    except FileNotFoundError as exc:
        raise InputOutputError(f"image not found: {path}") from exc
    except OSError as exc:
        raise DataError(f"unreadable image {path}: {exc}") from exc


def _soft_label(recipe, labels):
    """Area-weighted label: iterated pairwise interpolation with the arc
    fraction as lambda, which collapses to sum(fraction_k * y_k)."""
    fractions = recipe.area_fractions()
    return float(sum(f * y for f, y in zip(fractions, labels)))


def _augment_one(index, record, pixels, pool, config):
    rng = derive_stream(config.seed, record.id)
    mix_draw = rng.random()
    n = int(config.mix_count_set[rng.integers(len(config.mix_count_set))])
    center = record.center or default_center(config.image_size, config.image_size)
    if mix_draw >= config.p_mix or n == 1 or len(pool) == 1:
        recipe = None
        if mix_draw < config.p_mix:
            # n == 1 mixes: an explicit single-source recipe, image unchanged
            recipe = sample_recipe(rng, 1, config, source_ids=(record.id,), center=center)
        sample_label = float(record.label) if config.label_mode == "soft" else record.label
        views = _draw_views(rng, pixels, config)
        return AugmentedSample(record.id, pixels, sample_label, (record.id,), recipe, views)
    n = min(n, len(pool))
    others = [k for k in range(len(pool)) if k != index]
    partners = rng.choice(np.asarray(others), size=n - 1, replace=False)
    sources = [(record, pixels)] + [pool[int(k)] for k in partners]
    ids = tuple(rec.id for rec, _ in sources)
    recipe = sample_recipe(rng, n, config, source_ids=ids, center=center)
    mixed = clockmix_n([LabeledImage(px, rec.label) for rec, px in sources], recipe)
    if config.label_mode == "soft":
        label = _soft_label(recipe, [rec.label for rec, _ in sources])
    else:
        label = mixed.label
    views = _draw_views(rng, mixed.pixels, config)
    return AugmentedSample(record.id, mixed.pixels, label, ids, recipe, views)


def _draw_views(rng, pixels, config):
    """Optional pair of randomly shuffled views of the augmented sample."""
    if not config.attach_views:
        return None
    s1, perm1 = random_shuffle(rng, pixels, config.granularities)
    s2, perm2 = random_shuffle(rng, pixels, config.granularities)
    return {
        "s1": s1,
        "s2": s2,
        "g1": perm1.g,
        "mapping1": perm1.mapping.tolist(),
        "g2": perm2.g,
        "mapping2": perm2.mapping.tolist(),
    }


def augment_batch(records, config, threads=None):
    """Augment one batch of records into output samples.

    Each output slot mixes its record with partners drawn uniformly (without
    replacement) from the same batch with probability p_mix, or passes the
    resized image through.  Unreadable images are skipped with a warning;
    the batch fails only if nothing is readable.
    """
    records = list(records)
    threads = threads or config.threads
    if not records:
        return []

    def try_load(rec):
        try:
            return load_image(rec.path, config.image_size)
        except (DataError, InputOutputError) as exc:
            log.warning("skipping %s: %s", rec.id, exc)
            return None

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            loaded = list(ex.map(try_load, records))
    else:
        loaded = [try_load(rec) for rec in records]
    pool = [(rec, px) for rec, px in zip(records, loaded) if px is not None]
    if not pool:
        raise DataError("no readable images in batch")

    def work(item):
        idx, (rec, px) = item
        return _augment_one(idx, rec, px, pool, config)

    items = list(enumerate(pool))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(work, items))
    return [work(item) for item in items]


def safe_name(sample_id):
    return "".join(c if c.isalnum() or c in "-_." else "-" for c in sample_id)


def _recipe_payload(recipe):
    return {
        "angles": list(recipe.sweep_angles),
        "base": recipe.rho_base,
        "sources": list(recipe.source_ids),
        "center": [recipe.center[0], recipe.center[1]],
    }


def emit_outputs(samples, config, start_index=0):
    """Write samples as PNGs plus a JSONL manifest; returns the manifest path.

    Output bytes are a pure function of (seed, config, inputs): PNGs are
    lossless and the manifest carries no timestamps.
    """
    out_dir = Path(config.output_dir)
    images_dir = out_dir / "images"
    try:
        images_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputOutputError(f"cannot create output dir {images_dir}: {exc}") from exc
    manifest_path = out_dir / "manifest.jsonl"
    mode = "a" if start_index else "w"
    try:
        with open(manifest_path, mode, encoding="utf-8", newline="\n") as fh:
            for offset, sample in enumerate(samples):
                idx = start_index + offset
                rel = f"images/{idx:05d}_{safe_name(sample.id)}.png"
                Image.fromarray(sample.pixels).save(out_dir / rel, format="PNG")
                row = {
                    "id": sample.id,
                    "path": rel,
                    "label": sample.label,
                    "provenance": list(sample.source_ids),
                    "recipe": _recipe_payload(sample.recipe) if sample.recipe else None,
                }
                if sample.views is not None:
                    row["views"] = _emit_views(sample, images_dir, idx)
                fh.write(json.dumps(row) + "\n")
    except OSError as exc:
        raise InputOutputError(f"cannot write outputs under {out_dir}: {exc}") from exc
    return manifest_path


def _emit_views(sample, images_dir, idx):
    payload = {}
    for key in ("s1", "s2"):
        rel = f"images/{idx:05d}_{safe_name(sample.id)}.{key}.png"
        Image.fromarray(sample.views[key]).save(images_dir.parent / rel, format="PNG")
        payload[key] = rel
    payload["g1"] = sample.views["g1"]
    payload["mapping1"] = sample.views["mapping1"]
    payload["g2"] = sample.views["g2"]
    payload["mapping2"] = sample.views["mapping2"]
    return payload


def replay_recipe(payload, sources_by_id, image_size):
    """Re-execute a recorded recipe against its source images.

    `sources_by_id` maps source id to a ManifestRecord-like with a path and
    label; images are re-prepared exactly as during augmentation, so the
    result is bit-identical to the emitted sample.
    """
    center = FaceCenter(*payload["center"])
    recipe = MixRecipe(tuple(payload["sources"]), tuple(payload["angles"]), payload["base"], center)
    images = []
    for sid in payload["sources"]:
        rec = sources_by_id[sid]
        images.append(LabeledImage(load_image(rec.path, image_size), rec.label))
    return clockmix_n(images, recipe)


def run_augment(records, config):
    """Drive augment_batch over K-sized batches and emit all outputs.

    Returns (manifest_path, summary dict).
    """
    written = 0
    label_counts = {}
    manifest_path = None
    for start in range(0, len(records), config.batch_size):
        batch = records[start : start + config.batch_size]
        samples = augment_batch(batch, config)
        manifest_path = emit_outputs(samples, config, start_index=written)
        for s in samples:
            key = str(s.label)
            label_counts[key] = label_counts.get(key, 0) + 1
        written += len(samples)
    if manifest_path is None:
        manifest_path = emit_outputs([], config)
    summary = {"inputs": len(records), "written": written, "labels": label_counts}
    return manifest_path, summary


def write_synthetic_dataset(directory, count, size, seed, fake_fraction=0.5):
    """Create a toy dataset (PNGs + manifest.jsonl) for demos and tests."""
    from .advscm import make_toy_images

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    images = make_toy_images(rng, count, size)
    manifest = directory / "manifest.jsonl"
    with open(manifest, "w", encoding="utf-8", newline="\n") as fh:
        for i, px in enumerate(images):
            name = f"img{i:04d}.png"
            Image.fromarray(px).save(directory / name, format="PNG")
            label = 1 if rng.random() < fake_fraction else 0
            row = {"id": f"sample-{i:04d}", "path": str(directory / name), "label": label}
            fh.write(json.dumps(row) + "\n")
    return manifest
