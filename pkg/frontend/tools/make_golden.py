#!/usr/bin/env python3
"""Generate the golden parity corpus from the primary library.

Writes a JSON file of 50 cases with explicit inputs and expected outputs
(raw pixel buffers base64-encoded, row-major HxWx3). Two clockmix cases are
captured through an actual CLI augment run and its recorded recipes, so the
bindings are checked against the production replay path, not only the API.

Usage: python3 tools/make_golden.py golden/corpus.json
"""

import base64
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np
from PIL import Image

from sectormix import (
    LabeledImage,
    MixRecipe,
    clockmix_n,
    hungarian_assign,
    invert,
    load_image,
    load_manifest,
    mix_label_hard,
    mix_label_soft,
    permutation_from_matrix,
    random_shuffle,
    sample_recipe,
    write_synthetic_dataset,
)
from sectormix.geometry import FaceCenter, default_center
from sectormix.pipeline import AugConfig
from sectormix.shuffle import GridPermutation, apply_permutation


def b64(pixels):
    return base64.b64encode(np.ascontiguousarray(pixels, dtype=np.uint8).tobytes()).decode()


def clockmix_cases(rng, count):
    cases = []
    cfg = AugConfig(image_size=24)
    for k in range(count):
        n = 1 + k % 4
        side = 16 if k % 2 else 24
        center = default_center(side, side)
        if k % 5 == 0 and side == 24:
            center = FaceCenter(float(rng.uniform(2, side - 3)), float(rng.uniform(2, side - 3)))
        recipe = sample_recipe(rng, n, cfg, source_ids=tuple(range(n)), center=center)
        images = [
            LabeledImage(rng.integers(0, 256, (side, side, 3), dtype=np.uint8), int(rng.integers(0, 2)))
            for _ in range(n)
        ]
        mixed = clockmix_n(images, recipe)
        cases.append(
            {
                "op": "clockmix",
                "id": f"clockmix-{k:02d}",
                "height": side,
                "width": side,
                "images_b64": [b64(img.pixels) for img in images],
                "labels": [img.label for img in images],
                "angles": list(recipe.sweep_angles),
                "base": recipe.rho_base,
                "center": [recipe.center[0], recipe.center[1]],
                "expect_b64": b64(mixed.pixels),
                "expect_label": mixed.label,
            }
        )
    return cases


def cli_replay_cases(rng, count):
    """Capture recipes and outputs from a real CLI augment run."""
    cases = []
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        manifest = write_synthetic_dataset(tmp / "data", count=8, size=48, seed=904)
        out = tmp / "out"
        subprocess.run(
            [sys.executable, "-m", "sectormix.cli", "augment",
             "--manifest", str(manifest), "--out", str(out),
             "--seed", "904", "--size", "48", "--p-mix", "1"],
            check=True, capture_output=True,
        )
        records = {r.id: r for r in load_manifest(manifest)}
        rows = [json.loads(line) for line in (out / "manifest.jsonl").read_text().splitlines()]
        picked = [row for row in rows if row["recipe"] and len(row["recipe"]["sources"]) >= 2]
        for k, row in enumerate(picked[:count]):
            recipe = row["recipe"]
            sources = [load_image(records[sid].path, 48) for sid in recipe["sources"]]
            labels = [records[sid].label for sid in recipe["sources"]]
            expect = np.asarray(Image.open(out / row["path"]), dtype=np.uint8)
            cases.append(
                {
                    "op": "clockmix",
                    "id": f"cli-replay-{k}",
                    "height": 48,
                    "width": 48,
                    "images_b64": [b64(px) for px in sources],
                    "labels": labels,
                    "angles": recipe["angles"],
                    "base": recipe["base"],
                    "center": recipe["center"],
                    "expect_b64": b64(expect),
                    "expect_label": row["label"],
                }
            )
    if len(cases) != count:
        raise RuntimeError(f"expected {count} multi-source CLI samples, got {len(cases)}")
    return cases


def hungarian_cases(rng, count):
    cases = []
    trap = [[0.9, 0.8, 0.1], [0.85, 0.1, 0.2], [0.1, 0.7, 0.3]]
    ties = [
        [[0.5, 0.5], [0.5, 0.5]],
        [[0.25, 0.25, 0.25, 0.25]] * 4,
    ]
    specials = [trap] + ties
    for k in range(count):
        if k < len(specials):
            m = np.array(specials[k], dtype=np.float64)
        else:
            n = 2 + (k - len(specials)) % 7
            m = rng.uniform(0, 1, size=(n, n))
        mapping = permutation_from_matrix(hungarian_assign(m)).mapping
        cases.append(
            {
                "op": "hungarian",
                "id": f"hungarian-{k:02d}",
                "matrix": m.tolist(),
                "expect_mapping": mapping.tolist(),
            }
        )
    return cases


def permutation_cases(rng, count):
    cases = []
    for k in range(count):
        g = (2, 4, 8)[k % 3]
        side = 16 if g != 8 else 24
        image = rng.integers(0, 256, (side, side, 3), dtype=np.uint8)
        shuffled, perm = random_shuffle(rng, image, (g,))
        cases.append(
            {
                "op": "apply_permutation",
                "id": f"perm-{k:02d}",
                "height": side,
                "width": side,
                "g": g,
                "mapping": perm.mapping.tolist(),
                "image_b64": b64(image),
                "expect_b64": b64(shuffled),
            }
        )
    return cases


def invert_cases(rng, count):
    cases = []
    for k in range(count):
        g = (2, 4)[k % 2]
        perm = GridPermutation(g, rng.permutation(g * g))
        cases.append(
            {
                "op": "invert",
                "id": f"invert-{k}",
                "g": g,
                "mapping": perm.mapping.tolist(),
                "expect_mapping": invert(perm).mapping.tolist(),
            }
        )
    return cases


def label_cases():
    hard = [((0, 0), None), ((0, 1, 0), None), ((1, 1, 1, 1), None)]
    soft = [(1, 0, 0.7), (0, 1, 0.25)]
    cases = []
    for k, (labels, _) in enumerate(hard):
        cases.append(
            {
                "op": "mix_label_hard",
                "id": f"hard-{k}",
                "labels": list(labels),
                "expect": mix_label_hard(labels),
            }
        )
    for k, (ya, yb, lam) in enumerate(soft):
        cases.append(
            {
                "op": "mix_label_soft",
                "id": f"soft-{k}",
                "y_a": ya,
                "y_b": yb,
                "lam": lam,
                "expect": mix_label_soft(ya, yb, lam),
            }
        )
    return cases


def main(out_path):
    rng = np.random.default_rng(20240904)
    cases = []
    cases += clockmix_cases(rng, 18)
    cases += cli_replay_cases(rng, 2)
    cases += hungarian_cases(rng, 15)
    cases += permutation_cases(rng, 8)
    cases += invert_cases(rng, 2)
    cases += label_cases()
    assert len(cases) == 50, len(cases)
    corpus = {"version": 1, "seed": 20240904, "cases": cases}
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(json.dumps(corpus) + "\n")
    print(f"wrote {len(cases)} cases to {out_path}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "golden/corpus.json")
