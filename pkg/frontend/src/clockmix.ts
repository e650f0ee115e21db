import { domainError } from "./errors.js";
import { angleField, defaultCenter, sectorMask, type FaceCenter } from "./geometry.js";
import { checkImage, sameShape, type BoundImage } from "./image.js";
import { splitmix64Stream } from "./sampler.js";

export type HardLabel = 0 | 1;

/** Fake iff any source is fake: 1 - prod(1 - y), i.e. boolean OR. */
export function mixLabelHard(labels: readonly number[]): HardLabel {
  if (labels.length === 0) {
    throw domainError("label list is empty");
  }
  for (const y of labels) {
    if (y !== 0 && y !== 1) {
      throw domainError(`hard labels must be 0 or 1, got ${y}`);
    }
  }
  return labels.some((y) => y === 1) ? 1 : 0;
}

/** Linear label interpolation lam * ya + (1 - lam) * yb. */
export function mixLabelSoft(ya: number, yb: number, lam: number): number {
  if (!(lam >= 0 && lam <= 1)) {
    throw domainError(`lambda must lie in [0, 1], got ${lam}`);
  }
  for (const y of [ya, yb]) {
    if (Number.isNaN(y) || y < 0 || y > 1) {
      throw domainError(`labels must lie in [0, 1], got ${y}`);
    }
  }
  return lam * ya + (1 - lam) * yb;
}

/**
 * Mix two images: `b` fills the sector swept up to `rho`, `a` the rest.
 * Every output pixel is copied verbatim from exactly one input.
 */
export function clockmixPair(
  a: BoundImage,
  b: BoundImage,
  rho: number,
  rhoBase: number,
  center?: FaceCenter,
): BoundImage {
  checkImage(a, "a");
  checkImage(b, "b");
  sameShape(a, b);
  const { height, width } = a;
  const pivot = center ?? defaultCenter(height, width);
  const field = angleField(height, width, pivot);
  const mask = sectorMask(field, rhoBase, rho);
  const out = new Uint8Array(a.data.length);
  for (let k = 0; k < mask.length; k++) {
    const src = mask[k] ? b.data : a.data;
    const base = k * 3;
    out[base] = src[base];
    out[base + 1] = src[base + 1];
    out[base + 2] = src[base + 2];
  }
  return { data: out, height, width };
}

export interface MixResult {
  image: BoundImage;
  label: HardLabel;
}

/**
 * Left-fold of clockmixPair over the sources with one shared base ray.
 * Angles must be strictly decreasing so every source keeps an arc.
 */
export function clockmixN(
  images: readonly BoundImage[],
  labels: readonly number[],
  angles: readonly number[],
  rhoBase: number,
  center?: FaceCenter,
): MixResult {
  if (images.length < 1 || images.length > 4) {
    throw domainError(`mixes cover 1 to 4 sources, got ${images.length}`);
  }
  if (labels.length !== images.length) {
    throw domainError(`${images.length} images need ${images.length} labels, got ${labels.length}`);
  }
  if (angles.length !== images.length - 1) {
    throw domainError(
      `${images.length} sources need ${images.length - 1} sweep angles, got ${angles.length}`,
    );
  }
  for (const angle of angles) {
    if (!(angle > 0 && angle < 360)) {
      throw domainError(`sweep angles must lie in (0, 360), got ${angle}`);
    }
  }
  for (let k = 1; k < angles.length; k++) {
    if (angles[k] >= angles[k - 1]) {
      throw domainError(`sweep angles must strictly decrease, got ${angles.join(", ")}`);
    }
  }
  if (!(rhoBase >= 0 && rhoBase < 360)) {
    throw domainError(`rho_base must lie in [0, 360), got ${rhoBase}`);
  }
  images.forEach((img, k) => checkImage(img, `image ${k}`));
  let result = images[0];
  for (let k = 1; k < images.length; k++) {
    result = clockmixPair(result, images[k], angles[k - 1], rhoBase, center);
  }
  return { image: result, label: mixLabelHard(labels) };
}

export interface BoundClockmixOptions {
  angles?: readonly number[] | null;
  base?: number | null;
  center?: FaceCenter;
  seed?: number | bigint;
  angleRange?: readonly [number, number];
  minSector?: number;
}

/**
 * Convenience entry point: mixes the given sources, sampling any missing
 * angles/base from a seeded in-package stream (splitmix64).  Sampling
 * follows the upstream contract (uniform angles in the range, descending,
 * consecutive gaps of at least minSector with an evenly spaced fallback)
 * but not its bit stream; pass explicit angles for replay parity.
 */
export function boundClockmix(
  images: readonly BoundImage[],
  labels: readonly number[],
  options: BoundClockmixOptions = {},
): MixResult {
  const n = images.length;
  let angles = options.angles ?? null;
  let base = options.base ?? null;
  if (angles !== null && angles.length !== Math.max(0, n - 1)) {
    throw domainError(`${n} sources need ${n - 1} sweep angles, got ${angles.length}`);
  }
  if (angles === null || base === null) {
    const stream = splitmix64Stream(options.seed ?? 0);
    if (angles === null) {
      angles = sampleAngles(n, stream, options.angleRange ?? [45, 315], options.minSector ?? 30);
    }
    if (base === null) {
      base = stream() * 360;
    }
  }
  return clockmixN(images, labels, angles, base, options.center);
}

function sampleAngles(
  n: number,
  stream: () => number,
  range: readonly [number, number],
  minSector: number,
  retries = 100,
): number[] {
  if (n < 1 || n > 4) {
    throw domainError(`source count must be in {1,2,3,4}, got ${n}`);
  }
  if (n === 1) return [];
  const [lo, hi] = range;
  for (let attempt = 0; attempt < retries; attempt++) {
    const draw = Array.from({ length: n - 1 }, () => lo + stream() * (hi - lo));
    draw.sort((a, b) => b - a);
    let ok = true;
    for (let k = 1; k < draw.length; k++) {
      if (draw[k - 1] - draw[k] < minSector) {
        ok = false;
        break;
      }
    }
    if (ok) return draw;
  }
  return Array.from({ length: n - 1 }, (_, k) => (360 * (n - 1 - k)) / n);
}
