import { domainError } from "./errors.js";
import { checkImage, type BoundImage } from "./image.js";

/** Bijective patch relocation: patch i lands at mapping[i]. N = g*g. */
export interface GridPermutation {
  g: number;
  mapping: Int32Array;
}

export function checkPermutation(perm: GridPermutation): void {
  const { g, mapping } = perm;
  if (!Number.isInteger(g) || g < 1) {
    throw domainError(`granularity must be >= 1, got ${g}`);
  }
  const n = g * g;
  if (mapping.length !== n) {
    throw domainError(`mapping length ${mapping.length} does not match granularity ${g}`);
  }
  const seen = new Uint8Array(n);
  for (const dest of mapping) {
    if (dest < 0 || dest >= n || seen[dest]) {
      throw domainError("mapping is not a bijection on {0..N-1}");
    }
    seen[dest] = 1;
  }
}

function checkDivisible(image: BoundImage, g: number): void {
  if (image.height % g !== 0 || image.width % g !== 0) {
    throw domainError(
      `image of ${image.height}x${image.width} is not divisible into ${g}x${g} tiles`,
    );
  }
}

/** Reassemble an image with patch i relocated to position mapping[i]. */
export function applyPermutation(image: BoundImage, perm: GridPermutation): BoundImage {
  checkImage(image);
  checkPermutation(perm);
  checkDivisible(image, perm.g);
  const { g, mapping } = perm;
  const { height, width, data } = image;
  const ph = height / g;
  const pw = width / g;
  const out = new Uint8Array(data.length);
  const rowBytes = width * 3;
  const patchRowBytes = pw * 3;
  for (let src = 0; src < mapping.length; src++) {
    const dst = mapping[src];
    const srcRow = Math.floor(src / g) * ph;
    const srcCol = (src % g) * pw;
    const dstRow = Math.floor(dst / g) * ph;
    const dstCol = (dst % g) * pw;
    for (let r = 0; r < ph; r++) {
      const from = (srcRow + r) * rowBytes + srcCol * 3;
      const to = (dstRow + r) * rowBytes + dstCol * 3;
      out.set(data.subarray(from, from + patchRowBytes), to);
    }
  }
  return { data: out, height, width };
}

/** Permutation undoing `perm`. */
export function invertPermutation(perm: GridPermutation): GridPermutation {
  checkPermutation(perm);
  const inverse = new Int32Array(perm.mapping.length);
  perm.mapping.forEach((dest, src) => {
    inverse[dest] = src;
  });
  return { g: perm.g, mapping: inverse };
}

/**
 * Shuffle with a random granularity and permutation drawn from the
 * host-provided stream (`rand` returns doubles in [0, 1)).  For bit-exact
 * replay of upstream runs, apply a recorded permutation instead.
 */
export function randomShuffle(
  image: BoundImage,
  granularities: readonly number[],
  rand: () => number,
): { image: BoundImage; permutation: GridPermutation } {
  checkImage(image);
  const choices = [...new Set(granularities)].sort((a, b) => a - b);
  if (choices.length === 0) {
    throw domainError("granularity set is empty");
  }
  for (const g of choices) {
    checkDivisible(image, g);
  }
  const g = choices[Math.floor(rand() * choices.length)];
  const n = g * g;
  const mapping = new Int32Array(n);
  for (let i = 0; i < n; i++) mapping[i] = i;
  for (let i = n - 1; i > 0; i--) {
    const j = Math.floor(rand() * (i + 1));
    const tmp = mapping[i];
    mapping[i] = mapping[j];
    mapping[j] = tmp;
  }
  const permutation = { g, mapping };
  return { image: applyPermutation(image, permutation), permutation };
}
