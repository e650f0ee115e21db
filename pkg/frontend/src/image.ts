import { domainError } from "./errors.js";

/** Contiguous row-major HxWx3 8-bit image view. */
export interface BoundImage {
  data: Uint8Array;
  height: number;
  width: number;
}

export function checkImage(image: BoundImage, name = "image"): void {
  const { data, height, width } = image;
  if (!(data instanceof Uint8Array)) {
    throw domainError(`${name} data must be a Uint8Array`);
  }
  if (!Number.isInteger(height) || !Number.isInteger(width) || height < 1 || width < 1) {
    throw domainError(`${name} has invalid dimensions ${height}x${width}`);
  }
  if (data.length !== height * width * 3) {
    throw domainError(
      `${name} buffer length ${data.length} does not match ${height}x${width}x3`,
    );
  }
}

export function sameShape(a: BoundImage, b: BoundImage): void {
  if (a.height !== b.height || a.width !== b.width) {
    throw domainError(
      `shape mismatch: ${a.height}x${a.width} vs ${b.height}x${b.width}`,
    );
  }
}

export function cloneImage(image: BoundImage): BoundImage {
  return { data: new Uint8Array(image.data), height: image.height, width: image.width };
}
