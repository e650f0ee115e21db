import { domainError } from "./errors.js";

/** Pivot of the sector layout, pixel coordinates (column, row). */
export interface FaceCenter {
  x: number;
  y: number;
}

export function defaultCenter(height: number, width: number): FaceCenter {
  return { x: (width - 1) / 2, y: (height - 1) / 2 };
}

const DEG = 180 / Math.PI;

/**
 * Angle of every pixel around the center, degrees in [0, 360), row-major.
 * Mirrors the reference float64 semantics: one wrap after the base shift
 * and the exact-360 rounding case mapped back to 0.
 */
export function angleField(height: number, width: number, center: FaceCenter): Float64Array {
  if (height < 1 || width < 1) {
    throw domainError(`grid must be at least 1x1, got ${height}x${width}`);
  }
  if (!(center.x >= 0 && center.x < width && center.y >= 0 && center.y < height)) {
    throw domainError(
      `center (${center.x}, ${center.y}) outside grid of width ${width}, height ${height}`,
    );
  }
  const out = new Float64Array(height * width);
  for (let i = 0; i < height; i++) {
    const dy = center.y - i;
    for (let j = 0; j < width; j++) {
      let angle = DEG * Math.atan2(dy, j - center.x);
      if (angle < 0) angle += 360;
      if (angle >= 360) angle = 0;
      out[i * width + j] = angle;
    }
  }
  return out;
}

/** Sector membership after shifting by the base ray: rebased angle <= rho. */
export function sectorMask(
  field: Float64Array,
  rhoBase: number,
  rho: number,
): Uint8Array {
  if (!(rhoBase >= 0 && rhoBase < 360)) {
    throw domainError(`rho_base must lie in [0, 360), got ${rhoBase}`);
  }
  if (!(rho > 0 && rho < 360)) {
    throw domainError(`rho must lie in (0, 360), got ${rho}`);
  }
  const mask = new Uint8Array(field.length);
  for (let k = 0; k < field.length; k++) {
    let rebased = field[k] - rhoBase;
    if (rebased < 0) rebased += 360;
    if (rebased >= 360) rebased = 0;
    mask[k] = rebased <= rho ? 1 : 0;
  }
  return mask;
}
