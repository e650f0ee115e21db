export { BindingError, type ErrorCategory } from "./errors.js";
export { type BoundImage, checkImage, cloneImage } from "./image.js";
export { type FaceCenter, angleField, defaultCenter, sectorMask } from "./geometry.js";
export {
  type BoundClockmixOptions,
  type HardLabel,
  type MixResult,
  boundClockmix,
  clockmixN,
  clockmixPair,
  mixLabelHard,
  mixLabelSoft,
} from "./clockmix.js";
export {
  type GridPermutation,
  applyPermutation,
  checkPermutation,
  invertPermutation,
  randomShuffle,
} from "./shuffle.js";
export { bruteForceAssign, hungarianAssign } from "./hungarian.js";
export { splitmix64Stream } from "./sampler.js";
