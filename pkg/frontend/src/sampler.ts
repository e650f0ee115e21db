/**
 * Small deterministic stream for in-package sampling (splitmix64).
 * Produces doubles in [0, 1) from the top 53 bits of each state step.
 */
const GOLDEN = 0x9e3779b97f4a7c15n;
const MASK64 = (1n << 64n) - 1n;

export function splitmix64Stream(seed: number | bigint): () => number {
  let state = BigInt(seed) & MASK64;
  return () => {
    state = (state + GOLDEN) & MASK64;
    let z = state;
    z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK64;
    z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & MASK64;
    z = z ^ (z >> 31n);
    return Number(z >> 11n) / 2 ** 53;
  };
}
