import { describe, expect, it } from "vitest";

import {
  BindingError,
  boundClockmix,
  clockmixPair,
  mixLabelHard,
  splitmix64Stream,
  type BoundImage,
} from "../src/index.js";

function flat(side: number, value: number): BoundImage {
  return { data: new Uint8Array(side * side * 3).fill(value), height: side, width: side };
}

function randomImage(side: number, rand: () => number): BoundImage {
  const data = new Uint8Array(side * side * 3);
  for (let k = 0; k < data.length; k++) data[k] = Math.floor(rand() * 256);
  return { data, height: side, width: side };
}

describe("clockmix bindings", () => {
  it("hard-labels any fake source as fake", () => {
    const { label } = boundClockmix([flat(16, 10), flat(16, 20)], [0, 1], {
      angles: [120],
      base: 30,
    });
    expect(label).toBe(1);
    expect(mixLabelHard([0, 0])).toBe(0);
  });

  it("leaves a single image with empty angles unchanged", () => {
    const rand = splitmix64Stream(7n);
    const img = randomImage(16, rand);
    const { image, label } = boundClockmix([img], [1], { angles: [], base: 45 });
    expect(Buffer.from(image.data).equals(Buffer.from(img.data))).toBe(true);
    expect(label).toBe(1);
  });

  it("copies every pixel from exactly one source", () => {
    const rand = splitmix64Stream(8n);
    for (let trial = 0; trial < 25; trial++) {
      const rho = 1 + rand() * 358;
      const base = rand() * 360;
      const out = clockmixPair(flat(16, 10), flat(16, 200), rho, base);
      for (const value of out.data) {
        expect(value === 10 || value === 200).toBe(true);
      }
    }
  });

  it("covers a quadrant for a 90-degree sweep", () => {
    const out = clockmixPair(flat(101, 0), flat(101, 255), 90, 0, { x: 50, y: 50 });
    let swept = 0;
    for (let k = 0; k < out.data.length; k += 3) swept += out.data[k] === 255 ? 1 : 0;
    const fraction = swept / (101 * 101);
    expect(fraction).toBeGreaterThan(0.24);
    expect(fraction).toBeLessThan(0.26);
  });

  it("samples missing angles deterministically from the seed", () => {
    const images = [flat(16, 10), flat(16, 20), flat(16, 30)];
    const a = boundClockmix(images, [0, 0, 0], { seed: 11n });
    const b = boundClockmix(images, [0, 0, 0], { seed: 11n });
    expect(Buffer.from(a.image.data).equals(Buffer.from(b.image.data))).toBe(true);
    const c = boundClockmix(images, [0, 0, 0], { seed: 12n });
    expect(Buffer.from(a.image.data).equals(Buffer.from(c.image.data))).toBe(false);
  });

  it("raises a domain-category error on shape mismatch", () => {
    try {
      clockmixPair(flat(16, 1), flat(8, 1), 90, 0);
      expect.unreachable();
    } catch (error) {
      expect(error).toBeInstanceOf(BindingError);
      expect((error as BindingError).category).toBe("domain");
      expect((error as Error).message).toMatch(/^domain:/);
    }
  });

  it("caps mixes at four sources", () => {
    const images = Array.from({ length: 5 }, (_, k) => flat(8, k));
    expect(() =>
      boundClockmix(images, [0, 0, 0, 0, 0], { angles: [300, 250, 200, 150], base: 0 }),
    ).toThrow(/1 to 4 sources/);
  });

  it("rejects non-descending angle lists", () => {
    expect(() =>
      boundClockmix([flat(8, 1), flat(8, 2), flat(8, 3)], [0, 0, 0], {
        angles: [100, 200],
        base: 0,
      }),
    ).toThrow(/strictly decrease/);
  });
});
