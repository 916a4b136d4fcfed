import { readFileSync } from "fs";
import { PNG } from "pngjs";

import type { RgbImage } from "./types.js";

/** Decode a PNG file to 8-bit RGB, dropping any alpha channel. */
export function readPng(path: string): RgbImage {
  const png = PNG.sync.read(readFileSync(path));
  const { width, height, data } = png;
  const pixels = new Uint8Array(width * height * 3);
  for (let i = 0, j = 0; i < width * height; i++, j += 4) {
    pixels[i * 3] = data[j];
    pixels[i * 3 + 1] = data[j + 1];
    pixels[i * 3 + 2] = data[j + 2];
  }
  return { width, height, pixels };
}

/** Encode an RGB image back to PNG bytes (used by tests to craft inputs). */
export function encodePng(image: RgbImage): Buffer {
  const png = new PNG({ width: image.width, height: image.height });
  for (let i = 0; i < image.width * image.height; i++) {
    png.data[i * 4] = image.pixels[i * 3];
    png.data[i * 4 + 1] = image.pixels[i * 3 + 1];
    png.data[i * 4 + 2] = image.pixels[i * 3 + 2];
    png.data[i * 4 + 3] = 255;
  }
  return PNG.sync.write(png);
}
