import { readdirSync, renameSync, writeFileSync } from "fs";
import { basename, join } from "path";

import { readPng } from "./png.js";
import { encodeRle } from "./rle.js";
import { resolveRuntime } from "./runtime.js";
import type { AdapterConfig, RgbImage, SegmentationRuntime } from "./types.js";

export interface MaskEntry {
  confidence: number;
  rle: number[];
}

export interface MaskBundle {
  image: string;
  width: number;
  height: number;
  masks: MaskEntry[];
}

function round4(x: number): number {
  return Math.round(x * 1e4) / 1e4;
}

/** Threshold, binarize, cap, and package runtime output for one image. */
export function predictImage(
  image: RgbImage,
  imageRef: string,
  config: AdapterConfig,
  runtime: SegmentationRuntime,
): MaskBundle {
  const raw = runtime.predict(image, config);
  const kept = raw
    .map((p, i) => ({ ...p, i }))
    .filter((p) => p.score >= config.scoreThreshold)
    .sort((a, b) => b.score - a.score || a.i - b.i)
    .slice(0, config.maxInstances);
  const masks: MaskEntry[] = kept.map((p) => {
    const bits = new Uint8Array(p.probs.length);
    for (let j = 0; j < p.probs.length; j++) {
      if (p.probs[j] >= config.binarization) bits[j] = 1;
    }
    return {
      confidence: round4(Math.min(1, Math.max(0, p.score))),
      rle: encodeRle(bits, image.width, image.height),
    };
  });
  return { image: imageRef, width: image.width, height: image.height, masks };
}

/** Canonical JSON: keys sorted, compact separators, trailing newline —
 *  matching the convention of the bundles the scorer pipeline emits. */
export function serializeBundle(bundle: MaskBundle): string {
  const canonical = (value: unknown): unknown => {
    if (Array.isArray(value)) return value.map(canonical);
    if (typeof value === "object" && value !== null) {
      const out: Record<string, unknown> = {};
      for (const key of Object.keys(value).sort()) {
        out[key] = canonical((value as Record<string, unknown>)[key]);
      }
      return out;
    }
    return value;
  };
  return JSON.stringify(canonical(bundle)) + "\n";
}

function atomicWrite(path: string, text: string): void {
  const tmp = join(
    path.slice(0, path.length - basename(path).length),
    `.${basename(path)}.tmp`,
  );
  writeFileSync(tmp, text);
  renameSync(tmp, path);
}

export interface BatchResult {
  written: string[];
  errors: { image: string; message: string }[];
}

/** Run the configured runtime over every PNG in a directory, writing one
 *  `{stem}.masks.json` bundle per image.  Failures are recorded per image
 *  rather than aborting the batch. */
export function predictDirectory(
  imagesDir: string,
  outDir: string,
  config: AdapterConfig,
): BatchResult {
  const runtime = resolveRuntime(config.runtime);
  const names = readdirSync(imagesDir)
    .filter((n) => n.toLowerCase().endsWith(".png"))
    .sort();
  const result: BatchResult = { written: [], errors: [] };
  for (const name of names) {
    try {
      const image = readPng(join(imagesDir, name));
      const bundle = predictImage(image, name, config, runtime);
      const outPath = join(outDir, `${name.replace(/\.png$/i, "")}.masks.json`);
      atomicWrite(outPath, serializeBundle(bundle));
      result.written.push(outPath);
    } catch (e) {
      result.errors.push({ image: name, message: (e as Error).message });
    }
  }
  return result;
}
