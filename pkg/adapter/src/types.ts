import { readFileSync } from "fs";

/** 8-bit RGB image, row-major, 3 bytes per pixel. */
export interface RgbImage {
  width: number;
  height: number;
  pixels: Uint8Array; // length = width * height * 3
}

/** One instance prediction from a segmentation runtime: a per-pixel
 *  probability map plus an instance score in [0, 1]. */
export interface InstancePrediction {
  score: number;
  probs: Float32Array; // length = width * height, values in [0, 1]
}

/** Pluggable inference backend.  The adapter itself only thresholds,
 *  binarizes, caps, and serializes whatever the runtime returns. */
export interface SegmentationRuntime {
  id: string;
  predict(image: RgbImage, config: AdapterConfig): InstancePrediction[];
}

export interface AdapterConfig {
  /** Instances scoring below this are discarded. */
  scoreThreshold: number;
  /** Probability maps are binarized at this level. */
  binarization: number;
  /** Hard cap on instances per image, keeping the highest-scoring. */
  maxInstances: number;
  /** Which registered runtime to use. */
  runtime: string;
  /** Chebyshev color tolerance for the reference runtime. */
  colorTol: number;
}

export const DEFAULT_CONFIG: AdapterConfig = {
  scoreThreshold: 0.3,
  binarization: 0.5,
  maxInstances: 100,
  runtime: "components",
  colorTol: 12,
};

const CONFIG_KEYS: Record<string, keyof AdapterConfig> = {
  score_threshold: "scoreThreshold",
  binarization: "binarization",
  max_instances: "maxInstances",
  runtime: "runtime",
  color_tol: "colorTol",
};

export class ConfigError extends Error {}

/** Parse a JSON config document; unknown keys and out-of-range values are
 *  rejected rather than silently ignored. */
export function parseConfig(doc: unknown): AdapterConfig {
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new ConfigError("config root must be an object");
  }
  const out: AdapterConfig = { ...DEFAULT_CONFIG };
  for (const [key, value] of Object.entries(doc)) {
    const field = CONFIG_KEYS[key];
    if (field === undefined) {
      throw new ConfigError(`unknown config field: ${key}`);
    }
    if (field === "runtime") {
      if (typeof value !== "string") throw new ConfigError("runtime must be a string");
      out.runtime = value;
    } else if (field === "maxInstances" || field === "colorTol") {
      if (!Number.isInteger(value) || (value as number) < (field === "maxInstances" ? 1 : 0)) {
        throw new ConfigError(`${key} must be a non-negative integer`);
      }
      out[field] = value as number;
    } else {
      if (typeof value !== "number" || value < 0 || value > 1) {
        throw new ConfigError(`${key} must be a number in [0, 1]`);
      }
      out[field] = value;
    }
  }
  return out;
}

export function loadConfig(path?: string): AdapterConfig {
  if (path === undefined) return { ...DEFAULT_CONFIG };
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch (e) {
    throw new ConfigError(`cannot read config file ${path}: ${(e as Error).message}`);
  }
  let doc: unknown;
  try {
    doc = JSON.parse(text);
  } catch (e) {
    throw new ConfigError(`invalid JSON in ${path}: ${(e as Error).message}`);
  }
  return parseConfig(doc);
}
