import { mkdtempSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";

import { describe, expect, it } from "vitest";

import { ConfigError, DEFAULT_CONFIG, loadConfig, parseConfig } from "../src/types.js";

describe("config", () => {
  it("defaults when no file is given", () => {
    const cfg = loadConfig(undefined);
    expect(cfg).toEqual(DEFAULT_CONFIG);
    expect(cfg.scoreThreshold).toBe(0.3);
    expect(cfg.binarization).toBe(0.5);
    expect(cfg.maxInstances).toBe(100);
  });

  it("file values override defaults field by field", () => {
    const dir = mkdtempSync(join(tmpdir(), "adapter-cfg-"));
    const path = join(dir, "cfg.json");
    writeFileSync(path, JSON.stringify({ score_threshold: 0.5, max_instances: 10 }));
    const cfg = loadConfig(path);
    expect(cfg.scoreThreshold).toBe(0.5);
    expect(cfg.maxInstances).toBe(10);
    expect(cfg.binarization).toBe(0.5);
    expect(cfg.runtime).toBe("components");
  });

  it("rejects unknown fields", () => {
    expect(() => parseConfig({ score_treshold: 0.4 })).toThrow(ConfigError);
  });

  it("rejects out-of-range values", () => {
    expect(() => parseConfig({ binarization: 1.5 })).toThrow(ConfigError);
    expect(() => parseConfig({ score_threshold: -0.1 })).toThrow(ConfigError);
    expect(() => parseConfig({ max_instances: 0 })).toThrow(ConfigError);
    expect(() => parseConfig({ max_instances: 2.5 })).toThrow(ConfigError);
  });

  it("rejects non-object roots and unreadable files", () => {
    expect(() => parseConfig([1, 2])).toThrow(ConfigError);
    expect(() => loadConfig("/nonexistent/cfg.json")).toThrow(ConfigError);
  });
});
