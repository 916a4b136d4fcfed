import { spawnSync } from "child_process";
import { mkdirSync, mkdtempSync, readFileSync, readdirSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { dirname, join } from "path";
import { fileURLToPath } from "url";

import { beforeAll, describe, expect, it } from "vitest";

import { encodePng } from "../src/png.js";
import { predictDirectory } from "../src/predict.js";
import { DEFAULT_CONFIG, type RgbImage } from "../src/types.js";

const ADAPTER_ROOT = join(dirname(fileURLToPath(import.meta.url)), "..");

function run(cmd: string, args: string[]): string {
  const res = spawnSync(cmd, args, { encoding: "utf-8" });
  expect(res.error).toBeUndefined();
  expect(res.status, `${cmd} ${args.join(" ")}\n${res.stdout}\n${res.stderr}`).toBe(0);
  return res.stdout;
}

function chartline(args: string[]): string {
  return run("python3", ["-m", "chartline", ...args]);
}

/** Generate a corpus, predict masks with the given strategy, then run the
 *  extraction + scoring pipeline; returns the mean 6a score (0-100). */
function scorePipeline(base: string, corpus: string, masksDir: string): number {
  const series = join(base, `${masksDir}-series`);
  const report = join(base, `${masksDir}-report.json`);
  chartline(["extract", "--masks", join(base, masksDir), "--out", series]);
  chartline([
    "score", "--pred", series, "--gt", corpus,
    "--mode", "6a", "--report", report,
  ]);
  return JSON.parse(readFileSync(report, "utf-8")).aggregate.mean;
}

describe("adapter integration with the scoring pipeline", () => {
  let base: string;

  beforeAll(() => {
    base = mkdtempSync(join(tmpdir(), "adapter-int-"));
  });

  it(
    "bundles for 10 synthetic charts are consumed by extract + score without error",
    () => {
      const corpus = join(base, "corpus");
      chartline(["generate", "--seed", "11", "--count", "10", "--profile", "mixed", "--out", corpus]);
      const masks = join(base, "pred");
      mkdirSync(masks, { recursive: true });
      const result = predictDirectory(corpus, masks, DEFAULT_CONFIG);
      expect(result.errors).toEqual([]);
      expect(result.written.length).toBe(10);
      for (const mode of ["6a", "6b"]) {
        const series = join(base, `series-${mode}`);
        const report = join(base, `report-${mode}.json`);
        chartline(["extract", "--masks", masks, "--out", series]);
        chartline(["score", "--pred", series, "--gt", corpus, "--mode", mode, "--report", report]);
        const doc = JSON.parse(readFileSync(report, "utf-8"));
        expect(doc.aggregate.count).toBe(10);
        expect(doc.aggregate.mean).toBeGreaterThan(0);
      }
    },
    120_000,
  );

  it(
    "beats the color baseline on the shared-color corpus (6a)",
    () => {
      const corpus = join(base, "shared");
      chartline(["generate", "--seed", "21", "--count", "12", "--profile", "easy-shared", "--out", corpus]);

      const adapterMasks = join(base, "adapter-masks");
      mkdirSync(adapterMasks, { recursive: true });
      const result = predictDirectory(corpus, adapterMasks, DEFAULT_CONFIG);
      expect(result.errors).toEqual([]);
      const adapterScore = scorePipeline(base, corpus, "adapter-masks");

      chartline(["segment", "--images", corpus, "--out", join(base, "baseline-masks")]);
      const baselineScore = scorePipeline(base, corpus, "baseline-masks");

      console.log(`shared-color corpus 6a: adapter ${adapterScore}, color baseline ${baselineScore}`);
      expect(adapterScore).toBeGreaterThan(baselineScore);
    },
    120_000,
  );

  it("blank white image yields a bundle with zero masks", () => {
    const dir = join(base, "blank");
    mkdirSync(dir, { recursive: true });
    const img: RgbImage = {
      width: 64,
      height: 48,
      pixels: new Uint8Array(64 * 48 * 3).fill(255),
    };
    writeFileSync(join(dir, "blank.png"), encodePng(img));
    const out = join(base, "blank-out");
    mkdirSync(out, { recursive: true });
    const result = predictDirectory(dir, out, DEFAULT_CONFIG);
    expect(result.errors).toEqual([]);
    const doc = JSON.parse(readFileSync(join(out, "blank.masks.json"), "utf-8"));
    expect(doc.masks).toEqual([]);
    expect(doc.width).toBe(64);
    expect(doc.height).toBe(48);
  });

  it(
    "built CLI runs end to end",
    () => {
      const corpus = join(base, "cli-corpus");
      chartline(["generate", "--seed", "31", "--count", "2", "--profile", "easy", "--out", corpus]);
      const out = join(base, "cli-out");
      const cfg = join(base, "cli-cfg.json");
      writeFileSync(cfg, JSON.stringify({ score_threshold: 0.3, max_instances: 100 }));
      run("node", [
        join(ADAPTER_ROOT, "dist", "cli.js"), "predict",
        "--images", corpus, "--out", out, "--config", cfg,
      ]);
      expect(readdirSync(out).filter((n) => n.endsWith(".masks.json")).length).toBe(2);
    },
    120_000,
  );

  it("unknown runtime is a setup error (exit 2)", () => {
    const cfg = join(base, "bad-cfg.json");
    writeFileSync(cfg, JSON.stringify({ runtime: "neural-gpu" }));
    const res = spawnSync("node", [
      join(ADAPTER_ROOT, "dist", "cli.js"), "predict",
      "--images", base, "--out", join(base, "unused"), "--config", cfg,
    ], { encoding: "utf-8" });
    expect(res.status).toBe(2);
    expect(res.stderr).toContain("setup error");
  });
});
