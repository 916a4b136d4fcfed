#!/usr/bin/env node
import { mkdirSync } from "fs";

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { predictDirectory } from "./predict.js";
import { ConfigError, loadConfig } from "./types.js";
import { RuntimeError } from "./runtime.js";

async function main(): Promise<number> {
  const argv = await yargs(hideBin(process.argv))
    .command("predict", "Segment chart images into line-instance mask bundles")
    .demandCommand(1, "specify a command (predict)")
    .option("images", { type: "string", demandOption: true, describe: "input directory of PNG chart images" })
    .option("out", { type: "string", demandOption: true, describe: "output directory for mask bundles" })
    .option("config", { type: "string", describe: "JSON config file (score_threshold, binarization, max_instances, runtime, color_tol)" })
    .option("keep-going", { type: "boolean", default: false, describe: "exit 0 even when some images fail" })
    .strict()
    .parse();

  if (argv._[0] !== "predict") {
    console.error(`unknown command: ${argv._[0]}`);
    return 2;
  }
  let config;
  try {
    config = loadConfig(argv.config);
  } catch (e) {
    if (e instanceof ConfigError) {
      console.error(`config error: ${e.message}`);
      return 2;
    }
    throw e;
  }
  mkdirSync(argv.out, { recursive: true });
  let result;
  try {
    result = predictDirectory(argv.images, argv.out, config);
  } catch (e) {
    if (e instanceof RuntimeError) {
      console.error(`setup error: ${e.message}`);
      return 2;
    }
    throw e;
  }
  for (const err of result.errors) {
    console.error(`error: ${err.image}: ${err.message}`);
  }
  console.log(`wrote ${result.written.length} bundle(s), ${result.errors.length} failure(s)`);
  if (result.errors.length > 0 && !argv["keep-going"]) return 1;
  return 0;
}

main().then((code) => {
  process.exitCode = code;
});
