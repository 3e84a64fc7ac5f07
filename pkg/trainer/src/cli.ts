import * as fs from "fs";

import { MetricsRow, TrainOptions, trainLoop } from "./train";
import { loadDialogues, readAugmentedFile } from "./records";

export interface CliConfig {
  input: string;
  corpus?: string;
  metrics?: string;
  options: Partial<TrainOptions>;
}

export function parseArgs(argv: string[]): CliConfig {
  let input: string | undefined;
  let corpus: string | undefined;
  let metrics: string | undefined;
  const options: Partial<TrainOptions> = {};

  const takeValue = (flag: string, i: number): string => {
    if (i + 1 >= argv.length) {
      throw new Error(`${flag} needs a value`);
    }
    return argv[i + 1];
  };
  const takeNumber = (flag: string, i: number): number => {
    const parsed = Number(takeValue(flag, i));
    if (!Number.isFinite(parsed)) {
      throw new Error(`${flag} needs a number`);
    }
    return parsed;
  };

  for (let i = 0; i < argv.length; i++) {
    switch (argv[i]) {
      case "--input":
        input = takeValue("--input", i);
        i++;
        break;
      case "--corpus":
        corpus = takeValue("--corpus", i);
        i++;
        break;
      case "--metrics":
        metrics = takeValue("--metrics", i);
        i++;
        break;
      case "--steps":
        options.steps = takeNumber("--steps", i);
        i++;
        break;
      case "--dim":
        options.dim = takeNumber("--dim", i);
        i++;
        break;
      case "--lr":
        options.learningRate = takeNumber("--lr", i);
        i++;
        break;
      case "--seed":
        options.seed = takeNumber("--seed", i);
        i++;
        break;
      case "--alpha":
        options.alpha = takeNumber("--alpha", i);
        i++;
        break;
      case "--beta":
        options.beta = takeNumber("--beta", i);
        i++;
        break;
      case "--log-form":
        options.logForm = true;
        break;
      default:
        throw new Error(`unknown argument ${argv[i]}`);
    }
  }
  if (!input) {
    throw new Error("--input is required");
  }
  return { input, corpus, metrics, options };
}

export function runCli(argv: string[]): number {
  let config: CliConfig;
  try {
    config = parseArgs(argv);
  } catch (err) {
    process.stderr.write(`trainer: ${(err as Error).message}\n`);
    process.stderr.write(
      "usage: trainer --input augmented.jsonl [--corpus corpus.jsonl] " +
        "[--metrics out.jsonl] [--steps N] [--dim N] [--lr F] [--seed N] " +
        "[--alpha F] [--beta F] [--log-form]\n",
    );
    return 1;
  }

  let fd: number | null = null;
  try {
    const records = readAugmentedFile(config.input);
    const dialogues = config.corpus ? loadDialogues(config.corpus) : new Map<string, string>();
    if (config.metrics) {
      fd = fs.openSync(config.metrics, "w");
    }
    const emit = (row: MetricsRow) => {
      const line = JSON.stringify(row) + "\n";
      if (fd !== null) {
        fs.writeSync(fd, line);
      } else {
        process.stdout.write(line);
      }
    };
    const history = trainLoop(records, dialogues, config.options, emit);
    if (fd !== null) {
      fs.closeSync(fd);
      fd = null;
      const last = history[history.length - 1];
      process.stderr.write(
        `trainer: ${history.length} steps, final total ${last.total.toFixed(4)}\n`,
      );
    }
    return 0;
  } catch (err) {
    if (fd !== null) {
      fs.closeSync(fd);
    }
    process.stderr.write(`trainer: fatal: ${(err as Error).message}\n`);
    return 1;
  }
}

if (require.main === module) {
  process.exitCode = runCli(process.argv.slice(2));
}
