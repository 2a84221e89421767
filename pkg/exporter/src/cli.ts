#!/usr/bin/env node
/**
 * bug-embed: embed bug-report text and emit manifest + vectors.jsonl.
 *
 *   bug-embed --corpus data/replication.csv --text-field title \
 *             --model local-hash-256 --pooling mean --out out/emb
 */

import { exportEmbeddings, type ExportJob } from "./export.js";
import type { Pooling } from "./embed.js";

const USAGE = `usage: bug-embed --corpus FILE --out DIR [options]

options:
  --corpus FILE        corpus CSV/JSONL (required)
  --format csv|jsonl   corpus format (default: by file extension)
  --text-field NAME    title | description (default: title)
  --model ID           embedding model id (default: local-hash-256);
                       local-hash-<dim> runs offline and deterministically
  --pooling MODE       cls | mean (default: mean)
  --batch-size N       rows per inference batch (default: 16)
  --max-len N          token truncation length, recorded in the manifest
                       (default: 256)
  --out DIR            output directory (required)
`;

function parseArgs(argv: string[]): ExportJob {
  const opts = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (!flag.startsWith("--") || value === undefined) {
      throw new Error(`malformed arguments near '${flag}'`);
    }
    opts.set(flag.slice(2), value);
  }
  const corpus = opts.get("corpus");
  const out = opts.get("out");
  if (!corpus || !out) throw new Error("--corpus and --out are required");
  const textField = (opts.get("text-field") ?? "title") as "title" | "description";
  if (textField !== "title" && textField !== "description") {
    throw new Error(`--text-field must be title|description, got '${textField}'`);
  }
  const pooling = (opts.get("pooling") ?? "mean") as Pooling;
  if (pooling !== "cls" && pooling !== "mean") {
    throw new Error(`--pooling must be cls|mean, got '${pooling}'`);
  }
  const format = opts.get("format") as "csv" | "jsonl" | undefined;
  if (format !== undefined && format !== "csv" && format !== "jsonl") {
    throw new Error(`--format must be csv|jsonl, got '${format}'`);
  }
  return {
    corpusPath: corpus,
    corpusFormat: format,
    textField,
    model: opts.get("model") ?? "local-hash-256",
    pooling,
    batchSize: parseInt(opts.get("batch-size") ?? "16", 10),
    maxLen: parseInt(opts.get("max-len") ?? "256", 10),
    outDir: out,
  };
}

async function main(): Promise<void> {
  const argv = process.argv.slice(2);
  if (argv.includes("--help") || argv.includes("-h") || argv.length === 0) {
    process.stdout.write(USAGE);
    process.exit(argv.length === 0 ? 1 : 0);
  }
  let job: ExportJob;
  try {
    job = parseArgs(argv);
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n\n${USAGE}`);
    process.exit(1);
  }
  try {
    const stats = await exportEmbeddings(job!);
    process.stdout.write(
      `wrote ${stats.count} vectors of dimension ${stats.dimension} ` +
        `(${stats.emptyTextIds.length} empty-text zero rows) to ${job!.outDir}\n`,
    );
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    process.exit(1);
  }
}

main();
