/**
 * Export job: embed one text field of every corpus row and write the
 * manifest + vectors.jsonl pair the classification toolkit imports.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { cleanText } from "./clean.js";
import { loadCorpus } from "./corpus.js";
import { makeEmbedder, type Pooling } from "./embed.js";

export interface ExportJob {
  corpusPath: string;
  corpusFormat?: "csv" | "jsonl";
  textField: "title" | "description";
  model: string;
  pooling: Pooling;
  batchSize: number;
  maxLen: number;
  outDir: string;
}

export interface ExportStats {
  count: number;
  dimension: number;
  emptyTextIds: string[];
  manifestPath: string;
  vectorsPath: string;
}

export async function exportEmbeddings(job: ExportJob): Promise<ExportStats> {
  if (job.batchSize < 1) throw new Error("batch size must be >= 1");
  if (job.maxLen < 1) throw new Error("max length must be >= 1");
  const rows = loadCorpus(job.corpusPath, job.corpusFormat);
  const knownProjects = new Set(rows.map((r) => r.project.toLowerCase()));
  const embedder = makeEmbedder(job.model);

  const cleaned = rows.map((row) =>
    cleanText(
      job.textField === "title" ? row.title : row.description,
      row.project,
      knownProjects,
    ),
  );

  const vectors: number[][] = [];
  for (let start = 0; start < cleaned.length; start += job.batchSize) {
    const batch = cleaned.slice(start, start + job.batchSize);
    vectors.push(...(await embedder.embedBatch(batch, job.pooling, job.maxLen)));
  }

  const dimension =
    embedder.dimension > 0 ? embedder.dimension : (vectors[0]?.length ?? 0);
  if (dimension < 1) {
    throw new Error("embedding dimension came out empty; nothing to export");
  }
  const emptyTextIds: string[] = [];
  const lines: string[] = [];
  rows.forEach((row, i) => {
    const vector = vectors[i].length > 0 ? vectors[i] : new Array(dimension).fill(0);
    if (vector.every((v) => v === 0)) emptyTextIds.push(row.bugId);
    for (const v of vector) {
      if (!Number.isFinite(v)) {
        throw new Error(`bug_id '${row.bugId}': non-finite embedding component`);
      }
    }
    lines.push(JSON.stringify({ id: row.bugId, v: vector }));
  });

  mkdirSync(job.outDir, { recursive: true });
  const manifest = {
    model_name: job.model,
    dimension,
    count: rows.length,
    pooling: job.pooling,
    max_len: job.maxLen,
    text_field: job.textField,
    stats: { empty_text_ids: emptyTextIds },
  };
  const manifestPath = join(job.outDir, "manifest.json");
  const vectorsPath = join(job.outDir, "vectors.jsonl");
  writeFileSync(manifestPath, JSON.stringify(manifest, null, 2) + "\n");
  writeFileSync(vectorsPath, lines.join("\n") + (lines.length ? "\n" : ""));
  return { count: rows.length, dimension, emptyTextIds, manifestPath, vectorsPath };
}
