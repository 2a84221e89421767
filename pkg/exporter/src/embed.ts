/**
 * Embedding backends.
 *
 * Model ids of the form `local-hash-<dim>` select a fully offline,
 * deterministic token-hash projection: every whitespace token lands in an
 * FNV-bucketed coordinate with a hash-derived sign, pooled over the
 * sequence and L2-normalized. It exists so exports (and tests) run with
 * no model download; anything else is treated as a transformers.js
 * feature-extraction model and loaded on demand.
 */

export type Pooling = "cls" | "mean";

export interface Embedder {
  readonly modelName: string;
  readonly dimension: number;
  embedBatch(texts: string[], pooling: Pooling, maxLen: number): Promise<number[][]>;
}

function fnv1a(text: string, seed: number): number {
  let hash = (0x811c9dc5 ^ seed) >>> 0;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193) >>> 0;
  }
  return hash >>> 0;
}

function l2Normalize(vector: number[]): number[] {
  let sum = 0;
  for (const v of vector) sum += v * v;
  if (sum === 0) return vector;
  const norm = Math.sqrt(sum);
  return vector.map((v) => v / norm);
}

export class HashEmbedder implements Embedder {
  readonly modelName: string;
  readonly dimension: number;

  constructor(dimension: number) {
    if (!Number.isInteger(dimension) || dimension < 1) {
      throw new Error(`hash embedder dimension must be a positive int, got ${dimension}`);
    }
    this.dimension = dimension;
    this.modelName = `local-hash-${dimension}`;
  }

  private tokenVector(token: string): [number, number] {
    const index = fnv1a(token, 0) % this.dimension;
    const sign = fnv1a(token, 0x9e3779b9) % 2 === 0 ? 1 : -1;
    return [index, sign];
  }

  embedOne(text: string, pooling: Pooling, maxLen: number): number[] {
    const vector = new Array<number>(this.dimension).fill(0);
    const tokens = text.split(/\s+/).filter(Boolean).slice(0, maxLen);
    if (tokens.length === 0) return vector;
    if (pooling === "cls") {
      // No real [CLS] token exists here; hash the whole truncated text.
      const [index, sign] = this.tokenVector(tokens.join(" "));
      vector[index] = sign;
      return vector;
    }
    for (const token of tokens) {
      const [index, sign] = this.tokenVector(token);
      vector[index] += sign;
    }
    for (let i = 0; i < vector.length; i++) vector[i] /= tokens.length;
    return l2Normalize(vector);
  }

  async embedBatch(texts: string[], pooling: Pooling, maxLen: number): Promise<number[][]> {
    return texts.map((t) => this.embedOne(t, pooling, maxLen));
  }
}

export class TransformerEmbedder implements Embedder {
  readonly modelName: string;
  dimension = 0;
  private pipe: any = null;

  constructor(modelName: string) {
    this.modelName = modelName;
  }

  private async load(): Promise<any> {
    if (this.pipe) return this.pipe;
    let transformers: any;
    try {
      // Late-bound specifier keeps the optional dependency out of the
      // compile-time module graph.
      const specifier = "@xenova/transformers";
      transformers = await import(specifier);
    } catch (err) {
      throw new Error(
        `model '${this.modelName}' needs the optional @xenova/transformers ` +
          `dependency (npm install @xenova/transformers), or use a ` +
          `local-hash-<dim> model id for offline export: ${err}`,
      );
    }
    try {
      this.pipe = await transformers.pipeline("feature-extraction", this.modelName);
    } catch (err) {
      throw new Error(`failed to load model '${this.modelName}': ${err}`);
    }
    return this.pipe;
  }

  async embedBatch(texts: string[], pooling: Pooling, maxLen: number): Promise<number[][]> {
    const pipe = await this.load();
    const out: number[][] = [];
    for (const raw of texts) {
      // Word-level truncation ahead of the model's own subword tokenizer;
      // the same max-len lands in the manifest as the truncation policy.
      const text = raw.split(/\s+/).filter(Boolean).slice(0, maxLen).join(" ");
      if (!text.trim()) {
        out.push(this.dimension > 0 ? new Array(this.dimension).fill(0) : []);
        continue;
      }
      let result: any;
      try {
        result = await pipe(text, { pooling, normalize: true });
      } catch (err) {
        const message = String(err);
        if (/memory|alloc/i.test(message)) {
          throw new Error(
            `inference ran out of memory; re-run with a smaller --batch-size ` +
              `and/or --max-len (${message})`,
          );
        }
        throw err;
      }
      const vector = Array.from(result.data as Iterable<number>);
      if (this.dimension === 0) {
        this.dimension = vector.length;
        // Backfill any zero rows emitted before the dimension was known.
        for (const row of out) {
          if (row.length === 0) row.push(...new Array(this.dimension).fill(0));
        }
      }
      out.push(vector);
    }
    return out;
  }
}

export function makeEmbedder(modelName: string): Embedder {
  const match = /^local-hash-(\d+)$/.exec(modelName);
  if (match) return new HashEmbedder(parseInt(match[1], 10));
  return new TransformerEmbedder(modelName);
}
