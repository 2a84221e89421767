/**
 * Corpus file reader matching the toolkit's on-disk contract:
 * CSV with header bug_id,project,is_bug,has_bic,title,description
 * (RFC 4180 quoting, so descriptions may span lines) or a JSONL twin
 * with the same field names.
 */

import { readFileSync } from "node:fs";

export interface CorpusRow {
  bugId: string;
  project: string;
  title: string;
  description: string;
}

const REQUIRED = ["bug_id", "project", "is_bug", "has_bic", "title", "description"];

export function parseCsv(text: string): string[][] {
  const rows: string[][] = [];
  let row: string[] = [];
  let field = "";
  let inQuotes = false;
  let i = 0;
  while (i < text.length) {
    const ch = text[i];
    if (inQuotes) {
      if (ch === '"') {
        if (text[i + 1] === '"') {
          field += '"';
          i += 2;
          continue;
        }
        inQuotes = false;
        i += 1;
        continue;
      }
      field += ch;
      i += 1;
      continue;
    }
    if (ch === '"') {
      inQuotes = true;
      i += 1;
    } else if (ch === ",") {
      row.push(field);
      field = "";
      i += 1;
    } else if (ch === "\n" || ch === "\r") {
      if (ch === "\r" && text[i + 1] === "\n") i += 1;
      row.push(field);
      field = "";
      rows.push(row);
      row = [];
      i += 1;
    } else {
      field += ch;
      i += 1;
    }
  }
  if (field.length > 0 || row.length > 0) {
    row.push(field);
    rows.push(row);
  }
  return rows;
}

export function loadCorpus(path: string, format?: "csv" | "jsonl"): CorpusRow[] {
  const fmt = format ?? (path.endsWith(".jsonl") ? "jsonl" : "csv");
  const text = readFileSync(path, "utf-8");
  const out: CorpusRow[] = [];
  if (fmt === "csv") {
    const rows = parseCsv(text).filter((r) => r.length > 1 || r[0] !== "");
    if (rows.length === 0) throw new Error(`${path}: empty corpus file`);
    const header = rows[0];
    for (const name of REQUIRED) {
      if (!header.includes(name)) {
        throw new Error(`${path}: header is missing field '${name}'`);
      }
    }
    const col = (name: string) => header.indexOf(name);
    for (let r = 1; r < rows.length; r++) {
      const cells = rows[r];
      out.push({
        bugId: cells[col("bug_id")],
        project: cells[col("project")],
        title: cells[col("title")],
        description: cells[col("description")],
      });
    }
  } else {
    for (const [lineNo, line] of text.split("\n").entries()) {
      if (!line.trim()) continue;
      const record = JSON.parse(line);
      for (const name of REQUIRED) {
        if (!(name in record)) {
          throw new Error(`${path}: row ${lineNo} is missing field '${name}'`);
        }
      }
      out.push({
        bugId: String(record.bug_id),
        project: String(record.project),
        title: String(record.title),
        description: String(record.description),
      });
    }
  }
  const seen = new Set<string>();
  for (const row of out) {
    if (seen.has(row.bugId)) throw new Error(`duplicate bug_id '${row.bugId}'`);
    seen.add(row.bugId);
  }
  return out;
}
