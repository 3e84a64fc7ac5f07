import * as fs from "fs";

export const FORMAT_VERSION = "1";

export interface MixedSentence {
  origin: "reference" | "generated";
  index: number;
  text: string;
}

export interface MixedSummary {
  sentences: MixedSentence[];
  rendered: string;
}

export interface AugmentedRecord {
  id: string;
  reference_sentences: string[];
  generated_sentences: string[];
  phi: number[][];
  uncovered_refs: number[];
  faithful_gens: number[];
  mix_and_match: MixedSummary;
  positives: number[];
  negatives: number[];
  tau: number;
  query_log_digest: string;
  format_version: string;
}

function fail(lineNo: number, reason: string): never {
  throw new Error(`line ${lineNo}: ${reason}`);
}

function stringArray(x: unknown): x is string[] {
  return Array.isArray(x) && x.every((v) => typeof v === "string");
}

function numberArray(x: unknown): x is number[] {
  return Array.isArray(x) && x.every((v) => typeof v === "number");
}

export function parseAugmentedLine(line: string, lineNo: number): AugmentedRecord {
  let raw: unknown;
  try {
    raw = JSON.parse(line);
  } catch {
    fail(lineNo, "not valid JSON");
  }
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) {
    fail(lineNo, "not a JSON object");
  }
  const obj = raw as Record<string, unknown>;
  if (obj.format_version !== FORMAT_VERSION) {
    fail(lineNo, `unsupported format_version ${JSON.stringify(obj.format_version)}`);
  }
  if (typeof obj.id !== "string") fail(lineNo, "id must be a string");
  if (!stringArray(obj.reference_sentences)) fail(lineNo, "bad reference_sentences");
  if (!stringArray(obj.generated_sentences)) fail(lineNo, "bad generated_sentences");
  if (!Array.isArray(obj.phi) || !obj.phi.every(numberArray)) fail(lineNo, "bad phi");
  if (!numberArray(obj.uncovered_refs)) fail(lineNo, "bad uncovered_refs");
  if (!numberArray(obj.faithful_gens)) fail(lineNo, "bad faithful_gens");
  if (!numberArray(obj.positives)) fail(lineNo, "bad positives");
  if (!numberArray(obj.negatives)) fail(lineNo, "bad negatives");
  if (typeof obj.tau !== "number") fail(lineNo, "tau must be a number");

  const mix = obj.mix_and_match as Record<string, unknown> | undefined;
  if (typeof mix !== "object" || mix === null) fail(lineNo, "bad mix_and_match");
  if (typeof mix.rendered !== "string") fail(lineNo, "bad mix_and_match.rendered");
  if (!Array.isArray(mix.sentences)) fail(lineNo, "bad mix_and_match.sentences");
  const sentences: MixedSentence[] = mix.sentences.map((entry) => {
    const s = entry as Record<string, unknown>;
    if (
      (s.origin !== "reference" && s.origin !== "generated") ||
      typeof s.index !== "number" ||
      typeof s.text !== "string"
    ) {
      fail(lineNo, "bad mix_and_match sentence entry");
    }
    return { origin: s.origin as "reference" | "generated", index: s.index as number, text: s.text as string };
  });

  return {
    id: obj.id,
    reference_sentences: obj.reference_sentences,
    generated_sentences: obj.generated_sentences,
    phi: obj.phi as number[][],
    uncovered_refs: obj.uncovered_refs,
    faithful_gens: obj.faithful_gens,
    mix_and_match: { sentences, rendered: mix.rendered },
    positives: obj.positives,
    negatives: obj.negatives,
    tau: obj.tau,
    query_log_digest: typeof obj.query_log_digest === "string" ? obj.query_log_digest : "",
    format_version: FORMAT_VERSION,
  };
}

export function readAugmentedFile(path: string): AugmentedRecord[] {
  const text = fs.readFileSync(path, "utf-8");
  const records: AugmentedRecord[] = [];
  text.split("\n").forEach((line, idx) => {
    if (line.trim() === "") return;
    records.push(parseAugmentedLine(line, idx + 1));
  });
  return records;
}

/** Map record id to dialogue text from a source corpus JSONL file. */
export function loadDialogues(path: string): Map<string, string> {
  const dialogues = new Map<string, string>();
  const text = fs.readFileSync(path, "utf-8");
  text.split("\n").forEach((line, idx) => {
    if (line.trim() === "") return;
    let raw: unknown;
    try {
      raw = JSON.parse(line);
    } catch {
      fail(idx + 1, "not valid JSON");
    }
    const obj = raw as Record<string, unknown>;
    if (typeof obj.id !== "string" || typeof obj.dialogue !== "string") {
      fail(idx + 1, "corpus line needs string id and dialogue");
    }
    dialogues.set(obj.id, obj.dialogue);
  });
  return dialogues;
}

export function tokenize(text: string): string[] {
  return text.split(/\s+/).filter((t) => t.length > 0);
}

/**
 * Closed token table. Id 0 is reserved as the decoder start marker;
 * asking for a word that was not registered is an error, there is no
 * unknown-token bucket in this toy setting.
 */
export class Vocabulary {
  static readonly START = 0;
  private readonly ids = new Map<string, number>();

  add(token: string): number {
    let id = this.ids.get(token);
    if (id === undefined) {
      id = this.ids.size + 1;
      this.ids.set(token, id);
    }
    return id;
  }

  get size(): number {
    return this.ids.size + 1;
  }

  encode(tokens: readonly string[]): number[] {
    return tokens.map((token) => {
      const id = this.ids.get(token);
      if (id === undefined) {
        throw new Error(`out-of-vocabulary token: ${JSON.stringify(token)}`);
      }
      return id;
    });
  }

  static build(texts: Iterable<string>): Vocabulary {
    const vocab = new Vocabulary();
    for (const text of texts) {
      for (const token of tokenize(text)) {
        vocab.add(token);
      }
    }
    return vocab;
  }
}
