import { Value } from "./autograd";
import { tokenize } from "./records";

export interface Span {
  start: number;
  end: number;
}

export interface SentenceRepresentation {
  /** One pooled vector per generated sentence. */
  sentences: Value[][];
  /** Pooled vector for the whole reference summary. */
  reference: Value[];
}

/**
 * Token spans of consecutive sentences inside their joined rendering.
 * Sentence k covers [start, end) in whitespace-token positions.
 */
export function sentenceSpans(sentences: readonly string[]): Span[] {
  const spans: Span[] = [];
  let cursor = 0;
  sentences.forEach((sentence, idx) => {
    const width = tokenize(sentence).length;
    if (width === 0) {
      throw new Error(`sentence ${idx} has no tokens`);
    }
    spans.push({ start: cursor, end: cursor + width });
    cursor += width;
  });
  return spans;
}

/** Arithmetic mean of state vectors over one token span. */
export function meanPool(states: readonly Value[][], span: Span): Value[] {
  if (span.start < 0 || span.end > states.length || span.start >= span.end) {
    throw new Error(`empty or out-of-range span [${span.start}, ${span.end}) over ${states.length} states`);
  }
  const width = span.end - span.start;
  const dim = states[span.start].length;
  const pooled: Value[] = [];
  for (let d = 0; d < dim; d++) {
    let acc = states[span.start][d];
    for (let t = span.start + 1; t < span.end; t++) {
      acc = acc.add(states[t][d]);
    }
    pooled.push(acc.div(width));
  }
  return pooled;
}

export function poolRepresentations(
  decoderStates: readonly Value[][],
  generatedSpans: readonly Span[],
  encoderStates: readonly Value[][],
): SentenceRepresentation {
  if (encoderStates.length === 0) {
    throw new Error("no encoder states to pool the reference from");
  }
  return {
    sentences: generatedSpans.map((span) => meanPool(decoderStates, span)),
    reference: meanPool(encoderStates, { start: 0, end: encoderStates.length }),
  };
}
