import { Seq2SeqModel } from "./model";
import { contrastiveLoss, mleLoss, totalLoss, uncoveredLoss } from "./losses";
import { poolRepresentations, sentenceSpans } from "./pooling";
import { AugmentedRecord, Vocabulary, tokenize } from "./records";

export interface TrainOptions {
  steps: number;
  dim: number;
  learningRate: number;
  seed: number;
  alpha: number;
  beta: number;
  logForm: boolean;
}

export const DEFAULT_OPTIONS: TrainOptions = {
  steps: 100,
  dim: 16,
  learningRate: 0.05,
  seed: 1,
  alpha: 1.0,
  beta: 1.0,
  logForm: false,
};

export interface MetricsRow {
  step: number;
  mle: number;
  uncovered: number;
  contrastive: number;
  total: number;
}

interface PreparedRecord {
  dialogue: number[];
  reference: number[];
  mix: number[];
  generated: number[];
  spans: ReturnType<typeof sentenceSpans>;
  positives: number[];
}

/**
 * Cycle through records minimizing the combined loss with plain SGD.
 * Dialogues come from the source corpus by record id; a record without
 * one falls back to conditioning on its own reference summary.
 */
export function trainLoop(
  records: readonly AugmentedRecord[],
  dialogues: Map<string, string>,
  options: Partial<TrainOptions> = {},
  onMetrics?: (row: MetricsRow) => void,
): MetricsRow[] {
  const opts = { ...DEFAULT_OPTIONS, ...options };
  if (records.length === 0) {
    throw new Error("no records to train on");
  }

  const texts: string[] = [];
  for (const record of records) {
    texts.push(dialogues.get(record.id) ?? "");
    texts.push(record.reference_sentences.join(" "));
    texts.push(record.generated_sentences.join(" "));
    texts.push(record.mix_and_match.rendered);
  }
  const vocab = Vocabulary.build(texts);

  const prepared: PreparedRecord[] = records.map((record) => {
    const reference = record.reference_sentences.join(" ");
    const dialogue = dialogues.get(record.id) ?? reference;
    return {
      dialogue: vocab.encode(tokenize(dialogue)),
      reference: vocab.encode(tokenize(reference)),
      mix: vocab.encode(tokenize(record.mix_and_match.rendered)),
      generated: vocab.encode(tokenize(record.generated_sentences.join(" "))),
      spans: sentenceSpans(record.generated_sentences),
      positives: record.positives,
    };
  });

  const model = new Seq2SeqModel({ vocabSize: vocab.size, dim: opts.dim, seed: opts.seed });
  const params = model.parameters();
  const history: MetricsRow[] = [];

  for (let step = 0; step < opts.steps; step++) {
    const item = prepared[step % prepared.length];

    const mle = mleLoss(model, item.dialogue, item.reference);
    const uncovered = uncoveredLoss(model, item.dialogue, item.mix);

    const context = model.encodeFinal(item.dialogue);
    const decoderStates = model.decodeStates(context, [
      Vocabulary.START,
      ...item.generated.slice(0, -1),
    ]);
    const reps = poolRepresentations(
      decoderStates,
      item.spans,
      model.encodeStates(item.reference),
    );
    const contrastive = contrastiveLoss(reps.sentences, reps.reference, item.positives, {
      logForm: opts.logForm,
    });

    const bundle = totalLoss(mle, uncovered, contrastive, opts.alpha, opts.beta);

    for (const p of params) {
      p.grad = 0;
    }
    bundle.total.backward();
    for (const p of params) {
      p.data -= opts.learningRate * p.grad;
    }

    const row: MetricsRow = {
      step,
      mle: bundle.mle.data,
      uncovered: bundle.uncovered.data,
      contrastive: bundle.contrastive.data,
      total: bundle.total.data,
    };
    history.push(row);
    if (onMetrics) {
      onMetrics(row);
    }
  }
  return history;
}
