import { Value, logSoftmax, sum, val } from "./autograd";
import { Seq2SeqModel } from "./model";
import { Vocabulary } from "./records";

export interface LossBundle {
  mle: Value;
  uncovered: Value;
  contrastive: Value;
  total: Value;
  alpha: number;
  beta: number;
}

/**
 * Teacher-forced negative log likelihood of a target token sequence
 * conditioned on a context sequence: -sum_t log p(t | prefix, context).
 */
export function nllLoss(
  model: Seq2SeqModel,
  contextTokens: readonly number[],
  targetTokens: readonly number[],
): Value {
  if (targetTokens.length === 0) {
    throw new Error("empty target sequence");
  }
  for (const token of targetTokens) {
    if (token < 0 || token >= model.config.vocabSize) {
      throw new Error(`token id ${token} outside vocabulary`);
    }
  }
  const context = model.encodeFinal(contextTokens);
  const inputs = [Vocabulary.START, ...targetTokens.slice(0, -1)];
  const states = model.decodeStates(context, inputs);
  let loss = val(0);
  for (let t = 0; t < targetTokens.length; t++) {
    const logProbs = logSoftmax(model.logits(states[t]));
    loss = loss.sub(logProbs[targetTokens[t]]);
  }
  return loss;
}

/** Likelihood loss on the human reference summary. */
export function mleLoss(
  model: Seq2SeqModel,
  dialogueTokens: readonly number[],
  referenceTokens: readonly number[],
): Value {
  return nllLoss(model, dialogueTokens, referenceTokens);
}

/** Likelihood loss on the mixed target; equals mleLoss when the mix is the reference. */
export function uncoveredLoss(
  model: Seq2SeqModel,
  dialogueTokens: readonly number[],
  mixTokens: readonly number[],
): Value {
  return nllLoss(model, dialogueTokens, mixTokens);
}

export function cosine(a: readonly Value[], b: readonly Value[]): Value {
  if (a.length !== b.length) {
    throw new Error(`cosine of lengths ${a.length} and ${b.length}`);
  }
  const dotProduct = sum(a.map((x, i) => x.mul(b[i])));
  const normA = sum(a.map((x) => x.mul(x))).pow(0.5);
  const normB = sum(b.map((x) => x.mul(x))).pow(0.5);
  if (normA.data === 0 || normB.data === 0) {
    throw new Error("cosine of a zero-norm vector");
  }
  return dotProduct.div(normA.mul(normB));
}

export interface ContrastiveOptions {
  /** Apply log to each softmax term instead of summing them raw. */
  logForm?: boolean;
}

/**
 * Sentence-level contrastive objective. Softmax weights over
 * exp(cos(h_j, reference)) for all generated sentences; the loss is
 * minus the mass landing on the faithful ones, so it lives in [-1, 0].
 * No faithful sentences means nothing to pull and a zero loss.
 */
export function contrastiveLoss(
  sentences: readonly Value[][],
  reference: readonly Value[],
  positives: readonly number[],
  options: ContrastiveOptions = {},
): Value {
  if (sentences.length === 0) {
    throw new Error("no generated sentences");
  }
  for (const index of positives) {
    if (!Number.isInteger(index) || index < 0 || index >= sentences.length) {
      throw new Error(`positive index ${index} out of range`);
    }
  }
  if (positives.length === 0) {
    return val(0);
  }
  const weights = sentences.map((h) => cosine(h, reference).exp());
  const denominator = sum(weights);
  if (options.logForm) {
    let loss = val(0);
    for (const index of positives) {
      loss = loss.sub(weights[index].div(denominator).log());
    }
    return loss;
  }
  const numerator = sum(positives.map((index) => weights[index]));
  return numerator.div(denominator).neg();
}

/** Weighted sum of the three parts; alpha and beta default to 1.0. */
export function totalLoss(
  mle: Value,
  uncovered: Value,
  contrastive: Value,
  alpha = 1.0,
  beta = 1.0,
): LossBundle {
  const total = mle.add(uncovered.mul(alpha)).add(contrastive.mul(beta));
  return { mle, uncovered, contrastive, total, alpha, beta };
}
