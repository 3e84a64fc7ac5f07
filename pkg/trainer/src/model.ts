import { Value, val } from "./autograd";
import { mulberry32 } from "./rng";

export interface ModelConfig {
  vocabSize: number;
  dim: number;
  seed: number;
}

const MAX_VOCAB = 1000;
const MAX_DIM = 64;
const INIT_SCALE = 0.08;

function matrix(rows: number, cols: number, rng: () => number): Value[][] {
  return Array.from({ length: rows }, () =>
    Array.from({ length: cols }, () => val((rng() * 2 - 1) * INIT_SCALE)),
  );
}

function matVec(w: Value[][], x: readonly Value[]): Value[] {
  return w.map((row) => {
    let acc: Value = val(0);
    for (let i = 0; i < row.length; i++) {
      acc = acc.add(row[i].mul(x[i]));
    }
    return acc;
  });
}

class RnnCell {
  readonly inputWeight: Value[][];
  readonly stateWeight: Value[][];
  readonly bias: Value[];

  constructor(dim: number, rng: () => number) {
    this.inputWeight = matrix(dim, dim, rng);
    this.stateWeight = matrix(dim, dim, rng);
    this.bias = Array.from({ length: dim }, () => val((rng() * 2 - 1) * INIT_SCALE));
  }

  step(input: readonly Value[], state: readonly Value[]): Value[] {
    const fromInput = matVec(this.inputWeight, input);
    const fromState = matVec(this.stateWeight, state);
    return fromInput.map((v, i) => v.add(fromState[i]).add(this.bias[i]).tanh());
  }

  parameters(): Value[] {
    return [...this.inputWeight.flat(), ...this.stateWeight.flat(), ...this.bias];
  }
}

/**
 * Tiny recurrent encoder-decoder. The encoder folds a token sequence
 * into a state; the decoder starts from that state and is always run
 * teacher-forced. Sized for loss verification, not output quality.
 */
export class Seq2SeqModel {
  readonly config: ModelConfig;
  readonly embedding: Value[][];
  readonly encoder: RnnCell;
  readonly decoder: RnnCell;
  readonly outWeight: Value[][];
  readonly outBias: Value[];

  constructor(config: ModelConfig) {
    if (config.vocabSize < 1 || config.vocabSize > MAX_VOCAB) {
      throw new Error(`vocabSize must be in [1, ${MAX_VOCAB}], got ${config.vocabSize}`);
    }
    if (config.dim < 1 || config.dim > MAX_DIM) {
      throw new Error(`dim must be in [1, ${MAX_DIM}], got ${config.dim}`);
    }
    this.config = config;
    const rng = mulberry32(config.seed);
    this.embedding = matrix(config.vocabSize, config.dim, rng);
    this.encoder = new RnnCell(config.dim, rng);
    this.decoder = new RnnCell(config.dim, rng);
    this.outWeight = matrix(config.vocabSize, config.dim, rng);
    this.outBias = Array.from({ length: config.vocabSize }, () => val(0));
  }

  parameters(): Value[] {
    return [
      ...this.embedding.flat(),
      ...this.encoder.parameters(),
      ...this.decoder.parameters(),
      ...this.outWeight.flat(),
      ...this.outBias,
    ];
  }

  private embed(token: number): Value[] {
    if (token < 0 || token >= this.config.vocabSize) {
      throw new Error(`token id ${token} outside vocabulary`);
    }
    return this.embedding[token];
  }

  zeroState(): Value[] {
    return Array.from({ length: this.config.dim }, () => val(0));
  }

  /** One state per input position; empty input gives an empty list. */
  encodeStates(tokens: readonly number[]): Value[][] {
    const states: Value[][] = [];
    let state = this.zeroState();
    for (const token of tokens) {
      state = this.encoder.step(this.embed(token), state);
      states.push(state);
    }
    return states;
  }

  encodeFinal(tokens: readonly number[]): Value[] {
    const states = this.encodeStates(tokens);
    return states.length > 0 ? states[states.length - 1] : this.zeroState();
  }

  /** Teacher-forced decoder states, one per input position. */
  decodeStates(context: readonly Value[], inputs: readonly number[]): Value[][] {
    const states: Value[][] = [];
    let state = [...context];
    for (const token of inputs) {
      state = this.decoder.step(this.embed(token), state);
      states.push(state);
    }
    return states;
  }

  logits(state: readonly Value[]): Value[] {
    return matVec(this.outWeight, state).map((v, i) => v.add(this.outBias[i]));
  }
}
