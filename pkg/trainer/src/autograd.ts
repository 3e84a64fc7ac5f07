/**
 * Scalar reverse-mode automatic differentiation.
 *
 * Every arithmetic node is a Value holding one number and, after a
 * backward() call on some downstream result, the partial derivative of
 * that result with respect to itself. Graphs here stay small (a few
 * tens of thousands of nodes per training step), so a plain object
 * graph beats the bookkeeping a tensor layer would cost.
 */

export class Value {
  data: number;
  grad = 0;
  readonly parents: readonly Value[];
  private backprop: () => void = () => {};

  constructor(data: number, parents: readonly Value[] = []) {
    if (!Number.isFinite(data)) {
      throw new Error(`non-finite value: ${data}`);
    }
    this.data = data;
    this.parents = parents;
  }

  add(other: Value | number): Value {
    const rhs = toValue(other);
    const out = new Value(this.data + rhs.data, [this, rhs]);
    out.backprop = () => {
      this.grad += out.grad;
      rhs.grad += out.grad;
    };
    return out;
  }

  sub(other: Value | number): Value {
    const rhs = toValue(other);
    const out = new Value(this.data - rhs.data, [this, rhs]);
    out.backprop = () => {
      this.grad += out.grad;
      rhs.grad -= out.grad;
    };
    return out;
  }

  mul(other: Value | number): Value {
    const rhs = toValue(other);
    const out = new Value(this.data * rhs.data, [this, rhs]);
    out.backprop = () => {
      this.grad += rhs.data * out.grad;
      rhs.grad += this.data * out.grad;
    };
    return out;
  }

  div(other: Value | number): Value {
    const rhs = toValue(other);
    if (rhs.data === 0) {
      throw new Error("division by zero");
    }
    const out = new Value(this.data / rhs.data, [this, rhs]);
    out.backprop = () => {
      this.grad += out.grad / rhs.data;
      rhs.grad -= (this.data / (rhs.data * rhs.data)) * out.grad;
    };
    return out;
  }

  neg(): Value {
    return this.mul(-1);
  }

  exp(): Value {
    const out = new Value(Math.exp(this.data), [this]);
    out.backprop = () => {
      this.grad += out.data * out.grad;
    };
    return out;
  }

  log(): Value {
    if (this.data <= 0) {
      throw new Error(`log of non-positive value: ${this.data}`);
    }
    const out = new Value(Math.log(this.data), [this]);
    out.backprop = () => {
      this.grad += out.grad / this.data;
    };
    return out;
  }

  tanh(): Value {
    const t = Math.tanh(this.data);
    const out = new Value(t, [this]);
    out.backprop = () => {
      this.grad += (1 - t * t) * out.grad;
    };
    return out;
  }

  pow(exponent: number): Value {
    const out = new Value(Math.pow(this.data, exponent), [this]);
    out.backprop = () => {
      this.grad += exponent * Math.pow(this.data, exponent - 1) * out.grad;
    };
    return out;
  }

  /** Accumulate d(this)/d(node) into every node reachable from here. */
  backward(): void {
    // Iterative postorder; chains from long token sums would overflow a
    // recursive walk.
    const order: Value[] = [];
    const seen = new Set<Value>([this]);
    const stack: Array<{ node: Value; next: number }> = [
      { node: this, next: 0 },
    ];
    while (stack.length > 0) {
      const frame = stack[stack.length - 1];
      if (frame.next < frame.node.parents.length) {
        const parent = frame.node.parents[frame.next];
        frame.next += 1;
        if (!seen.has(parent)) {
          seen.add(parent);
          stack.push({ node: parent, next: 0 });
        }
      } else {
        stack.pop();
        order.push(frame.node);
      }
    }
    this.grad = 1;
    for (let i = order.length - 1; i >= 0; i--) {
      order[i].backprop();
    }
  }
}

export function toValue(x: Value | number): Value {
  return x instanceof Value ? x : new Value(x);
}

export function val(x: number): Value {
  return new Value(x);
}

export function sum(xs: readonly Value[]): Value {
  let total = val(0);
  for (const x of xs) {
    total = total.add(x);
  }
  return total;
}

export function dot(a: readonly Value[], b: readonly Value[]): Value {
  if (a.length !== b.length) {
    throw new Error(`dot of lengths ${a.length} and ${b.length}`);
  }
  return sum(a.map((x, i) => x.mul(b[i])));
}

/** Numerically stable log-softmax; the constant shift cancels in the gradient. */
export function logSoftmax(logits: readonly Value[]): Value[] {
  if (logits.length === 0) {
    throw new Error("log-softmax of empty vector");
  }
  let top = -Infinity;
  for (const logit of logits) {
    top = Math.max(top, logit.data);
  }
  const shifted = logits.map((logit) => logit.sub(top));
  const lse = sum(shifted.map((s) => s.exp())).log();
  return shifted.map((s) => s.sub(lse));
}
