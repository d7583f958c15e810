/**
 * Causal language model interface.
 *
 * A model owns its subword tokenizer and reports natural-log conditional
 * probabilities for a piece sequence plus the end-of-text event. Wrapping a
 * real pretrained model means implementing these two methods; the stub
 * below needs no download and gives exactly log2(vocabSize) bits per piece,
 * which the conformance and acceptance tests rely on.
 */

export interface PieceScores {
  /** ln P(piece[i] | piece[0..i-1]) for each piece */
  logProbs: number[];
  /** ln P(end-of-text | all pieces) */
  eotLogProb: number;
}

export interface CausalLM {
  readonly name: string;
  readonly vocabSize: number;
  /** Split one word into its subword pieces (concatenation restores the word). */
  tokenize(word: string): string[];
  score(pieces: string[]): PieceScores;
}

export const STUB_PIECE_LEN = 4;
export const STUB_VOCAB = 32;

/** Uniform-logit stub: every piece and the end-of-text event cost
 * ln(1/vocabSize), i.e. log2(vocabSize) bits. */
export class StubUniformLM implements CausalLM {
  readonly name: string;
  readonly vocabSize: number;

  constructor(vocabSize: number = STUB_VOCAB) {
    if (vocabSize < 2) throw new Error("vocabSize must be >= 2");
    this.vocabSize = vocabSize;
    this.name = `stub:${vocabSize}`;
  }

  tokenize(word: string): string[] {
    const pieces: string[] = [];
    for (let i = 0; i < word.length; i += STUB_PIECE_LEN) {
      pieces.push(word.slice(i, i + STUB_PIECE_LEN));
    }
    return pieces.length ? pieces : [word];
  }

  score(pieces: string[]): PieceScores {
    const lp = -Math.log(this.vocabSize);
    return { logProbs: pieces.map(() => lp), eotLogProb: lp };
  }
}

/** Parse a --model/-env selector. Only the stub family is built in; other
 * selectors name a module exporting a CausalLM factory. */
export async function loadModel(selector: string): Promise<CausalLM> {
  if (selector.startsWith("stub")) {
    const size = selector.includes(":") ? Number(selector.split(":")[1]) : STUB_VOCAB;
    return new StubUniformLM(size);
  }
  if (selector.startsWith("module:")) {
    const path = selector.slice("module:".length);
    const mod = await import(path);
    if (typeof mod.createModel !== "function") {
      throw new Error(`module ${path} does not export createModel()`);
    }
    return mod.createModel();
  }
  throw new Error(`unknown model selector ${selector} (use stub[:N] or module:<path>)`);
}
