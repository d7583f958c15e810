/**
 * Word surprisal from a causal LM by chain-rule aggregation: a word's
 * surprisal is the sum of its subword surprisals (natural-log model output
 * converted to bits), so the per-sentence total including the end-of-text
 * event equals the model's sentence NLL exactly.
 */

import { alignWords } from "./alignment.js";
import type { CausalLM } from "./model.js";

const LN2 = Math.LN2;

export interface WordSurprisals {
  surprisals: number[];
  eos: number;
}

export function wordSurprisalsFromCausalLM(
  model: CausalLM,
  tokens: string[],
): WordSurprisals {
  const { pieces, spans } = alignWords(model, tokens);
  const { logProbs, eotLogProb } = model.score(pieces);
  if (logProbs.length !== pieces.length) {
    throw new Error(
      `model returned ${logProbs.length} piece scores for ${pieces.length} pieces`,
    );
  }
  const surprisals = spans.map(({ start, end }) => {
    let bits = 0;
    for (let i = start; i < end; i++) bits += -logProbs[i] / LN2;
    return bits;
  });
  return { surprisals, eos: -eotLogProb / LN2 };
}
