/**
 * Word-to-subword alignment.
 *
 * Each input token maps to a contiguous run of piece indices; the pieces
 * partition the tokenized sentence and must concatenate back to the token's
 * surface form, otherwise the sentence is unalignable and the caller
 * reports a per-sentence failure.
 */

import type { CausalLM } from "./model.js";

export interface WordSpan {
  token: string;
  /** piece index range, half-open */
  start: number;
  end: number;
}

export interface WordAlignment {
  pieces: string[];
  spans: WordSpan[];
}

export class AlignmentError extends Error {}

export function alignWords(model: CausalLM, tokens: string[]): WordAlignment {
  const pieces: string[] = [];
  const spans: WordSpan[] = [];
  for (const token of tokens) {
    const wordPieces = model.tokenize(token);
    if (wordPieces.length === 0) {
      throw new AlignmentError(`token ${JSON.stringify(token)} produced no pieces`);
    }
    if (wordPieces.join("") !== token) {
      throw new AlignmentError(
        `token ${JSON.stringify(token)} is unalignable: pieces ` +
          `${JSON.stringify(wordPieces)} do not reconstruct it`,
      );
    }
    spans.push({ token, start: pieces.length, end: pieces.length + wordPieces.length });
    pieces.push(...wordPieces);
  }
  return { pieces, spans };
}
