import { describe, expect, it } from "vitest";

import { AlignmentError, alignWords } from "../src/alignment.js";
import { CausalLM, PieceScores, StubUniformLM } from "../src/model.js";
import { wordSurprisalsFromCausalLM } from "../src/surprisal.js";

const LN2 = Math.LN2;

/** Deterministic non-uniform model: each piece's log-probability depends on
 * its text and position, so chain-rule aggregation is genuinely exercised. */
class HashLM implements CausalLM {
  readonly name = "hash";
  readonly vocabSize = 64;

  tokenize(word: string): string[] {
    const pieces: string[] = [];
    for (let i = 0; i < word.length; i += 3) pieces.push(word.slice(i, i + 3));
    return pieces.length ? pieces : [word];
  }

  score(pieces: string[]): PieceScores {
    const lp = (text: string, pos: number): number => {
      let h = 2166136261 ^ pos;
      for (const ch of text) h = Math.imul(h ^ ch.charCodeAt(0), 16777619);
      return -(1 + (Math.abs(h) % 1000) / 250); // ln-prob in [-5, -1]
    };
    return {
      logProbs: pieces.map((p, i) => lp(p, i)),
      eotLogProb: lp("<eot>", pieces.length),
    };
  }
}

describe("alignment", () => {
  it("maps each token to a contiguous piece span that reconstructs it", () => {
    const model = new StubUniformLM();
    const { pieces, spans } = alignWords(model, ["the", "extraordinary", "dog"]);
    expect(spans.map((s) => s.token)).toEqual(["the", "extraordinary", "dog"]);
    for (const { token, start, end } of spans) {
      expect(pieces.slice(start, end).join("")).toBe(token);
    }
    expect(spans[1].end - spans[1].start).toBe(4); // 13 chars -> 4 pieces
    // spans partition the piece sequence
    expect(spans[0].start).toBe(0);
    for (let i = 1; i < spans.length; i++) {
      expect(spans[i].start).toBe(spans[i - 1].end);
    }
    expect(spans[spans.length - 1].end).toBe(pieces.length);
  });

  it("reports unalignable tokens", () => {
    const broken: CausalLM = {
      name: "broken",
      vocabSize: 2,
      tokenize: (w) => [w.slice(0, 1)],
      score: (p) => ({ logProbs: p.map(() => -1), eotLogProb: -1 }),
    };
    expect(() => alignWords(broken, ["word"])).toThrow(AlignmentError);
  });
});

describe("word surprisal", () => {
  it("gives log2(vocab) bits per piece under the uniform stub", () => {
    const model = new StubUniformLM(32);
    const { surprisals, eos } = wordSurprisalsFromCausalLM(model, ["a", "doctor"]);
    expect(surprisals[0]).toBeCloseTo(Math.log2(32), 6);
    expect(surprisals[1]).toBeCloseTo(2 * Math.log2(32), 6);
    expect(eos).toBeCloseTo(Math.log2(32), 6);
  });

  it("sums subword surprisals within each word", () => {
    const twoPiece: CausalLM = {
      name: "fixed",
      vocabSize: 4,
      tokenize: (w) => (w.length > 1 ? [w.slice(0, 1), w.slice(1)] : [w]),
      // 1.5 bits then 0.5 bits
      score: () => ({ logProbs: [-1.5 * LN2, -0.5 * LN2], eotLogProb: -LN2 }),
    };
    const { surprisals, eos } = wordSurprisalsFromCausalLM(twoPiece, ["ab"]);
    expect(surprisals[0]).toBeCloseTo(2.0, 9);
    expect(eos).toBeCloseTo(1.0, 9);
  });

  it("total word bits plus eos equals the model sentence NLL (alignment completeness)", () => {
    const model = new HashLM();
    const tokens = ["the", "woman", "brought", "the", "sandwich", "tripped", "."];
    const { surprisals, eos } = wordSurprisalsFromCausalLM(model, tokens);
    const { pieces } = alignWords(model, tokens);
    const { logProbs, eotLogProb } = model.score(pieces);
    const nllBits = logProbs.reduce((acc, lp) => acc - lp / LN2, 0) - eotLogProb / LN2;
    const total = surprisals.reduce((a, b) => a + b, 0) + eos;
    expect(Math.abs(total - nllBits)).toBeLessThan(1e-6);
  });
});
