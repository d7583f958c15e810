/**
 * Line protocol records: one UTF-8 JSON object per line.
 *
 * Responses are built with a fixed key order and fixed number formatting so
 * independent implementations produce byte-identical transcripts: infinity
 * is the literal string "inf", integral values take a one-decimal form
 * ("5.0"), and everything else uses shortest round-trip decimal (which never
 * drops below the required 9 significant digits of precision).
 */

export interface ScoreRequest {
  id: number;
  tokens: string[];
  wantEos: boolean;
}

export class WireError extends Error {}

export function formatBits(x: number): string {
  if (!Number.isFinite(x)) {
    if (Number.isNaN(x)) throw new WireError("NaN surprisal");
    return "inf";
  }
  if (Number.isInteger(x) && Math.abs(x) < 1e15) return x.toFixed(1);
  return String(x);
}

function encodeBitsJson(x: number): string {
  const text = formatBits(x);
  return text === "inf" ? '"inf"' : text;
}

export function parseBits(v: unknown): number {
  if (v === "inf") return Infinity;
  if (typeof v === "number" && !Number.isNaN(v)) return v;
  if (typeof v === "string" && v !== "" && !Number.isNaN(Number(v))) {
    return Number(v);
  }
  throw new WireError(`bad surprisal value ${JSON.stringify(v)}`);
}

export function decodeRequest(line: string): ScoreRequest {
  let obj: unknown;
  try {
    obj = JSON.parse(line);
  } catch (err) {
    throw new WireError(`parse: ${err}`);
  }
  if (typeof obj !== "object" || obj === null) throw new WireError("parse: not a record");
  const rec = obj as Record<string, unknown>;
  const id = rec["id"];
  const tokens = rec["tokens"];
  if (typeof id !== "number" || !Number.isInteger(id)) {
    throw new WireError("parse: bad id");
  }
  if (!Array.isArray(tokens) || !tokens.every((t) => typeof t === "string")) {
    throw new WireError("parse: tokens must be a list of strings");
  }
  return { id, tokens: tokens as string[], wantEos: Boolean(rec["want_eos"]) };
}

export function encodeResponse(
  id: number | null,
  surprisals: number[] | null,
  eos: number | null,
  error: string | null = null,
): string {
  const parts: string[] = [];
  if (id !== null) parts.push(`"id": ${id}`);
  if (error === null) {
    const body = (surprisals ?? []).map(encodeBitsJson).join(", ");
    parts.push(`"surprisals": [${body}]`);
    if (eos !== null) parts.push(`"eos": ${encodeBitsJson(eos)}`);
    parts.push('"status": "ok"');
  } else {
    parts.push('"status": "error"');
    parts.push(`"message": ${JSON.stringify(error)}`);
  }
  return `{${parts.join(", ")}}`;
}

export function encodeRequest(id: number, tokens: string[], wantEos: boolean): string {
  const toks = tokens.map((t) => JSON.stringify(t)).join(", ");
  return `{"id": ${id}, "tokens": [${toks}], "want_eos": ${wantEos}}`;
}
