import { describe, expect, it } from "vitest";

import {
  WireError,
  decodeRequest,
  encodeRequest,
  encodeResponse,
  formatBits,
  parseBits,
} from "../src/wire.js";

describe("number formatting", () => {
  it("writes integral values with one decimal", () => {
    expect(formatBits(5)).toBe("5.0");
    expect(formatBits(0)).toBe("0.0");
    expect(formatBits(20)).toBe("20.0");
  });

  it("writes infinity as the literal inf", () => {
    expect(formatBits(Infinity)).toBe("inf");
    expect(parseBits("inf")).toBe(Infinity);
  });

  it("round-trips non-integral values exactly", () => {
    for (const x of [0.1, 1.234567891234, Math.log2(3), 1e-7]) {
      expect(parseBits(Number(formatBits(x)))).toBe(x);
    }
  });
});

describe("records", () => {
  it("decodes requests", () => {
    const req = decodeRequest('{"id": 4, "tokens": ["a", "b"], "want_eos": true}');
    expect(req).toEqual({ id: 4, tokens: ["a", "b"], wantEos: true });
  });

  it("rejects malformed requests", () => {
    for (const bad of ["nope", "{}", '{"id": 1, "tokens": "x"}', '{"id": "x", "tokens": []}']) {
      expect(() => decodeRequest(bad)).toThrow(WireError);
    }
  });

  it("encodes responses with fixed key order", () => {
    expect(encodeResponse(1, [5, 10], 5)).toBe(
      '{"id": 1, "surprisals": [5.0, 10.0], "eos": 5.0, "status": "ok"}',
    );
    expect(encodeResponse(2, [5], null)).toBe(
      '{"id": 2, "surprisals": [5.0], "status": "ok"}',
    );
    expect(encodeResponse(null, null, null, "parse")).toBe(
      '{"status": "error", "message": "parse"}',
    );
  });

  it("encodes infinities inside arrays", () => {
    expect(encodeResponse(9, [Infinity], Infinity)).toBe(
      '{"id": 9, "surprisals": ["inf"], "eos": "inf", "status": "ok"}',
    );
  });

  it("request encoding matches the primary client's layout", () => {
    expect(encodeRequest(1, ["the", "doctor"], true)).toBe(
      '{"id": 1, "tokens": ["the", "doctor"], "want_eos": true}',
    );
  });
});
