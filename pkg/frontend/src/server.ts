/**
 * Protocol server: one response line per request line, in order; malformed
 * input yields an error response and the loop continues. Alignment failures
 * are per-sentence errors, not crashes.
 */

import * as net from "node:net";
import * as readline from "node:readline";

import { AlignmentError } from "./alignment.js";
import type { CausalLM } from "./model.js";
import { wordSurprisalsFromCausalLM } from "./surprisal.js";
import { WireError, decodeRequest, encodeResponse } from "./wire.js";

export class LineServer {
  constructor(private readonly model: CausalLM) {}

  handleLine(line: string): string | null {
    const trimmed = line.trim();
    if (trimmed === "") return null;
    let req;
    try {
      req = decodeRequest(trimmed);
    } catch (err) {
      if (err instanceof WireError) return encodeResponse(null, null, null, "parse");
      throw err;
    }
    try {
      const { surprisals, eos } = wordSurprisalsFromCausalLM(this.model, req.tokens);
      return encodeResponse(req.id, surprisals, req.wantEos ? eos : null);
    } catch (err) {
      if (err instanceof AlignmentError) {
        return encodeResponse(req.id, null, null, err.message);
      }
      return encodeResponse(req.id, null, null, `scorer error: ${err}`);
    }
  }

  serveStdio(): Promise<void> {
    return new Promise((resolve) => {
      const rl = readline.createInterface({ input: process.stdin, terminal: false });
      rl.on("line", (line) => {
        const out = this.handleLine(line);
        if (out !== null) process.stdout.write(out + "\n");
      });
      rl.on("close", resolve);
    });
  }

  serveTcp(host: string, port: number, onListen?: (port: number) => void): net.Server {
    const server = net.createServer((socket) => {
      const rl = readline.createInterface({ input: socket, terminal: false });
      rl.on("line", (line) => {
        const out = this.handleLine(line);
        if (out !== null) socket.write(out + "\n");
      });
      socket.on("error", () => socket.destroy());
    });
    server.listen(port, host, () => {
      const addr = server.address();
      if (onListen && addr && typeof addr === "object") onListen(addr.port);
    });
    return server;
  }
}
