/**
 * Adapter entry point.
 *
 *   node dist/main.js [--model stub:32] [--transport stdio|tcp]
 *                     [--host 127.0.0.1] [--port 9337]
 *
 * Environment: SYNSTATE_MODEL overrides the default model selector,
 * SYNSTATE_DEVICE is passed through to module-loaded models that care.
 */

import { loadModel } from "./model.js";
import { LineServer } from "./server.js";

function argValue(argv: string[], flag: string, fallback: string): string {
  const i = argv.indexOf(flag);
  return i >= 0 && i + 1 < argv.length ? argv[i + 1] : fallback;
}

async function main(): Promise<void> {
  const argv = process.argv.slice(2);
  const selector = argValue(argv, "--model", process.env.SYNSTATE_MODEL ?? "stub:32");
  const transport = argValue(argv, "--transport", "stdio");
  const model = await loadModel(selector);
  const server = new LineServer(model);
  if (transport === "stdio") {
    await server.serveStdio();
    return;
  }
  if (transport === "tcp") {
    const host = argValue(argv, "--host", "127.0.0.1");
    const port = Number(argValue(argv, "--port", "9337"));
    server.serveTcp(host, port, (p) => {
      console.error(`listening on ${host}:${p} (model ${model.name})`);
    });
    return;
  }
  throw new Error(`unknown transport ${transport}`);
}

main().catch((err) => {
  console.error(String(err));
  process.exitCode = 1;
});
