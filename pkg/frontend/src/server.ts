/**
 * Reference value-function server speaking the stdio line protocol.
 *
 * One JSON object per line, UTF-8, strictly sequential:
 *
 *   -> {"op":"init","n":8}              <- {"ok":true}
 *   -> {"op":"eval","masks":["0110..."]} <- {"values":[...]} (same order/length)
 *   -> {"op":"shutdown"}                 process exits
 *
 * Mask strings are exactly n characters of '0'/'1'. A malformed line gets
 * an {"error": ...} reply and is remembered: shutdown then exits nonzero.
 *
 * Flags: --n <int> [--model linear|quadratic] [--x a,b,...] [--y a,b,...]
 */

import { createInterface } from "readline";
import { ServerConfig, defaultConfig, maskInput } from "./model";

interface InitMsg {
  op: "init";
  n: number;
}
interface EvalMsg {
  op: "eval";
  masks: string[];
}
interface ShutdownMsg {
  op: "shutdown";
}
type Request = InitMsg | EvalMsg | ShutdownMsg;

function parseVector(text: string, flag: string): number[] {
  const values = text.split(",").map((tok) => Number(tok.trim()));
  if (values.some((v) => !Number.isFinite(v))) {
    throw new Error(`${flag} must be a comma list of finite numbers`);
  }
  return values;
}

export function parseArgs(argv: string[]): ServerConfig {
  let n: number | undefined;
  let modelName: "linear" | "quadratic" = "linear";
  let x: number[] | undefined;
  let y: number[] | undefined;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      i += 1;
      if (i >= argv.length) throw new Error(`missing value for ${arg}`);
      return argv[i];
    };
    if (arg === "--n") n = Number(next());
    else if (arg === "--model") {
      const name = next();
      if (name !== "linear" && name !== "quadratic") {
        throw new Error(`unknown model ${name}`);
      }
      modelName = name;
    } else if (arg === "--x") x = parseVector(next(), "--x");
    else if (arg === "--y") y = parseVector(next(), "--y");
    else throw new Error(`unknown flag ${arg}`);
  }
  if (n === undefined || !Number.isInteger(n) || n < 2) {
    throw new Error("--n <players >= 2> is required");
  }
  return defaultConfig(n, modelName, x, y);
}

function validMask(mask: unknown, n: number): mask is string {
  return (
    typeof mask === "string" && mask.length === n && /^[01]+$/.test(mask)
  );
}

export function runServer(config: ServerConfig): void {
  const rl = createInterface({ input: process.stdin, terminal: false });
  let initialized = false;
  let sawError = false;

  const reply = (payload: unknown) => {
    process.stdout.write(JSON.stringify(payload) + "\n");
  };
  const fail = (message: string) => {
    sawError = true;
    reply({ error: message });
  };

  rl.on("line", (line) => {
    if (line.trim() === "") return;
    let msg: Request;
    try {
      msg = JSON.parse(line);
    } catch {
      fail("malformed JSON line");
      return;
    }
    if (typeof msg !== "object" || msg === null || !("op" in msg)) {
      fail("request is not an object with an op");
      return;
    }
    switch (msg.op) {
      case "init": {
        if (msg.n !== config.n) {
          fail(`server is configured for n=${config.n}, got init n=${msg.n}`);
          return;
        }
        initialized = true;
        reply({ ok: true });
        return;
      }
      case "eval": {
        if (!initialized) {
          fail("eval before init");
          return;
        }
        if (!Array.isArray(msg.masks)) {
          fail("eval needs a masks array");
          return;
        }
        const values: number[] = [];
        for (const mask of msg.masks) {
          if (!validMask(mask, config.n)) {
            fail(`bad mask ${JSON.stringify(mask)}: need ${config.n} chars of 0/1`);
            return;
          }
          values.push(config.model(maskInput(mask, config.x, config.y)));
        }
        reply({ values });
        return;
      }
      case "shutdown": {
        rl.close();
        process.exit(sawError ? 1 : 0);
      }
      // eslint-disable-next-line no-fallthrough
      default:
        fail(`unknown op ${JSON.stringify((msg as { op: unknown }).op)}`);
    }
  });
}

if (require.main === module) {
  try {
    runServer(parseArgs(process.argv.slice(2)));
  } catch (err) {
    process.stderr.write(`${(err as Error).message}\n`);
    process.exit(2);
  }
}
