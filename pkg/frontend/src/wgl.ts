/**
 * Parser and canonical serializer for the `.wgl` text format, mirroring the
 * server's grammar so the client can round-trip server bytes unchanged.
 */

import { Construction, KEYWORDS, Step, StepArgs } from "./geom.js";
import { pyFloatRepr } from "./pyfloat.js";

export const HEADER = "wgl 1";

const ID_RE = /^[A-Za-z][A-Za-z0-9_]*$/;
const NUMBER_RE = /^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$/;
const MAX_ID_LEN = 32;
const MAX_COORD = 1e9;

export class WglParseError extends Error {
  constructor(
    public errorKind: string,
    public line: number,
    public column: number,
    message: string,
  ) {
    super(`${line}:${column}: ${message}`);
  }
}

function tokens(line: string): [string, number][] {
  const hashAt = line.indexOf("#");
  if (hashAt >= 0) line = line.slice(0, hashAt);
  const out: [string, number][] = [];
  let col = 0;
  while (col < line.length) {
    if (line[col] === " " || line[col] === "\t") {
      col++;
      continue;
    }
    const start = col;
    while (col < line.length && line[col] !== " " && line[col] !== "\t") col++;
    out.push([line.slice(start, col), start + 1]);
  }
  return out;
}

function parseId(tok: string, lineno: number, col: number): string {
  if (!ID_RE.test(tok) || tok.length > MAX_ID_LEN) {
    throw new WglParseError("BadToken", lineno, col, `bad identifier '${tok}'`);
  }
  return tok;
}

function parseNumber(tok: string, lineno: number, col: number): number {
  if (!NUMBER_RE.test(tok)) {
    throw new WglParseError("BadNumber", lineno, col, `bad number '${tok}'`);
  }
  const value = Number(tok);
  if (!Number.isFinite(value) || Math.abs(value) > MAX_COORD) {
    throw new WglParseError("BadNumber", lineno, col, `coordinate '${tok}' out of range`);
  }
  return value;
}

export function parse(source: string): Construction {
  const lines = source.split("\n");
  const steps: Step[] = [];
  const known = new Map<string, string>();
  let sawHeader = false;
  for (let i = 0; i < lines.length; i++) {
    const lineno = i + 1;
    let raw = lines[i];
    if (raw.endsWith("\r")) raw = raw.slice(0, -1);
    const toks = tokens(raw);
    if (!sawHeader) {
      if (toks.length === 0) continue;
      if (toks.map(([t]) => t).join(" ") !== HEADER) {
        throw new WglParseError("BadHeader", lineno, toks[0][1], `expected header '${HEADER}'`);
      }
      sawHeader = true;
      continue;
    }
    if (toks.length === 0) continue;
    const [keyword, kwCol] = toks[0];
    const table = KEYWORDS[keyword];
    if (!table) {
      throw new WglParseError("UnknownKeyword", lineno, kwCol, `unknown keyword '${keyword}'`);
    }
    const want = 1 + table.spec.length;
    if (toks.length - 1 !== want) {
      throw new WglParseError(
        "ArityError",
        lineno,
        kwCol,
        `'${keyword}' takes ${want} arguments, got ${toks.length - 1}`,
      );
    }
    const [nameTok, nameCol] = toks[1];
    const name = parseId(nameTok, lineno, nameCol);
    if (known.has(name)) {
      throw new WglParseError("DuplicateId", lineno, nameCol, `duplicate id '${name}'`);
    }
    const args: StepArgs = [];
    const argKinds = argKindList(keyword);
    let refIndex = 0;
    for (let k = 0; k < table.spec.length; k++) {
      const [tok, col] = toks[2 + k];
      const spec = table.spec[k];
      if (spec === "n") {
        args.push(parseNumber(tok, lineno, col));
      } else if (spec === "b") {
        if (tok !== "1" && tok !== "2") {
          throw new WglParseError("BadToken", lineno, col, `branch must be 1 or 2, got '${tok}'`);
        }
        args.push(Number(tok));
      } else {
        const ref = parseId(tok, lineno, col);
        if (!known.has(ref)) {
          throw new WglParseError("ForwardReference", lineno, col, `'${ref}' is not defined yet`);
        }
        const expected = argKinds[refIndex];
        if (known.get(ref) !== expected) {
          throw new WglParseError(
            "KindMismatch",
            lineno,
            col,
            `'${ref}' is a ${known.get(ref)}, expected a ${expected}`,
          );
        }
        args.push(ref);
        refIndex++;
      }
    }
    steps.push({ name, keyword, args });
    known.set(name, table.result);
  }
  if (!sawHeader) {
    throw new WglParseError("BadHeader", 1, 1, `missing header '${HEADER}'`);
  }
  return steps;
}

function argKindList(keyword: string): string[] {
  switch (keyword) {
    case "line":
    case "mid":
    case "perpbis":
    case "circle":
      return ["point", "point"];
    case "bisector":
      return ["point", "point", "point"];
    case "perp":
    case "parallel":
    case "foot":
      return ["point", "line"];
    case "xll":
      return ["line", "line"];
    case "xlc":
      return ["line", "circle"];
    case "xcc":
      return ["circle", "circle"];
    default:
      return [];
  }
}

export function serializeStep(step: Step): string {
  const parts = [step.keyword, step.name];
  for (const arg of step.args) {
    parts.push(typeof arg === "number" && step.keyword === "free" ? pyFloatRepr(arg) : String(arg));
  }
  return parts.join(" ");
}

export function serialize(construction: Construction): string {
  const lines = [HEADER, ...construction.map(serializeStep)];
  return lines.join("\n") + "\n";
}
