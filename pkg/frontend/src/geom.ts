/**
 * Client-side mirror of the server's construction kernel.
 *
 * The formulas and their operation order match the server exactly, so an
 * optimistically re-evaluated figure agrees with what the server would
 * compute; the server stays authoritative through op sequencing.
 */

export const EPS = 1e-9;

export interface Point {
  kind: "point";
  x: number;
  y: number;
}

/** a*x + b*y + c = 0, a^2+b^2 = 1, a > 0 or (a = 0, b > 0) */
export interface Line {
  kind: "line";
  a: number;
  b: number;
  c: number;
}

export interface Circle {
  kind: "circle";
  cx: number;
  cy: number;
  r: number;
}

export type GeomObject = Point | Line | Circle;

export type ErrorKind =
  | "ParallelLines"
  | "CoincidentPoints"
  | "NoIntersection"
  | "DegenerateAngle"
  | "NonFinite";

export class Degeneracy extends Error {
  constructor(
    public errorKind: ErrorKind,
    message: string,
  ) {
    super(message);
  }
}

export class EvalError_ extends Degeneracy {
  constructor(
    public failingStep: string,
    errorKind: ErrorKind,
    message: string,
  ) {
    super(errorKind, message);
  }
}

export const point = (x: number, y: number): Point => ({ kind: "point", x, y });

export function dist(p: Point, q: Point): number {
  const dx = q.x - p.x;
  const dy = q.y - p.y;
  return Math.sqrt(dx * dx + dy * dy);
}

export function lineEval(l: Line, p: Point): number {
  return l.a * p.x + l.b * p.y + l.c;
}

export function makeLine(a: number, b: number, c: number): Line {
  const norm = Math.sqrt(a * a + b * b);
  if (norm < EPS) throw new Degeneracy("CoincidentPoints", "line has no direction");
  a /= norm;
  b /= norm;
  c /= norm;
  if (a < 0 || (a === 0 && b < 0)) {
    a = -a;
    b = -b;
    c = -c;
  }
  return { kind: "line", a: a + 0, b: b + 0, c: c + 0 };
}

export function lineThrough(p: Point, q: Point): Line {
  if (dist(p, q) < EPS) throw new Degeneracy("CoincidentPoints", "points coincide");
  const dx = q.x - p.x;
  const dy = q.y - p.y;
  return makeLine(-dy, dx, -(-dy * p.x + dx * p.y));
}

export function midpoint(p: Point, q: Point): Point {
  return point((p.x + q.x) / 2, (p.y + q.y) / 2);
}

export function perpBisector(p: Point, q: Point): Line {
  if (dist(p, q) < EPS) throw new Degeneracy("CoincidentPoints", "points coincide");
  const m = midpoint(p, q);
  const a = q.x - p.x;
  const b = q.y - p.y;
  return makeLine(a, b, -(a * m.x + b * m.y));
}

export function angleBisector(a: Point, v: Point, b: Point): Line {
  const la = dist(v, a);
  const lb = dist(v, b);
  if (la < EPS || lb < EPS) {
    throw new Degeneracy("DegenerateAngle", "an arm of the angle has zero length");
  }
  const ux = (a.x - v.x) / la;
  const uy = (a.y - v.y) / la;
  const wx = (b.x - v.x) / lb;
  const wy = (b.y - v.y) / lb;
  const sx = ux + wx;
  const sy = uy + wy;
  if (Math.sqrt(sx * sx + sy * sy) < EPS) {
    throw new Degeneracy("DegenerateAngle", "straight angle has no internal bisector");
  }
  return makeLine(-sy, sx, -(-sy * v.x + sx * v.y));
}

export function perpThrough(p: Point, line: Line): Line {
  let a = -line.b;
  let b = line.a;
  if (a < 0 || (a === 0 && b < 0)) {
    a = -a;
    b = -b;
  }
  return { kind: "line", a: a + 0, b: b + 0, c: -(a * p.x + b * p.y) + 0 };
}

export function parallelThrough(p: Point, line: Line): Line {
  return { kind: "line", a: line.a, b: line.b, c: -(line.a * p.x + line.b * p.y) + 0 };
}

export function intersectLL(l1: Line, l2: Line): Point {
  const det = l1.a * l2.b - l2.a * l1.b;
  if (Math.abs(det) < EPS) throw new Degeneracy("ParallelLines", "lines are parallel");
  return point((l1.b * l2.c - l2.b * l1.c) / det, (l2.a * l1.c - l1.a * l2.c) / det);
}

export function circleCenterThrough(center: Point, through: Point): Circle {
  const r = dist(center, through);
  if (r < EPS) throw new Degeneracy("CoincidentPoints", "circle through its own center");
  return { kind: "circle", cx: center.x, cy: center.y, r };
}

export function footOnLine(p: Point, line: Line): Point {
  const d = lineEval(line, p);
  return point(p.x - d * line.a, p.y - d * line.b);
}

export function intersectLC(line: Line, circle: Circle, branch: 1 | 2): Point {
  const d = line.a * circle.cx + line.b * circle.cy + line.c;
  if (Math.abs(d) > circle.r + EPS) {
    throw new Degeneracy("NoIntersection", "line misses the circle");
  }
  const fx = circle.cx - d * line.a;
  const fy = circle.cy - d * line.b;
  const hSq = circle.r * circle.r - d * d;
  const h = hSq > 0 ? Math.sqrt(hSq) : 0;
  if (branch === 1) return point(fx - h * line.b, fy + h * line.a);
  return point(fx + h * line.b, fy - h * line.a);
}

export function intersectCC(c1: Circle, c2: Circle, branch: 1 | 2): Point {
  const a = 2 * (c2.cx - c1.cx);
  const b = 2 * (c2.cy - c1.cy);
  const k1 = c1.cx * c1.cx + c1.cy * c1.cy - c1.r * c1.r;
  const k2 = c2.cx * c2.cx + c2.cy * c2.cy - c2.r * c2.r;
  if (Math.sqrt(a * a + b * b) < EPS) {
    throw new Degeneracy("NoIntersection", "concentric circles do not intersect");
  }
  try {
    return intersectLC(makeLine(a, b, k1 - k2), c1, branch);
  } catch (err) {
    if (err instanceof Degeneracy && err.errorKind === "NoIntersection") {
      throw new Degeneracy("NoIntersection", "circles do not intersect");
    }
    throw err;
  }
}

// ---- construction steps ----------------------------------------------------

export type StepArgs = (string | number)[];

export interface Step {
  name: string;
  keyword: string;
  args: StepArgs;
}

export type Construction = Step[];

export interface Figure {
  objects: Map<string, GeomObject>;
}

/** keyword -> [result kind, argument spec] ('n' number, 'i' id, 'b' branch) */
export const KEYWORDS: Record<string, { result: "point" | "line" | "circle"; spec: string }> = {
  free: { result: "point", spec: "nn" },
  line: { result: "line", spec: "ii" },
  mid: { result: "point", spec: "ii" },
  perpbis: { result: "line", spec: "ii" },
  bisector: { result: "line", spec: "iii" },
  perp: { result: "line", spec: "ii" },
  parallel: { result: "line", spec: "ii" },
  xll: { result: "point", spec: "ii" },
  circle: { result: "circle", spec: "ii" },
  xlc: { result: "point", spec: "iib" },
  xcc: { result: "point", spec: "iib" },
  foot: { result: "point", spec: "ii" },
};

function evalStep(step: Step, env: Map<string, GeomObject>): GeomObject {
  const pt = (i: number) => env.get(step.args[i] as string) as Point;
  const ln = (i: number) => env.get(step.args[i] as string) as Line;
  const ci = (i: number) => env.get(step.args[i] as string) as Circle;
  switch (step.keyword) {
    case "free":
      return point(step.args[0] as number, step.args[1] as number);
    case "line":
      return lineThrough(pt(0), pt(1));
    case "mid":
      return midpoint(pt(0), pt(1));
    case "perpbis":
      return perpBisector(pt(0), pt(1));
    case "bisector":
      return angleBisector(pt(0), pt(1), pt(2));
    case "perp":
      return perpThrough(pt(0), ln(1));
    case "parallel":
      return parallelThrough(pt(0), ln(1));
    case "xll":
      return intersectLL(ln(0), ln(1));
    case "circle":
      return circleCenterThrough(pt(0), pt(1));
    case "xlc":
      return intersectLC(ln(0), ci(1), step.args[2] as 1 | 2);
    case "xcc":
      return intersectCC(ci(0), ci(1), step.args[2] as 1 | 2);
    case "foot":
      return footOnLine(pt(0), ln(1));
    default:
      throw new Error(`unknown keyword ${step.keyword}`);
  }
}

export function evaluate(
  construction: Construction,
  overrides?: Map<string, [number, number]>,
): Figure {
  const env = new Map<string, GeomObject>();
  for (const step of construction) {
    let effective = step;
    if (step.keyword === "free" && overrides?.has(step.name)) {
      const [x, y] = overrides.get(step.name)!;
      effective = { ...step, args: [x, y] };
    }
    let value: GeomObject;
    try {
      value = evalStep(effective, env);
    } catch (err) {
      if (err instanceof Degeneracy) {
        throw new EvalError_(step.name, err.errorKind, err.message);
      }
      throw err;
    }
    env.set(step.name, value);
  }
  return { objects: env };
}

export function freeNames(construction: Construction): string[] {
  return construction.filter((s) => s.keyword === "free").map((s) => s.name);
}

export function isFreePoint(construction: Construction, name: string): boolean {
  return construction.some((s) => s.name === name && s.keyword === "free");
}

export function moveFree(construction: Construction, name: string, x: number, y: number): Construction {
  return construction.map((s) => (s.name === name && s.keyword === "free" ? { ...s, args: [x, y] } : s));
}
