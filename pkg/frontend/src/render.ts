/**
 * Canvas renderer: points as labeled dots, infinite lines clipped to the
 * viewport, circles as full arcs, the selection highlighted. A degenerate
 * construction keeps the last good frame and shows an error banner.
 */

import { Circle, Figure, GeomObject, Line, Point } from "./geom.js";

export type Tool =
  | "Select"
  | "AddFreePoint"
  | "LineTool"
  | "CircleTool"
  | "BisectorTool"
  | "IntersectTool";

export interface ViewState {
  panX: number;
  panY: number;
  zoom: number; // clamped to [0.01, 100]
  selection: string | null;
  tool: Tool;
}

export function defaultView(): ViewState {
  return { panX: 0, panY: 0, zoom: 40, selection: null, tool: "Select" };
}

export function clampZoom(zoom: number): number {
  return Math.min(100, Math.max(0.01, zoom));
}

export function worldToScreen(view: ViewState, w: number, h: number, x: number, y: number) {
  return {
    x: w / 2 + (x - view.panX) * view.zoom,
    y: h / 2 - (y - view.panY) * view.zoom,
  };
}

export function screenToWorld(view: ViewState, w: number, h: number, sx: number, sy: number) {
  return {
    x: view.panX + (sx - w / 2) / view.zoom,
    y: view.panY - (sy - h / 2) / view.zoom,
  };
}

/** The 2D-context subset the renderer uses; tests substitute a recorder. */
export interface Canvas2DLike {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  stroke(): void;
  fill(): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  fillStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
}

function visibleWorldRect(view: ViewState, w: number, h: number) {
  const a = screenToWorld(view, w, h, 0, 0);
  const b = screenToWorld(view, w, h, w, h);
  return {
    xmin: Math.min(a.x, b.x),
    xmax: Math.max(a.x, b.x),
    ymin: Math.min(a.y, b.y),
    ymax: Math.max(a.y, b.y),
  };
}

function clipLine(
  line: Line,
  box: { xmin: number; xmax: number; ymin: number; ymax: number },
): [Point, Point] | null {
  const px = -line.a * line.c;
  const py = -line.b * line.c;
  const dx = -line.b;
  const dy = line.a;
  let t0 = -1e18;
  let t1 = 1e18;
  const edges: [number, number][] = [
    [-dx, px - box.xmin],
    [dx, box.xmax - px],
    [-dy, py - box.ymin],
    [dy, box.ymax - py],
  ];
  for (const [p, q] of edges) {
    if (p === 0) {
      if (q < 0) return null;
      continue;
    }
    const t = q / p;
    if (p < 0) t0 = Math.max(t0, t);
    else t1 = Math.min(t1, t);
  }
  if (t0 > t1) return null;
  return [
    { kind: "point", x: px + t0 * dx, y: py + t0 * dy },
    { kind: "point", x: px + t1 * dx, y: py + t1 * dy },
  ];
}

const COLORS = { line: "#3b4d8f", circle: "#2e7d4f", point: "#b03030", selected: "#e8a000" };

export interface RenderStats {
  points: number;
  lines: number;
  circles: number;
  banner: string | null;
}

export function render(
  ctx: Canvas2DLike,
  width: number,
  height: number,
  figure: Figure | null,
  view: ViewState,
  errorBanner: string | null = null,
): RenderStats {
  ctx.clearRect(0, 0, width, height);
  drawGrid(ctx, width, height, view);
  const stats: RenderStats = { points: 0, lines: 0, circles: 0, banner: null };
  if (figure) {
    const box = visibleWorldRect(view, width, height);
    for (const [name, obj] of figure.objects) {
      drawObject(ctx, width, height, view, name, obj, box, stats);
    }
  }
  if (errorBanner) {
    stats.banner = errorBanner;
    ctx.fillStyle = "#c0392b";
    ctx.fillRect(0, 0, width, 28);
    ctx.fillStyle = "#ffffff";
    ctx.font = "14px sans-serif";
    ctx.fillText(errorBanner, 8, 19);
  }
  return stats;
}

function drawGrid(ctx: Canvas2DLike, w: number, h: number, view: ViewState): void {
  ctx.strokeStyle = "#e3e6ee";
  ctx.lineWidth = 1;
  const box = visibleWorldRect(view, w, h);
  const stepWorld = gridStep(view.zoom);
  for (let gx = Math.ceil(box.xmin / stepWorld) * stepWorld; gx <= box.xmax; gx += stepWorld) {
    const s = worldToScreen(view, w, h, gx, 0);
    ctx.beginPath();
    ctx.moveTo(s.x, 0);
    ctx.lineTo(s.x, h);
    ctx.stroke();
  }
  for (let gy = Math.ceil(box.ymin / stepWorld) * stepWorld; gy <= box.ymax; gy += stepWorld) {
    const s = worldToScreen(view, w, h, 0, gy);
    ctx.beginPath();
    ctx.moveTo(0, s.y);
    ctx.lineTo(w, s.y);
    ctx.stroke();
  }
}

function gridStep(zoom: number): number {
  let step = 1;
  while (step * zoom < 24) step *= 2;
  while (step * zoom > 120) step /= 2;
  return step;
}

function drawObject(
  ctx: Canvas2DLike,
  w: number,
  h: number,
  view: ViewState,
  name: string,
  obj: GeomObject,
  box: { xmin: number; xmax: number; ymin: number; ymax: number },
  stats: RenderStats,
): void {
  const selected = view.selection === name;
  if (obj.kind === "line") {
    const seg = clipLine(obj, box);
    if (!seg) return;
    const a = worldToScreen(view, w, h, seg[0].x, seg[0].y);
    const b = worldToScreen(view, w, h, seg[1].x, seg[1].y);
    ctx.strokeStyle = selected ? COLORS.selected : COLORS.line;
    ctx.lineWidth = selected ? 2.5 : 1.5;
    ctx.beginPath();
    ctx.moveTo(a.x, a.y);
    ctx.lineTo(b.x, b.y);
    ctx.stroke();
    stats.lines++;
  } else if (obj.kind === "circle") {
    const c = obj as Circle;
    const s = worldToScreen(view, w, h, c.cx, c.cy);
    ctx.strokeStyle = selected ? COLORS.selected : COLORS.circle;
    ctx.lineWidth = selected ? 2.5 : 1.5;
    ctx.beginPath();
    ctx.arc(s.x, s.y, c.r * view.zoom, 0, 2 * Math.PI);
    ctx.stroke();
    stats.circles++;
  } else {
    const p = obj as Point;
    const s = worldToScreen(view, w, h, p.x, p.y);
    ctx.fillStyle = selected ? COLORS.selected : COLORS.point;
    ctx.beginPath();
    ctx.arc(s.x, s.y, selected ? 5 : 3.5, 0, 2 * Math.PI);
    ctx.fill();
    ctx.font = "13px sans-serif";
    ctx.fillText(name, s.x + 7, s.y - 7);
    stats.points++;
  }
}

/** Nearest point object within `radiusPx` of a screen position, for picking. */
export function pickPoint(
  figure: Figure,
  view: ViewState,
  w: number,
  h: number,
  sx: number,
  sy: number,
  radiusPx = 10,
): string | null {
  let best: string | null = null;
  let bestDist = radiusPx;
  for (const [name, obj] of figure.objects) {
    if (obj.kind !== "point") continue;
    const s = worldToScreen(view, w, h, obj.x, obj.y);
    const d = Math.hypot(s.x - sx, s.y - sy);
    if (d <= bestDist) {
      best = name;
      bestDist = d;
    }
  }
  return best;
}
