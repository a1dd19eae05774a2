import { describe, expect, it } from "vitest";
import { evaluate } from "../src/geom.js";
import { parse } from "../src/wgl.js";
import {
  Canvas2DLike,
  clampZoom,
  defaultView,
  pickPoint,
  render,
  screenToWorld,
  worldToScreen,
} from "../src/render.js";
import figures from "./fixtures/figures.json";

const INCENTER: string = (figures as any).incenter.source;

/** Recording fake of the 2D context. */
function recorder(): Canvas2DLike & { calls: string[] } {
  const calls: string[] = [];
  const log =
    (name: string) =>
    (...args: unknown[]) => {
      calls.push(name + (args.length ? `(${args.map(String).join(",")})` : ""));
    };
  return {
    calls,
    clearRect: log("clearRect"),
    beginPath: log("beginPath"),
    moveTo: log("moveTo"),
    lineTo: log("lineTo"),
    arc: log("arc"),
    stroke: log("stroke"),
    fill: log("fill"),
    fillRect: log("fillRect"),
    fillText: log("fillText"),
    strokeStyle: "",
    fillStyle: "",
    lineWidth: 1,
    font: "",
  };
}

describe("canvas rendering", () => {
  it("draws the whole incenter figure", () => {
    const fig = evaluate(parse(INCENTER));
    const ctx = recorder();
    const stats = render(ctx, 900, 560, fig, defaultView());
    expect(stats.points).toBe(5); // A B C I F
    expect(stats.lines).toBe(6); // three sides, three bisectors
    expect(stats.circles).toBe(1); // the incircle
    expect(stats.banner).toBeNull();
    expect(ctx.calls.filter((c) => c.startsWith("fillText")).length).toBe(5);
  });

  it("renders an empty construction as a bare grid", () => {
    const ctx = recorder();
    const stats = render(ctx, 900, 560, evaluate([]), defaultView());
    expect(stats.points + stats.lines + stats.circles).toBe(0);
    expect(ctx.calls.some((c) => c.startsWith("clearRect"))).toBe(true);
    expect(ctx.calls.some((c) => c.startsWith("stroke"))).toBe(true); // grid lines
  });

  it("keeps the last frame and shows a banner for degenerate states", () => {
    const fig = evaluate(parse(INCENTER));
    const ctx = recorder();
    const stats = render(ctx, 900, 560, fig, defaultView(), "step 'X' is degenerate here");
    expect(stats.banner).toContain("degenerate");
    expect(stats.lines).toBe(6); // previous figure still drawn under the banner
    expect(ctx.calls.some((c) => c.startsWith("fillRect"))).toBe(true);
  });

  it("doubles every screen distance at double zoom", () => {
    const view = defaultView();
    const a1 = worldToScreen(view, 900, 560, 0, 0);
    const b1 = worldToScreen(view, 900, 560, 3, 4);
    const d1 = Math.hypot(b1.x - a1.x, b1.y - a1.y);
    const zoomed = { ...view, zoom: view.zoom * 2 };
    const a2 = worldToScreen(zoomed, 900, 560, 0, 0);
    const b2 = worldToScreen(zoomed, 900, 560, 3, 4);
    const d2 = Math.hypot(b2.x - a2.x, b2.y - a2.y);
    expect(d2).toBeCloseTo(2 * d1, 9);
  });

  it("screen and world transforms are inverse to each other", () => {
    const view = { ...defaultView(), panX: 2.5, panY: -1.25, zoom: 33 };
    const s = worldToScreen(view, 900, 560, 1.75, -0.5);
    const w = screenToWorld(view, 900, 560, s.x, s.y);
    expect(w.x).toBeCloseTo(1.75, 12);
    expect(w.y).toBeCloseTo(-0.5, 12);
  });

  it("clamps zoom to the allowed range", () => {
    expect(clampZoom(1000)).toBe(100);
    expect(clampZoom(0.0001)).toBe(0.01);
    expect(clampZoom(5)).toBe(5);
  });

  it("picks the nearest point under the cursor", () => {
    const fig = evaluate(parse(INCENTER));
    const view = defaultView();
    const target = worldToScreen(view, 900, 560, 0, 3); // C
    expect(pickPoint(fig, view, 900, 560, target.x + 3, target.y - 2)).toBe("C");
    expect(pickPoint(fig, view, 900, 560, 5, 5)).toBeNull();
  });
});
