/**
 * Dragging a free point: re-evaluate the local figure on every frame for
 * fluid feedback, but coalesce the move ops sent to the server to at most
 * 30 per second, each with the next consecutive sequence number.
 */

import { isFreePoint } from "./geom.js";
import { ClientWorkbench } from "./protocol.js";

export const MAX_OPS_PER_SECOND = 30;
const MIN_SEND_GAP_MS = 1000 / MAX_OPS_PER_SECOND;

export class DragController {
  private active: string | null = null;
  private lastSentAt = -Infinity;
  private lastPosition: [number, number] | null = null;
  private unsent = false;
  /** called when a drag is refused (constructed point or no edit rights) */
  onRefused: ((reason: string) => void) | null = null;

  constructor(private workbench: ClientWorkbench) {}

  get dragging(): string | null {
    return this.active;
  }

  begin(pointId: string): boolean {
    if (!isFreePoint(this.workbench.localConstruction, pointId)) {
      this.onRefused?.("only free points can be dragged");
      return false;
    }
    if (!this.workbench.canEdit) {
      this.onRefused?.("view-only access");
      return false;
    }
    this.active = pointId;
    this.lastSentAt = -Infinity;
    this.lastPosition = null;
    this.unsent = false;
    return true;
  }

  /**
   * One pointer-move frame at `nowMs`. Returns the optimistic figure state
   * for rendering; a send happens only if the rate budget allows.
   */
  move(x: number, y: number, nowMs: number) {
    if (this.active === null) return null;
    this.lastPosition = [x, y];
    this.unsent = true;
    if (nowMs - this.lastSentAt >= MIN_SEND_GAP_MS) {
      this.flush(nowMs);
    }
    // optimistic per-frame re-evaluation regardless of send coalescing
    const preview = this.workbench.localConstruction.map((s) =>
      s.name === this.active && s.keyword === "free" ? { ...s, args: [x, y] } : s,
    );
    return preview;
  }

  private flush(nowMs: number): void {
    if (!this.unsent || this.lastPosition === null || this.active === null) return;
    const [x, y] = this.lastPosition;
    if (this.workbench.sendOp({ kind: "move", id: this.active, x, y })) {
      this.lastSentAt = nowMs;
      this.unsent = false;
    }
  }

  end(nowMs: number): void {
    if (this.active === null) return;
    // the final position always goes out so server and client converge
    this.flush(nowMs + MIN_SEND_GAP_MS);
    this.active = null;
  }
}
