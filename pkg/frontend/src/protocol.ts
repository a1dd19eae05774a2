/**
 * Live-channel client state: a confirmed mirror of a workbench plus a queue
 * of optimistic pending ops, with strict sequence bookkeeping and
 * snapshot-based resynchronization, per docs/protocol.md.
 */

import { Construction, Figure, EvalError_, evaluate, moveFree } from "./geom.js";
import { parse, serialize } from "./wgl.js";

export interface OpFramePayload {
  kind: "add" | "remove" | "move" | "replace";
  id?: string;
  step?: string;
  args?: (string | number)[];
  x?: number;
  y?: number;
  body?: string;
  [extra: string]: unknown;
}

export interface OpAppliedFrame extends OpFramePayload {
  t: "op_applied";
  target: string;
  op_seq: number;
  author: string;
}

export interface SnapshotFrame {
  t: "snapshot";
  target: string;
  seq: number;
  body: string;
  dirty: boolean;
}

export interface RejectFrame {
  t: "reject";
  target: string;
  code: string;
  message: string;
  expected_seq?: number;
}

export type SendFrame = (frame: Record<string, unknown>) => void;

export function applyPayload(construction: Construction, op: OpFramePayload): Construction {
  switch (op.kind) {
    case "add":
      return [...construction, { name: op.id!, keyword: op.step!, args: op.args ?? [] }];
    case "remove":
      return construction.filter((s) => s.name !== op.id);
    case "move":
      return moveFree(construction, op.id!, op.x!, op.y!);
    case "replace":
      return parse(op.body!);
    default:
      throw new Error(`unknown op kind ${(op as { kind?: string }).kind}`);
  }
}

export interface WorkbenchView {
  construction: Construction;
  seq: number;
  figure: Figure | null;
  /** failing step id when the current construction is degenerate */
  error: string | null;
}

/**
 * Mirrors one workbench. `confirmed*` is exactly what the server has
 * acknowledged; `pending` holds optimistic local ops already sent (or about
 * to be sent) with consecutive sequence numbers on top of it.
 */
export class ClientWorkbench {
  readonly owner: string;
  confirmed: Construction = [];
  confirmedSeq = 0;
  pending: { op: OpFramePayload; opSeq: number }[] = [];
  canEdit: boolean;
  private send: SendFrame;
  onChange: (() => void) | null = null;
  /** set when a reject or stream gap forces a snapshot round-trip */
  resyncing = false;

  constructor(owner: string, send: SendFrame, canEdit: boolean) {
    this.owner = owner;
    this.send = send;
    this.canEdit = canEdit;
  }

  get localConstruction(): Construction {
    let c = this.confirmed;
    for (const entry of this.pending) c = applyPayload(c, entry.op);
    return c;
  }

  get localSeq(): number {
    return this.pending.length ? this.pending[this.pending.length - 1].opSeq : this.confirmedSeq;
  }

  view(): WorkbenchView {
    const construction = this.localConstruction;
    try {
      return { construction, seq: this.localSeq, figure: evaluate(construction), error: null };
    } catch (err) {
      if (err instanceof EvalError_) {
        return { construction, seq: this.localSeq, figure: null, error: err.failingStep };
      }
      throw err;
    }
  }

  /** Queue one optimistic op and send it. No-op without edit rights. */
  sendOp(op: OpFramePayload): boolean {
    if (!this.canEdit || this.resyncing) return false;
    const opSeq = this.localSeq + 1;
    this.pending.push({ op, opSeq });
    this.send({ t: "op", target: this.owner, op_seq: opSeq, ...op });
    this.onChange?.();
    return true;
  }

  requestSnapshot(): void {
    this.resyncing = true;
    this.pending = [];
    this.send({ t: "snapshot", target: this.owner });
  }

  handleSnapshot(frame: SnapshotFrame): void {
    if (frame.target !== this.owner) return;
    this.confirmed = parse(frame.body);
    this.confirmedSeq = frame.seq;
    this.pending = [];
    this.resyncing = false;
    this.onChange?.();
  }

  handleOpApplied(frame: OpAppliedFrame): void {
    if (frame.target !== this.owner) return;
    if (frame.op_seq <= this.confirmedSeq) return; // stale echo around a snapshot
    if (frame.op_seq !== this.confirmedSeq + 1) {
      // gap in the stream: the contract says resynchronize
      this.requestSnapshot();
      return;
    }
    this.confirmed = applyPayload(this.confirmed, frame);
    this.confirmedSeq = frame.op_seq;
    if (this.pending.length && this.pending[0].opSeq === frame.op_seq) {
      this.pending.shift(); // our own op coming back confirmed
    } else if (this.pending.length) {
      // someone else's op interleaved with ours: our queue seqs are stale
      this.requestSnapshot();
      return;
    }
    this.onChange?.();
  }

  handleReject(frame: RejectFrame): void {
    if (frame.target !== this.owner) return;
    this.requestSnapshot();
  }

  /** Canonical text of the confirmed construction (mirror-fidelity checks). */
  confirmedText(): string {
    return serialize(this.confirmed);
  }
}
