/**
 * Application wiring: login, role pages, the canvas workbench and the live
 * session channel. All geometry and protocol logic lives in the tested
 * modules; this file only connects them to the DOM.
 */

import { Api } from "./api.js";
import { DragController } from "./drag.js";
import { Figure } from "./geom.js";
import { ClientWorkbench, OpAppliedFrame, RejectFrame, SnapshotFrame } from "./protocol.js";
import { defaultView, clampZoom, pickPoint, render, screenToWorld, ViewState } from "./render.js";
import { adminView, loginView, studentView, teacherView, RecordRow, UserRow } from "./views.js";

interface AppState {
  api: Api;
  user: UserRow | null;
  records: RecordRow[];
  scrapbook: RecordRow[];
  students: UserRow[];
  sessionId: string | null;
  socket: WebSocket | null;
  workbench: ClientWorkbench | null;
  watching: ClientWorkbench | null;
  view: ViewState;
  lastFigure: Figure | null;
  banner: string | null;
}

const state: AppState = {
  api: new Api(),
  user: null,
  records: [],
  scrapbook: [],
  students: [],
  sessionId: null,
  socket: null,
  workbench: null,
  watching: null,
  view: defaultView(),
  lastFigure: null,
  banner: null,
};

function root(): HTMLElement {
  return document.getElementById("app")!;
}

export async function start(): Promise<void> {
  root().innerHTML = loginView({
    title: "Sign in to the geometry laboratory",
    name: "Login name",
    password: "Password",
  });
  const form = document.getElementById("login-form") as HTMLFormElement;
  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    const data = new FormData(form);
    try {
      const result = await state.api.login(
        String(data.get("login") ?? ""),
        String(data.get("password") ?? ""),
      );
      state.user = result.user;
      await showRolePage();
    } catch (err) {
      const box = document.getElementById("login-error")!;
      box.textContent = err instanceof Error ? err.message : String(err);
      box.hidden = false;
    }
  });
}

async function refreshLists(): Promise<void> {
  state.records = (await state.api.listConstructions()).records;
  state.scrapbook = (await state.api.ownScrapbook()).records;
  if (state.user?.role !== "student") {
    state.students = (await state.api.listUsers()).users;
  }
}

async function showRolePage(): Promise<void> {
  await refreshLists();
  const role = state.user!.role;
  if (role === "admin") {
    root().innerHTML = adminView(state.students);
    wireAdmin();
    return;
  }
  if (role === "teacher") {
    const info = state.sessionId ? await state.api.sessionInfo(state.sessionId) : null;
    root().innerHTML = teacherView({
      records: state.records,
      students: state.students,
      sessionId: state.sessionId,
      workbenchSeqs: info?.workbenches ?? {},
      activeTab: state.watching?.owner ?? null,
    });
  } else {
    root().innerHTML = studentView({
      published: state.records,
      scrapbook: state.scrapbook,
      peers: [],
      sessionId: state.sessionId,
    });
  }
  wireActions();
  mountCanvas();
}

function wireAdmin(): void {
  const form = document.getElementById("create-teacher") as HTMLFormElement;
  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    const data = new FormData(form);
    await state.api.createUser(
      String(data.get("login_name")),
      String(data.get("display_name")),
      "teacher",
      String(data.get("password")),
    );
    state.students = (await state.api.listUsers()).users;
    root().innerHTML = adminView(state.students);
    wireAdmin();
  });
}

function wireActions(): void {
  root().addEventListener("click", async (event) => {
    const el = (event.target as HTMLElement).closest("[data-action]");
    if (!el) return;
    const action = el.getAttribute("data-action")!;
    if (action === "load") {
      const recordId = el.getAttribute("data-record")!;
      if (state.socket && state.workbench) {
        state.socket.send(JSON.stringify({ t: "load", record_id: recordId }));
      }
    } else if (action === "save") {
      state.socket?.send(JSON.stringify({ t: "save" }));
    } else if (action === "start-session") {
      const created = await state.api.createSession();
      state.sessionId = created.session_id;
      openChannel();
      await showRolePage();
    } else if (action === "end-session" && state.sessionId) {
      await state.api.endSession(state.sessionId);
      state.sessionId = null;
      state.socket?.close();
      await showRolePage();
    } else if (action === "broadcast" && state.workbench) {
      state.socket?.send(
        JSON.stringify({ t: "broadcast", body: state.workbench.confirmedText() }),
      );
    } else if (action === "watch") {
      const target = el.getAttribute("data-student")!;
      state.socket?.send(JSON.stringify({ t: "watch", target }));
    } else if (action === "scrapbook") {
      const studentId = el.getAttribute("data-student")!;
      state.scrapbook = (await state.api.studentScrapbook(studentId)).records;
      await showRolePage();
    }
  });
}

function openChannel(): void {
  if (!state.sessionId) return;
  const socket = new WebSocket(state.api.websocketUrl(state.sessionId));
  state.socket = socket;
  socket.addEventListener("message", (event) => {
    const frame = JSON.parse(event.data);
    handleFrame(frame);
  });
}

function send(frame: Record<string, unknown>): void {
  state.socket?.send(JSON.stringify(frame));
}

function handleFrame(frame: { t: string } & Record<string, unknown>): void {
  if (frame.t === "hello") {
    state.workbench = new ClientWorkbench(frame.user_id as string, send, true);
    state.workbench.onChange = requestDraw;
  } else if (frame.t === "snapshot") {
    const snap = frame as unknown as SnapshotFrame;
    if (state.workbench && snap.target === state.workbench.owner) {
      state.workbench.handleSnapshot(snap);
    } else if (state.user?.role === "teacher") {
      state.watching = new ClientWorkbench(snap.target, send, true);
      state.watching.onChange = requestDraw;
      state.watching.handleSnapshot(snap);
    }
  } else if (frame.t === "op_applied") {
    state.workbench?.handleOpApplied(frame as unknown as OpAppliedFrame);
    state.watching?.handleOpApplied(frame as unknown as OpAppliedFrame);
  } else if (frame.t === "reject") {
    state.workbench?.handleReject(frame as unknown as RejectFrame);
    state.watching?.handleReject(frame as unknown as RejectFrame);
  }
}

let drawQueued = false;

function requestDraw(): void {
  if (drawQueued) return;
  drawQueued = true;
  requestAnimationFrame(() => {
    drawQueued = false;
    drawCanvas();
  });
}

function activeBench(): ClientWorkbench | null {
  return state.watching ?? state.workbench;
}

function mountCanvas(): void {
  const slot = document.getElementById("canvas-slot");
  if (!slot) return;
  slot.innerHTML = `<canvas id="board" width="900" height="560"></canvas>`;
  const canvas = document.getElementById("board") as HTMLCanvasElement;
  const drag = () => (activeBench() ? new DragController(activeBench()!) : null);
  let controller: DragController | null = null;

  canvas.addEventListener("pointerdown", (event) => {
    const bench = activeBench();
    if (!bench) return;
    const view = bench.view();
    if (!view.figure) return;
    const name = pickPoint(view.figure, state.view, canvas.width, canvas.height, event.offsetX, event.offsetY);
    state.view.selection = name;
    if (name) {
      controller = drag();
      controller?.begin(name);
    }
    requestDraw();
  });
  canvas.addEventListener("pointermove", (event) => {
    if (!controller?.dragging) return;
    const world = screenToWorld(state.view, canvas.width, canvas.height, event.offsetX, event.offsetY);
    controller.move(world.x, world.y, performance.now());
    requestDraw();
  });
  canvas.addEventListener("pointerup", () => {
    controller?.end(performance.now());
    controller = null;
  });
  canvas.addEventListener("wheel", (event) => {
    event.preventDefault();
    state.view.zoom = clampZoom(state.view.zoom * (event.deltaY < 0 ? 1.1 : 0.9));
    requestDraw();
  });
  requestDraw();
}

function drawCanvas(): void {
  const canvas = document.getElementById("board") as HTMLCanvasElement | null;
  const bench = activeBench();
  if (!canvas || !bench) return;
  const ctx = canvas.getContext("2d")!;
  const view = bench.view();
  if (view.figure) {
    state.lastFigure = view.figure;
    state.banner = null;
  } else {
    state.banner = view.error ? `step '${view.error}' is degenerate here` : state.banner;
  }
  render(ctx, canvas.width, canvas.height, state.lastFigure, state.view, state.banner);
}
