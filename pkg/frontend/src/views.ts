/**
 * Role-specific pages as plain HTML builders. Keeping them as pure
 * string-producing functions lets the headless tests assert on exactly what
 * each role gets to see without a DOM.
 */

export interface RecordRow {
  record_id: string;
  title: string;
  owner: string;
  flags: string;
  is_scrapbook: boolean;
  legacy_level: number | null;
  modified: string;
}

export interface UserRow {
  user_id: string;
  login_name: string;
  display_name: string;
  role: string;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function loginView(strings: { title: string; name: string; password: string }): string {
  return `
<section class="login">
  <h1>${escapeHtml(strings.title)}</h1>
  <form id="login-form">
    <label>${escapeHtml(strings.name)} <input name="login" autocomplete="username"></label>
    <label>${escapeHtml(strings.password)} <input name="password" type="password"></label>
    <button type="submit">OK</button>
    <p class="error" id="login-error" hidden></p>
  </form>
</section>`;
}

function recordTable(records: RecordRow[], actions: (r: RecordRow) => string): string {
  if (records.length === 0) return `<p class="empty">nothing here yet</p>`;
  const rows = records
    .map(
      (r) => `
    <tr data-record="${escapeHtml(r.record_id)}">
      <td>${escapeHtml(r.title)}</td>
      <td class="flags"><code>${escapeHtml(r.flags)}</code>${
        r.legacy_level !== null ? ` <small>level ${r.legacy_level}</small>` : ""
      }</td>
      <td>${escapeHtml(r.modified)}</td>
      <td>${actions(r)}</td>
    </tr>`,
    )
    .join("");
  return `
  <table class="records">
    <thead><tr><th>title</th><th>access</th><th>modified</th><th></th></tr></thead>
    <tbody>${rows}</tbody>
  </table>`;
}

export function adminView(teachers: UserRow[]): string {
  const rows = teachers
    .map(
      (t) =>
        `<li>${escapeHtml(t.display_name)} <code>${escapeHtml(t.login_name)}</code></li>`,
    )
    .join("");
  return `
<section class="admin">
  <h1>Teacher management</h1>
  <ul class="teachers">${rows}</ul>
  <form id="create-teacher">
    <h2>New teacher</h2>
    <input name="login_name" placeholder="login">
    <input name="display_name" placeholder="name">
    <input name="password" type="password" placeholder="password">
    <button type="submit">Create teacher</button>
  </form>
</section>`;
}

export interface TeacherViewData {
  records: RecordRow[];
  students: UserRow[];
  sessionId: string | null;
  /** student user_id -> workbench seq, when a session is live */
  workbenchSeqs: Record<string, number>;
  activeTab: string | null;
}

export function teacherView(data: TeacherViewData): string {
  const manager = recordTable(
    data.records,
    (r) => `
      <button data-action="load" data-record="${escapeHtml(r.record_id)}">load</button>
      <button data-action="perm" data-record="${escapeHtml(r.record_id)}">visibility</button>`,
  );
  const tabs = data.students
    .map(
      (s) => `
    <button class="student-tab${data.activeTab === s.user_id ? " active" : ""}"
            data-action="watch" data-student="${escapeHtml(s.user_id)}">
      ${escapeHtml(s.display_name)}${
        data.workbenchSeqs[s.user_id] !== undefined
          ? ` <small>#${data.workbenchSeqs[s.user_id]}</small>`
          : ""
      }
    </button>`,
    )
    .join("");
  const session = data.sessionId
    ? `
    <div class="session-bar" data-session="${escapeHtml(data.sessionId)}">
      <nav class="student-tabs">
        <button class="student-tab${data.activeTab === null ? " active" : ""}"
                data-action="watch-own">my workbench</button>
        ${tabs}
      </nav>
      <button id="broadcast" data-action="broadcast">Broadcast to class</button>
      <button data-action="end-session">End session</button>
    </div>`
    : `<button data-action="start-session" id="start-session">Start class session</button>`;
  return `
<section class="teacher">
  <h1>Construction manager</h1>
  ${manager}
  <form id="publish">
    <h2>Publish construction</h2>
    <input name="title" placeholder="title">
    <label><input type="checkbox" name="visible" checked> visible to students</label>
    <button type="submit" data-action="publish">Save to repository</button>
  </form>
  <h2>Class session</h2>
  ${session}
  <h2>Scrapbooks</h2>
  <nav class="scrapbooks">${data.students
    .map(
      (s) =>
        `<button data-action="scrapbook" data-student="${escapeHtml(s.user_id)}">${escapeHtml(
          s.display_name,
        )}</button>`,
    )
    .join("")}</nav>
  <div id="canvas-slot"></div>
</section>`;
}

export interface StudentViewData {
  published: RecordRow[];
  scrapbook: RecordRow[];
  peers: UserRow[];
  sessionId: string | null;
}

export function studentView(data: StudentViewData): string {
  const published = recordTable(
    data.published.filter((r) => !r.is_scrapbook),
    (r) => `<button data-action="load" data-record="${escapeHtml(r.record_id)}">load</button>`,
  );
  const scrapbook = recordTable(
    data.scrapbook,
    (r) => `<button data-action="load" data-record="${escapeHtml(r.record_id)}">load</button>`,
  );
  const grants = data.peers
    .map(
      (p) => `
    <label>${escapeHtml(p.display_name)}
      <select data-action="grant" data-peer="${escapeHtml(p.user_id)}">
        <option value="">private</option>
        <option value="watch">can watch</option>
        <option value="edit">can edit</option>
      </select>
    </label>`,
    )
    .join("");
  return `
<section class="student">
  <h1>Published constructions</h1>
  <p class="hint">read-only: load one into your workbench to explore it</p>
  ${published}
  <h1>My workbench</h1>
  <div id="canvas-slot"></div>
  <button data-action="save" id="save-workbench">Save to scrapbook</button>
  <h1>Scrapbook</h1>
  ${scrapbook}
  <h2>Share my workbench</h2>
  <div class="grants">${grants}</div>
</section>`;
}
