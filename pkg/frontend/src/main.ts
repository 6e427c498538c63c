/**
 * Annotation UI wiring: connect, walk assigned segments, select spans
 * in the target text, label them through the cascading picker, commit
 * with optimistic versioning, and surface conflicts for replay.
 */

import { ServerApi, type NextResponse, type SpanRecord } from "./api.js";
import { readSelection } from "./dom.js";
import { scalarToUtf16 } from "./offsets.js";
import { TaxonomyPicker, type Layer } from "./picker.js";
import { SegmentEditor, type Severity } from "./state.js";

const CATEGORY_COLORS = [
  "#0e7490", "#7c3aed", "#1d4ed8", "#b45309", "#15803d", "#be185d",
];

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
};

interface Session {
  api: ServerApi;
  projectId: string;
  annotator: string;
  picker: TaxonomyPicker;
  editor: SegmentEditor | null;
}

let session: Session | null = null;

const categoryColor = (picker: TaxonomyPicker, categoryId: string): string => {
  const index = picker.schema.nodes.findIndex((n) => n.id === categoryId);
  return CATEGORY_COLORS[index % CATEGORY_COLORS.length] ?? "#334155";
};

const renderTarget = (): void => {
  if (!session?.editor) return;
  const { editor, picker } = session;
  const container = $("target-text");
  container.textContent = "";
  const text = editor.segment.target_text;
  const marks: { start: number; end: number; color: string; title: string }[] = [];
  for (const span of editor.committed) {
    marks.push({
      start: span.start,
      end: span.end,
      color: categoryColor(picker, span.category),
      title: `${span.category} / ${span.severity}`,
    });
  }
  if (editor.pending) {
    marks.push({
      start: editor.pending.start,
      end: editor.pending.end,
      color: "#f59e0b",
      title: "pending",
    });
  }
  marks.sort((a, b) => a.start - b.start || a.end - b.end);

  // non-overlapping render pass; overlapping later marks fall back to
  // starting where the previous one ended
  let cursor = 0;
  for (const mark of marks) {
    const start = Math.max(mark.start, cursor);
    if (start >= mark.end) continue;
    const u0 = scalarToUtf16(text, cursor);
    const u1 = scalarToUtf16(text, start);
    const u2 = scalarToUtf16(text, mark.end);
    if (u1 > u0) container.appendChild(document.createTextNode(text.slice(u0, u1)));
    const highlight = document.createElement("mark");
    highlight.textContent = text.slice(u1, u2);
    highlight.style.backgroundColor = mark.color + "33";
    highlight.style.outline = `1px solid ${mark.color}`;
    highlight.title = mark.title;
    container.appendChild(highlight);
    cursor = mark.end;
  }
  const tail = scalarToUtf16(text, cursor);
  if (tail < text.length) {
    container.appendChild(document.createTextNode(text.slice(tail)));
  }
};

const renderSpanList = (): void => {
  if (!session?.editor) return;
  const { editor, picker } = session;
  const list = $("span-list");
  list.textContent = "";
  for (const span of editor.committed) {
    const item = document.createElement("li");
    const badge = document.createElement("span");
    badge.className = `severity severity-${span.severity}`;
    badge.textContent = span.severity;
    const label = document.createElement("span");
    const pathText = [span.category, span.error_type, span.subcategory]
      .filter(Boolean)
      .join(" / ");
    label.textContent = ` ${pathText} — "${span.span_text ?? ""}" `;
    label.style.color = categoryColor(picker, span.category);
    const remove = document.createElement("button");
    remove.textContent = "remove";
    remove.onclick = async () => {
      const outcome = await editor.removeSpan(span.span_id);
      if (outcome === "conflict") showConflict();
      refresh();
    };
    item.append(badge, label, remove);
    list.appendChild(item);
  }
};

const renderPicker = (): void => {
  if (!session) return;
  const { picker } = session;
  const depths: [1 | 2 | 3, string][] = [
    [1, "picker-category"],
    [2, "picker-type"],
    [3, "picker-subtype"],
  ];
  for (const [depth, elementId] of depths) {
    const select = $(elementId) as HTMLSelectElement;
    const current =
      depth === 1
        ? picker.category
        : depth === 2
          ? picker.errorType
          : picker.subcategory;
    select.textContent = "";
    const blank = document.createElement("option");
    blank.value = "";
    blank.textContent = "—";
    select.appendChild(blank);
    for (const node of picker.options(depth)) {
      const option = document.createElement("option");
      option.value = node.id;
      option.textContent = node.label;
      option.title = node.definition; // hover help
      select.appendChild(option);
    }
    select.value = current?.id ?? "";
    select.disabled = select.options.length <= 1;
  }
  const deepest = picker.deepest();
  $("picker-definition").textContent = deepest ? deepest.definition : "";
};

const renderStatus = (): void => {
  if (!session?.editor) return;
  const { editor } = session;
  const pendingInfo = editor.pending
    ? `pending [${editor.pending.start}, ${editor.pending.end}) "${editor.pendingText()}"`
    : "select text in the translation to mark an error";
  $("pending-info").textContent = pendingInfo;
  const rejection = editor.validatePending();
  const commit = $("commit") as HTMLButtonElement;
  commit.disabled = rejection !== null;
  $("commit-block").textContent =
    rejection && editor.pending
      ? rejection.reason === "incomplete-path"
        ? "pick a complete error path for this layer"
        : rejection.reason === "missing-severity"
          ? "severity is required"
          : ""
      : "";
};

const refresh = (): void => {
  renderTarget();
  renderSpanList();
  renderPicker();
  renderStatus();
};

const showConflict = (): void => {
  $("conflict-dialog").style.display = "block";
};

const loadNext = async (): Promise<void> => {
  if (!session) return;
  const response: NextResponse = await session.api.next(session.projectId);
  $("progress").textContent = `${response.done} / ${response.assigned} done`;
  if (response.complete || !response.segment) {
    $("editor").style.display = "none";
    $("complete").style.display = "block";
    session.editor = null;
    return;
  }
  $("editor").style.display = "block";
  $("complete").style.display = "none";
  session.editor = new SegmentEditor(
    session.api,
    session.projectId,
    session.annotator,
    response.segment,
    response.spans ?? [],
    response.note ?? null,
    response.version ?? 0,
  );
  $("source-text").textContent = response.segment.source_text;
  const reference = $("reference-panel");
  if (response.segment.reference_text) {
    reference.style.display = "block";
    $("reference-text").textContent = response.segment.reference_text;
  } else {
    reference.style.display = "none";
  }
  ($("segment-note") as HTMLTextAreaElement).value = response.note ?? "";
  session.picker.reset();
  refresh();
};

const connect = async (): Promise<void> => {
  const base = ($("server-url") as HTMLInputElement).value.replace(/\/$/, "");
  const projectId = ($("project-id") as HTMLInputElement).value.trim();
  const annotator = ($("annotator-id") as HTMLInputElement).value.trim();
  const token = ($("annotator-token") as HTMLInputElement).value;
  const api = new ServerApi(base, annotator, token);
  const info = await api.projectInfo(projectId);
  const schema = await api.taxonomy(info.taxonomy_name);
  session = {
    api,
    projectId,
    annotator,
    picker: new TaxonomyPicker(schema, info.layer as Layer),
    editor: null,
  };
  $("login").style.display = "none";
  $("workspace").style.display = "block";
  await loadNext();
};

const wire = (): void => {
  $("connect").onclick = () => {
    connect().catch((error) => {
      $("login-error").textContent = String(error);
    });
  };

  $("target-text").addEventListener("mouseup", () => {
    if (!session?.editor) return;
    const range = readSelection($("target-text"), session.editor.segment.target_text);
    if (range) {
      session.editor.selectSpan(range.start, range.end);
      refresh();
    }
  });

  for (const [depth, elementId] of [
    [1, "picker-category"],
    [2, "picker-type"],
    [3, "picker-subtype"],
  ] as [1 | 2 | 3, string][]) {
    ($(elementId) as HTMLSelectElement).addEventListener("change", (event) => {
      if (!session) return;
      const value = (event.target as HTMLSelectElement).value || null;
      session.picker.select(depth, value);
      session.editor?.setPath(session.picker.path(), session.picker.isComplete());
      refresh();
    });
  }

  document.addEventListener("keydown", (event) => {
    if (!session || event.target instanceof HTMLInputElement) return;
    if (event.target instanceof HTMLTextAreaElement) return;
    const digit = Number.parseInt(event.key, 10);
    if (digit >= 1 && digit <= 6 && session.picker.selectCategoryByIndex(digit - 1)) {
      session.editor?.setPath(session.picker.path(), session.picker.isComplete());
      refresh();
    }
  });

  for (const severity of ["minor", "major", "critical"] as Severity[]) {
    $(`severity-${severity}`).addEventListener("change", () => {
      session?.editor?.setSeverity(severity);
      renderStatus();
    });
  }

  ($("span-note") as HTMLInputElement).addEventListener("input", (event) => {
    session?.editor?.setSpanNote((event.target as HTMLInputElement).value || null);
  });

  $("commit").onclick = async () => {
    if (!session?.editor) return;
    const outcome = await session.editor.commitSpan();
    if (outcome === "conflict") {
      showConflict();
    } else if (outcome === "saved") {
      for (const radio of document.querySelectorAll<HTMLInputElement>("input[name=severity]")) {
        radio.checked = false;
      }
      ($("span-note") as HTMLInputElement).value = "";
      session.picker.reset();
    }
    refresh();
  };

  $("discard").onclick = () => {
    session?.editor?.discardPending();
    refresh();
  };

  $("conflict-replay").onclick = async () => {
    if (!session?.editor) return;
    $("conflict-dialog").style.display = "none";
    const outcome = await session.editor.confirmReplay();
    if (outcome === "conflict") showConflict();
    refresh();
  };

  $("conflict-drop").onclick = () => {
    session?.editor?.discardPending();
    $("conflict-dialog").style.display = "none";
    refresh();
  };

  $("save-note").onclick = async () => {
    if (!session?.editor) return;
    const note = ($("segment-note") as HTMLTextAreaElement).value || null;
    const outcome = await session.editor.saveNote(note);
    if (outcome === "conflict") showConflict();
    refresh();
  };

  $("done-next").onclick = async () => {
    if (!session?.editor) return;
    if (session.editor.version === 0) {
      // an explicit save marks the segment done even when error-free
      await session.editor.saveNote(
        ($("segment-note") as HTMLTextAreaElement).value || null,
      );
    }
    await loadNext();
  };
};

document.addEventListener("DOMContentLoaded", wire);
