/**
 * Editor state for one (segment, annotator) slot.
 *
 * Commits are optimistic: the full span set is PUT with the version the
 * client last saw.  On a conflict the editor reloads the server's
 * current state, keeps the local uncommitted span as pending, and asks
 * the user to confirm the replay; nothing is ever silently dropped.
 */

import type { SegmentRecord, ServerApi, SpanRecord } from "./api.js";
import { ConflictError } from "./api.js";
import { scalarLength, scalarSlice } from "./offsets.js";

export type Severity = "minor" | "major" | "critical";

export interface PendingSpan {
  start: number;
  end: number;
  path: { category?: string; error_type?: string; subcategory?: string };
  severity: Severity | null;
  note: string | null;
  pathComplete: boolean;
}

export interface CommitRejection {
  reason: "incomplete-path" | "missing-severity" | "no-pending-span" | "out-of-bounds";
}

let spanCounter = 0;
const freshSpanId = (segmentId: string, annotator: string): string =>
  `${segmentId}:${annotator}:${Date.now().toString(36)}:${(spanCounter++).toString(36)}`;

export class SegmentEditor {
  segment: SegmentRecord;
  version: number;
  committed: SpanRecord[];
  segmentNote: string | null;
  pending: PendingSpan | null = null;
  conflict: { serverSpans: SpanRecord[]; serverVersion: number } | null = null;

  constructor(
    private api: ServerApi,
    private projectId: string,
    private annotator: string,
    segment: SegmentRecord,
    spans: SpanRecord[],
    note: string | null,
    version: number,
  ) {
    this.segment = segment;
    this.committed = [...spans];
    this.segmentNote = note;
    this.version = version;
  }

  get targetLength(): number {
    return scalarLength(this.segment.target_text);
  }

  /** Begin a pending span from a scalar-value selection range. */
  selectSpan(start: number, end: number): boolean {
    if (!(start >= 0 && start < end && end <= this.targetLength)) {
      return false;
    }
    this.pending = {
      start,
      end,
      path: {},
      severity: null,
      note: null,
      pathComplete: false,
    };
    return true;
  }

  setPath(
    path: { category?: string; error_type?: string; subcategory?: string },
    complete: boolean,
  ): void {
    if (this.pending) {
      this.pending.path = path;
      this.pending.pathComplete = complete;
    }
  }

  setSeverity(severity: Severity): void {
    if (this.pending) this.pending.severity = severity;
  }

  setSpanNote(note: string | null): void {
    if (this.pending) this.pending.note = note;
  }

  discardPending(): void {
    this.pending = null;
  }

  pendingText(): string {
    if (!this.pending) return "";
    return scalarSlice(this.segment.target_text, this.pending.start, this.pending.end);
  }

  private buildRecord(pending: PendingSpan): SpanRecord {
    const record: SpanRecord = {
      span_id: freshSpanId(this.segment.segment_id, this.annotator),
      segment_id: this.segment.segment_id,
      annotator_id: this.annotator,
      start: pending.start,
      end: pending.end,
      category: pending.path.category ?? "",
      severity: pending.severity ?? "",
      span_text: scalarSlice(this.segment.target_text, pending.start, pending.end),
    };
    if (pending.path.error_type) record.error_type = pending.path.error_type;
    if (pending.path.subcategory) record.subcategory = pending.path.subcategory;
    if (pending.note) record.note = pending.note;
    return record;
  }

  validatePending(): CommitRejection | null {
    if (!this.pending) return { reason: "no-pending-span" };
    if (!(this.pending.start >= 0 && this.pending.end <= this.targetLength)) {
      return { reason: "out-of-bounds" };
    }
    if (!this.pending.path.category || !this.pending.pathComplete) {
      return { reason: "incomplete-path" };
    }
    if (!this.pending.severity) return { reason: "missing-severity" };
    return null;
  }

  /**
   * Commit the pending span.  Returns "saved" on success,
   * a CommitRejection for local validation problems, or "conflict"
   * after a stale-version save (state reloaded, pending preserved).
   */
  async commitSpan(): Promise<"saved" | "conflict" | CommitRejection> {
    const rejection = this.validatePending();
    if (rejection) return rejection;
    const record = this.buildRecord(this.pending!);
    const spans = [...this.committed, record];
    try {
      this.version = await this.api.save(
        this.projectId,
        this.segment.segment_id,
        spans,
        this.segmentNote,
        this.version,
      );
      this.committed = spans;
      this.pending = null;
      this.conflict = null;
      return "saved";
    } catch (error) {
      if (error instanceof ConflictError) {
        this.conflict = {
          serverSpans: error.current.spans,
          serverVersion: error.current.version,
        };
        // adopt the server's truth; the pending span stays for replay
        this.committed = [...error.current.spans];
        this.version = error.current.version;
        this.segmentNote = error.current.note;
        return "conflict";
      }
      throw error;
    }
  }

  /** Replay the preserved pending span after a conflict. */
  async confirmReplay(): Promise<"saved" | "conflict" | CommitRejection> {
    this.conflict = null;
    return this.commitSpan();
  }

  /** Delete an already-committed span (replaces the full set). */
  async removeSpan(spanId: string): Promise<"saved" | "conflict"> {
    const spans = this.committed.filter((s) => s.span_id !== spanId);
    try {
      this.version = await this.api.save(
        this.projectId,
        this.segment.segment_id,
        spans,
        this.segmentNote,
        this.version,
      );
      this.committed = spans;
      return "saved";
    } catch (error) {
      if (error instanceof ConflictError) {
        this.committed = [...error.current.spans];
        this.version = error.current.version;
        this.segmentNote = error.current.note;
        return "conflict";
      }
      throw error;
    }
  }

  /** Save the per-segment comment (flags the segment in progress). */
  async saveNote(note: string | null): Promise<"saved" | "conflict"> {
    const previous = this.segmentNote;
    this.segmentNote = note;
    try {
      this.version = await this.api.save(
        this.projectId,
        this.segment.segment_id,
        this.committed,
        note,
        this.version,
      );
      return "saved";
    } catch (error) {
      if (error instanceof ConflictError) {
        this.segmentNote = previous;
        this.committed = [...error.current.spans];
        this.version = error.current.version;
        return "conflict";
      }
      throw error;
    }
  }
}
