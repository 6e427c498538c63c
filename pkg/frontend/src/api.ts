/** Typed client for the annotation server's HTTP API. */

export interface SegmentRecord {
  segment_id: string;
  source_lang: string;
  target_lang: string;
  dialect: string | null;
  model_id: string;
  source_text: string;
  target_text: string;
  reference_text?: string;
}

export interface SpanRecord {
  span_id: string;
  segment_id: string;
  annotator_id: string;
  start: number;
  end: number;
  category: string;
  error_type?: string;
  subcategory?: string;
  severity: string;
  note?: string;
  span_text?: string;
}

export interface NextResponse {
  complete: boolean;
  segment?: SegmentRecord;
  spans?: SpanRecord[];
  note?: string | null;
  version?: number;
  position?: number;
  assigned: number;
  done: number;
}

export interface TaxonomyNode {
  id: string;
  label: string;
  definition: string;
  depth: number;
  layer: string;
  children: TaxonomyNode[];
}

export interface TaxonomySchema {
  name: string;
  version: string;
  levels: string[];
  nodes: TaxonomyNode[];
}

export interface SlotState {
  version: number;
  spans: SpanRecord[];
  note: string | null;
}

export class ConflictError extends Error {
  constructor(public current: SlotState) {
    super("version conflict");
  }
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ServerApi {
  constructor(
    private base: string,
    private annotator: string,
    private token: string,
  ) {}

  private auth(): Record<string, string> {
    return { Authorization: `Bearer ${this.token}` };
  }

  private async check(response: Response): Promise<any> {
    const body = await response.json().catch(() => ({}));
    if (response.status === 409 && body.current) {
      throw new ConflictError(body.current as SlotState);
    }
    if (!response.ok) {
      throw new ApiError(response.status, body.error ?? response.statusText);
    }
    return body;
  }

  async taxonomy(name: string): Promise<TaxonomySchema> {
    return this.check(await fetch(`${this.base}/taxonomies/${name}`));
  }

  async projectInfo(projectId: string): Promise<any> {
    return this.check(await fetch(`${this.base}/projects/${projectId}`));
  }

  async next(projectId: string): Promise<NextResponse> {
    const url = `${this.base}/projects/${projectId}/next?annotator=${encodeURIComponent(this.annotator)}`;
    return this.check(await fetch(url, { headers: this.auth() }));
  }

  async save(
    projectId: string,
    segmentId: string,
    spans: SpanRecord[],
    note: string | null,
    expectedVersion: number,
  ): Promise<number> {
    const url =
      `${this.base}/projects/${projectId}/segments/` +
      `${encodeURIComponent(segmentId)}/annotations` +
      `?annotator=${encodeURIComponent(this.annotator)}`;
    const body = await this.check(
      await fetch(url, {
        method: "PUT",
        headers: { ...this.auth(), "Content-Type": "application/json" },
        body: JSON.stringify({
          expected_version: expectedVersion,
          spans,
          note,
        }),
      }),
    );
    return body.version as number;
  }

  async progress(projectId: string): Promise<any> {
    return this.check(await fetch(`${this.base}/projects/${projectId}/progress`));
  }
}
