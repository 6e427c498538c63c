/**
 * Offset-parity acceptance: selections made in UI coordinates (UTF-16)
 * must extract the identical substring server-side after conversion to
 * scalar-value offsets.  The server verifies every span's span_text
 * against its own extraction, so a 200 on each save IS the parity
 * check.  50 segments of Arabic with diacritics, mixed-direction text,
 * emoji, and NFD input; several selections per segment, including
 * simulated backward (RTL) drags.
 */

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import {
  scalarSlice,
  selectionToScalarRange,
  utf16ToScalar,
} from "../src/offsets.js";
import { createProject, startServer, type LiveServer, type SegmentInput } from "./harness.js";

// small deterministic RNG so failures reproduce
const lcg = (seed: number) => {
  let state = seed >>> 0;
  return () => {
    state = (state * 1664525 + 1013904223) >>> 0;
    return state / 2 ** 32;
  };
};

const BASE_TEXTS = [
  // Arabic with tashkeel diacritics (combining marks)
  "قُلْ هُوَ اللَّهُ أَحَدٌ",
  // mixed-direction: Latin name fragment inside an RTL sentence
  "Fواز صدقني أنا ما عرفت إلا اليوم believe me",
  // RTL with embedded LTR acronym and digits
  "الموديل GPT-4 ترجم 12 جملة",
  // emoji (astral plane) between words
  "good \u{1F600} morning \u{1F680} friends",
  // plain English
  "the quick brown fox jumps over the lazy dog",
  // NFD-composed Latin (server will NFC-normalize)
  "café au lait olé",
  // Arabic proverb from the annotation domain
  "و مش كل مره تسلم الجره يا صاحبي",
];

const buildSegments = (): SegmentInput[] => {
  const segments: SegmentInput[] = [];
  for (let i = 0; i < 50; i++) {
    const text = BASE_TEXTS[i % BASE_TEXTS.length]!;
    segments.push({
      segment_id: `fx${String(i).padStart(2, "0")}`,
      source_lang: "EGY",
      target_lang: "ENG",
      dialect: "Egyptian",
      model_id: "fixture",
      source_text: `source ${i}`,
      target_text: `${text} #${i}`,
    });
  }
  return segments;
};

describe("offset parity against the live server", () => {
  let server: LiveServer;
  let projectId: string;

  beforeAll(async () => {
    server = await startServer();
    projectId = await createProject(server.base, buildSegments(), {
      annotators: ["alice"],
      overlap: 1.0,
    });
  }, 60_000);

  afterAll(async () => {
    await server.stop();
  });

  it("extracts identical substrings for 100% of selections", async () => {
    const exportResponse = await fetch(
      `${server.base}/projects/${projectId}/export`,
    );
    const exported = (await exportResponse.json()) as {
      segments_jsonl: string;
    };
    const segments = exported.segments_jsonl
      .trim()
      .split("\n")
      .map((line) => JSON.parse(line) as { segment_id: string; target_text: string });
    expect(segments).toHaveLength(50);

    const rand = lcg(0xabcdef);
    let selections = 0;
    for (const segment of segments) {
      const text = segment.target_text; // server-canonical (NFC) text
      const spans = [];
      for (let k = 0; k < 4; k++) {
        // raw UTF-16 boundaries, as a browser selection would report
        let a = Math.floor(rand() * (text.length + 1));
        let b = Math.floor(rand() * (text.length + 1));
        if (k === 0) {
          [a, b] = [0, text.length]; // select-whole-text case
        }
        if (k === 1) [a, b] = [b, a]; // simulated backward RTL drag
        const range = selectionToScalarRange(text, a, b);
        if (!range) continue; // collapsed selection is a UI no-op
        const spanText = scalarSlice(text, range.start, range.end);
        expect(spanText.length).toBeGreaterThan(0);
        spans.push({
          span_id: `${segment.segment_id}-k${k}`,
          segment_id: segment.segment_id,
          annotator_id: "alice",
          start: range.start,
          end: range.end,
          category: "semantics",
          error_type: "lexical-semantics",
          subcategory: "named-entity",
          severity: "minor",
          span_text: spanText,
        });
        selections++;
      }
      const response = await fetch(
        `${server.base}/projects/${projectId}/segments/${segment.segment_id}` +
          `/annotations?annotator=alice`,
        {
          method: "PUT",
          headers: {
            Authorization: "Bearer tok-alice",
            "Content-Type": "application/json",
          },
          body: JSON.stringify({ expected_version: 0, spans, note: null }),
        },
      );
      const body = await response.text();
      expect(response.status, `${segment.segment_id}: ${body}`).toBe(200);
    }
    expect(selections).toBeGreaterThan(120); // 50 segments, ~3-4 each
  }, 120_000);

  it("whole-text selection maps to (0, scalar length)", () => {
    const text = "مَرحَبا \u{1F44B}";
    const range = selectionToScalarRange(text, 0, text.length);
    expect(range).toEqual({ start: 0, end: 9 });
  });

  it("a selection spanning the LTR name in RTL text is one logical range", () => {
    const text = "Fواز صدقني";
    // drag visually across the bidi boundary: logical UTF-16 2..7
    const range = selectionToScalarRange(text, 7, 2);
    expect(range).toEqual({ start: 2, end: 7 });
    expect(scalarSlice(text, range!.start, range!.end)).toBe(
      text.slice(utf16ToScalar(text, 2) === 2 ? 2 : 0, 7),
    );
  });
});
