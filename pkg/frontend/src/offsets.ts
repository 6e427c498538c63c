/**
 * Offset math between JavaScript's UTF-16 string indices and the
 * Unicode scalar-value offsets the annotation server stores.
 *
 * Every offset sent over the wire is a scalar-value offset computed
 * against the exact text string the server provided; the browser's
 * UTF-16 indices never leave the client.
 */

/** Number of Unicode scalar values in the string. */
export const scalarLength = (text: string): number => {
  let n = 0;
  for (let i = 0; i < text.length; i++) {
    n++;
    const code = text.charCodeAt(i);
    if (code >= 0xd800 && code <= 0xdbff && i + 1 < text.length) {
      const next = text.charCodeAt(i + 1);
      if (next >= 0xdc00 && next <= 0xdfff) i++;
    }
  }
  return n;
};

/**
 * Convert a UTF-16 index to a scalar-value offset.  An index that
 * falls inside a surrogate pair snaps back to the pair's start.
 */
export const utf16ToScalar = (text: string, utf16Index: number): number => {
  const clamped = Math.max(0, Math.min(utf16Index, text.length));
  let scalar = 0;
  let i = 0;
  while (i < clamped) {
    const code = text.charCodeAt(i);
    if (
      code >= 0xd800 &&
      code <= 0xdbff &&
      i + 1 < text.length &&
      text.charCodeAt(i + 1) >= 0xdc00 &&
      text.charCodeAt(i + 1) <= 0xdfff
    ) {
      if (i + 1 === clamped) return scalar; // snap into the pair start
      i += 2;
    } else {
      i += 1;
    }
    scalar++;
  }
  return scalar;
};

/** Convert a scalar-value offset back to a UTF-16 index. */
export const scalarToUtf16 = (text: string, scalarIndex: number): number => {
  let scalar = 0;
  let i = 0;
  while (i < text.length && scalar < scalarIndex) {
    const code = text.charCodeAt(i);
    if (
      code >= 0xd800 &&
      code <= 0xdbff &&
      i + 1 < text.length &&
      text.charCodeAt(i + 1) >= 0xdc00 &&
      text.charCodeAt(i + 1) <= 0xdfff
    ) {
      i += 2;
    } else {
      i += 1;
    }
    scalar++;
  }
  return i;
};

/** Substring by scalar-value offsets; matches the server's extraction. */
export const scalarSlice = (text: string, start: number, end: number): string =>
  text.slice(scalarToUtf16(text, start), scalarToUtf16(text, end));

export interface ScalarRange {
  start: number;
  end: number;
}

/**
 * Normalize a pair of UTF-16 selection boundaries (possibly backward,
 * as happens with right-to-left drags) into a forward scalar range.
 * Returns null for a collapsed selection.
 */
export const selectionToScalarRange = (
  text: string,
  anchorUtf16: number,
  focusUtf16: number,
): ScalarRange | null => {
  const a = utf16ToScalar(text, anchorUtf16);
  const b = utf16ToScalar(text, focusUtf16);
  if (a === b) return null;
  return a < b ? { start: a, end: b } : { start: b, end: a };
};
