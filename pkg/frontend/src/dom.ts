/**
 * Browser glue: turn the live DOM selection inside the target-text
 * element into scalar-value offsets.
 *
 * The target text is rendered as plain text nodes (the highlight pass
 * may split it into several), so a boundary's absolute UTF-16 offset is
 * its offset in the containing text node plus the lengths of all
 * preceding text inside the container.  Bidirectional rendering never
 * changes logical order, so a visual RTL drag still yields a contiguous
 * logical range.
 */

import { selectionToScalarRange, type ScalarRange } from "./offsets.js";

const absoluteUtf16Offset = (
  container: HTMLElement,
  node: Node,
  offsetInNode: number,
): number | null => {
  if (!container.contains(node)) return null;
  let total = 0;
  const walker = document.createTreeWalker(container, NodeFilter.SHOW_TEXT);
  let current = walker.nextNode();
  while (current) {
    if (current === node) return total + offsetInNode;
    total += (current.textContent ?? "").length;
    current = walker.nextNode();
  }
  // boundary on the element itself: offset counts child nodes
  if (node === container) {
    let sum = 0;
    for (let i = 0; i < Math.min(offsetInNode, container.childNodes.length); i++) {
      sum += (container.childNodes[i]?.textContent ?? "").length;
    }
    return sum;
  }
  return null;
};

/**
 * Current selection as a scalar range within the container's text, or
 * null when the selection is collapsed or outside the container.
 */
export const readSelection = (
  container: HTMLElement,
  text: string,
): ScalarRange | null => {
  const selection = window.getSelection();
  if (!selection || selection.rangeCount === 0 || selection.isCollapsed) {
    return null;
  }
  const anchor = selection.anchorNode
    ? absoluteUtf16Offset(container, selection.anchorNode, selection.anchorOffset)
    : null;
  const focus = selection.focusNode
    ? absoluteUtf16Offset(container, selection.focusNode, selection.focusOffset)
    : null;
  if (anchor === null || focus === null) return null;
  return selectionToScalarRange(text, anchor, focus);
};
