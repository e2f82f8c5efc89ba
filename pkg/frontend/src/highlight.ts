/**
 * Renders document text with its well-nested spans as nested highlight
 * elements, and converts browser selections back into scalar offsets.
 *
 * The persistent tag label on every highlight is a CSS ::before pseudo-
 * element fed from data-tag, so label text never pollutes the text nodes:
 * the concatenation of all text nodes under the pane is exactly the
 * document text, which keeps selection offset math trivial and exact.
 */

import { SpanInfo, TagInfo } from "./api";
import { colorFor } from "./palette";
import { scalarFromUtf16, scalarLength, scalarSlice } from "./unicode";

export interface RenderOptions {
  tagsByName: Map<string, TagInfo>;
  errorSpanIds?: Set<string>;
  selectedSpanId?: string | null;
  onSpanClick?: (spanId: string, element: HTMLElement) => void;
}

/** Document order: by start, outermost first, ties by array position. */
export function documentOrder(spans: SpanInfo[]): SpanInfo[] {
  return spans
    .map((span, index) => ({ span, index }))
    .sort(
      (a, b) =>
        a.span.start - b.span.start ||
        b.span.end - a.span.end ||
        a.index - b.index,
    )
    .map((entry) => entry.span);
}

export function renderAnnotatedText(
  container: HTMLElement,
  text: string,
  spans: SpanInfo[],
  options: RenderOptions,
): void {
  container.textContent = "";
  const ordered = documentOrder(spans);
  const stack: { end: number; element: HTMLElement }[] = [];
  let position = 0;

  const target = () =>
    stack.length ? stack[stack.length - 1].element : container;

  const emitText = (upto: number) => {
    if (upto > position) {
      target().appendChild(
        document.createTextNode(scalarSlice(text, position, upto)),
      );
      position = upto;
    }
  };

  for (const span of ordered) {
    while (stack.length && stack[stack.length - 1].end <= span.start) {
      emitText(stack[stack.length - 1].end);
      stack.pop();
    }
    emitText(span.start);

    const element = document.createElement("span");
    element.className = "hl";
    element.dataset.spanId = span.id;
    element.dataset.tag = span.tag;
    const tag = options.tagsByName.get(span.tag);
    element.style.backgroundColor = tag ? colorFor(tag.color_index) : "#ddd";
    if (options.errorSpanIds?.has(span.id)) element.classList.add("hl-error");
    if (options.selectedSpanId === span.id) element.classList.add("hl-selected");
    if (options.onSpanClick) {
      element.addEventListener("click", (event) => {
        event.stopPropagation();
        options.onSpanClick!(span.id, element);
      });
    }
    target().appendChild(element);
    stack.push({ end: span.end, element });
  }
  while (stack.length) {
    emitText(stack[stack.length - 1].end);
    stack.pop();
  }
  emitText(scalarLength(text));
}

/**
 * UTF-16 offset of a (node, offsetInNode) selection boundary within the
 * concatenated text nodes of `container`, or null when the boundary lies
 * outside it.
 */
function utf16Offset(
  container: HTMLElement,
  node: Node,
  offsetInNode: number,
): number | null {
  if (node.nodeType !== Node.TEXT_NODE) {
    // Element boundary: offset counts child nodes; sum the text before it.
    if (!container.contains(node)) return null;
    let sum = 0;
    const walker = document.createTreeWalker(container, NodeFilter.SHOW_TEXT);
    let current: Node | null;
    while ((current = walker.nextNode())) {
      const position = node.compareDocumentPosition(current);
      const inside = Boolean(position & Node.DOCUMENT_POSITION_CONTAINED_BY);
      const before = Boolean(position & Node.DOCUMENT_POSITION_PRECEDING);
      if (inside) {
        let childIndex = 0;
        let ancestor: Node = current;
        while (ancestor.parentNode !== node) ancestor = ancestor.parentNode!;
        childIndex = Array.prototype.indexOf.call(node.childNodes, ancestor);
        if (childIndex >= offsetInNode) break;
      } else if (!before) {
        break;
      }
      sum += (current as Text).data.length;
    }
    return sum;
  }
  let total = 0;
  const walker = document.createTreeWalker(container, NodeFilter.SHOW_TEXT);
  let current: Node | null;
  while ((current = walker.nextNode())) {
    if (current === node) return total + offsetInNode;
    total += (current as Text).data.length;
  }
  return null;
}

/**
 * Scalar [start, end) of the current selection inside the text pane, or
 * null when there is no usable selection. Exact character boundaries: no
 * word snapping.
 */
export function selectionScalarRange(
  container: HTMLElement,
  selection: Selection | null,
  text: string,
): { start: number; end: number } | null {
  if (!selection || selection.rangeCount === 0) return null;
  const range = selection.getRangeAt(0);
  if (range.collapsed) return null;
  const a = utf16Offset(container, range.startContainer, range.startOffset);
  const b = utf16Offset(container, range.endContainer, range.endOffset);
  if (a === null || b === null) return null;
  const lo = Math.min(a, b);
  const hi = Math.max(a, b);
  if (lo === hi) return null;
  return {
    start: scalarFromUtf16(text, lo),
    end: scalarFromUtf16(text, hi),
  };
}
