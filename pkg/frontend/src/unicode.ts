/**
 * Offset conversions between JavaScript's UTF-16 string indices and the
 * Unicode scalar offsets the server speaks. Everything sent to the API must
 * index scalar values, no matter how the browser represents a selection.
 */

export function scalarLength(text: string): number {
  let count = 0;
  for (let i = 0; i < text.length; ) {
    const cp = text.codePointAt(i)!;
    i += cp > 0xffff ? 2 : 1;
    count += 1;
  }
  return count;
}

/** Scalar offset of the given UTF-16 code-unit offset (clamped to length). */
export function scalarFromUtf16(text: string, utf16Offset: number): number {
  let scalars = 0;
  for (let i = 0; i < Math.min(utf16Offset, text.length); ) {
    const cp = text.codePointAt(i)!;
    i += cp > 0xffff ? 2 : 1;
    scalars += 1;
  }
  return scalars;
}

/** UTF-16 code-unit offset of the given scalar offset. */
export function utf16FromScalar(text: string, scalarOffset: number): number {
  let i = 0;
  for (let seen = 0; seen < scalarOffset && i < text.length; seen += 1) {
    const cp = text.codePointAt(i)!;
    i += cp > 0xffff ? 2 : 1;
  }
  return i;
}

/** Substring addressed by scalar offsets. */
export function scalarSlice(text: string, start: number, end: number): string {
  return text.slice(utf16FromScalar(text, start), utf16FromScalar(text, end));
}
