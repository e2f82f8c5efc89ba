/**
 * Fixed 16-color highlight palette. The server assigns each tag a stable
 * color_index (lexicographic rank), so every client renders identical
 * colors for the same document; this module only maps index -> color.
 */

export const PALETTE: readonly string[] = [
  "#ffd54f", // amber
  "#81d4fa", // light blue
  "#a5d6a7", // green
  "#f48fb1", // pink
  "#ce93d8", // purple
  "#ffab91", // deep orange
  "#80cbc4", // teal
  "#e6ee9c", // lime
  "#b0bec5", // blue grey
  "#fff176", // yellow
  "#90caf9", // blue
  "#c5e1a5", // light green
  "#ef9a9a", // red
  "#b39ddb", // deep purple
  "#ffcc80", // orange
  "#9fa8da", // indigo
];

export function colorFor(colorIndex: number): string {
  return PALETTE[((colorIndex % PALETTE.length) + PALETTE.length) % PALETTE.length];
}
