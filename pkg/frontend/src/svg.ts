/** Small deterministic SVG assembly helpers shared by both figure kinds. */

export function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Pixel coordinates use a fixed two-decimal format to keep output byte-stable. */
export function px(v: number): string {
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

export function linearScale(d0: number, d1: number, r0: number, r1: number): (v: number) => number {
  const k = (r1 - r0) / (d1 - d0);
  return (v) => r0 + (v - d0) * k;
}

export type MarkerShape = "asterisk" | "dot" | "square" | "triangle" | "diamond" | "cross";

export interface MarkerStyle {
  id: string;
  color: string;
  shape: MarkerShape;
}

// The two canonical methods keep their conventional look: multi-pass adaptive
// results draw as magenta asterisks, the single-pass baseline as blue dots.
const NAMED: Record<string, { color: string; shape: MarkerShape }> = {
  ds: { color: "#c2189c", shape: "asterisk" },
  nonadaptive: { color: "#2457d6", shape: "dot" },
};

const EXTRA: { color: string; shape: MarkerShape }[] = [
  { color: "#1a7a3c", shape: "square" },
  { color: "#d97706", shape: "triangle" },
  { color: "#0e7490", shape: "diamond" },
  { color: "#6b7280", shape: "cross" },
];

/** Assign a stable marker style per method, in first-appearance order. */
export function markerStyles(methods: string[]): Map<string, MarkerStyle> {
  const styles = new Map<string, MarkerStyle>();
  const used = new Set<string>();
  let extra = 0;
  for (const method of methods) {
    if (styles.has(method)) continue;
    const base = NAMED[method] ?? EXTRA[extra++ % EXTRA.length]!;
    let id = "mk-" + method.replace(/[^A-Za-z0-9_-]/g, "_");
    while (used.has(id)) id += "x"; // distinct methods may sanitize identically
    used.add(id);
    styles.set(method, { id, color: base.color, shape: base.shape });
  }
  return styles;
}

function shapeMarkup(shape: MarkerShape, color: string): string {
  switch (shape) {
    case "asterisk":
      return `<path d="M0 -3.4 L0 3.4 M-2.94 -1.7 L2.94 1.7 M-2.94 1.7 L2.94 -1.7" stroke="${color}" stroke-width="1.2" fill="none"/>`;
    case "dot":
      return `<circle r="2.2" fill="${color}"/>`;
    case "square":
      return `<rect x="-2.2" y="-2.2" width="4.4" height="4.4" fill="${color}"/>`;
    case "triangle":
      return `<path d="M0 -2.9 L2.7 2.3 L-2.7 2.3 Z" fill="${color}"/>`;
    case "diamond":
      return `<path d="M0 -3 L3 0 L0 3 L-3 0 Z" fill="${color}"/>`;
    case "cross":
      return `<path d="M-2.4 -2.4 L2.4 2.4 M-2.4 2.4 L2.4 -2.4" stroke="${color}" stroke-width="1.2" fill="none"/>`;
  }
}

/** One reusable <g> per marker so each data point is a single <use>. */
export function markerDefs(styles: Iterable<MarkerStyle>): string {
  const parts = ["<defs>"];
  for (const s of styles) parts.push(`<g id="${s.id}">${shapeMarkup(s.shape, s.color)}</g>`);
  parts.push("</defs>");
  return parts.join("");
}

export function svgDocument(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="11">` +
    `<rect width="${width}" height="${height}" fill="white"/>` +
    body +
    "</svg>\n"
  );
}
