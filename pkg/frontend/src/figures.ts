/**
 * Figure builders.
 *
 * Both functions take rows already validated by the schema module and return a
 * complete SVG document as a string. Rendering is display-only: rows are
 * grouped and drawn, never aggregated into new statistics. Output is a pure
 * function of the input row list, so a fixed CSV yields identical bytes.
 */
import { ticks } from "d3-array";
import type { SnrSweepRow, SweepRow } from "./schema.js";
import { esc, linearScale, markerDefs, markerStyles, px, svgDocument } from "./svg.js";
import type { MarkerStyle } from "./svg.js";

export interface FigureOptions {
  title?: string | undefined;
  xLabel?: string | undefined;
  yLabel?: string | undefined;
}

const UNIT_TICKS = [0, 0.25, 0.5, 0.75, 1];

function uniqueInOrder<T>(values: T[]): T[] {
  const seen = new Set<T>();
  const out: T[] = [];
  for (const v of values) {
    if (!seen.has(v)) {
      seen.add(v);
      out.push(v);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scatter: one [0,1]^2 panel per SNR value, every (fdp, ndp) pair as a glyph.

const SC = { plot: 240, left: 46, right: 14, top: 30, bottom: 44, pad: 8, legend: 24, title: 22 };

function scatterPanelFrame(xLabel: string, yLabel: string): string {
  const n = SC.plot;
  const parts: string[] = [];
  for (const t of UNIT_TICKS) {
    const gx = px(t * n);
    const gy = px(n - t * n);
    if (t > 0 && t < 1) {
      parts.push(`<line x1="${gx}" y1="0" x2="${gx}" y2="${n}" stroke="#eeeeee"/>`);
      parts.push(`<line x1="0" y1="${gy}" x2="${n}" y2="${gy}" stroke="#eeeeee"/>`);
    }
    parts.push(`<line x1="${gx}" y1="${n}" x2="${gx}" y2="${n + 4}" stroke="#333333"/>`);
    parts.push(`<text x="${gx}" y="${n + 16}" text-anchor="middle">${t}</text>`);
    parts.push(`<line x1="-4" y1="${gy}" x2="0" y2="${gy}" stroke="#333333"/>`);
    parts.push(`<text x="-7" y="${gy}" dy="3.5" text-anchor="end">${t}</text>`);
  }
  parts.push(`<rect width="${n}" height="${n}" fill="none" stroke="#333333"/>`);
  parts.push(`<text x="${px(n / 2)}" y="${n + 32}" text-anchor="middle" font-size="12">${esc(xLabel)}</text>`);
  parts.push(
    `<text transform="translate(-32,${px(n / 2)}) rotate(-90)" text-anchor="middle" font-size="12">${esc(yLabel)}</text>`,
  );
  return parts.join("");
}

function legendRow(
  methods: string[],
  styles: Map<string, MarkerStyle>,
  width: number,
  midY: number,
): string {
  const entryW = (m: string) => 14 + 7 * m.length + 18;
  const total = methods.reduce((acc, m) => acc + entryW(m), 0) - 18;
  let x = (width - total) / 2;
  const parts: string[] = [];
  for (const m of methods) {
    const style = styles.get(m)!;
    parts.push(`<use href="#${style.id}" x="${px(x)}" y="${px(midY)}"/>`);
    parts.push(`<text x="${px(x + 8)}" y="${px(midY)}" dy="3.5">${esc(m)}</text>`);
    x += entryW(m);
  }
  return parts.join("");
}

export function renderFdpNdpScatter(rows: SweepRow[], opts: FigureOptions = {}): string {
  const methods = uniqueInOrder(rows.map((r) => r.method));
  const styles = markerStyles(methods);
  const snrs = uniqueInOrder(rows.map((r) => r.snr)).sort((a, b) => a - b);
  const panels: (number | null)[] = snrs.length ? snrs : [null]; // no data: blank axes

  const cols = panels.length > 1 ? 2 : 1;
  const gridRows = Math.ceil(panels.length / cols);
  const cellW = SC.left + SC.plot + SC.right;
  const cellH = SC.top + SC.plot + SC.bottom;
  const headerH = (opts.title ? SC.title : 0) + (methods.length ? SC.legend : 0);
  const width = 2 * SC.pad + cols * cellW;
  const height = 2 * SC.pad + headerH + gridRows * cellH;

  const sx = linearScale(0, 1, 0, SC.plot);
  const sy = linearScale(0, 1, SC.plot, 0);
  const frame = scatterPanelFrame(opts.xLabel ?? "FDP", opts.yLabel ?? "NDP");

  const body: string[] = [markerDefs(styles.values())];
  let y0 = SC.pad;
  if (opts.title) {
    body.push(
      `<text x="${px(width / 2)}" y="${y0 + 15}" text-anchor="middle" font-size="13">${esc(opts.title)}</text>`,
    );
    y0 += SC.title;
  }
  if (methods.length) {
    body.push(legendRow(methods, styles, width, y0 + SC.legend / 2));
    y0 += SC.legend;
  }

  panels.forEach((snr, idx) => {
    const ox = SC.pad + (idx % cols) * cellW + SC.left;
    const oy = y0 + Math.floor(idx / cols) * cellH + SC.top;
    const parts: string[] = [`<g transform="translate(${px(ox)},${px(oy)})">`, frame];
    if (snr !== null) {
      parts.push(
        `<text x="${px(SC.plot / 2)}" y="-10" text-anchor="middle" font-size="12">SNR = ${snr}</text>`,
      );
      const seen = new Set<string>();
      for (const row of rows) {
        if (row.snr !== snr) continue;
        const style = styles.get(row.method)!;
        const x = px(sx(row.fdp));
        const y = px(sy(row.ndp));
        const key = `${style.id}|${x},${y}`;
        if (seen.has(key)) continue; // coincident glyphs draw once
        seen.add(key);
        parts.push(`<use href="#${style.id}" x="${x}" y="${y}"/>`);
      }
    }
    parts.push("</g>");
    body.push(parts.join(""));
  });

  return svgDocument(width, height, body.join(""));
}

// ---------------------------------------------------------------------------
// Curves: NDR against SNR, one line per (method, p); line dash varies with p.

const CV = { plotW: 420, plotH: 260, left: 54, right: 170, top: 34, bottom: 48 };
const DASHES = ["", "7 4", "7 3 2 3", "2 3"];

interface Series {
  method: string;
  p: number;
  pts: SnrSweepRow[];
}

export function renderNdrVsSnr(rows: SnrSweepRow[], opts: FigureOptions = {}): string {
  const methods = uniqueInOrder(rows.map((r) => r.method));
  const styles = markerStyles(methods);
  const ps = uniqueInOrder(rows.map((r) => r.p)).sort((a, b) => a - b);

  const series: Series[] = [];
  for (const method of methods) {
    for (const p of ps) {
      const pts = rows.filter((r) => r.method === method && r.p === p);
      if (!pts.length) continue;
      series.push({ method, p, pts: [...pts].sort((a, b) => a.snr - b.snr) });
    }
  }
  const dashFor = (p: number) => DASHES[ps.indexOf(p) % DASHES.length]!;

  const xMax = Math.max(1, ...rows.map((r) => r.snr));
  const sx = linearScale(0, xMax, 0, CV.plotW);
  const sy = linearScale(0, 1, CV.plotH, 0);
  const xTicks = ticks(0, xMax, 6);

  const width = CV.left + CV.plotW + CV.right;
  const height = CV.top + CV.plotH + CV.bottom;

  const body: string[] = [markerDefs(styles.values())];
  if (opts.title) {
    body.push(`<text x="${px(width / 2)}" y="18" text-anchor="middle" font-size="13">${esc(opts.title)}</text>`);
  }

  const parts: string[] = [`<g transform="translate(${CV.left},${CV.top})">`];
  for (const t of xTicks) {
    const gx = px(sx(t));
    if (t > 0) parts.push(`<line x1="${gx}" y1="0" x2="${gx}" y2="${CV.plotH}" stroke="#eeeeee"/>`);
    parts.push(`<line x1="${gx}" y1="${CV.plotH}" x2="${gx}" y2="${CV.plotH + 4}" stroke="#333333"/>`);
    parts.push(`<text x="${gx}" y="${CV.plotH + 16}" text-anchor="middle">${t}</text>`);
  }
  for (const t of UNIT_TICKS) {
    const gy = px(sy(t));
    if (t > 0 && t < 1) parts.push(`<line x1="0" y1="${gy}" x2="${CV.plotW}" y2="${gy}" stroke="#eeeeee"/>`);
    parts.push(`<line x1="-4" y1="${gy}" x2="0" y2="${gy}" stroke="#333333"/>`);
    parts.push(`<text x="-7" y="${gy}" dy="3.5" text-anchor="end">${t}</text>`);
  }
  parts.push(`<rect width="${CV.plotW}" height="${CV.plotH}" fill="none" stroke="#333333"/>`);
  parts.push(
    `<text x="${px(CV.plotW / 2)}" y="${CV.plotH + 34}" text-anchor="middle" font-size="12">${esc(opts.xLabel ?? "SNR")}</text>`,
  );
  parts.push(
    `<text transform="translate(-36,${px(CV.plotH / 2)}) rotate(-90)" text-anchor="middle" font-size="12">${esc(opts.yLabel ?? "NDR")}</text>`,
  );

  for (const s of series) {
    const style = styles.get(s.method)!;
    const dash = dashFor(s.p);
    const pts = s.pts.map((r) => `${px(sx(r.snr))},${px(sy(r.ndr))}`).join(" ");
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="${style.color}" stroke-width="1.5"${dash ? ` stroke-dasharray="${dash}"` : ""}/>`,
    );
    for (const r of s.pts) {
      parts.push(`<use href="#${style.id}" x="${px(sx(r.snr))}" y="${px(sy(r.ndr))}"/>`);
    }
  }
  parts.push("</g>");
  body.push(parts.join(""));

  let ly = CV.top + 6;
  const lx = CV.left + CV.plotW + 18;
  for (const s of series) {
    const style = styles.get(s.method)!;
    const dash = dashFor(s.p);
    body.push(
      `<line x1="${px(lx)}" y1="${px(ly)}" x2="${px(lx + 26)}" y2="${px(ly)}" stroke="${style.color}" stroke-width="1.5"${dash ? ` stroke-dasharray="${dash}"` : ""}/>`,
    );
    body.push(`<use href="#${style.id}" x="${px(lx + 13)}" y="${px(ly)}"/>`);
    body.push(`<text x="${px(lx + 32)}" y="${px(ly)}" dy="3.5">${esc(s.method)} p=${s.p}</text>`);
    ly += 20;
  }

  return svgDocument(width, height, body.join(""));
}
