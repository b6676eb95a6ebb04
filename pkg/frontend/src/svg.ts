/**
 * Minimal deterministic SVG builder: fixed canvas, fixed fonts, no
 * timestamps or ids, numbers printed with a stable formatter so the
 * same inputs always produce byte-identical files.
 */

export const WIDTH = 640;
export const HEIGHT = 420;
export const MARGIN = { left: 62, right: 18, top: 34, bottom: 46 };

export function fmt(x: number): string {
  if (!Number.isFinite(x)) {
    throw new Error(`non-finite coordinate ${x}`);
  }
  const s = x.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

/** Short label form for tick values. */
export function fmtTick(x: number): string {
  const a = Math.abs(x);
  if (a !== 0 && (a >= 1e4 || a < 1e-3)) return x.toExponential(1);
  const s = parseFloat(x.toPrecision(6)).toString();
  return s === "-0" ? "0" : s;
}

export type Scale = (x: number) => number;

export function scaleLinear(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  return (x: number) => r0 + ((x - d0) / span) * (r1 - r0);
}

/** Tick positions at a nice step (1, 2 or 5 times a power of ten). */
export function niceTicks(lo: number, hi: number, want = 6): number[] {
  if (hi <= lo) return [lo];
  const raw = (hi - lo) / want;
  const mag = 10 ** Math.floor(Math.log10(raw));
  const norm = raw / mag;
  const step = (norm < 1.5 ? 1 : norm < 3.5 ? 2 : norm < 7.5 ? 5 : 10) * mag;
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    ticks.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  return ticks;
}

export function rect(x: number, y: number, w: number, h: number, fill: string, extra = ""): string {
  return `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"${extra}/>`;
}

export function line(x1: number, y1: number, x2: number, y2: number, stroke: string, extra = ""): string {
  return `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${stroke}"${extra}/>`;
}

export function circle(cx: number, cy: number, r: number, fill: string): string {
  return `<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${fmt(r)}" fill="${fill}"/>`;
}

export function polyline(points: Array<[number, number]>, stroke: string, extra = ""): string {
  const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
  return `<polyline points="${pts}" fill="none" stroke="${stroke}"${extra}/>`;
}

export function text(x: number, y: number, s: string, extra = ""): string {
  const esc = s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
  return `<text x="${fmt(x)}" y="${fmt(y)}" font-family="monospace" font-size="11"${extra}>${esc}</text>`;
}

export interface Frame {
  x: Scale;
  y: Scale;
  body: string[];
}

/** Plot frame with axis lines, ticks and labels; returns the scales. */
export function frame(xDomain: [number, number], yDomain: [number, number],
                      xLabel: string, yLabel: string, title: string): Frame {
  const x = scaleLinear(xDomain, [MARGIN.left, WIDTH - MARGIN.right]);
  const y = scaleLinear(yDomain, [HEIGHT - MARGIN.bottom, MARGIN.top]);
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  const body: string[] = [];
  body.push(rect(0, 0, WIDTH, HEIGHT, "white"));
  body.push(text(x0, y1 - 14, title));
  for (const t of niceTicks(xDomain[0], xDomain[1])) {
    const px = x(t);
    body.push(line(px, y0, px, y0 + 5, "black"));
    body.push(line(px, y0, px, y1, "#dddddd"));
    body.push(text(px, y0 + 18, fmtTick(t), ' text-anchor="middle"'));
  }
  for (const t of niceTicks(yDomain[0], yDomain[1])) {
    const py = y(t);
    body.push(line(x0 - 5, py, x0, py, "black"));
    body.push(line(x0, py, x1, py, "#dddddd"));
    body.push(text(x0 - 8, py + 4, fmtTick(t), ' text-anchor="end"'));
  }
  body.push(line(x0, y0, x1, y0, "black"));
  body.push(line(x0, y0, x0, y1, "black"));
  body.push(text((x0 + x1) / 2, HEIGHT - 10, xLabel, ' text-anchor="middle"'));
  body.push(text(14, (y0 + y1) / 2, yLabel,
                 ` text-anchor="middle" transform="rotate(-90 14 ${fmt((y0 + y1) / 2)})"`));
  return { x, y, body };
}

export function document(body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
    ...body,
    "</svg>",
    "",
  ].join("\n");
}
