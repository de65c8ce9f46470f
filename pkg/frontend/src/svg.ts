/** Deterministic SVG assembly: fixed float formatting, no randomness, and a
 * timestamp only when requested, so identical inputs give identical bytes. */

export const WIDTH = 640;
export const HEIGHT = 480;
export const MARGIN = { top: 36, right: 24, bottom: 48, left: 64 };

export function fmt(v: number): string {
  if (!Number.isFinite(v)) return "0";
  return v.toFixed(3).replace(/\.?0+$/, "") || "0";
}

export interface Scale {
  (v: number): number;
  ticks: number[];
  domain: [number, number];
}

export function linearScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  if (hi <= lo) hi = lo + 1;
  const f = ((v: number) => outLo + ((v - lo) / (hi - lo)) * (outHi - outLo)) as Scale;
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / 4)));
  const mult = span / step > 16 ? 5 : span / step > 8 ? 2 : 1;
  const ticks: number[] = [];
  const t0 = Math.ceil(lo / (step * mult)) * step * mult;
  for (let t = t0; t <= hi + 1e-9; t += step * mult) ticks.push(Number(t.toFixed(9)));
  f.ticks = ticks;
  f.domain = [lo, hi];
  return f;
}

export class SvgDoc {
  private parts: string[] = [];

  constructor(private title: string, private timestamp: boolean) {}

  add(s: string): void {
    this.parts.push(s);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke = "#333", width = 1): void {
    this.add(`<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${stroke}" stroke-width="${width}"/>`);
  }

  circle(x: number, y: number, r: number, fill: string): void {
    this.add(`<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${r}" fill="${fill}"/>`);
  }

  rect(x: number, y: number, w: number, h: number, fill: string): void {
    this.add(`<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${fill}"/>`);
  }

  text(x: number, y: number, s: string, size = 12, anchor = "middle", fill = "#222"): void {
    this.add(`<text x="${fmt(x)}" y="${fmt(y)}" font-size="${size}" text-anchor="${anchor}" fill="${fill}" font-family="sans-serif">${s}</text>`);
  }

  path(points: [number, number][], stroke: string, width = 1.5, close = false): void {
    if (points.length === 0) return;
    const d = points
      .map(([x, y], i) => `${i === 0 ? "M" : "L"}${fmt(x)} ${fmt(y)}`)
      .join(" ") + (close ? " Z" : "");
    this.add(`<path d="${d}" fill="none" stroke="${stroke}" stroke-width="${width}"/>`);
  }

  axes(xs: Scale, ys: Scale, xlabel: string, ylabel: string): void {
    const { top, right, bottom, left } = MARGIN;
    this.line(left, HEIGHT - bottom, WIDTH - right, HEIGHT - bottom);
    this.line(left, top, left, HEIGHT - bottom);
    for (const t of xs.ticks) {
      const x = xs(t);
      this.line(x, HEIGHT - bottom, x, HEIGHT - bottom + 5);
      this.text(x, HEIGHT - bottom + 18, fmt(t), 10);
    }
    for (const t of ys.ticks) {
      const y = ys(t);
      this.line(left - 5, y, left, y);
      this.text(left - 8, y + 3, fmt(t), 10, "end");
    }
    this.text((WIDTH - right + left) / 2, HEIGHT - 10, xlabel, 12);
    this.add(`<g transform="rotate(-90 16 ${(HEIGHT - bottom + MARGIN.top) / 2})">` +
      `<text x="16" y="${(HEIGHT - bottom + MARGIN.top) / 2}" font-size="12" text-anchor="middle" fill="#222" font-family="sans-serif">${ylabel}</text></g>`);
  }

  render(): string {
    const meta = this.timestamp
      ? `<metadata>generated ${new Date().toISOString()}</metadata>\n`
      : "";
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">\n` +
      meta +
      `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>\n` +
      `<text x="${WIDTH / 2}" y="22" font-size="14" text-anchor="middle" fill="#111" font-family="sans-serif">${this.title}</text>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

export function frame(xs: [number, number], ys: [number, number]): { x: Scale; y: Scale } {
  const { top, right, bottom, left } = MARGIN;
  return {
    x: linearScale(xs[0], xs[1], left, WIDTH - right),
    y: linearScale(ys[0], ys[1], HEIGHT - bottom, top),
  };
}
