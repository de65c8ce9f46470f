/** The five plot kinds, all pure functions of their input files.
 *
 * Estimated quantities (fit lines) are read from files the experiment driver
 * staged; this module only applies presentation transforms (logs and ratios
 * of adjacent rows).
 */

import { readCsv, requireColumns, numbers, SchemaError, Table } from "./csv.js";
import { SvgDoc, frame, fmt } from "./svg.js";
import { readFileSync } from "node:fs";

export interface PlotOptions {
  timestamp: boolean;
}

function log10(v: number): number {
  return Math.log(v) / Math.LN10;
}

/** log G(n) scatter with the staged correlation-length fit overlay. */
export function plotTwopoint(inputs: string[], opt: PlotOptions): string {
  const data = readCsv(inputs[0]);
  requireColumns(data, ["n", "estimate", "stderr"], inputs[0]);
  const rows = data.rows.filter((r) => Number(r.estimate) > 0 && Number(r.n) > 0);
  const n = rows.map((r) => Number(r.n));
  const g = rows.map((r) => log10(Number(r.estimate)));
  const doc = new SvgDoc("two-point function: log10 G(n)", opt.timestamp);
  const { x, y } = frame([0, Math.max(...n) + 1], [Math.min(...g) - 0.5, Math.max(...g) + 0.5]);
  doc.axes(x, y, "n", "log10 G");
  for (let i = 0; i < n.length; i++) {
    doc.circle(x(n[i]), y(g[i]), 2.5, "#1f5fa8");
  }
  if (inputs.length > 1) {
    const fit = readCsv(inputs[1]);
    requireColumns(fit, ["n", "fitted"], inputs[1]);
    const pts: [number, number][] = fit.rows.map((r) => [
      x(Number(r.n)),
      y(log10(Number(r.fitted))),
    ]);
    doc.path(pts, "#c44", 1.5);
    doc.text(x(n[n.length - 1]), y(g[0]), "fit", 11, "end", "#c44");
  }
  return doc.render();
}

/** Successive half-space survival ratios: flat means pure exponential decay. */
export function plotRatios(inputs: string[], opt: PlotOptions): string {
  const data = readCsv(inputs[0]);
  requireColumns(data, ["m", "estimate", "hits"], inputs[0]);
  const rows = data.rows.filter((r) => Number(r.hits) > 0);
  const ms: number[] = [];
  const ratio: number[] = [];
  for (let i = 1; i < rows.length; i++) {
    const a = Number(rows[i - 1].estimate);
    const b = Number(rows[i].estimate);
    if (a > 0 && b > 0) {
      ms.push(Number(rows[i].m));
      ratio.push(b / a);
    }
  }
  if (ms.length === 0) throw new SchemaError(`${inputs[0]}: no consecutive positive rows`);
  const doc = new SvgDoc("slab survival ratios r_m", opt.timestamp);
  const { x, y } = frame([0, Math.max(...ms) + 1], [0, Math.max(...ratio) * 1.3]);
  doc.axes(x, y, "m (slabs)", "hit(m) / hit(m-1)");
  doc.path(ms.map((m, i) => [x(m), y(ratio[i])] as [number, number]), "#1f5fa8");
  ms.forEach((m, i) => doc.circle(x(m), y(ratio[i]), 2.5, "#1f5fa8"));
  const tail = ratio[ratio.length - 1];
  doc.line(x.domain[0] === 0 ? x(0) : x(ms[0]), y(tail), x(ms[ms.length - 1]), y(tail), "#c44", 1);
  return doc.render();
}

/** Pre-renewal gap histogram on a log count scale. */
export function plotGaps(inputs: string[], opt: PlotOptions): string {
  const data = readCsv(inputs[0]);
  requireColumns(data, ["gap", "count"], inputs[0]);
  const gaps = numbers(data, "gap");
  const counts = numbers(data, "count");
  const doc = new SvgDoc("pre-renewal gap histogram", opt.timestamp);
  const logs = counts.map((c) => log10(Math.max(c, 0.5)));
  const { x, y } = frame([0, Math.max(...gaps) + 1], [0, Math.max(...logs) * 1.1 + 0.2]);
  doc.axes(x, y, "gap (slabs)", "log10 count");
  const w = Math.max(2, (x(1) - x(0)) * 0.7);
  gaps.forEach((gp, i) => {
    doc.rect(x(gp) - w / 2, y(logs[i]), w, y(0) - y(logs[i]), "#5a9e6f");
  });
  return doc.render();
}

/** Endpoint histogram of the survival-conditioned chain vs the Gaussian. */
export function plotClt(inputs: string[], opt: PlotOptions): string {
  const data = readCsv(inputs[0]);
  requireColumns(data, ["z", "density", "gaussian"], inputs[0]);
  const z = numbers(data, "z");
  const dens = numbers(data, "density");
  const gauss = numbers(data, "gaussian");
  const doc = new SvgDoc("endpoint law vs Gaussian", opt.timestamp);
  const top = Math.max(...dens, ...gauss) * 1.15;
  const { x, y } = frame([Math.min(...z), Math.max(...z)], [0, top]);
  doc.axes(x, y, "z = (X_n - n mu) / (sigma sqrt n)", "density");
  const w = z.length > 1 ? (x(z[1]) - x(z[0])) * 0.9 : 4;
  z.forEach((zz, i) => {
    if (dens[i] > 0) doc.rect(x(zz) - w / 2, y(dens[i]), w, y(0) - y(dens[i]), "#9db8d9");
  });
  doc.path(z.map((zz, i) => [x(zz), y(gauss[i])] as [number, number]), "#c44", 2);
  return doc.render();
}

interface Shapes {
  u_polygon: [number, number][];
  w_polygon: [number, number][];
  duality_max_violation_sigmas?: number;
}

/** The gauge ball of 1/xi and the Wulff shape of 1/xi*, duality annotated. */
export function plotWulff(inputs: string[], opt: PlotOptions): string {
  const data = readCsv(inputs[0]);
  requireColumns(data, ["theta_w", "xi_star", "xi", "theta_v"], inputs[0]);
  let shapes: Shapes | null = null;
  if (inputs.length > 1) {
    shapes = JSON.parse(readFileSync(inputs[1], "utf8")) as Shapes;
  }
  const thetaW = numbers(data, "theta_w");
  const xiStar = numbers(data, "xi_star");
  const thetaV = numbers(data, "theta_v");
  const xi = numbers(data, "xi");
  let uPoly: [number, number][];
  let wPoly: [number, number][];
  if (shapes) {
    uPoly = shapes.u_polygon;
    wPoly = shapes.w_polygon;
  } else {
    const reflect = (pts: [number, number][]) => {
      const out: [number, number][] = [];
      for (const [sx, sy] of [[1, 1], [-1, 1], [-1, -1], [1, -1]] as [number, number][]) {
        for (const [px, py] of pts) out.push([sx * px, sy * py]);
      }
      return out;
    };
    wPoly = reflect(thetaW.map((t, i) => [xiStar[i] * Math.cos(t), xiStar[i] * Math.sin(t)]));
    uPoly = reflect(thetaV.map((t, i) => [xi[i] * Math.cos(t), xi[i] * Math.sin(t)]));
  }
  const order = (pts: [number, number][]) =>
    [...pts].sort((a, b) => Math.atan2(a[1], a[0]) - Math.atan2(b[1], b[0]));
  uPoly = order(uPoly);
  wPoly = order(wPoly);
  const r = Math.max(...uPoly.flat().map(Math.abs), ...wPoly.flat().map(Math.abs)) * 1.15;
  const doc = new SvgDoc("correlation-length ball U and Wulff shape W", opt.timestamp);
  const { x, y } = frame([-r, r], [-r, r]);
  doc.axes(x, y, "e1", "e2");
  doc.path(uPoly.map(([px, py]) => [x(px), y(py)] as [number, number]), "#1f5fa8", 2, true);
  doc.path(wPoly.map(([px, py]) => [x(px), y(py)] as [number, number]), "#c44", 2, true);
  doc.text(x(0), y(r * 0.92), "U (gauge of 1/xi)", 11, "middle", "#1f5fa8");
  doc.text(x(0), y(-r * 0.92), "W (gauge of 1/xi*)", 11, "middle", "#c44");
  if (shapes?.duality_max_violation_sigmas !== undefined) {
    doc.text(x(r * 0.0), y(-r * 1.02),
      `duality: max violation ${fmt(shapes.duality_max_violation_sigmas)} sigma`, 10);
  }
  return doc.render();
}

export const PLOT_KINDS: Record<string, (inputs: string[], opt: PlotOptions) => string> = {
  twopoint: plotTwopoint,
  ratios: plotRatios,
  gaps: plotGaps,
  clt: plotClt,
  wulff: plotWulff,
};
