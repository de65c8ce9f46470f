import { describe, expect, it } from "vitest";
import { mkdtempSync, writeFileSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { PLOT_KINDS } from "../src/plots.js";
import { main } from "../src/cli.js";
import { SchemaError, readCsv, requireColumns } from "../src/csv.js";

function tmp(): string {
  return mkdtempSync(join(tmpdir(), "ozlab-plot-"));
}

function fixtures(dir: string): Record<string, string> {
  const files: Record<string, string> = {};
  const twoPoint = ["run_id,direction,n,estimate,stderr,samples"];
  for (let n = 1; n <= 16; n++) {
    const g = 0.8 * Math.exp(-n / 3) / Math.sqrt(n);
    twoPoint.push(`r1,1:0,${n},${g},${g * 0.01},1000000`);
  }
  files.two_point = join(dir, "two_point.csv");
  writeFileSync(files.two_point, twoPoint.join("\n") + "\n");

  const fit = ["run_id,n,fitted"];
  for (let n = 6; n <= 16; n++) {
    fit.push(`r1,${n},${0.8 * Math.exp(-n / 3) / Math.sqrt(n)}`);
  }
  files.fit = join(dir, "twopoint_fit.csv");
  writeFileSync(files.fit, fit.join("\n") + "\n");

  const half = ["run_id,m,L,estimate,stderr,hits"];
  for (let m = 0; m <= 6; m++) {
    const e = Math.pow(0.17, m);
    half.push(`r1,${m},4,${e},${e * 0.02},${Math.round(e * 1e6)}`);
  }
  files.halfspace = join(dir, "halfspace.csv");
  writeFileSync(files.halfspace, half.join("\n") + "\n");

  const gaps = ["run_id,gap,count"];
  for (let g = 2; g <= 12; g++) gaps.push(`r1,${g},${Math.round(4000 * Math.exp(-0.4 * g))}`);
  files.gaps = join(dir, "gaps.csv");
  writeFileSync(files.gaps, gaps.join("\n") + "\n");

  const clt = ["run_id,z,density,gaussian,count"];
  for (let i = 0; i < 40; i++) {
    const z = -3.9 + i * 0.2;
    const gauss = Math.exp(-z * z / 2) / Math.sqrt(2 * Math.PI);
    clt.push(`r1,${z.toFixed(2)},${(gauss * (1 + 0.03 * Math.sin(i))).toFixed(6)},${gauss.toFixed(6)},${Math.round(gauss * 5000)}`);
  }
  files.clt = join(dir, "clt_hist.csv");
  writeFileSync(files.clt, clt.join("\n") + "\n");

  const wulff = ["run_id,theta_w,zeta,mu,sigma,theta_v,xi_star,xi"];
  for (let i = 0; i < 16; i++) {
    const t = (i * Math.PI) / 30;
    const star = 2.2 + 0.1 * Math.cos(4 * t);
    wulff.push(`r1,${t.toFixed(6)},${(star / 4).toFixed(6)},0.01,1.1,${t.toFixed(6)},${star.toFixed(6)},${(star * 1.01).toFixed(6)}`);
  }
  files.wulff = join(dir, "wulff.csv");
  writeFileSync(files.wulff, wulff.join("\n") + "\n");

  files.shapes = join(dir, "shapes.json");
  const poly: [number, number][] = [];
  for (let i = 0; i < 64; i++) {
    const t = (i * 2 * Math.PI) / 64;
    poly.push([2.2 * Math.cos(t), 2.2 * Math.sin(t)]);
  }
  writeFileSync(files.shapes, JSON.stringify({
    u_polygon: poly, w_polygon: poly.map(([a, b]) => [a * 0.98, b * 0.98]),
    duality_max_violation_sigmas: 0.8,
  }));
  return files;
}

describe("plot kinds", () => {
  const dir = tmp();
  const files = fixtures(dir);
  const inputsByKind: Record<string, string[]> = {
    twopoint: [files.two_point, files.fit],
    ratios: [files.halfspace],
    gaps: [files.gaps],
    clt: [files.clt],
    wulff: [files.wulff, files.shapes],
  };

  for (const kind of Object.keys(PLOT_KINDS)) {
    it(`renders ${kind}`, () => {
      const svg = PLOT_KINDS[kind](inputsByKind[kind], { timestamp: false });
      expect(svg.startsWith("<svg")).toBe(true);
      expect(svg).toContain("</svg>");
      expect(svg.includes("<path") || svg.includes("<rect")).toBe(true);
    });
  }

  it("renders are byte-identical without timestamps", () => {
    for (const kind of Object.keys(PLOT_KINDS)) {
      const a = PLOT_KINDS[kind](inputsByKind[kind], { timestamp: false });
      const b = PLOT_KINDS[kind](inputsByKind[kind], { timestamp: false });
      expect(a).toBe(b);
      expect(a).not.toContain("<metadata>");
    }
  });

  it("embeds a timestamp by default", () => {
    const svg = PLOT_KINDS.gaps([files.gaps], { timestamp: true });
    expect(svg).toContain("<metadata>generated ");
  });

  it("never modifies inputs", () => {
    const before = readFileSync(files.two_point, "utf8");
    PLOT_KINDS.twopoint([files.two_point, files.fit], { timestamp: false });
    expect(readFileSync(files.two_point, "utf8")).toBe(before);
  });
});

describe("schema validation", () => {
  const dir = tmp();

  it("rejects wrong columns with a diagnostic", () => {
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "a,b\n1,2\n");
    expect(() => PLOT_KINDS.gaps([bad], { timestamp: false })).toThrowError(/missing column/);
  });

  it("requireColumns names the missing columns", () => {
    const t = readCsv(join(dir, "bad.csv"));
    try {
      requireColumns(t, ["gap", "count"], "bad.csv");
      throw new Error("should have thrown");
    } catch (e) {
      expect(e).toBeInstanceOf(SchemaError);
      expect(String(e)).toContain("gap");
      expect(String(e)).toContain("count");
    }
  });
});

describe("cli", () => {
  const dir = tmp();
  const files = fixtures(dir);

  it("writes an svg and returns 0", () => {
    const out = join(dir, "out.svg");
    const rc = main(["gaps", files.gaps, "-o", out, "--no-timestamp"]);
    expect(rc).toBe(0);
    expect(readFileSync(out, "utf8")).toContain("</svg>");
  });

  it("byte-identical outputs across runs with --no-timestamp", () => {
    const o1 = join(dir, "a.svg");
    const o2 = join(dir, "b.svg");
    expect(main(["clt", files.clt, "-o", o1, "--no-timestamp"])).toBe(0);
    expect(main(["clt", files.clt, "-o", o2, "--no-timestamp"])).toBe(0);
    expect(readFileSync(o1)).toEqual(readFileSync(o2));
  });

  it("usage errors exit 2", () => {
    expect(main([])).toBe(2);
    expect(main(["gaps"])).toBe(2);
    expect(main(["nope", files.gaps, "-o", join(dir, "x.svg")])).toBe(2);
  });

  it("schema mismatch exits 1", () => {
    const bad = join(dir, "bad2.csv");
    writeFileSync(bad, "x,y\n1,2\n");
    expect(main(["ratios", bad, "-o", join(dir, "y.svg")])).toBe(1);
  });
});
