import { mkdtempSync, readFileSync, writeFileSync, existsSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { CsvError, parseCsv } from "../src/csv.js";
import { loadBounds, loadCurve } from "../src/model.js";
import { renderSvg } from "../src/svg.js";
import { extractSeries, tidyCsv } from "../src/tidy.js";
import { run } from "../src/cli.js";

const CURVE_CSV = `ebno_db,frames,cw_errors,cer,ber,avg_iters,decoder,seed
1.0,2560,40,0.015625,0.004028,9.78,bp,3
1.5,12288,41,0.0033365885416666665,0.0008139,5.78,bp,3
2.0,165376,40,not-a-number,0.0,4.28,bp,3`;

const CURVE_OK = `ebno_db,frames,cw_errors,cer,ber,avg_iters,decoder,seed
1.0,2560,40,0.015625,0.004028,9.78,bp,3
1.5,12288,41,0.0033365885416666665,0.0008139,5.78,bp,3
2.0,165376,40,0.00024187306743,6.1e-05,4.28,bp,3`;

const BOUNDS_OK = `ebno_db,rcb,spb
1.0,0.05,0.009
1.5,0.004,0.0008
2.0,0.0004,6e-05`;

function tmpFile(name: string, text: string): string {
  const dir = mkdtempSync(join(tmpdir(), "plotkit-"));
  const p = join(dir, name);
  writeFileSync(p, text);
  return p;
}

describe("csv parsing", () => {
  it("rejects empty files", () => {
    const p = tmpFile("empty.csv", "");
    expect(() => loadCurve("x", p)).toThrow(CsvError);
  });

  it("rejects header-only files", () => {
    const p = tmpFile("hdr.csv", "ebno_db,frames\n");
    expect(() => loadCurve("x", p)).toThrow(/no data rows/);
  });

  it("names the offending column on schema mismatch", () => {
    const p = tmpFile(
      "bad.csv",
      "ebno_db,frames,cw_errors,cer,ber,avg_iters,decoder\n1,2,3,0.1,0.1,2,bp\n",
    );
    expect(() => loadCurve("x", p)).toThrow(/missing required column 'seed'/);
  });

  it("reports non-numeric tokens with column and row", () => {
    const p = tmpFile("nan.csv", CURVE_CSV);
    expect(() => loadCurve("x", p)).toThrow(/column 'cer' row 3/);
  });
});

describe("rendering", () => {
  it("renders one series per curve plus dashed bounds", () => {
    const curve = loadCurve("rate 1/3", tmpFile("c.csv", CURVE_OK));
    const bounds = loadBounds("(384,128)", tmpFile("b.csv", BOUNDS_OK));
    const svg = renderSvg({ curves: [curve], bounds: [bounds] }, "demo");
    const seriesCount = (svg.match(/class="series"/g) ?? []).length;
    expect(seriesCount).toBe(3); // curve + rcb + spb
    const dashed = (svg.match(/stroke-dasharray/g) ?? []).length;
    expect(dashed).toBeGreaterThanOrEqual(2);
    expect(svg).toContain("rate 1/3");
    expect(svg).toContain("(384,128) rcb");
    expect(svg).toContain("codeword error rate");
    // binomial error bars drawn for recorded frames
    expect((svg.match(/class="errorbar"/g) ?? []).length).toBe(3);
  });

  it("refuses an empty curve set", () => {
    expect(() => renderSvg({ curves: [], bounds: [] })).toThrow();
  });
});

describe("tidy data layer", () => {
  it("is byte-faithful to the inputs", () => {
    const cpath = tmpFile("c.csv", CURVE_OK);
    const bpath = tmpFile("b.csv", BOUNDS_OK);
    const set = {
      curves: [loadCurve("sim", cpath)],
      bounds: [loadBounds("ref", bpath)],
    };
    const tidy = tidyCsv(set);
    const back = extractSeries(tidy, "sim");
    const orig = parseCsv(readFileSync(cpath, "utf-8"));
    expect(back.columns).toEqual(orig.columns);
    expect(back.rows).toEqual(orig.rows);
    const backB = extractSeries(tidy, "ref");
    const origB = parseCsv(readFileSync(bpath, "utf-8"));
    expect(backB.rows).toEqual(origB.rows);
  });

  it("survives labels containing commas and quotes", () => {
    const cpath = tmpFile("c.csv", CURVE_OK);
    const label = 'mother (384,128) "spread-5"';
    const set = { curves: [loadCurve(label, cpath)], bounds: [] };
    const tidy = tidyCsv(set);
    const back = extractSeries(tidy, label);
    const orig = parseCsv(readFileSync(cpath, "utf-8"));
    expect(back.columns).toEqual(orig.columns);
    expect(back.rows).toEqual(orig.rows);
  });
});

describe("cli", () => {
  it("writes figure and tidy file", () => {
    const cpath = tmpFile("c.csv", CURVE_OK);
    const bpath = tmpFile("b.csv", BOUNDS_OK);
    const out = tmpFile("fig.svg", "placeholder");
    const tidy = tmpFile("tidy.csv", "placeholder");
    const rc = run([
      "--curve", `sim=${cpath}`,
      "--bound", `ref=${bpath}`,
      "--out", out,
      "--tidy", tidy,
      "--title", "acceptance demo",
    ]);
    expect(rc).toBe(0);
    expect(readFileSync(out, "utf-8")).toContain("<svg");
    expect(readFileSync(tidy, "utf-8").startsWith("series,kind,row,column,value")).toBe(true);
  });

  it("exits 2 on schema errors", () => {
    const bad = tmpFile("bad.csv", "a,b\n1,2\n");
    const rc = run(["--curve", `x=${bad}`, "--out", tmpFile("o.svg", "")]);
    expect(rc).toBe(2);
  });

  it("exits 2 on usage errors", () => {
    expect(run([])).toBe(2);
    expect(run(["--curve", "noequals"])).toBe(2);
  });
});

describe("acceptance round-trip on the real waterfall artifacts", () => {
  const curvePath = join(__dirname, "fixtures", "waterfall.csv");
  const boundsPath = join(__dirname, "fixtures", "bounds.csv");
  it.skipIf(!existsSync(curvePath))(
    "renders the simulation CSV with the bound overlay and reproduces it",
    () => {
      const set = {
        curves: [loadCurve("rate-1/3 (384,128) BP", curvePath)],
        bounds: [loadBounds("(384,128)", boundsPath)],
      };
      const svg = renderSvg(set, "waterfall acceptance");
      expect(svg).toContain("class=\"series\"");
      const tidy = tidyCsv(set);
      const back = extractSeries(tidy, "rate-1/3 (384,128) BP");
      const orig = parseCsv(readFileSync(curvePath, "utf-8"));
      expect(back.columns).toEqual(orig.columns);
      expect(back.rows).toEqual(orig.rows);
      const backB = extractSeries(tidy, "(384,128)");
      expect(backB.rows).toEqual(parseCsv(readFileSync(boundsPath, "utf-8")).rows);
    },
  );
});
