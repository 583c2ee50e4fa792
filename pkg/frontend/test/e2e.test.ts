import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { parseCsv } from "../src/csv";
import { computeSpeedups } from "../src/figures";
import { main, runPlots } from "../src/cli";

const SWEEP = path.join(__dirname, "..", "testdata", "sweep.csv");
const LEGACY = path.join(__dirname, "..", "testdata", "legacy.csv");

let outdir: string;

beforeAll(() => {
  outdir = fs.mkdtempSync(path.join(os.tmpdir(), "simdgrid-plots-"));
});

afterAll(() => {
  fs.rmSync(outdir, { recursive: true, force: true });
});

describe("real harness CSV", () => {
  it("parses without modification", () => {
    const rows = parseCsv(fs.readFileSync(SWEEP, "utf-8"), SWEEP);
    expect(rows.length).toBeGreaterThan(0);
    expect(new Set(rows.map((r) => r.backend))).toContain("scalar");
  });

  it("all three figure files are produced", () => {
    const files = runPlots({
      filename: SWEEP,
      simdKey: "emulated8",
      outdir,
      legacyFiles: [LEGACY],
    });
    expect(files).toHaveLength(3);
    for (const f of files) {
      const text = fs.readFileSync(f, "utf-8");
      expect(text.startsWith("<svg")).toBe(true);
      expect(text.trimEnd().endsWith("</svg>")).toBe(true);
    }
    expect(files.map((f) => path.basename(f)).sort()).toEqual([
      "hydro_compare.svg",
      "node_scaling.svg",
      "simd_speedup.svg",
    ]);
  });

  it("figures are a pure function of the input", () => {
    const first = runPlots({
      filename: SWEEP,
      simdKey: "emulated8",
      outdir,
      legacyFiles: [LEGACY],
    }).map((f) => fs.readFileSync(f, "utf-8"));
    const second = runPlots({
      filename: SWEEP,
      simdKey: "emulated8",
      outdir,
      legacyFiles: [LEGACY],
    }).map((f) => fs.readFileSync(f, "utf-8"));
    expect(second).toEqual(first);
  });

  it("every speedup bar is non-negative", () => {
    const rows = parseCsv(fs.readFileSync(SWEEP, "utf-8"), SWEEP);
    for (const bar of computeSpeedups(rows)) {
      expect(bar.speedup).toBeGreaterThanOrEqual(0);
    }
  });

  it("cli entry succeeds end to end", () => {
    const code = main([
      "--filename", SWEEP,
      "--simd-key", "emulated8",
      "--outdir", path.join(outdir, "cli"),
      "--legacy-files", LEGACY,
    ]);
    expect(code).toBe(0);
    expect(fs.existsSync(path.join(outdir, "cli", "simd_speedup.svg"))).toBe(true);
  });

  it("cli reports a missing simd key", () => {
    const code = main(["--filename", SWEEP, "--simd-key", "sve512", "--outdir", outdir]);
    expect(code).toBe(1);
  });

  it("cli reports a missing file", () => {
    const code = main(["--filename", "/nonexistent.csv", "--simd-key", "scalar"]);
    expect(code).toBe(1);
  });
});
