/** CLI: read the harness CSV, write the three figure families as SVG. */

import * as fs from "node:fs";
import * as path from "node:path";

import { BenchRow, parseCsv } from "./csv";
import {
  computeHydroCompare,
  computeScaling,
  computeSpeedups,
  requireSimdKey,
  uniqueSorted,
} from "./figures";
import { BarGroup, groupedBarChart, LineSeries, scalingChart } from "./svg";

export interface PlotRequest {
  filename: string;
  simdKey: string;
  outdir: string;
  legacyFiles: string[];
}

const loadRows = (file: string): BenchRow[] => {
  if (!fs.existsSync(file)) {
    throw new Error(`no such file: ${file}`);
  }
  return parseCsv(fs.readFileSync(file, "utf-8"), file);
};

export const plotSpeedup = (req: PlotRequest, rows: BenchRow[]): string => {
  const bars = computeSpeedups(rows).filter((b) => b.backend !== "scalar");
  const kernels = uniqueSorted(bars.map((b) => b.kernel));
  const groups: BarGroup[] = kernels.map((kernel) => ({
    label: kernel,
    bars: bars
      .filter((b) => b.kernel === kernel)
      .map((b) => ({ label: b.backend, value: b.speedup, highlight: b.backend === req.simdKey })),
  }));
  const file = path.join(req.outdir, "simd_speedup.svg");
  fs.writeFileSync(
    file,
    groupedBarChart("Single-core SIMD speedup over scalar", "speedup", groups, 1.0),
  );
  return file;
};

export const plotScaling = (req: PlotRequest, rows: BenchRow[]): string => {
  const points = computeScaling(rows);
  const backends = uniqueSorted(points.map((p) => p.backend));
  const timing: LineSeries[] = backends.map((backend) => ({
    label: backend,
    points: points
      .filter((p) => p.backend === backend)
      .map((p) => ({ x: p.threads, y: p.computationS })),
  }));
  const efficiency: LineSeries[] = backends.map((backend) => ({
    label: backend,
    points: points
      .filter((p) => p.backend === backend)
      .map((p) => ({ x: p.threads, y: p.efficiency })),
  }));
  const file = path.join(req.outdir, "node_scaling.svg");
  fs.writeFileSync(file, scalingChart("Node-level scaling", timing, efficiency));
  return file;
};

export const plotHydroCompare = (
  req: PlotRequest,
  rows: BenchRow[],
  legacyRows: BenchRow[],
): string => {
  const bars = computeHydroCompare(rows, legacyRows, req.simdKey);
  const groups: BarGroup[] = (["one core", "all cores"] as const).map((group) => ({
    label: group,
    bars: bars
      .filter((b) => b.group === group)
      .map((b) => ({ label: b.variant, value: b.computationS, highlight: b.variant === "simd" })),
  }));
  const file = path.join(req.outdir, "hydro_compare.svg");
  fs.writeFileSync(
    file,
    groupedBarChart("Hydro-only scenario: legacy vs scalar vs simd", "computation time [s]", groups),
  );
  return file;
};

export const runPlots = (req: PlotRequest): string[] => {
  const rows = loadRows(req.filename);
  requireSimdKey(rows, req.simdKey);
  fs.mkdirSync(req.outdir, { recursive: true });
  const files = [plotSpeedup(req, rows), plotScaling(req, rows)];
  if (req.legacyFiles.length > 0) {
    const legacyRows = req.legacyFiles.flatMap((f) => loadRows(f));
    files.push(plotHydroCompare(req, rows, legacyRows));
  } else {
    console.error("note: no --legacy-files given, skipping the hydro comparison figure");
  }
  return files;
};

const parseArgs = (argv: string[]): PlotRequest => {
  const get = (flag: string): string | undefined => {
    const pref = `${flag}=`;
    const hit = argv.find((a) => a.startsWith(pref));
    if (hit !== undefined) {
      return hit.slice(pref.length);
    }
    const i = argv.indexOf(flag);
    return i >= 0 && i + 1 < argv.length ? argv[i + 1] : undefined;
  };
  const filename = get("--filename");
  const simdKey = get("--simd-key");
  if (filename === undefined || simdKey === undefined) {
    throw new Error(
      "usage: cli --filename RESULTS.csv --simd-key BACKEND [--outdir DIR] [--legacy-files a.csv,b.csv]",
    );
  }
  const legacy = get("--legacy-files");
  return {
    filename,
    simdKey,
    outdir: get("--outdir") ?? ".",
    legacyFiles: legacy === undefined ? [] : legacy.split(",").filter((s) => s.length > 0),
  };
};

export const main = (argv: string[]): number => {
  try {
    const files = runPlots(parseArgs(argv));
    for (const f of files) {
      console.log(`wrote ${f}`);
    }
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
};

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
