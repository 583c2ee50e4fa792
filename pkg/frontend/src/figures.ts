/** Figure data computation: pure functions from parsed CSV rows to the
 * numbers each figure plots.  Sort orders are fixed so identical input
 * yields identical figures. */

import { BenchRow } from "./csv";

export interface SpeedupBar {
  kernel: string;
  backend: string;
  speedup: number; // scalar mean / backend mean at threads=1
}

export interface ScalingPoint {
  backend: string;
  threads: number;
  computationS: number;
  efficiency: number; // T(1) / (p * T(p))
}

export interface CompareBar {
  group: "one core" | "all cores";
  variant: "legacy" | "scalar" | "simd";
  computationS: number;
}

const byKernelOrder = (a: string, b: string): number => {
  const order = ["reconstruct", "flux", "hydro_update", "monopole", "multipole", "total"];
  const ia = order.indexOf(a);
  const ib = order.indexOf(b);
  return (ia < 0 ? order.length : ia) - (ib < 0 ? order.length : ib) || a.localeCompare(b);
};

export const uniqueSorted = <T>(values: T[]): T[] =>
  [...new Set(values)].sort((a, b) => (a < b ? -1 : a > b ? 1 : 0));

const meanOf = (rows: BenchRow[]): number =>
  rows.reduce((acc, r) => acc + r.meanNs, 0) / rows.length;

const avgComputation = (rows: BenchRow[]): number =>
  rows.reduce((acc, r) => acc + r.computationS, 0) / rows.length;

export const requireSimdKey = (rows: BenchRow[], simdKey: string): void => {
  if (!rows.some((r) => r.backend === simdKey)) {
    const present = uniqueSorted(rows.map((r) => r.backend)).join(", ");
    throw new Error(`simd key '${simdKey}' not present in the data (backends: ${present})`);
  }
};

/** Per-kernel single-core speedup of every non-scalar backend over scalar. */
export const computeSpeedups = (rows: BenchRow[]): SpeedupBar[] => {
  const single = rows.filter((r) => r.threads === 1);
  const kernels = uniqueSorted(single.map((r) => r.kernel)).sort(byKernelOrder);
  const backends = uniqueSorted(single.map((r) => r.backend));
  const bars: SpeedupBar[] = [];
  for (const kernel of kernels) {
    const baseRows = single.filter((r) => r.backend === "scalar" && r.kernel === kernel);
    if (baseRows.length === 0) {
      throw new Error(`missing scalar baseline at threads=1 for kernel '${kernel}'`);
    }
    const base = meanOf(baseRows);
    for (const backend of backends) {
      const ours = single.filter((r) => r.backend === backend && r.kernel === kernel);
      if (ours.length === 0) {
        continue;
      }
      bars.push({ kernel, backend, speedup: base / meanOf(ours) });
    }
  }
  return bars;
};

/** Computation time per thread count and backend, plus parallel efficiency. */
export const computeScaling = (rows: BenchRow[]): ScalingPoint[] => {
  const totals = rows.filter((r) => r.kernel === "total");
  const threadCounts = uniqueSorted(totals.map((r) => r.threads));
  if (threadCounts.length < 2) {
    throw new Error(
      `scaling needs at least two thread counts, found ${threadCounts.length} (${threadCounts.join(", ")})`,
    );
  }
  const backends = uniqueSorted(totals.map((r) => r.backend));
  const points: ScalingPoint[] = [];
  for (const backend of backends) {
    const mine = totals.filter((r) => r.backend === backend);
    const t1rows = mine.filter((r) => r.threads === 1);
    if (t1rows.length === 0) {
      continue;
    }
    const t1 = avgComputation(t1rows);
    for (const threads of threadCounts) {
      const here = mine.filter((r) => r.threads === threads);
      if (here.length === 0) {
        continue;
      }
      const tp = avgComputation(here);
      points.push({
        backend,
        threads,
        computationS: tp,
        efficiency: t1 / (threads * tp),
      });
    }
  }
  return points;
};

/** Grouped one-core / all-cores comparison of the hydro implementations.
 * The scenario compared is the one the legacy rows were produced with. */
export const computeHydroCompare = (
  rows: BenchRow[],
  legacyRows: BenchRow[],
  simdKey: string,
): CompareBar[] => {
  if (legacyRows.length === 0) {
    throw new Error("hydro comparison requires legacy rows (see --legacy-files)");
  }
  const scenarios = uniqueSorted(legacyRows.map((r) => r.scenario));
  const scoped = rows.filter((r) => scenarios.includes(r.scenario) && r.kernel === "total");
  const legacyTotals = legacyRows.filter((r) => r.kernel === "total");

  const variants: Record<string, BenchRow[]> = {
    legacy: legacyTotals,
    scalar: scoped.filter((r) => r.backend === "scalar"),
    simd: scoped.filter((r) => r.backend === simdKey),
  };
  const missing = Object.entries(variants)
    .filter(([, v]) => v.length === 0)
    .map(([k]) => k);
  if (missing.length > 0) {
    const present = Object.entries(variants)
      .filter(([, v]) => v.length > 0)
      .map(([k]) => k);
    throw new Error(
      `missing hydro variant(s): ${missing.join(", ")} (present: ${present.join(", ") || "none"})`,
    );
  }

  const bars: CompareBar[] = [];
  for (const [variant, vrows] of Object.entries(variants) as ["legacy" | "scalar" | "simd", BenchRow[]][]) {
    const threadCounts = uniqueSorted(vrows.map((r) => r.threads));
    const one = vrows.filter((r) => r.threads === Math.min(...threadCounts));
    const all = vrows.filter((r) => r.threads === Math.max(...threadCounts));
    bars.push({ group: "one core", variant, computationS: avgComputation(one) });
    bars.push({ group: "all cores", variant, computationS: avgComputation(all) });
  }
  return bars;
};
