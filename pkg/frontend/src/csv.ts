/** Parsing for the benchmark harness CSV (fixed schema, no quoting). */

export interface BenchRow {
  scenario: string;
  backend: string;
  simdWidth: number;
  threads: number;
  tasksPerMultipole: number;
  kernel: string;
  count: number;
  meanNs: number;
  totalNs: number;
  computationS: number;
}

export const CSV_HEADER =
  "scenario,backend,simd_width,threads,tasks_per_multipole," +
  "kernel,count,mean_ns,total_ns,computation_s";

export const parseCsv = (text: string, source = "<csv>"): BenchRow[] => {
  const lines = text.split("\n").filter((line) => line.trim().length > 0);
  if (lines.length === 0) {
    throw new Error(`${source}: empty file`);
  }
  if (lines[0] !== CSV_HEADER) {
    throw new Error(
      `${source}: header does not match the harness schema\n  got:      ${lines[0]}\n  expected: ${CSV_HEADER}`,
    );
  }
  return lines.slice(1).map((line, i) => {
    const parts = line.split(",");
    if (parts.length !== 10) {
      throw new Error(`${source}:${i + 2}: expected 10 fields, got ${parts.length}`);
    }
    const num = (field: string, what: string): number => {
      const value = Number(field);
      if (!Number.isFinite(value)) {
        throw new Error(`${source}:${i + 2}: ${what} is not a finite number: ${field}`);
      }
      return value;
    };
    return {
      scenario: parts[0]!,
      backend: parts[1]!,
      simdWidth: num(parts[2]!, "simd_width"),
      threads: num(parts[3]!, "threads"),
      tasksPerMultipole: num(parts[4]!, "tasks_per_multipole"),
      kernel: parts[5]!,
      count: num(parts[6]!, "count"),
      meanNs: num(parts[7]!, "mean_ns"),
      totalNs: num(parts[8]!, "total_ns"),
      computationS: num(parts[9]!, "computation_s"),
    };
  });
};
