/** Minimal SVG emitters: grouped bar charts and line charts, no DOM. */

export interface BarGroup {
  label: string;
  bars: { label: string; value: number; highlight?: boolean }[];
}

export interface LineSeries {
  label: string;
  points: { x: number; y: number }[];
}

const WIDTH = 720;
const PANEL_HEIGHT = 360;
const MARGIN = { top: 36, right: 24, bottom: 64, left: 64 };

const PALETTE = ["#4878d0", "#ee854a", "#6acc64", "#d65f5f", "#956cb4", "#8c613c"];

const esc = (s: string): string =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

const fmt = (x: number): string => {
  if (!Number.isFinite(x)) return "0";
  return Number(x.toFixed(3)).toString();
};

const axisTicks = (maxValue: number, n = 5): number[] => {
  const ticks: number[] = [];
  for (let i = 0; i <= n; i++) {
    ticks.push((maxValue * i) / n);
  }
  return ticks;
};

export const svgDocument = (title: string, height: number, body: string): string =>
  `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${height}" ` +
  `viewBox="0 0 ${WIDTH} ${height}" font-family="sans-serif" font-size="12">\n` +
  `<title>${esc(title)}</title>\n` +
  `<rect width="${WIDTH}" height="${height}" fill="white"/>\n` +
  body +
  `</svg>\n`;

export const groupedBarChart = (
  title: string,
  yLabel: string,
  groups: BarGroup[],
  referenceLine?: number,
): string => {
  const innerW = WIDTH - MARGIN.left - MARGIN.right;
  const innerH = PANEL_HEIGHT - MARGIN.top - MARGIN.bottom;
  const allValues = groups.flatMap((g) => g.bars.map((b) => b.value));
  const maxValue = Math.max(...allValues, referenceLine ?? 0) * 1.1 || 1;
  const barLabels = [...new Set(groups.flatMap((g) => g.bars.map((b) => b.label)))];
  const groupW = innerW / groups.length;
  const barW = (groupW * 0.8) / Math.max(1, barLabels.length);

  let body = `<text x="${WIDTH / 2}" y="20" text-anchor="middle" font-size="15">${esc(title)}</text>\n`;
  body += `<text x="16" y="${MARGIN.top + innerH / 2}" text-anchor="middle" ` +
    `transform="rotate(-90 16 ${MARGIN.top + innerH / 2})">${esc(yLabel)}</text>\n`;
  for (const tick of axisTicks(maxValue)) {
    const y = MARGIN.top + innerH - (tick / maxValue) * innerH;
    body += `<line x1="${MARGIN.left}" y1="${fmt(y)}" x2="${WIDTH - MARGIN.right}" y2="${fmt(y)}" stroke="#ddd"/>\n`;
    body += `<text x="${MARGIN.left - 6}" y="${fmt(y + 4)}" text-anchor="end">${fmt(tick)}</text>\n`;
  }
  groups.forEach((group, gi) => {
    const x0 = MARGIN.left + gi * groupW + groupW * 0.1;
    group.bars.forEach((bar) => {
      const bi = barLabels.indexOf(bar.label);
      const h = (bar.value / maxValue) * innerH;
      const x = x0 + bi * barW;
      const y = MARGIN.top + innerH - h;
      const color = PALETTE[bi % PALETTE.length];
      const stroke = bar.highlight ? ' stroke="#222" stroke-width="2"' : "";
      body +=
        `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(barW * 0.9)}" height="${fmt(h)}" ` +
        `fill="${color}"${stroke} data-group="${esc(group.label)}" data-bar="${esc(bar.label)}" ` +
        `data-value="${bar.value}"/>\n`;
    });
    body += `<text x="${fmt(x0 + (groupW * 0.8) / 2)}" y="${PANEL_HEIGHT - MARGIN.bottom + 16}" ` +
      `text-anchor="middle">${esc(group.label)}</text>\n`;
  });
  if (referenceLine !== undefined) {
    const y = MARGIN.top + innerH - (referenceLine / maxValue) * innerH;
    body += `<line x1="${MARGIN.left}" y1="${fmt(y)}" x2="${WIDTH - MARGIN.right}" y2="${fmt(y)}" ` +
      `stroke="#888" stroke-dasharray="4 3"/>\n`;
  }
  barLabels.forEach((label, bi) => {
    const x = MARGIN.left + bi * 130;
    const y = PANEL_HEIGHT - 18;
    body += `<rect x="${x}" y="${y - 10}" width="12" height="12" fill="${PALETTE[bi % PALETTE.length]}"/>\n`;
    body += `<text x="${x + 16}" y="${y}">${esc(label)}</text>\n`;
  });
  return svgDocument(title, PANEL_HEIGHT, body);
};

const linePanel = (
  title: string,
  yLabel: string,
  series: LineSeries[],
  yTop: number,
  logX = false,
  yMaxOverride?: number,
): string => {
  const innerW = WIDTH - MARGIN.left - MARGIN.right;
  const innerH = PANEL_HEIGHT - MARGIN.top - MARGIN.bottom;
  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const ys = series.flatMap((s) => s.points.map((p) => p.y));
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const yMax = (yMaxOverride ?? Math.max(...ys)) * 1.1 || 1;
  const xPos = (x: number): number => {
    if (logX && xMax > xMin) {
      return MARGIN.left + ((Math.log2(x) - Math.log2(xMin)) / (Math.log2(xMax) - Math.log2(xMin))) * innerW;
    }
    return xMax === xMin ? MARGIN.left : MARGIN.left + ((x - xMin) / (xMax - xMin)) * innerW;
  };
  const yPos = (y: number): number => yTop + MARGIN.top + innerH - (y / yMax) * innerH;

  let body = `<text x="${WIDTH / 2}" y="${yTop + 20}" text-anchor="middle" font-size="15">${esc(title)}</text>\n`;
  body += `<text x="16" y="${yTop + MARGIN.top + innerH / 2}" text-anchor="middle" ` +
    `transform="rotate(-90 16 ${yTop + MARGIN.top + innerH / 2})">${esc(yLabel)}</text>\n`;
  for (const tick of axisTicks(yMax)) {
    const y = yPos(tick);
    body += `<line x1="${MARGIN.left}" y1="${fmt(y)}" x2="${WIDTH - MARGIN.right}" y2="${fmt(y)}" stroke="#ddd"/>\n`;
    body += `<text x="${MARGIN.left - 6}" y="${fmt(y + 4)}" text-anchor="end">${fmt(tick)}</text>\n`;
  }
  for (const x of [...new Set(xs)].sort((a, b) => a - b)) {
    body += `<text x="${fmt(xPos(x))}" y="${yTop + PANEL_HEIGHT - MARGIN.bottom + 16}" ` +
      `text-anchor="middle">${x}</text>\n`;
  }
  series.forEach((s, si) => {
    const color = PALETTE[si % PALETTE.length];
    const path = s.points
      .map((p, i) => `${i === 0 ? "M" : "L"}${fmt(xPos(p.x))} ${fmt(yPos(p.y))}`)
      .join(" ");
    body += `<path d="${path}" fill="none" stroke="${color}" stroke-width="2" data-series="${esc(s.label)}"/>\n`;
    for (const p of s.points) {
      body += `<circle cx="${fmt(xPos(p.x))}" cy="${fmt(yPos(p.y))}" r="3.5" fill="${color}" ` +
        `data-series="${esc(s.label)}" data-x="${p.x}" data-y="${p.y}"/>\n`;
    }
    body += `<rect x="${MARGIN.left + si * 150}" y="${yTop + PANEL_HEIGHT - 24}" width="12" height="12" fill="${color}"/>\n`;
    body += `<text x="${MARGIN.left + si * 150 + 16}" y="${yTop + PANEL_HEIGHT - 14}">${esc(s.label)}</text>\n`;
  });
  return body;
};

/** Two stacked panels: computation time and parallel efficiency vs threads. */
export const scalingChart = (
  title: string,
  timing: LineSeries[],
  efficiency: LineSeries[],
): string => {
  const body =
    linePanel(`${title} - computation time [s]`, "seconds", timing, 0, true) +
    linePanel("parallel efficiency T(1)/(p*T(p))", "efficiency", efficiency, PANEL_HEIGHT, true, 1.0);
  return svgDocument(title, 2 * PANEL_HEIGHT, body);
};
