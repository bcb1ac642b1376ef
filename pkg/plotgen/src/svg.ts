// Minimal deterministic SVG line-plot builder: linear/log scales, grid,
// multi-series polylines (optionally dashed or per-segment colored),
// vertical markers, legend, and an optional colorbar.

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color: string;
  dashed?: boolean;
  /** per-point colors; when set the curve is drawn as colored segments */
  segmentColors?: string[];
  width?: number;
}

export interface Marker {
  x: number;
  label?: string;
}

export interface PlotOptions {
  title?: string;
  xLabel: string;
  yLabel: string;
  logX?: boolean;
  logY?: boolean;
  width?: number;
  height?: number;
  markers?: Marker[];
  colorbar?: { label: string; map: (t: number) => string };
}

interface Scale {
  (v: number): number;
}

function makeScale(lo: number, hi: number, outLo: number, outHi: number, log: boolean): Scale {
  const a = log ? Math.log10(lo) : lo;
  const b = log ? Math.log10(hi) : hi;
  const span = b - a || 1;
  return (v: number) => {
    const t = ((log ? Math.log10(v) : v) - a) / span;
    return outLo + t * (outHi - outLo);
  };
}

function linearTicks(lo: number, hi: number, n = 6): number[] {
  const span = hi - lo || 1;
  const step = Math.pow(10, Math.floor(Math.log10(span / n)));
  const err = span / n / step;
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = mult * step;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12 * span; v += s) {
    ticks.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return ticks;
}

function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-12); Math.pow(10, e) <= hi * (1 + 1e-12); e++) {
    ticks.push(Math.pow(10, e));
  }
  if (ticks.length < 2) return [lo, hi];
  return ticks;
}

function fmt(v: number): string {
  if (v === 0) return '0';
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0).replace('e+', 'e');
  return String(Math.round(v * 1e6) / 1e6);
}

const esc = (s: string) =>
  s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');

// Dense curves are thinned to per-bucket extremes, which keeps every lobe
// and null at far fewer vertices than the raw sampling.
function decimateIndices(y: number[], maxPoints = 4096): number[] {
  if (y.length <= maxPoints) return y.map((_, i) => i);
  const buckets = Math.floor(maxPoints / 2);
  const out: number[] = [];
  for (let b = 0; b < buckets; b++) {
    const lo = Math.floor((b * y.length) / buckets);
    const hi = Math.floor(((b + 1) * y.length) / buckets);
    let iMin = lo, iMax = lo;
    for (let i = lo; i < hi; i++) {
      if (y[i] < y[iMin]) iMin = i;
      if (y[i] > y[iMax]) iMax = i;
    }
    out.push(Math.min(iMin, iMax));
    if (iMin !== iMax) out.push(Math.max(iMin, iMax));
  }
  out.push(y.length - 1);
  return out;
}

export function renderPlot(series: Series[], opts: PlotOptions): string {
  if (series.length === 0) throw new Error('nothing to plot');
  const W = opts.width ?? 760;
  const H = opts.height ?? 480;
  const m = { l: 72, r: opts.colorbar ? 96 : 24, t: opts.title ? 40 : 20, b: 52 };

  let xLo = Infinity, xHi = -Infinity, yLo = Infinity, yHi = -Infinity;
  let nx = 0, ny = 0;
  for (const s of series) {
    for (const v of s.x) {
      if (!Number.isFinite(v) || (opts.logX && v <= 0)) continue;
      nx++;
      if (v < xLo) xLo = v;
      if (v > xHi) xHi = v;
    }
    for (const v of s.y) {
      if (!Number.isFinite(v) || (opts.logY && v <= 0)) continue;
      ny++;
      if (v < yLo) yLo = v;
      if (v > yHi) yHi = v;
    }
  }
  for (const mk of opts.markers ?? []) {
    nx++;
    if (mk.x < xLo) xLo = mk.x;
    if (mk.x > xHi) xHi = mk.x;
  }
  if (nx === 0 || ny === 0) throw new Error('no plottable points');
  if (!opts.logY) {
    const pad = 0.05 * (yHi - yLo || 1);
    yLo -= pad;
    yHi += pad;
  } else {
    yLo /= 1.3;
    yHi *= 1.3;
  }

  const sx = makeScale(xLo, xHi, m.l, W - m.r, !!opts.logX);
  const sy = makeScale(yLo, yHi, H - m.b, m.t, !!opts.logY);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}" font-family="Helvetica,Arial,sans-serif">`,
  );
  parts.push(`<rect width="${W}" height="${H}" fill="white"/>`);
  if (opts.title) {
    parts.push(
      `<text x="${(m.l + W - m.r) / 2}" y="24" text-anchor="middle" font-size="15">${esc(opts.title)}</text>`,
    );
  }

  const xTicks = (opts.logX ? logTicks(xLo, xHi) : linearTicks(xLo, xHi)).filter(
    (v) => v >= xLo - 1e-12 && v <= xHi * (1 + 1e-12),
  );
  const yTicks = (opts.logY ? logTicks(yLo, yHi) : linearTicks(yLo, yHi)).filter(
    (v) => v >= yLo && v <= yHi,
  );
  for (const t of xTicks) {
    const x = sx(t);
    parts.push(`<line x1="${x.toFixed(2)}" y1="${m.t}" x2="${x.toFixed(2)}" y2="${H - m.b}" stroke="#e0e0e0"/>`);
    parts.push(
      `<text x="${x.toFixed(2)}" y="${H - m.b + 18}" text-anchor="middle" font-size="11">${fmt(t)}</text>`,
    );
  }
  for (const t of yTicks) {
    const y = sy(t);
    parts.push(`<line x1="${m.l}" y1="${y.toFixed(2)}" x2="${W - m.r}" y2="${y.toFixed(2)}" stroke="#e0e0e0"/>`);
    parts.push(
      `<text x="${m.l - 8}" y="${(y + 4).toFixed(2)}" text-anchor="end" font-size="11">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<rect x="${m.l}" y="${m.t}" width="${W - m.l - m.r}" height="${H - m.t - m.b}" fill="none" stroke="#333"/>`,
  );
  parts.push(
    `<text x="${(m.l + W - m.r) / 2}" y="${H - 14}" text-anchor="middle" font-size="13">${esc(opts.xLabel)}</text>`,
  );
  parts.push(
    `<text x="18" y="${(m.t + H - m.b) / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 18 ${(m.t + H - m.b) / 2})">${esc(opts.yLabel)}</text>`,
  );

  for (const mk of opts.markers ?? []) {
    const x = sx(mk.x);
    parts.push(
      `<line class="marker" x1="${x.toFixed(2)}" y1="${m.t}" x2="${x.toFixed(2)}" y2="${H - m.b}" stroke="#555" stroke-dasharray="4,4"/>`,
    );
    if (mk.label) {
      parts.push(
        `<text x="${(x + 4).toFixed(2)}" y="${m.t + 14}" font-size="11" fill="#555">${esc(mk.label)}</text>`,
      );
    }
  }

  const point = (s: Series, i: number): string | null => {
    const xv = s.x[i];
    const yv = s.y[i];
    if (!Number.isFinite(xv) || !Number.isFinite(yv)) return null;
    if (opts.logX && xv <= 0) return null;
    if (opts.logY && yv <= 0) return null;
    return `${sx(xv).toFixed(2)},${sy(Math.min(Math.max(yv, yLo), yHi)).toFixed(2)}`;
  };

  for (const s of series) {
    const width = s.width ?? 1.6;
    if (s.segmentColors) {
      for (let i = 0; i + 1 < s.x.length; i++) {
        const a = point(s, i);
        const b = point(s, i + 1);
        if (a === null || b === null) continue;
        const [x1, y1] = a.split(',');
        const [x2, y2] = b.split(',');
        parts.push(
          `<line x1="${x1}" y1="${y1}" x2="${x2}" y2="${y2}" stroke="${s.segmentColors[i]}" stroke-width="${width + 0.6}"/>`,
        );
      }
      continue;
    }
    const pts: string[] = [];
    for (const i of decimateIndices(s.y)) {
      const p = point(s, i);
      if (p !== null) pts.push(p);
    }
    const dash = s.dashed ? ' stroke-dasharray="7,4"' : '';
    parts.push(
      `<polyline points="${pts.join(' ')}" fill="none" stroke="${s.color}" stroke-width="${width}"${dash}/>`,
    );
  }

  // legend
  let ly = m.t + 10;
  for (const s of series) {
    if (s.segmentColors) continue;
    const lx = W - m.r - 150;
    const dash = s.dashed ? ' stroke-dasharray="7,4"' : '';
    parts.push(
      `<line x1="${lx}" y1="${ly}" x2="${lx + 26}" y2="${ly}" stroke="${s.color}" stroke-width="2"${dash}/>`,
    );
    parts.push(`<text x="${lx + 32}" y="${ly + 4}" font-size="12">${esc(s.label)}</text>`);
    ly += 17;
  }

  if (opts.colorbar) {
    const cbX = W - m.r + 30;
    const cbTop = m.t + 10;
    const cbH = H - m.t - m.b - 20;
    const steps = 32;
    for (let i = 0; i < steps; i++) {
      const t0 = i / steps;
      const y = cbTop + cbH * (1 - (i + 1) / steps);
      parts.push(
        `<rect x="${cbX}" y="${y.toFixed(2)}" width="14" height="${(cbH / steps + 0.5).toFixed(2)}" fill="${opts.colorbar.map(t0)}"/>`,
      );
    }
    parts.push(`<rect x="${cbX}" y="${cbTop}" width="14" height="${cbH}" fill="none" stroke="#333"/>`);
    parts.push(`<text x="${cbX + 18}" y="${cbTop + 8}" font-size="10">1</text>`);
    parts.push(`<text x="${cbX + 18}" y="${cbTop + cbH}" font-size="10">0</text>`);
    parts.push(
      `<text x="${cbX + 7}" y="${cbTop - 6}" text-anchor="middle" font-size="11">${esc(opts.colorbar.label)}</text>`,
    );
  }

  parts.push('</svg>');
  return parts.join('\n');
}
