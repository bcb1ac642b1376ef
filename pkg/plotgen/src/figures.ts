// The five figure families, each mapping CSV tables onto one SVG plot.
// Pure consumer of the documented CSV schemas; no recomputation.

import { Table, readTable, requireColumns, curveLabel, isReference, CsvError } from './csv.js';
import { seriesColor, viridis } from './colormap.js';
import { renderPlot, Series, Marker } from './svg.js';

export type Family = 'crlb-snr' | 'crlb-dtau' | 'response' | 'scan' | 'leakage';

export const FAMILIES: Family[] = ['crlb-snr', 'crlb-dtau', 'response', 'scan', 'leakage'];

export interface FigureSpec {
  family: Family;
  inputs: string[];
  output: string;
  title?: string;
  width?: number;
  height?: number;
  /** override the family's default axis scaling */
  logX?: boolean;
  logY?: boolean;
}

interface FamilyDef {
  xCol: string;
  yCol: string;
  required: string[];
  xLabel: string;
  yLabel: string;
  logX: boolean;
  logY: boolean;
}

const DEFS: Record<Family, FamilyDef> = {
  'crlb-snr': {
    xCol: 'snr_db', yCol: 'sqrt_crlb_ns', required: ['snr_db', 'sqrt_crlb_ns'],
    xLabel: 'SNR [dB]', yLabel: 'sqrt CRLB of delay separation [ns]',
    logX: false, logY: true,
  },
  'crlb-dtau': {
    xCol: 'dtau_ns', yCol: 'sqrt_crlb_ns', required: ['dtau_ns', 'sqrt_crlb_ns'],
    xLabel: 'delay separation [ns]', yLabel: 'sqrt CRLB of delay separation [ns]',
    logX: true, logY: true,
  },
  response: {
    xCol: 'tau_ns', yCol: 'value', required: ['tau_ns', 'value'],
    xLabel: 'delay [ns]', yLabel: 'normalized single-path response',
    logX: false, logY: false,
  },
  scan: {
    xCol: 'tau_ns', yCol: 'value', required: ['tau_ns', 'value'],
    xLabel: 'delay [ns]', yLabel: 'two-path scan magnitude',
    logX: false, logY: false,
  },
  leakage: {
    xCol: 'dtau_ns', yCol: 'sqrt_crlb_ns', required: ['dtau_ns', 'sqrt_crlb_ns', 'leakage'],
    xLabel: 'delay separation [ns]', yLabel: 'sqrt CRLB of delay separation [ns]',
    logX: true, logY: true,
  },
};

function scanMarkers(tables: Table[]): Marker[] {
  const seen = new Map<number, string>();
  for (const t of tables) {
    for (const key of ['tau1_ns', 'tau2_ns']) {
      const raw = t.meta[key];
      if (raw === undefined) continue;
      const v = Number(raw);
      if (Number.isFinite(v)) seen.set(v, `${Math.round(v * 1000) / 1000} ns`);
    }
  }
  return [...seen.entries()]
    .sort((a, b) => a[0] - b[0])
    .map(([x, label]) => ({ x, label }));
}

export function render(spec: FigureSpec): string {
  const def = DEFS[spec.family];
  if (!def) throw new CsvError(`unknown figure family '${spec.family}'`);
  if (spec.inputs.length === 0) throw new CsvError('figure spec lists no input CSVs');
  const tables = spec.inputs.map(readTable);
  for (const t of tables) requireColumns(t, def.required);

  const series: Series[] = tables.map((t, i) => ({
    label: curveLabel(t),
    x: t.data[def.xCol],
    y: t.data[def.yCol],
    color: seriesColor(i),
    dashed: isReference(t),
    segmentColors:
      spec.family === 'leakage' ? t.data['leakage'].map((v) => viridis(v)) : undefined,
  }));

  return renderPlot(series, {
    title: spec.title,
    xLabel: def.xLabel,
    yLabel: def.yLabel,
    logX: spec.logX ?? def.logX,
    logY: spec.logY ?? def.logY,
    width: spec.width,
    height: spec.height,
    markers: spec.family === 'scan' ? scanMarkers(tables) : undefined,
    colorbar: spec.family === 'leakage' ? { label: 'leakage', map: viridis } : undefined,
  });
}
