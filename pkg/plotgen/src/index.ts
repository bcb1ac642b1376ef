export { readTable, requireColumns, curveLabel, isReference, CsvError } from './csv.js';
export type { Table } from './csv.js';
export { viridis, seriesColor, PALETTE } from './colormap.js';
export { renderPlot } from './svg.js';
export type { Series, Marker, PlotOptions } from './svg.js';
export { render, FAMILIES } from './figures.js';
export type { FigureSpec, Family } from './figures.js';
export { specsForRunDir, main } from './cli.js';
