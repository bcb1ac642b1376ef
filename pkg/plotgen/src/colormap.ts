// Continuous viridis map used to encode the leakage level along a curve.

const ANCHORS: [number, number, number][] = [
  [0x44, 0x01, 0x54], // 0.000
  [0x47, 0x2d, 0x7b],
  [0x3b, 0x52, 0x8b],
  [0x2c, 0x72, 0x8e],
  [0x21, 0x91, 0x8c],
  [0x27, 0xad, 0x81],
  [0x5e, 0xc9, 0x62],
  [0xaa, 0xdc, 0x32],
  [0xfd, 0xe7, 0x25], // 1.000
];

export function viridis(value: number): string {
  const t = Math.max(0, Math.min(1, value));
  const x = t * (ANCHORS.length - 1);
  const i = Math.min(Math.floor(x), ANCHORS.length - 2);
  const f = x - i;
  const [r0, g0, b0] = ANCHORS[i];
  const [r1, g1, b1] = ANCHORS[i + 1];
  const channel = (a: number, b: number) => Math.round(a + (b - a) * f);
  const hex = (v: number) => v.toString(16).padStart(2, '0');
  return `#${hex(channel(r0, r1))}${hex(channel(g0, g1))}${hex(channel(b0, b1))}`;
}

// category10, the de-facto scheme for scientific line plots
export const PALETTE = [
  '#1f77b4', '#ff7f0e', '#2ca02c', '#d62728', '#9467bd',
  '#8c564b', '#e377c2', '#7f7f7f', '#bcbd22', '#17becf',
];

export function seriesColor(index: number): string {
  return PALETTE[index % PALETTE.length];
}
