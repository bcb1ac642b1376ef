import { describe, expect, it } from 'vitest';
import * as fs from 'fs';
import * as os from 'os';
import * as path from 'path';
import { render } from '../src/figures.js';
import { viridis, seriesColor } from '../src/colormap.js';
import { main, specsForRunDir } from '../src/cli.js';

function workdir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), 'pgfig-'));
}

function write(dir: string, name: string, content: string): string {
  const file = path.join(dir, name);
  fs.mkdirSync(path.dirname(file), { recursive: true });
  fs.writeFileSync(file, content);
  return file;
}

const snrCurve = (id: string, ref = false) =>
  `# scenario: ${id}\n${ref ? `# reference_of: ${id.replace('*', '')}\n` : ''}` +
  'snr_db,sqrt_crlb_ns,cond_i_alpha,cond_i_eff\n' +
  [...Array(6)].map((_, i) => `${2 * i},${Math.exp(-i) + 0.01},1.5,2.5`).join('\n') + '\n';

const scanCurve = (id: string) =>
  `# scenario: ${id}\n# tau1_ns: 5.0\n# tau2_ns: 15.0\ntau_ns,value\n` +
  [...Array(40)].map((_, i) => `${i * 0.5},${1 + Math.sin(i / 3)}`).join('\n') + '\n';

const leakCurve = (id: string) =>
  `# scenario: ${id}\ndtau_ns,sqrt_crlb_ns,leakage\n` +
  [...Array(30)].map((_, i) => `${0.5 + i},${0.01 + 0.001 * i},${Math.abs(Math.cos(i / 4))}`).join('\n') + '\n';

describe('colormap', () => {
  it('hits the viridis endpoints and clamps', () => {
    expect(viridis(0)).toBe('#440154');
    expect(viridis(1)).toBe('#fde725');
    expect(viridis(-5)).toBe('#440154');
    expect(viridis(2)).toBe('#fde725');
  });

  it('cycles distinct series colors', () => {
    expect(seriesColor(0)).not.toBe(seriesColor(1));
    expect(seriesColor(0)).toBe(seriesColor(10));
  });
});

describe('render', () => {
  it('draws dashed curves for contiguous references', () => {
    const dir = workdir();
    const a = write(dir, 'a2.csv', snrCurve('A2'));
    const b = write(dir, 'a2star.csv', snrCurve('A2*', true));
    const svg = render({ family: 'crlb-snr', inputs: [a, b], output: 'x.svg' });
    const dashedCurves = svg.match(/<polyline[^>]*stroke-dasharray/g) ?? [];
    expect(dashedCurves.length).toBe(1);
    expect(svg).toContain('SNR [dB]');
  });

  it('marks true delays on scan figures', () => {
    const dir = workdir();
    const a = write(dir, 'scan.csv', scanCurve('A1'));
    const svg = render({ family: 'scan', inputs: [a], output: 'x.svg' });
    const markers = svg.match(/class="marker"/g) ?? [];
    expect(markers.length).toBe(2);
    expect(svg).toContain('5 ns');
    expect(svg).toContain('15 ns');
  });

  it('encodes leakage as segment colors with a colorbar', () => {
    const dir = workdir();
    const a = write(dir, 'leak.csv', leakCurve('A2'));
    const svg = render({ family: 'leakage', inputs: [a], output: 'x.svg' });
    const segments = svg.match(/<line x1[^>]*stroke="#(?!e0e0e0|333|555)/g) ?? [];
    expect(segments.length).toBeGreaterThan(10);
    expect(svg).toContain('>leakage<');
  });

  it('is deterministic for identical inputs', () => {
    const dir = workdir();
    const a = write(dir, 'a.csv', snrCurve('B2'));
    const spec = { family: 'crlb-snr' as const, inputs: [a], output: 'x.svg' };
    expect(render(spec)).toBe(render(spec));
  });

  it('names the missing column on schema mismatch', () => {
    const dir = workdir();
    const bad = write(dir, 'bad.csv', 'tau_ns,value\n0,1\n1,2\n');
    expect(() => render({ family: 'leakage', inputs: [bad], output: 'x.svg' }))
      .toThrow(/missing column 'dtau_ns'|missing column 'sqrt_crlb_ns'/);
  });
});

describe('cli', () => {
  it('writes no image for an empty CSV and exits nonzero', () => {
    const dir = workdir();
    const empty = write(dir, 'empty.csv', 'tau_ns,value\n');
    const out = path.join(dir, 'fig.svg');
    const code = main(['--family', 'response', '--out', out, empty]);
    expect(code).toBe(1);
    expect(fs.existsSync(out)).toBe(false);
  });

  it('renders from a figure-spec JSON', () => {
    const dir = workdir();
    const a = write(dir, 'a.csv', snrCurve('A3'));
    const out = path.join(dir, 'fig.svg');
    const spec = write(dir, 'spec.json', JSON.stringify({
      family: 'crlb-snr', inputs: [a], output: out, title: 'demo',
    }));
    expect(main(['--spec', spec])).toBe(0);
    expect(fs.readFileSync(out, 'utf8')).toContain('<svg');
  });

  it('drives every family from a run directory layout', () => {
    const dir = workdir();
    write(dir, 'run/crlb_snr/crlb_snr_A1_dtau1ns.csv', snrCurve('A1'));
    write(dir, 'run/crlb_snr/crlb_snr_B1_dtau10ns.csv', snrCurve('B1'));
    write(dir, 'run/crlb_dtau/crlb_dtau_A2_snr20dB.csv',
      '# scenario: A2\ndtau_ns,sqrt_crlb_ns,cond_i_alpha,cond_i_eff\n1,0.1,1,1\n2,0.05,1,1\n');
    write(dir, 'run/response/response_A1.csv',
      '# scenario: A1\ntau_ns,value\n0,1\n1,0.5\n2,0.1\n');
    write(dir, 'run/scan/scan_A1.csv', scanCurve('A1'));
    write(dir, 'run/leakage/leakage_A2.csv', leakCurve('A2'));
    const figDir = path.join(dir, 'figs');
    expect(main(['--all', path.join(dir, 'run'), '--out-dir', figDir])).toBe(0);
    const produced = fs.readdirSync(figDir).sort();
    expect(produced).toEqual([
      'crlb_dtau_A.svg', 'crlb_snr_A_dtau1ns.svg', 'crlb_snr_B_dtau10ns.svg',
      'leakage_A2.svg', 'response_A.svg', 'scan_A.svg',
    ]);
  });

  it('fails cleanly on an empty run directory', () => {
    const dir = workdir();
    expect(main(['--all', dir, '--out-dir', path.join(dir, 'figs')])).toBe(1);
  });

  it('maps every family in specsForRunDir deterministically', () => {
    const dir = workdir();
    write(dir, 'run/leakage/leakage_B3star.csv', leakCurve('B3*'));
    const specs = specsForRunDir(path.join(dir, 'run'), 'figs');
    expect(specs).toHaveLength(1);
    expect(specs[0].family).toBe('leakage');
    expect(specs[0].output).toBe(path.join('figs', 'leakage_B3star.svg'));
  });
});
