#!/usr/bin/env node
// plotgen: render figure families from mbdelay CSV output.
//
//   plotgen --family crlb-snr --out fig.svg curve1.csv curve2.csv ...
//   plotgen --spec figure.json            (a FigureSpec or an array of them)
//   plotgen --all <reproduce-all dir> --out-dir figs/
//
// Exit codes: 0 success, 1 schema/IO error (message names the offender).

import * as fs from 'fs';
import * as path from 'path';
import { FigureSpec, Family, FAMILIES, render } from './figures.js';
import { CsvError } from './csv.js';

function writeFigure(spec: FigureSpec): string {
  const svg = render(spec); // render first: a failed figure writes nothing
  fs.mkdirSync(path.dirname(path.resolve(spec.output)), { recursive: true });
  fs.writeFileSync(spec.output, svg + '\n');
  return spec.output;
}

/** Figure specs covering the standard reproduce-all output layout. */
export function specsForRunDir(runDir: string, outDir: string): FigureSpec[] {
  const specs: FigureSpec[] = [];
  const list = (sub: string) => {
    const dir = path.join(runDir, sub);
    if (!fs.existsSync(dir)) return [] as string[];
    return fs.readdirSync(dir).filter((f) => f.endsWith('.csv')).sort()
      .map((f) => path.join(dir, f));
  };
  const groupOf = (file: string) => path.basename(file).includes('_A') ? 'A' : 'B';

  for (const tag of ['dtau1ns', 'dtau10ns']) {
    for (const group of ['A', 'B']) {
      const inputs = list('crlb_snr').filter(
        (f) => f.includes(tag) && groupOf(f) === group,
      );
      if (inputs.length) {
        specs.push({
          family: 'crlb-snr', inputs,
          output: path.join(outDir, `crlb_snr_${group}_${tag}.svg`),
          title: `Group ${group}, separation ${tag.replace('dtau', '').replace('ns', '')} ns`,
        });
      }
    }
  }
  for (const group of ['A', 'B']) {
    const dtau = list('crlb_dtau').filter((f) => groupOf(f) === group);
    if (dtau.length) {
      specs.push({
        family: 'crlb-dtau', inputs: dtau,
        output: path.join(outDir, `crlb_dtau_${group}.svg`),
        title: `Group ${group} bound versus separation`,
      });
    }
    const resp = list('response').filter((f) => groupOf(f) === group);
    if (resp.length) {
      specs.push({
        family: 'response', inputs: resp,
        output: path.join(outDir, `response_${group}.svg`),
        title: `Group ${group} single-path responses`,
      });
    }
    const scan = list('scan').filter((f) => groupOf(f) === group);
    if (scan.length) {
      specs.push({
        family: 'scan', inputs: scan,
        output: path.join(outDir, `scan_${group}.svg`),
        title: `Group ${group} two-path scans`,
      });
    }
  }
  for (const file of list('leakage')) {
    const stem = path.basename(file, '.csv');
    specs.push({
      family: 'leakage', inputs: [file],
      output: path.join(outDir, `${stem}.svg`),
      title: stem.replace('leakage_', 'leakage-annotated bound: '),
    });
  }
  return specs;
}

function parseArgs(argv: string[]) {
  const out = {
    family: undefined as Family | undefined,
    output: undefined as string | undefined,
    spec: undefined as string | undefined,
    all: undefined as string | undefined,
    outDir: 'figures',
    title: undefined as string | undefined,
    inputs: [] as string[],
  };
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    const next = () => {
      if (i + 1 >= argv.length) throw new CsvError(`missing value for ${a}`);
      return argv[++i];
    };
    if (a === '--family') out.family = next() as Family;
    else if (a === '--out') out.output = next();
    else if (a === '--spec') out.spec = next();
    else if (a === '--all') out.all = next();
    else if (a === '--out-dir') out.outDir = next();
    else if (a === '--title') out.title = next();
    else if (a.startsWith('--')) throw new CsvError(`unknown option ${a}`);
    else out.inputs.push(a);
  }
  return out;
}

export function main(argv: string[]): number {
  try {
    const args = parseArgs(argv);
    const written: string[] = [];
    if (args.spec) {
      const raw = JSON.parse(fs.readFileSync(args.spec, 'utf8'));
      const specs: FigureSpec[] = Array.isArray(raw) ? raw : [raw];
      for (const spec of specs) written.push(writeFigure(spec));
    } else if (args.all) {
      const specs = specsForRunDir(args.all, args.outDir);
      if (specs.length === 0) throw new CsvError(`no renderable CSVs under ${args.all}`);
      for (const spec of specs) written.push(writeFigure(spec));
    } else {
      if (!args.family || !args.output || args.inputs.length === 0) {
        throw new CsvError(
          'usage: plotgen --family <' + FAMILIES.join('|') + '> --out <svg> <csv...> | ' +
          '--spec <json> | --all <run dir> [--out-dir <dir>]',
        );
      }
      written.push(writeFigure({
        family: args.family, inputs: args.inputs,
        output: args.output, title: args.title,
      }));
    }
    for (const w of written) console.log(w);
    return 0;
  } catch (err) {
    console.error(`plotgen: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

import { fileURLToPath } from 'url';

if (process.argv[1] && fileURLToPath(import.meta.url) === path.resolve(process.argv[1])) {
  process.exit(main(process.argv.slice(2)));
}
