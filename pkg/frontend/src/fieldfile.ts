/**
 * FieldFile reader/writer.
 *
 * Layout: five ASCII header lines
 *
 *     MFE1
 *     <field name>
 *     <nx> <ny>
 *     t=<time>
 *     chart=<kind> alpha=<alpha>
 *
 * followed by nx*ny little-endian float64 values, row-major with y as the
 * outer index.  Header serialization round-trips byte-exactly.
 */

export const MAGIC = 'MFE1';

export interface FieldMeta {
  name: string;
  nx: number;
  ny: number;
  t: number;
  chart: string;
  alpha: number;
  /** verbatim header lines, for byte-exact round-tripping */
  rawHeader: string[];
}

export interface Field {
  meta: FieldMeta;
  /** row-major (ny rows of nx), values[j * nx + i] */
  values: Float64Array;
}

export class FieldFileError extends Error {}

export function parseField(buf: Buffer): Field {
  const lines: string[] = [];
  let pos = 0;
  for (let k = 0; k < 5; k++) {
    const nl = buf.indexOf(0x0a, pos);
    if (nl < 0) throw new FieldFileError('truncated header');
    lines.push(buf.subarray(pos, nl).toString('ascii'));
    pos = nl + 1;
  }
  if (lines[0] !== MAGIC) {
    throw new FieldFileError(`bad magic ${JSON.stringify(lines[0])}`);
  }
  const dims = lines[2].split(' ').map(Number);
  if (dims.length !== 2 || dims.some((d) => !Number.isInteger(d) || d <= 0)) {
    throw new FieldFileError(`bad dimension line ${JSON.stringify(lines[2])}`);
  }
  const [nx, ny] = dims;
  if (!lines[3].startsWith('t=')) throw new FieldFileError('missing t= line');
  const t = Number(lines[3].slice(2));
  const tokens = new Map<string, string>();
  for (const tok of lines[4].split(' ')) {
    const eq = tok.indexOf('=');
    if (eq > 0) tokens.set(tok.slice(0, eq), tok.slice(eq + 1));
  }
  const payload = buf.subarray(pos);
  if (payload.length !== 8 * nx * ny) {
    throw new FieldFileError(`payload is ${payload.length} bytes, expected ${8 * nx * ny}`);
  }
  const values = new Float64Array(nx * ny);
  for (let i = 0; i < values.length; i++) values[i] = payload.readDoubleLE(8 * i);
  return {
    meta: {
      name: lines[1],
      nx,
      ny,
      t,
      chart: tokens.get('chart') ?? '',
      alpha: Number(tokens.get('alpha') ?? '0'),
      rawHeader: lines,
    },
    values,
  };
}

export function readField(path: string): Field {
  const fs = require('fs') as typeof import('fs');
  return parseField(fs.readFileSync(path));
}

/** Re-serialize a parsed header; equals the original header bytes. */
export function serializeHeader(meta: FieldMeta): Buffer {
  return Buffer.from(meta.rawHeader.join('\n') + '\n', 'ascii');
}

/** Format a float the way the producer does (17 significant digits). */
function formatReal(x: number): string {
  let s = x.toPrecision(17);
  if (s.includes('e') || s.includes('E')) {
    // normalize exponent form to the shortest representation
    s = Number(s).toExponential();
  } else if (s.includes('.')) {
    s = s.replace(/0+$/, '').replace(/\.$/, '');
  }
  return s;
}

export function writeField(
  path: string,
  name: string,
  nx: number,
  ny: number,
  values: Float64Array | number[],
  t = 0,
  chart = 'torus',
  alpha = 0,
): void {
  const fs = require('fs') as typeof import('fs');
  if (values.length !== nx * ny) throw new FieldFileError('payload size mismatch');
  const header = `${MAGIC}\n${name}\n${nx} ${ny}\nt=${formatReal(t)}\nchart=${chart} alpha=${formatReal(alpha)}\n`;
  const payload = Buffer.alloc(8 * nx * ny);
  for (let i = 0; i < values.length; i++) payload.writeDoubleLE(values[i] as number, 8 * i);
  fs.writeFileSync(path, Buffer.concat([Buffer.from(header, 'ascii'), payload]));
}

/** Finite min/max of a field, ignoring NaN; null when empty. */
export function finiteRange(values: Float64Array): { lo: number; hi: number } | null {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (Number.isFinite(v)) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  return lo <= hi ? { lo, hi } : null;
}
