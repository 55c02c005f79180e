/**
 * SeriesFile (strict CSV) reader: one header row of column names, then
 * decimal reals; rectangular.
 */

export interface Series {
  columns: string[];
  /** column name -> values */
  data: Map<string, Float64Array>;
  length: number;
}

export class SeriesFileError extends Error {}

export function parseSeries(text: string): Series {
  const lines = text.split('\n').filter((l) => l.trim().length > 0);
  if (lines.length === 0) throw new SeriesFileError('empty series file');
  const columns = lines[0].split(',');
  const rows = lines.slice(1);
  const arrays = columns.map(() => new Float64Array(rows.length));
  rows.forEach((line, r) => {
    const cells = line.split(',');
    if (cells.length !== columns.length) {
      throw new SeriesFileError(`row ${r + 2} has ${cells.length} cells, expected ${columns.length}`);
    }
    cells.forEach((cell, c) => {
      const v = Number(cell);
      if (Number.isNaN(v) && cell.trim() !== 'nan') {
        throw new SeriesFileError(`row ${r + 2}, column ${columns[c]}: not a number: ${cell}`);
      }
      arrays[c][r] = v;
    });
  });
  const data = new Map<string, Float64Array>();
  columns.forEach((name, c) => data.set(name, arrays[c]));
  return { columns, data, length: rows.length };
}

export function readSeries(path: string): Series {
  const fs = require('fs') as typeof import('fs');
  return parseSeries(fs.readFileSync(path, 'utf8'));
}

export function column(series: Series, name: string): Float64Array {
  const col = series.data.get(name);
  if (!col) throw new SeriesFileError(`missing column ${name} (have: ${series.columns.join(', ')})`);
  return col;
}
