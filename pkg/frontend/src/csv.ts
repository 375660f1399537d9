/** Minimal CSV reader for the benchmark schema: quoted fields, embedded
 * commas and newlines, first row is the header. */

export interface CsvTable {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string): CsvTable {
  const records: string[][] = [];
  let field = "";
  let record: string[] = [];
  let inQuotes = false;
  let i = 0;
  const pushField = () => {
    record.push(field);
    field = "";
  };
  const pushRecord = () => {
    pushField();
    records.push(record);
    record = [];
  };
  while (i < text.length) {
    const ch = text[i];
    if (inQuotes) {
      if (ch === '"') {
        if (text[i + 1] === '"') {
          field += '"';
          i += 2;
          continue;
        }
        inQuotes = false;
        i += 1;
        continue;
      }
      field += ch;
      i += 1;
      continue;
    }
    if (ch === '"') {
      inQuotes = true;
      i += 1;
    } else if (ch === ",") {
      pushField();
      i += 1;
    } else if (ch === "\n") {
      pushRecord();
      i += 1;
    } else if (ch === "\r") {
      i += 1; // tolerate CRLF
    } else {
      field += ch;
      i += 1;
    }
  }
  if (field.length > 0 || record.length > 0) {
    pushRecord();
  }
  if (records.length === 0) {
    throw new Error("empty CSV");
  }
  const [header, ...rows] = records;
  for (const row of rows) {
    if (row.length !== header.length) {
      throw new Error(
        `CSV row has ${row.length} fields, header has ${header.length}`
      );
    }
  }
  return { header, rows };
}

/** Column accessor that reports the expected header on a miss. */
export function columnIndex(table: CsvTable, name: string): number {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new Error(
      `column ${name} not found; expected header ` +
        "game,n,estimator,m,sigma,gamma,seed,l2_error,objective_ratio,evals_used,wall_ms"
    );
  }
  return idx;
}
