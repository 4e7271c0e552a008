/** Strict numeric CSV: one header row, comma-separated, every cell a finite number. */

export interface CsvTable {
  header: string[];
  rows: number;
  column(name: string): number[];
  has(name: string): boolean;
}

export function parseCsv(text: string, source = "<string>"): CsvTable {
  const lines = text
    .split(/\r?\n/)
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  if (lines.length < 2) {
    throw new Error(`${source}: need a header row and at least one data row`);
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const columns = new Map<string, number[]>(header.map((h) => [h, []]));
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new Error(
        `${source}: row ${i} has ${cells.length} cells, expected ${header.length}`,
      );
    }
    for (let j = 0; j < cells.length; j++) {
      const v = Number(cells[j]);
      if (!Number.isFinite(v)) {
        throw new Error(`${source}: row ${i}, column "${header[j]}": not a number: "${cells[j]}"`);
      }
      columns.get(header[j])!.push(v);
    }
  }
  return {
    header,
    rows: lines.length - 1,
    has: (name) => columns.has(name),
    column(name: string): number[] {
      const col = columns.get(name);
      if (col === undefined) {
        throw new Error(
          `${source}: column "${name}" not found (have: ${header.join(", ")})`,
        );
      }
      return col;
    },
  };
}
