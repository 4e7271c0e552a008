import { describe, expect, it } from "vitest";
import { parseCsv } from "../src/csv.js";

describe("parseCsv", () => {
  it("parses a numeric table", () => {
    const table = parseCsv("t,a,b\n0,1,2\n0.5,3,4.5\n");
    expect(table.header).toEqual(["t", "a", "b"]);
    expect(table.rows).toBe(2);
    expect(table.column("a")).toEqual([1, 3]);
    expect(table.column("b")).toEqual([2, 4.5]);
  });

  it("reads 17-significant-digit values exactly", () => {
    const table = parseCsv("t,v\n0.10000000000000001,1.1414574638446418e-4\n");
    expect(table.column("t")[0]).toBe(0.1);
    expect(table.column("v")[0]).toBeCloseTo(1.1414574638446418e-4, 20);
  });

  it("rejects a missing column", () => {
    const table = parseCsv("t,a\n0,1\n");
    expect(() => table.column("nope")).toThrow(/column "nope" not found/);
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv("t,a\n0,1,2\n")).toThrow(/expected 2/);
  });

  it("rejects non-numeric cells", () => {
    expect(() => parseCsv("t,a\n0,x\n")).toThrow(/not a number/);
  });

  it("rejects empty input", () => {
    expect(() => parseCsv("t,a\n")).toThrow(/data row/);
  });
});
