export class SchemaMismatch extends Error {
  readonly missing: string[];

  constructor(path: string, missing: string[]) {
    super(`${path} is missing required columns: ${missing.join(", ")}`);
    this.name = "SchemaMismatch";
    this.missing = missing;
  }
}

export class BadPlotSpec extends Error {
  constructor(message: string) {
    super(message);
    this.name = "BadPlotSpec";
  }
}
