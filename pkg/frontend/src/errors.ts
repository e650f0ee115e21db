/**
 * Errors carry the upstream library's stable category string so hosts can
 * branch on failure kind without parsing messages.
 */
export type ErrorCategory = "domain" | "config" | "data" | "io";

export class BindingError extends Error {
  readonly category: ErrorCategory;

  constructor(category: ErrorCategory, message: string) {
    super(`${category}: ${message}`);
    this.name = "BindingError";
    this.category = category;
  }
}

export function domainError(message: string): BindingError {
  return new BindingError("domain", message);
}
