/** Pure display formatting. The console does no risk arithmetic: every
 * number it shows is a service payload field passed through these one-way
 * formatters. */

export function fmt2(value: number): string {
  return value.toFixed(2);
}

/** Bar widths are styling only, rounded to whole percent so they can never
 * be mistaken for (or collide with) displayed two-decimal data values. */
export function barPercent(value: number, scale: number): number {
  if (scale <= 0) {
    return 0;
  }
  return Math.round(Math.max(0, Math.min(1, value / scale)) * 100);
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
