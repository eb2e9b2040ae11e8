/**
 * Number formatting. Availabilities are displayed exactly as the
 * service reported them (shortest round-trip decimal of the same
 * double), never recomputed or rounded client-side, with a "nines"
 * badge alongside for quick reading.
 */

export function raw(value: number): string {
  return String(value);
}

/** 0.999 -> "3 nines", 0.9991 -> "3 nines-", 1 -> "perfect". */
export function nines(value: number): string {
  if (value >= 1) return 'perfect';
  if (value <= 0) return '0 nines';
  const exact = -Math.log10(1 - value);
  const count = Math.floor(exact + 1e-9);
  if (count < 1) return '0 nines';
  const atBoundary = Math.abs(exact - count) < 1e-9;
  return atBoundary ? `${count} nines` : `${count} nines-`;
}

export function percent(fraction: number): string {
  return `${(fraction * 100).toFixed(0)}%`;
}

export function seconds(value: number): string {
  return value < 0.0005 ? '<1ms' : `${value.toFixed(3)}s`;
}
