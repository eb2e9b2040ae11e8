import { describe, expect, it } from 'vitest';
import { nines, percent, raw, seconds } from '../src/format';

describe('raw', () => {
  it('prints the shortest round-trip decimal, same as the service JSON', () => {
    // JSON.parse(String(x)) === x for every finite double, so whatever
    // digits the service serialized are the digits we show.
    const samples = [0.9999977372338795, 0.999, 0.123456789012345678, 1, 0.5];
    for (const value of samples) {
      expect(JSON.parse(raw(value))).toBe(value);
    }
    expect(raw(0.999)).toBe('0.999');
    expect(raw(1)).toBe('1');
  });
});

describe('nines', () => {
  it('counts full nines', () => {
    expect(nines(0.9)).toBe('1 nines');
    expect(nines(0.999)).toBe('3 nines');
    expect(nines(0.99999)).toBe('5 nines');
  });

  it('marks partial progress toward the next nine', () => {
    expect(nines(0.9991)).toBe('3 nines-');
    expect(nines(0.95)).toBe('1 nines-');
  });

  it('handles the edges', () => {
    expect(nines(1)).toBe('perfect');
    expect(nines(1.0000001)).toBe('perfect');
    expect(nines(0)).toBe('0 nines');
    expect(nines(0.5)).toBe('0 nines');
  });
});

describe('percent and seconds', () => {
  it('rounds percents to whole digits', () => {
    expect(percent(0.5)).toBe('50%');
    expect(percent(1)).toBe('100%');
    expect(percent(0.333)).toBe('33%');
  });

  it('prints small runtimes as <1ms', () => {
    expect(seconds(0)).toBe('<1ms');
    expect(seconds(1.23456)).toBe('1.235s');
  });
});
