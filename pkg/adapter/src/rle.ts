/** Row-major run-length encoding of a binary mask: alternating
 *  background/foreground run lengths, starting with background (a leading
 *  zero when the first pixel is foreground).  Run lengths sum to w*h. */
export function encodeRle(bits: Uint8Array, width: number, height: number): number[] {
  const total = width * height;
  if (bits.length !== total) {
    throw new Error(`mask length ${bits.length} != ${total}`);
  }
  const runs: number[] = [];
  let current = 0; // background first
  let length = 0;
  for (let i = 0; i < total; i++) {
    const v = bits[i] ? 1 : 0;
    if (v === current) {
      length++;
    } else {
      runs.push(length);
      current = v;
      length = 1;
    }
  }
  runs.push(length);
  return runs;
}

/** Inverse of encodeRle; used by tests to verify round trips. */
export function decodeRle(runs: number[], width: number, height: number): Uint8Array {
  const bits = new Uint8Array(width * height);
  let pos = 0;
  let fg = false;
  for (const run of runs) {
    if (run < 0) throw new Error("negative run length");
    if (fg) bits.fill(1, pos, pos + run);
    pos += run;
    fg = !fg;
  }
  if (pos !== width * height) {
    throw new Error(`run sum ${pos} != ${width * height}`);
  }
  return bits;
}
