import type {
  AdapterConfig,
  InstancePrediction,
  RgbImage,
  SegmentationRuntime,
} from "./types.js";

/** Components whose widest row run and tallest column run both cover at
 *  least this fraction of the image are chart furniture (axis frame, grid
 *  mesh): a data series never has a near-full-height vertical stroke. */
const FURNITURE_EXTENT = 0.7;
/** Furniture is also detected by thinness: grid lines and axis frames are
 *  one pixel wide, plotted strokes are thicker.  A component counts as
 *  furniture when at least this fraction of its pixels sit in
 *  one-pixel-wide horizontal or vertical structures... */
const FURNITURE_THIN_FRACTION = 0.8;
/** ...and it additionally spans at least this fraction of the image in
 *  one direction, so small genuine marks are never discarded. */
const FURNITURE_THIN_EXTENT = 0.5;
/** Components smaller than this are sensor noise, not candidate lines. */
const MIN_COMPONENT_PIXELS = 4;

function modalBackground(image: RgbImage): [number, number, number] {
  const counts = new Map<number, number>();
  const { pixels } = image;
  for (let i = 0; i < pixels.length; i += 3) {
    const packed = (pixels[i] << 16) | (pixels[i + 1] << 8) | pixels[i + 2];
    counts.set(packed, (counts.get(packed) ?? 0) + 1);
  }
  let best = -1;
  let bestCount = -1;
  for (const [packed, count] of counts) {
    if (count > bestCount || (count === bestCount && packed < best)) {
      best = packed;
      bestCount = count;
    }
  }
  return [(best >> 16) & 0xff, (best >> 8) & 0xff, best & 0xff];
}

function chebyshev(pixels: Uint8Array, i: number, color: [number, number, number]): number {
  return Math.max(
    Math.abs(pixels[i] - color[0]),
    Math.abs(pixels[i + 1] - color[1]),
    Math.abs(pixels[i + 2] - color[2]),
  );
}

/** Greedy color clustering: the most frequent unassigned foreground color
 *  seeds a cluster absorbing everything within the Chebyshev tolerance.
 *  Returns a per-pixel cluster id (-1 for background). */
function clusterColors(image: RgbImage, tol: number): { labels: Int32Array; nClusters: number } {
  const { width, height, pixels } = image;
  const bg = modalBackground(image);
  const n = width * height;
  const packedOf = new Int32Array(n);
  const counts = new Map<number, number>();
  for (let i = 0; i < n; i++) {
    if (chebyshev(pixels, i * 3, bg) <= tol) {
      packedOf[i] = -1;
      continue;
    }
    const packed = (pixels[i * 3] << 16) | (pixels[i * 3 + 1] << 8) | pixels[i * 3 + 2];
    packedOf[i] = packed;
    counts.set(packed, (counts.get(packed) ?? 0) + 1);
  }
  const order = [...counts.keys()].sort(
    (a, b) => counts.get(b)! - counts.get(a)! || a - b,
  );
  const clusterOf = new Map<number, number>();
  let nClusters = 0;
  for (const seed of order) {
    if (clusterOf.has(seed)) continue;
    const sr = (seed >> 16) & 0xff;
    const sg = (seed >> 8) & 0xff;
    const sb = seed & 0xff;
    for (const other of order) {
      if (clusterOf.has(other)) continue;
      const d = Math.max(
        Math.abs(((other >> 16) & 0xff) - sr),
        Math.abs(((other >> 8) & 0xff) - sg),
        Math.abs((other & 0xff) - sb),
      );
      if (d <= tol) clusterOf.set(other, nClusters);
    }
    nClusters++;
  }
  const labels = new Int32Array(n);
  for (let i = 0; i < n; i++) {
    labels[i] = packedOf[i] === -1 ? -1 : clusterOf.get(packedOf[i])!;
  }
  return { labels, nClusters };
}

interface Component {
  indices: number[];
  maxRowExtent: number;
  maxColExtent: number;
  minX: number;
  maxX: number;
}

/** Fraction of component pixels lying in one-pixel-wide runs: no same-
 *  cluster neighbor both above and below, or both left and right. */
function thinFraction(comp: Component, labels: Int32Array, cluster: number,
                      width: number, height: number): number {
  const at = (x: number, y: number) =>
    x >= 0 && x < width && y >= 0 && y < height && labels[y * width + x] === cluster;
  let thin = 0;
  for (const idx of comp.indices) {
    const x = idx % width;
    const y = (idx - x) / width;
    if ((!at(x, y - 1) && !at(x, y + 1)) || (!at(x - 1, y) && !at(x + 1, y))) thin++;
  }
  return thin / comp.indices.length;
}

/** 8-connected components of one cluster label, with per-row/column pixel
 *  extents used for furniture filtering and scoring. */
function components(labels: Int32Array, cluster: number, width: number, height: number): Component[] {
  const seen = new Uint8Array(labels.length);
  const out: Component[] = [];
  for (let start = 0; start < labels.length; start++) {
    if (labels[start] !== cluster || seen[start]) continue;
    const stack = [start];
    seen[start] = 1;
    const indices: number[] = [];
    const rowMin = new Map<number, number>();
    const rowMax = new Map<number, number>();
    const colMin = new Map<number, number>();
    const colMax = new Map<number, number>();
    while (stack.length > 0) {
      const idx = stack.pop()!;
      indices.push(idx);
      const x = idx % width;
      const y = (idx - x) / width;
      rowMin.set(y, Math.min(rowMin.get(y) ?? x, x));
      rowMax.set(y, Math.max(rowMax.get(y) ?? x, x));
      colMin.set(x, Math.min(colMin.get(x) ?? y, y));
      colMax.set(x, Math.max(colMax.get(x) ?? y, y));
      for (let dy = -1; dy <= 1; dy++) {
        for (let dx = -1; dx <= 1; dx++) {
          if (dx === 0 && dy === 0) continue;
          const nx = x + dx;
          const ny = y + dy;
          if (nx < 0 || nx >= width || ny < 0 || ny >= height) continue;
          const nIdx = ny * width + nx;
          if (labels[nIdx] === cluster && !seen[nIdx]) {
            seen[nIdx] = 1;
            stack.push(nIdx);
          }
        }
      }
    }
    let maxRowExtent = 0;
    for (const [y, lo] of rowMin) maxRowExtent = Math.max(maxRowExtent, rowMax.get(y)! - lo + 1);
    let maxColExtent = 0;
    for (const [x, lo] of colMin) maxColExtent = Math.max(maxColExtent, colMax.get(x)! - lo + 1);
    let minX = width;
    let maxX = -1;
    for (const x of colMin.keys()) {
      minX = Math.min(minX, x);
      maxX = Math.max(maxX, x);
    }
    out.push({ indices, maxRowExtent, maxColExtent, minX, maxX });
  }
  return out;
}

/** Classical reference runtime: color clusters split into 8-connected
 *  components, one instance per component.  The instance score is the
 *  fraction of the image width the component spans, so plotted lines score
 *  high and specks fall below the adapter's score threshold. */
export const componentsRuntime: SegmentationRuntime = {
  id: "components",
  predict(image: RgbImage, config: AdapterConfig): InstancePrediction[] {
    const { width, height } = image;
    const { labels, nClusters } = clusterColors(image, config.colorTol);
    const predictions: InstancePrediction[] = [];
    for (let cluster = 0; cluster < nClusters; cluster++) {
      for (const comp of components(labels, cluster, width, height)) {
        if (comp.indices.length < MIN_COMPONENT_PIXELS) continue;
        const spansBoth =
          comp.maxRowExtent >= FURNITURE_EXTENT * width &&
          comp.maxColExtent >= FURNITURE_EXTENT * height;
        const thinAndLong =
          (comp.maxRowExtent >= FURNITURE_THIN_EXTENT * width ||
            comp.maxColExtent >= FURNITURE_THIN_EXTENT * height) &&
          thinFraction(comp, labels, cluster, width, height) >= FURNITURE_THIN_FRACTION;
        if (spansBoth || thinAndLong) continue;
        const probs = new Float32Array(width * height);
        for (const idx of comp.indices) probs[idx] = 1.0;
        const score = Math.min(1, (comp.maxX - comp.minX + 1) / width);
        predictions.push({ score, probs });
      }
    }
    return predictions;
  },
};

const RUNTIMES: Record<string, SegmentationRuntime> = {
  [componentsRuntime.id]: componentsRuntime,
};

export class RuntimeError extends Error {}

export function resolveRuntime(name: string): SegmentationRuntime {
  const runtime = RUNTIMES[name];
  if (runtime === undefined) {
    throw new RuntimeError(
      `unknown runtime "${name}" (available: ${Object.keys(RUNTIMES).join(", ")})`,
    );
  }
  return runtime;
}

/** Tests and embedders may register additional runtimes. */
export function registerRuntime(runtime: SegmentationRuntime): void {
  RUNTIMES[runtime.id] = runtime;
}
