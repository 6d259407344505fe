/**
 * Binary portable pixmap codec (P5 graymaps, P6 pixmaps, 8-bit).
 *
 * Bytes map linearly to floats in [0, 1]. Encoding clamps and rounds half
 * away from zero, mirroring the service's quantization exactly so that a
 * round trip through the wire never drifts by more than one 8-bit step.
 */

export interface PnmImage {
  channels: 1 | 3;
  width: number;
  height: number;
  /** row-major, channel-interleaved, values in [0, 1] */
  data: Float64Array;
}

export function quantizeByte(v: number): number {
  const clamped = Math.min(1, Math.max(0, v));
  return Math.floor(clamped * 255 + 0.5); // round half away from zero (v >= 0)
}

export function encodePnm(img: PnmImage): Uint8Array {
  const { channels, width, height, data } = img;
  if (data.length !== channels * width * height) {
    throw new Error(`pnm data length ${data.length} does not match ${channels}x${width}x${height}`);
  }
  const magic = channels === 1 ? "P5" : "P6";
  const header = `${magic}\n${width} ${height}\n255\n`;
  const head = new TextEncoder().encode(header);
  const out = new Uint8Array(head.length + data.length);
  out.set(head, 0);
  for (let i = 0; i < data.length; i++) {
    out[head.length + i] = quantizeByte(data[i]);
  }
  return out;
}

export function encodeGraymap(values: Float64Array, width: number, height: number): Uint8Array {
  return encodePnm({ channels: 1, width, height, data: values });
}

function parseHeader(bytes: Uint8Array): { channels: 1 | 3; width: number; height: number; offset: number } {
  if (bytes.length < 2 || bytes[0] !== 0x50) throw new Error("not a pnm payload");
  let channels: 1 | 3;
  if (bytes[1] === 0x35) channels = 1;
  else if (bytes[1] === 0x36) channels = 3;
  else throw new Error("only binary P5/P6 supported");

  const fields: number[] = [];
  let i = 2;
  while (fields.length < 3) {
    if (i >= bytes.length) throw new Error("truncated pnm header");
    const c = bytes[i];
    if (c === 0x23) { // '#' comment to end of line
      while (i < bytes.length && bytes[i] !== 0x0a) i++;
      i++;
      continue;
    }
    if (c === 0x20 || c === 0x09 || c === 0x0a || c === 0x0d) { i++; continue; }
    let value = 0;
    let any = false;
    while (i < bytes.length && bytes[i] >= 0x30 && bytes[i] <= 0x39) {
      value = value * 10 + (bytes[i] - 0x30);
      any = true;
      i++;
    }
    if (!any) throw new Error(`bad pnm header byte ${c}`);
    fields.push(value);
  }
  i++; // single whitespace byte after maxval
  const [width, height, maxval] = fields;
  if (maxval !== 255) throw new Error(`only 8-bit pixmaps supported, maxval=${maxval}`);
  return { channels, width, height, offset: i };
}

export function decodePnm(bytes: Uint8Array): PnmImage {
  const { channels, width, height, offset } = parseHeader(bytes);
  const n = channels * width * height;
  if (bytes.length - offset < n) throw new Error("truncated pnm payload");
  const data = new Float64Array(n);
  for (let i = 0; i < n; i++) data[i] = bytes[offset + i] / 255;
  return { channels, width, height, data };
}

/** Grayscale view of any decoded image (averages channels for P6). */
export function toGray(img: PnmImage): Float64Array {
  if (img.channels === 1) return img.data.slice();
  const n = img.width * img.height;
  const out = new Float64Array(n);
  for (let p = 0; p < n; p++) {
    out[p] = (img.data[3 * p] + img.data[3 * p + 1] + img.data[3 * p + 2]) / 3;
  }
  return out;
}
