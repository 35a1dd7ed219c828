import { PNG } from 'pngjs';

export interface RgbImage {
  width: number;
  height: number;
  /** Interleaved RGB, row-major. */
  pixels: Uint8Array;
}

export function decodePng(buffer: Buffer): RgbImage {
  const png = PNG.sync.read(buffer);
  const pixels = new Uint8Array(png.width * png.height * 3);
  for (let i = 0, j = 0; i < png.data.length; i += 4, j += 3) {
    pixels[j] = png.data[i];
    pixels[j + 1] = png.data[i + 1];
    pixels[j + 2] = png.data[i + 2];
  }
  return { width: png.width, height: png.height, pixels };
}

export function encodePng(image: RgbImage): Buffer {
  const png = new PNG({ width: image.width, height: image.height });
  for (let i = 0, j = 0; j < image.pixels.length; i += 4, j += 3) {
    png.data[i] = image.pixels[j];
    png.data[i + 1] = image.pixels[j + 1];
    png.data[i + 2] = image.pixels[j + 2];
    png.data[i + 3] = 255;
  }
  return PNG.sync.write(png);
}
