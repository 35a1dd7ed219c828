/**
 * Gateway protocol implementation: given a directory holding batch/NNNNN.png
 * (5-digit, 0-based, contiguous), classify every image with the CNN at
 * $SUPERLIME_MODEL and write <dir>/predictions.csv with header
 * index,p_0,p_1,... and one probability row per image, in index order.
 *
 * Preprocessing, applied identically to every image: decode 8-bit RGB,
 * bilinear-resize to the model's input resolution, scale pixel values to
 * [0, 1]. Class order matches the built-in stub: (clean, infected).
 */
import * as fs from 'node:fs';
import * as path from 'node:path';
import * as tf from '@tensorflow/tfjs';

import { loadHandler } from './modelIO';
import { decodePng } from './png';

export class AdapterError extends Error {}

function batchFileNames(batchDir: string): string[] {
  if (!fs.existsSync(batchDir)) {
    throw new AdapterError(`no batch directory at ${batchDir}`);
  }
  const names = fs
    .readdirSync(batchDir)
    .filter((name) => name.endsWith('.png'))
    .sort();
  if (names.length === 0) {
    throw new AdapterError(`empty batch in ${batchDir}`);
  }
  names.forEach((name, i) => {
    const expected = `${String(i).padStart(5, '0')}.png`;
    if (name !== expected) {
      throw new AdapterError(`batch indices not contiguous from 0: saw ${name}, expected ${expected}`);
    }
  });
  return names;
}

export async function serveBatch(dir: string, modelPath?: string): Promise<string> {
  const resolvedModel = modelPath ?? process.env.SUPERLIME_MODEL;
  if (!resolvedModel) {
    throw new AdapterError('SUPERLIME_MODEL is not set and no model path was given');
  }
  const jsonPath = resolvedModel.endsWith('.json')
    ? resolvedModel
    : path.join(resolvedModel, 'model.json');
  if (!fs.existsSync(jsonPath)) {
    throw new AdapterError(`model file not readable: ${jsonPath}`);
  }

  const names = batchFileNames(path.join(dir, 'batch'));
  const model = await tf.loadLayersModel(loadHandler(jsonPath));
  const shape = model.inputs[0].shape; // [null, H, W, 3]
  const targetH = shape[1] as number;
  const targetW = shape[2] as number;

  const inputs = names.map((name) => {
    const file = path.join(dir, 'batch', name);
    let image;
    try {
      image = decodePng(fs.readFileSync(file));
    } catch (err) {
      throw new AdapterError(`unreadable image ${file}: ${err}`);
    }
    return tf.tidy(() => {
      const raw = tf.tensor3d(image.pixels, [image.height, image.width, 3], 'float32');
      return tf.image.resizeBilinear(raw, [targetH, targetW]).div(255.0);
    });
  });

  const probabilities = tf.tidy(() => model.predict(tf.stack(inputs)) as tf.Tensor2D);
  inputs.forEach((t) => t.dispose());
  const values = await probabilities.data();
  const classCount = probabilities.shape[1];
  probabilities.dispose();

  const header = ['index', ...Array.from({ length: classCount }, (_, c) => `p_${c}`)];
  const lines = [header.join(',')];
  for (let i = 0; i < names.length; i++) {
    const row = [String(i)];
    for (let c = 0; c < classCount; c++) {
      row.push(String(values[i * classCount + c]));
    }
    lines.push(row.join(','));
  }
  const outPath = path.join(dir, 'predictions.csv');
  fs.writeFileSync(outPath, lines.join('\n') + '\n');
  return outPath;
}
