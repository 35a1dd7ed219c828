/**
 * Builds a small deterministic CNN (seeded initializers, no training) and
 * saves it where the adapter can load it. Stands in for a fine-tuned
 * network in tests and demos; training is out of scope here.
 */
import * as tf from '@tensorflow/tfjs';

import { saveHandler } from './modelIO';

export const INPUT_SIZE = 32;
export const CLASS_NAMES = ['clean', 'infected'] as const;

export function buildModel(): tf.LayersModel {
  const model = tf.sequential();
  model.add(
    tf.layers.conv2d({
      inputShape: [INPUT_SIZE, INPUT_SIZE, 3],
      filters: 8,
      kernelSize: 3,
      activation: 'relu',
      kernelInitializer: tf.initializers.heNormal({ seed: 1 }),
      biasInitializer: 'zeros',
    }),
  );
  model.add(tf.layers.maxPooling2d({ poolSize: 2 }));
  model.add(
    tf.layers.conv2d({
      filters: 16,
      kernelSize: 3,
      activation: 'relu',
      kernelInitializer: tf.initializers.heNormal({ seed: 2 }),
      biasInitializer: 'zeros',
    }),
  );
  model.add(tf.layers.maxPooling2d({ poolSize: 2 }));
  model.add(tf.layers.flatten());
  model.add(
    tf.layers.dense({
      units: CLASS_NAMES.length,
      activation: 'softmax',
      kernelInitializer: tf.initializers.glorotNormal({ seed: 3 }),
      biasInitializer: 'zeros',
    }),
  );
  return model;
}

export async function makeModel(outDir: string): Promise<void> {
  await buildModel().save(saveHandler(outDir));
}

if (require.main === module) {
  const outDir = process.argv[2];
  if (!outDir) {
    console.error('usage: makeModel.js <output-dir>');
    process.exit(2);
  }
  makeModel(outDir)
    .then(() => console.log(`model written to ${outDir}`))
    .catch((err) => {
      console.error(String(err instanceof Error ? err.message : err));
      process.exit(1);
    });
}
