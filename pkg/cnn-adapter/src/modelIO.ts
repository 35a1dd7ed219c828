import * as fs from 'node:fs';
import * as path from 'node:path';
import * as tf from '@tensorflow/tfjs';

const WEIGHTS_FILE = 'weights.bin';

/** Save a layers model as model.json + weights.bin in a directory. */
export function saveHandler(dir: string): tf.io.IOHandler {
  return {
    async save(artifacts: tf.io.ModelArtifacts) {
      fs.mkdirSync(dir, { recursive: true });
      const modelJson = {
        modelTopology: artifacts.modelTopology,
        format: artifacts.format,
        generatedBy: artifacts.generatedBy,
        weightsManifest: [{ paths: [WEIGHTS_FILE], weights: artifacts.weightSpecs }],
      };
      fs.writeFileSync(path.join(dir, 'model.json'), JSON.stringify(modelJson));
      const data = artifacts.weightData as ArrayBuffer;
      fs.writeFileSync(path.join(dir, WEIGHTS_FILE), Buffer.from(new Uint8Array(data)));
      return {
        modelArtifactsInfo: { dateSaved: new Date(), modelTopologyType: 'JSON' as const },
      };
    },
  };
}

/** Load a model saved by saveHandler, given the model.json path or its directory. */
export function loadHandler(modelPath: string): tf.io.IOHandler {
  const jsonPath = modelPath.endsWith('.json') ? modelPath : path.join(modelPath, 'model.json');
  return {
    async load(): Promise<tf.io.ModelArtifacts> {
      const dir = path.dirname(jsonPath);
      const modelJson = JSON.parse(fs.readFileSync(jsonPath, 'utf8'));
      const manifest = modelJson.weightsManifest as Array<{ paths: string[]; weights: tf.io.WeightsManifestEntry[] }>;
      const weightSpecs = manifest.flatMap((group) => group.weights);
      const buffers = manifest.flatMap((group) => group.paths).map((p) => fs.readFileSync(path.join(dir, p)));
      const joined = Buffer.concat(buffers);
      const weightData = joined.buffer.slice(joined.byteOffset, joined.byteOffset + joined.byteLength);
      return {
        modelTopology: modelJson.modelTopology,
        format: modelJson.format,
        generatedBy: modelJson.generatedBy,
        weightSpecs,
        weightData,
      };
    },
  };
}
