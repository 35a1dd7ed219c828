import { serveBatch } from './adapter';

async function run(): Promise<void> {
  const dir = process.argv[2];
  if (!dir) {
    console.error('usage: main.js <batch-parent-dir>   (model from $SUPERLIME_MODEL)');
    process.exit(2);
  }
  await serveBatch(dir);
}

run().catch((err) => {
  console.error(String(err instanceof Error ? err.message : err));
  process.exit(1);
});
