// Spawn the analytics service with deterministic fixture data for
// end-to-end tests. Requires the Python package to be installed.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export interface LiveService {
  base: string;
  dataDir: string;
  fixtureDir: string;
  stop: () => void;
}

function cli(args: string[], cwd: string): void {
  const result = spawnSync("python3", ["-m", "wenkit.cli", ...args], {
    cwd,
    encoding: "utf-8",
  });
  if (result.status !== 0) {
    throw new Error(
      `wenkit ${args.join(" ")} failed (${result.status}): ${result.stderr || result.stdout}`,
    );
  }
}

async function waitForHealth(base: string, child: ChildProcess): Promise<void> {
  const deadline = Date.now() + 60_000;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    if (child.exitCode !== null) {
      throw new Error(`service exited early with code ${child.exitCode}`);
    }
    try {
      const response = await fetch(`${base}/health`);
      if (response.ok) return;
    } catch (err) {
      lastError = err;
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error(`service never became healthy: ${lastError}`);
}

export async function startService(): Promise<LiveService> {
  const root = mkdtempSync(join(tmpdir(), "wenkit-ui-"));
  const fixtureDir = join(root, "fixtures");
  const dataDir = join(root, "data");

  cli(["fixtures", "--kind", "jttw", "--out-dir", fixtureDir, "--chapters", "10"], root);
  cli(["fixtures", "--kind", "difangzhi", "--out-dir", fixtureDir], root);

  // Guarantee review-band pairs: two half-matching records of one name.
  const extraRows =
    "amb0\t審案甲\t\t進士\t知縣\t\t\t\t\t\t\t\n" +
    "amb1\t審案甲\t\t舉人\t知縣\t\t\t\t\t\t\t\n";
  const { appendFileSync } = await import("node:fs");
  appendFileSync(join(fixtureDir, "records.tsv"), extraRows, "utf-8");

  const port = 21000 + Math.floor(Math.random() * 20000);
  const config = {
    host: "127.0.0.1",
    port,
    data_dir: dataDir,
    corpora: { jttw: join(fixtureDir, "jttw.jsonl") },
    records: { officers: join(fixtureDir, "records.tsv") },
    gazetteers: { counties: join(fixtureDir, "gazetteer.tsv") },
  };
  const configPath = join(root, "service.json");
  writeFileSync(configPath, JSON.stringify(config), "utf-8");

  const child = spawn("python3", ["-m", "wenkit.cli", "serve", "--config", configPath], {
    stdio: ["ignore", "pipe", "pipe"],
  });
  const stderr: string[] = [];
  child.stderr?.on("data", (chunk) => stderr.push(String(chunk)));

  const base = `http://127.0.0.1:${port}`;
  try {
    await waitForHealth(base, child);
  } catch (err) {
    child.kill("SIGKILL");
    throw new Error(`${err}\nservice stderr:\n${stderr.join("")}`);
  }
  return {
    base,
    dataDir,
    fixtureDir,
    stop: () => child.kill("SIGTERM"),
  };
}
