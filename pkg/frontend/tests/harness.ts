/** Spawn the Python annotation server for integration tests. */

import { type ChildProcess, spawn } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";

const PYTHON = process.env.PYTHON ?? "python3";

export interface LiveServer {
  base: string;
  port: number;
  storeDir: string;
  process: ChildProcess;
  stop(): Promise<void>;
}

export const freePort = (): Promise<number> =>
  new Promise((resolve, reject) => {
    const probe = createServer();
    probe.once("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address === null || typeof address === "string") {
        reject(new Error("no port"));
        return;
      }
      const { port } = address;
      probe.close(() => resolve(port));
    });
  });

export const startServer = async (storeDir?: string): Promise<LiveServer> => {
  const port = await freePort();
  const dir = storeDir ?? mkdtempSync(join(tmpdir(), "lqm-store-"));
  const child = spawn(
    PYTHON,
    ["-m", "lqm_eval.cli", "serve", "--store", dir, "--port", String(port)],
    { stdio: "ignore" },
  );
  const base = `http://127.0.0.1:${port}`;
  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      await fetch(`${base}/taxonomies/lqm`);
      break;
    } catch {
      if (child.exitCode !== null) {
        throw new Error(`server exited with code ${child.exitCode}`);
      }
      if (Date.now() > deadline) {
        child.kill("SIGKILL");
        throw new Error("server did not come up in 30s");
      }
      await new Promise((r) => setTimeout(r, 50));
    }
  }
  return {
    base,
    port,
    storeDir: dir,
    process: child,
    stop: () =>
      new Promise<void>((resolve) => {
        child.once("exit", () => resolve());
        child.kill("SIGKILL");
      }),
  };
};

export interface SegmentInput {
  segment_id: string;
  source_lang: string;
  target_lang: string;
  dialect: string | null;
  model_id: string;
  source_text: string;
  target_text: string;
  reference_text?: string;
}

export const createProject = async (
  base: string,
  segments: SegmentInput[],
  options: {
    annotators?: string[];
    overlap?: number;
    layer?: string;
  } = {},
): Promise<string> => {
  const annotators = options.annotators ?? ["alice", "bob"];
  const response = await fetch(`${base}/projects`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({
      taxonomy_name: "lqm",
      layer: options.layer ?? "diagnostic",
      overlap_fraction: options.overlap ?? 1.0,
      segments,
      roster: annotators.map((a) => ({ annotator_id: a, token: `tok-${a}` })),
    }),
  });
  if (response.status !== 201) {
    throw new Error(`project creation failed: ${await response.text()}`);
  }
  const body = (await response.json()) as { project_id: string };
  return body.project_id;
};
