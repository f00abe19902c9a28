/**
 * Bridge parity: for scripted episodes with fixed seeds, the bridge's
 * (observation, reward, done) stream must equal the native recorded trace
 * exactly. Native traces come from the `textenvs trace` subcommand, which
 * steps the environments in-process with a seeded random policy.
 */

import { execFile } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { BridgeError, BridgeSession } from "../src/bridge.js";

const run = promisify(execFile);
const PYTHON = process.env.TEXTENVS_PYTHON ?? "python3";

interface ResetEvent {
  event: "reset";
  sample_id: string;
  observation: number[];
}

interface StepEvent {
  event: "step";
  action: number;
  observation: number[];
  reward: number;
  done: boolean;
  info: Record<string, string>;
}

type TraceEvent = ResetEvent | StepEvent;

async function cli(args: string[]): Promise<string> {
  const { stdout } = await run(PYTHON, ["-m", "textenvs.cli", ...args], {
    maxBuffer: 64 * 1024 * 1024,
  });
  return stdout;
}

async function recordTrace(
  task: string,
  corpus: string,
  episodes: number,
  seed: number,
  featurizer?: string,
): Promise<TraceEvent[]> {
  const args = [
    "trace",
    "--task", task,
    "--corpus", corpus,
    "--episodes", String(episodes),
    "--seed", String(seed),
  ];
  if (featurizer) args.push("--featurizer", featurizer);
  const stdout = await cli(args);
  return stdout
    .trim()
    .split("\n")
    .map((line) => JSON.parse(line) as TraceEvent);
}

let corpusDir: string;
const corpora: Record<string, string> = {};

beforeAll(async () => {
  corpusDir = mkdtempSync(join(tmpdir(), "textenvs-parity-"));
  await cli(["gen-synthetic", "--task", "seqtag", "--out", join(corpusDir, "seqtag"),
             "--counts", "80,10,10", "--seed", "7"]);
  await cli(["gen-synthetic", "--task", "mlc", "--out", join(corpusDir, "mlc"),
             "--counts", "80,10,10", "--seed", "7"]);
  await cli(["gen-synthetic", "--task", "qa", "--out", join(corpusDir, "qa"),
             "--counts", "80,10,10", "--seed", "7"]);
  corpora.seqtag = join(corpusDir, "seqtag", "train.conll");
  corpora.mlc = join(corpusDir, "mlc", "train.jsonl");
  corpora.qa = join(corpusDir, "qa", "train.jsonl");
}, 120_000);

describe("session setup", () => {
  it("declares the tagging action space from the corpus vocabulary", async () => {
    const session = await BridgeSession.make({ task: "seqtag", corpus: corpora.seqtag, seed: 1 });
    expect(session.actions).toEqual(["T0", "T1", "T2"]);
    expect(session.observationDim).toBeGreaterThan(0);
    await session.close();
  });

  it("declares a 2-D observation for the informed QA featurizer", async () => {
    const session = await BridgeSession.make({
      task: "qa", corpus: corpora.qa, featurizer: "informed", seed: 1,
    });
    expect(session.observationDim).toBe(2);
    expect(session.actions).toEqual(["ANS", "CONT"]);
    await session.close();
  });

  it("lists labels plus TERM for multi-label classification", async () => {
    const session = await BridgeSession.make({ task: "mlc", corpus: corpora.mlc, seed: 1 });
    expect(session.actions).toEqual(["L0", "L1", "L2", "TERM"]);
    await session.close();
  });

  it("rejects a bad corpus path", async () => {
    await expect(
      BridgeSession.make({ task: "qa", corpus: join(corpusDir, "missing.jsonl") }),
    ).rejects.toThrowError(BridgeError);
  });
});

describe("episode semantics over the bridge", () => {
  it("errors when stepping a finished episode", async () => {
    const session = await BridgeSession.make({
      task: "qa", corpus: corpora.qa, featurizer: "informed", seed: 3,
    });
    await session.reset();
    const result = await session.step(session.actionToIx("ANS"));
    expect(result.done).toBe(true);
    await expect(session.step(0)).rejects.toThrowError(BridgeError);
    await session.close();
  });

  it("rejects out-of-range action indices locally", async () => {
    const session = await BridgeSession.make({
      task: "qa", corpus: corpora.qa, featurizer: "informed", seed: 3,
    });
    await session.reset();
    await expect(session.step(99)).rejects.toThrowError(/out of range/);
    await session.close();
  });
});

describe("parity against native traces", () => {
  const EPISODES = 100;
  const SEED = 11;

  const cases: Array<{ task: string; featurizer?: string }> = [
    { task: "seqtag" },
    { task: "mlc" },
    { task: "qa", featurizer: "informed" },
  ];

  for (const { task, featurizer } of cases) {
    it(
      `replays ${EPISODES} ${task} episodes with identical streams`,
      async () => {
        const native = await recordTrace(task, corpora[task], EPISODES, SEED, featurizer);
        const session = await BridgeSession.make({
          task, corpus: corpora[task], seed: SEED, ...(featurizer && { featurizer }),
        });
        let resets = 0;
        let steps = 0;
        for (const event of native) {
          if (event.event === "reset") {
            const reply = await session.reset();
            expect(reply.sampleId).toBe(event.sample_id);
            expect(reply.observation).toEqual(event.observation);
            resets += 1;
          } else {
            const reply = await session.step(event.action);
            expect(reply.observation).toEqual(event.observation);
            expect(reply.reward).toBe(event.reward);
            expect(reply.done).toBe(event.done);
            expect(reply.info).toEqual(event.info);
            steps += 1;
          }
        }
        expect(resets).toBe(EPISODES);
        expect(steps).toBeGreaterThan(EPISODES);
        await session.close();
      },
      120_000,
    );
  }
});
