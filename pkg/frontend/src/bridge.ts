/**
 * Client for the textenvs line-JSON bridge protocol.
 *
 * A session owns one `textenvs bridge-serve` child process and one
 * environment inside it. Requests go as one JSON object per line on stdin;
 * the server answers in order, one JSON object per line on stdout, so the
 * client keeps a FIFO of pending promises. The bridge carries no task
 * logic of its own: observations, rewards, and done flags are exactly what
 * the native environment produced.
 */

import { spawn, type ChildProcessWithoutNullStreams } from "node:child_process";
import { createInterface, type Interface } from "node:readline";

export interface StepResult {
  observation: number[];
  reward: number;
  done: boolean;
  info: Record<string, string>;
}

export interface ResetResult {
  observation: number[];
  sampleId: string;
}

export interface BridgeOptions {
  /** Task to run: "seqtag" | "mlc" | "qa". */
  task: string;
  /** Path to the corpus file in the task's native format. */
  corpus: string;
  /** "hash" | "file" for tagging/MLC, "simple" | "informed" for QA. */
  featurizer?: string;
  /** "dense" | "sparse". */
  reward?: string;
  /** Seed for the environment's sample draws. */
  seed?: number;
  /** "hash" or a path to a .vec embedding file. */
  embeddings?: string;
  hashDim?: number;
  /** Python executable that has the textenvs package installed. */
  pythonBin?: string;
}

export class BridgeError extends Error {
  readonly kind: string;

  constructor(message: string, kind = "BridgeError") {
    super(message);
    this.name = "BridgeError";
    this.kind = kind;
  }
}

interface Pending {
  resolve: (reply: Record<string, unknown>) => void;
  reject: (err: Error) => void;
}

export class BridgeSession {
  readonly actions: string[];
  readonly observationDim: number;
  readonly numSamples: number;

  private constructor(
    private readonly child: ChildProcessWithoutNullStreams,
    private readonly reader: Interface,
    private readonly pending: Pending[],
    private readonly sessionId: string,
    makeReply: Record<string, unknown>,
  ) {
    this.actions = makeReply.actions as string[];
    this.observationDim = makeReply.observation_dim as number;
    this.numSamples = makeReply.num_samples as number;
  }

  /** Spawn the server, create one environment, and declare its spaces. */
  static async make(options: BridgeOptions): Promise<BridgeSession> {
    const python = options.pythonBin ?? process.env.TEXTENVS_PYTHON ?? "python3";
    const child = spawn(python, ["-m", "textenvs.cli", "bridge-serve"], {
      stdio: ["pipe", "pipe", "pipe"],
    });
    const reader = createInterface({ input: child.stdout });
    const pending: Pending[] = [];

    reader.on("line", (line) => {
      const next = pending.shift();
      if (!next) return;
      try {
        next.resolve(JSON.parse(line) as Record<string, unknown>);
      } catch (err) {
        next.reject(new BridgeError(`unparseable reply: ${line}`, "ProtocolError"));
      }
    });
    child.on("error", (err) => {
      while (pending.length) pending.shift()!.reject(new BridgeError(String(err), "SpawnError"));
    });
    child.on("exit", (code) => {
      while (pending.length) {
        pending.shift()!.reject(new BridgeError(`server exited with code ${code}`, "ServerExit"));
      }
    });

    const request = (payload: Record<string, unknown>) =>
      new Promise<Record<string, unknown>>((resolve, reject) => {
        pending.push({ resolve, reject });
        child.stdin.write(JSON.stringify(payload) + "\n");
      });

    const reply = await request({
      op: "make",
      task: options.task,
      corpus: options.corpus,
      ...(options.featurizer !== undefined && { featurizer: options.featurizer }),
      ...(options.reward !== undefined && { reward: options.reward }),
      ...(options.seed !== undefined && { seed: options.seed }),
      ...(options.embeddings !== undefined && { embeddings: options.embeddings }),
      ...(options.hashDim !== undefined && { hash_dim: options.hashDim }),
    });
    if (!reply.ok) {
      child.kill();
      throw new BridgeError(String(reply.error), String(reply.kind ?? "BridgeError"));
    }
    const session = new BridgeSession(
      child,
      reader,
      pending,
      reply.session as string,
      reply,
    );
    return session;
  }

  private request(payload: Record<string, unknown>): Promise<Record<string, unknown>> {
    return new Promise((resolve, reject) => {
      this.pending.push({ resolve, reject });
      this.child.stdin.write(JSON.stringify(payload) + "\n");
    });
  }

  private async checked(payload: Record<string, unknown>): Promise<Record<string, unknown>> {
    const reply = await this.request(payload);
    if (!reply.ok) {
      throw new BridgeError(String(reply.error), String(reply.kind ?? "BridgeError"));
    }
    return reply;
  }

  async reset(): Promise<ResetResult> {
    const reply = await this.checked({ op: "reset", session: this.sessionId });
    return {
      observation: reply.observation as number[],
      sampleId: reply.sample_id as string,
    };
  }

  async step(action: number): Promise<StepResult> {
    if (!Number.isInteger(action) || action < 0 || action >= this.actions.length) {
      throw new BridgeError(
        `action index ${action} out of range 0..${this.actions.length - 1}`,
        "IndexError",
      );
    }
    const reply = await this.checked({ op: "step", session: this.sessionId, action });
    return {
      observation: reply.observation as number[],
      reward: reply.reward as number,
      done: reply.done as boolean,
      info: reply.info as Record<string, string>,
    };
  }

  actionToIx(action: string): number {
    const ix = this.actions.indexOf(action);
    if (ix < 0) throw new BridgeError(`unknown action ${action}`, "UnknownAction");
    return ix;
  }

  ixToAction(ix: number): string {
    if (ix < 0 || ix >= this.actions.length) {
      throw new BridgeError(`action index ${ix} out of range`, "IndexError");
    }
    return this.actions[ix];
  }

  /** Close the remote environment and shut the server down. */
  async close(): Promise<void> {
    try {
      await this.checked({ op: "close", session: this.sessionId });
      await this.request({ op: "shutdown" });
    } finally {
      this.child.stdin.end();
      this.child.kill();
    }
  }
}
