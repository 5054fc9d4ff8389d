import type { ApiClient } from "./api";
import type { Job } from "./types";

const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

/** Poll a job until it reaches a terminal state. Resolves with the job on
 * success; rejects with the job's error when the agent step failed. */
export async function pollJob(
  api: ApiClient,
  jobId: string,
  intervalMs = 400,
  timeoutMs = 300000,
): Promise<Job> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    const job = await api.getJob(jobId);
    if (job.status === "succeeded") return job;
    if (job.status === "failed") {
      throw new Error(job.error ?? `job ${jobId} failed`);
    }
    if (Date.now() > deadline) throw new Error(`job ${jobId} timed out`);
    await sleep(intervalMs);
  }
}
