// Repeated fetch with a sequence number: at most one request in flight,
// and responses from a superseded refresh (filters changed) are discarded.

export class Poller<T> {
  private seq = 0;
  private inflight = false;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private intervalMs: number,
    private fetchFn: () => Promise<T>,
    private onData: (data: T) => void,
    private onError: (err: unknown) => void,
  ) {}

  start(): void {
    this.stop();
    void this.tick();
    this.timer = setInterval(() => void this.tick(), this.intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
    this.seq++; // orphan any in-flight response
  }

  // filters changed: invalidate in-flight responses and fetch immediately
  refresh(): void {
    this.seq++;
    this.inflight = false;
    void this.tick();
  }

  private async tick(): Promise<void> {
    if (this.inflight) return;
    this.inflight = true;
    const mySeq = this.seq;
    try {
      const data = await this.fetchFn();
      if (mySeq === this.seq) this.onData(data);
    } catch (err) {
      if (mySeq === this.seq) this.onError(err);
    } finally {
      if (mySeq === this.seq) this.inflight = false;
    }
  }
}
