import { ApiClient } from "./api.js";
import { ConsoleSession } from "./session.js";

export interface AppContext {
  api: ApiClient;
  getSession(): ConsoleSession | null;
  setSession(session: ConsoleSession | null): void;
  navigate(hash: string): void;
  pollIntervalMs: number;
  confirmFn: (message: string) => boolean;
}
