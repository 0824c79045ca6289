import { ApiClient } from "./api.js";
import { AppContext } from "./context.js";
import { Router } from "./router.js";
import { ConsoleSession, clearSession, loadSession, saveSession } from "./session.js";

export interface AppOptions {
  baseUrl?: string;
  pollIntervalMs?: number;
  confirmFn?: (message: string) => boolean;
}

// Wire the client, session store and router together. Exported so the
// integration tests can boot the whole app against a stubbed fetch.
export function createApp(root: HTMLElement, opts: AppOptions = {}): Router {
  let session: ConsoleSession | null = loadSession();

  const ctx: AppContext = {
    pollIntervalMs: opts.pollIntervalMs ?? 3000,
    confirmFn: opts.confirmFn ?? ((message) => window.confirm(message)),
    getSession: () => session,
    setSession: (next) => {
      session = next;
      if (next) {
        saveSession(next);
      } else {
        clearSession();
      }
    },
    navigate: (hash) => router.go(hash),
    api: new ApiClient(
      opts.baseUrl ?? "",
      () => session?.token ?? null,
      () => {
        // token expired or revoked: drop the session, back to login
        session = null;
        clearSession();
        router.go("#/login");
      },
    ),
  };

  const router = new Router(root, ctx);
  return router;
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const params = new URLSearchParams(window.location.search);
  createApp(document.getElementById("app")!, {
    baseUrl: params.get("api") ?? "http://127.0.0.1:8080",
  }).start();
}
