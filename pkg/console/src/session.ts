// Browser-session persistence of the login token; cleared on logout or 401.
// The server re-checks every request, this only gates navigation client-side.

export interface ConsoleSession {
  token: string;
  role: "admin" | "basic";
  expires_at: number;
  username: string;
}

const KEY = "platetrack.session";

export function loadSession(): ConsoleSession | null {
  const raw = sessionStorage.getItem(KEY);
  if (!raw) return null;
  try {
    const session = JSON.parse(raw) as ConsoleSession;
    if (session.expires_at <= Date.now()) {
      clearSession();
      return null;
    }
    return session;
  } catch {
    clearSession();
    return null;
  }
}

export function saveSession(session: ConsoleSession): void {
  sessionStorage.setItem(KEY, JSON.stringify(session));
}

export function clearSession(): void {
  sessionStorage.removeItem(KEY);
}
