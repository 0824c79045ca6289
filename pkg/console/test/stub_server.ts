// In-memory stand-in for the tracking service: a fetch() implementation
// with the same routes, status codes and error shape.

export interface StubSighting {
  id: number;
  plate: string;
  camera_id: string;
  first_seen_ms: number;
  last_seen_ms: number;
  lat: number;
  lon: number;
  confidence: number;
  box: unknown;
}

interface RecordedRequest {
  method: string;
  url: URL;
  body: any;
  headers: Record<string, string>;
}

function jsonResponse(status: number, payload: unknown) {
  return {
    ok: status >= 200 && status < 300,
    status,
    json: async () => payload,
  } as Response;
}

function apiError(status: number, code: string, message: string) {
  return jsonResponse(status, { http_status: status, code, message });
}

export class StubServer {
  users: Record<string, { password: string; role: "admin" | "basic" }> = {};
  sightings: StubSighting[] = [];
  pathPoints: Record<string, any[]> = {};
  cameras: { camera_id: string; label: string; lat: number; lon: number; active: boolean }[] = [];
  tokens: Record<string, { role: string }> = {};
  requests: RecordedRequest[] = [];
  private nextToken = 1;

  fetch = async (input: string | URL, init: RequestInit = {}): Promise<Response> => {
    const url = new URL(String(input), "http://stub.local");
    const method = (init.method ?? "GET").toUpperCase();
    const headers = Object.fromEntries(
      Object.entries((init.headers as Record<string, string>) ?? {}).map(([k, v]) => [
        k.toLowerCase(),
        v,
      ]),
    );
    const body = init.body ? JSON.parse(String(init.body)) : undefined;
    this.requests.push({ method, url, body, headers });

    if (method === "POST" && url.pathname === "/api/login") {
      const user = this.users[body?.username];
      if (!user || user.password !== body?.password) {
        return apiError(401, "invalid-credentials", "invalid credentials");
      }
      const token = `tok-${this.nextToken++}`;
      this.tokens[token] = { role: user.role };
      return jsonResponse(200, { token, role: user.role, expires_at: Date.now() + 3600_000 });
    }

    const auth = headers["authorization"] ?? "";
    const token = auth.startsWith("Bearer ") ? auth.slice(7) : null;
    const session = token ? this.tokens[token] : undefined;
    if (!session) return apiError(401, "invalid-token", "token missing or expired");

    if (method === "GET" && url.pathname === "/api/sightings") {
      let rows = [...this.sightings].sort((a, b) => b.first_seen_ms - a.first_seen_ms);
      const plate = url.searchParams.get("plate");
      if (plate) rows = rows.filter((r) => r.plate === plate);
      return jsonResponse(200, rows);
    }
    if (method === "GET" && url.pathname === "/api/path") {
      const plate = url.searchParams.get("plate") ?? "";
      return jsonResponse(200, this.pathPoints[plate] ?? []);
    }
    if (method === "GET" && url.pathname === "/api/cameras") {
      return jsonResponse(200, this.cameras);
    }

    if (session.role !== "admin") return apiError(403, "forbidden", "admin role required");

    if (method === "POST" && url.pathname === "/api/cameras") {
      const camera = {
        camera_id: body.camera_id,
        label: body.label,
        lat: body.lat,
        lon: body.lon,
        active: true,
      };
      this.cameras.push(camera);
      return jsonResponse(201, { ...camera, api_key: `key-${camera.camera_id}` });
    }
    if (method === "DELETE" && url.pathname.startsWith("/api/cameras/")) {
      const id = decodeURIComponent(url.pathname.split("/").pop()!);
      const before = this.cameras.length;
      this.cameras = this.cameras.filter((c) => c.camera_id !== id);
      return before === this.cameras.length
        ? apiError(404, "unknown-camera", "unknown camera")
        : jsonResponse(200, { status: "deleted" });
    }
    if (method === "POST" && url.pathname === "/api/users") {
      this.users[body.username] = { password: body.password, role: body.role };
      return jsonResponse(201, { username: body.username, role: body.role });
    }
    if (method === "DELETE" && url.pathname.startsWith("/api/users/")) {
      const name = decodeURIComponent(url.pathname.split("/").pop()!);
      if (!this.users[name]) return apiError(404, "unknown-user", "unknown user");
      delete this.users[name];
      return jsonResponse(200, { status: "deleted" });
    }
    return apiError(404, "not-found", `no route for ${method} ${url.pathname}`);
  };
}
