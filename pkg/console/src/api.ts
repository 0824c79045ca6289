// Typed client for the tracking service HTTP API. Every call except login
// carries the bearer token; a 401 anywhere funnels into onUnauthorized so
// the app can drop the session and bounce to the login view.

export interface ApiErrorBody {
  http_status: number;
  code: string;
  message: string;
}

export class ApiRequestError extends Error {
  constructor(readonly body: ApiErrorBody) {
    super(body.message);
  }
}

export interface LoginResult {
  token: string;
  role: "admin" | "basic";
  expires_at: number;
}

export interface Sighting {
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

export interface PathPoint {
  camera_id: string;
  lat: number;
  lon: number;
  first_seen_ms: number;
  last_seen_ms: number;
}

export interface Camera {
  camera_id: string;
  label: string;
  lat: number;
  lon: number;
  active: boolean;
}

export interface CameraCreated extends Camera {
  api_key: string; // shown exactly once
}

export interface SightingFilters {
  plate?: string;
  camera?: string;
  from?: number;
  to?: number;
  limit?: number;
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private getToken: () => string | null,
    private onUnauthorized: () => void,
  ) {}

  private async request<T>(
    method: string,
    path: string,
    opts: { body?: unknown; query?: Record<string, string | number | undefined>; auth?: boolean } = {},
  ): Promise<T> {
    const { body, query, auth = true } = opts;
    const url = new URL(this.baseUrl + path, window.location.href);
    for (const [key, value] of Object.entries(query ?? {})) {
      if (value !== undefined && value !== "") url.searchParams.set(key, String(value));
    }
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (auth) {
      const token = this.getToken();
      if (token) headers["Authorization"] = `Bearer ${token}`;
    }
    const resp = await fetch(url.toString(), {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await resp.json().catch(() => null);
    if (!resp.ok) {
      const error: ApiErrorBody = payload ?? {
        http_status: resp.status,
        code: "unknown",
        message: `request failed with ${resp.status}`,
      };
      if (resp.status === 401 && auth) this.onUnauthorized();
      throw new ApiRequestError(error);
    }
    return payload as T;
  }

  login(username: string, password: string): Promise<LoginResult> {
    return this.request<LoginResult>("POST", "/api/login", {
      body: { username, password },
      auth: false,
    });
  }

  sightings(filters: SightingFilters): Promise<Sighting[]> {
    return this.request<Sighting[]>("GET", "/api/sightings", {
      query: {
        plate: filters.plate,
        camera: filters.camera,
        from: filters.from,
        to: filters.to,
        limit: filters.limit,
      },
    });
  }

  path(plate: string): Promise<PathPoint[]> {
    return this.request<PathPoint[]>("GET", "/api/path", { query: { plate } });
  }

  cameras(): Promise<Camera[]> {
    return this.request<Camera[]>("GET", "/api/cameras");
  }

  createCamera(camera_id: string, label: string, lat: number, lon: number): Promise<CameraCreated> {
    return this.request<CameraCreated>("POST", "/api/cameras", {
      body: { camera_id, label, lat, lon },
    });
  }

  deleteCamera(camera_id: string): Promise<void> {
    return this.request<void>("DELETE", `/api/cameras/${encodeURIComponent(camera_id)}`);
  }

  createUser(username: string, password: string, role: string): Promise<void> {
    return this.request<void>("POST", "/api/users", { body: { username, password, role } });
  }

  deleteUser(username: string): Promise<void> {
    return this.request<void>("DELETE", `/api/users/${encodeURIComponent(username)}`);
  }
}
