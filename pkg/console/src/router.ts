import { AppContext } from "./context.js";
import { clear, el } from "./dom.js";
import { renderAdmin, renderDenied } from "./views/admin.js";
import { renderLogin } from "./views/login.js";
import { renderPath } from "./views/path.js";
import { renderSightings } from "./views/sightings.js";

// Hash routes; unauthenticated users always land on login, and the admin
// area renders a denial page for basic users on direct navigation.
export class Router {
  private cleanup: (() => void) | null = null;
  private lastHash: string | null = null;
  private onHashChange = () => {
    if (window.location.hash !== this.lastHash) this.render();
  };

  constructor(private root: HTMLElement, private ctx: AppContext) {}

  start(): void {
    // go() renders synchronously, so the trailing async hashchange event
    // must not re-render (it would tear down live views mid-update)
    window.addEventListener("hashchange", this.onHashChange);
    this.render();
  }

  stop(): void {
    window.removeEventListener("hashchange", this.onHashChange);
    if (this.cleanup) {
      this.cleanup();
      this.cleanup = null;
    }
  }

  go(hash: string): void {
    window.location.hash = hash;
    this.render();
  }

  render(): void {
    this.lastHash = window.location.hash;
    if (this.cleanup) {
      this.cleanup();
      this.cleanup = null;
    }
    const session = this.ctx.getSession();
    const hash = window.location.hash || "#/sightings";
    clear(this.root);
    if (!session) {
      renderLogin(this.root, this.ctx);
      return;
    }
    const nav = this.navBar(session.role, hash);
    const view = el("main", { id: "view" });
    this.root.append(nav, view);
    if (hash.startsWith("#/path")) {
      renderPath(view, this.ctx);
    } else if (hash.startsWith("#/admin")) {
      renderAdmin(view, this.ctx);
    } else if (hash.startsWith("#/denied")) {
      renderDenied(view);
    } else {
      this.cleanup = renderSightings(view, this.ctx);
    }
  }

  private navBar(role: string, current: string): HTMLElement {
    const link = (hash: string, label: string) =>
      el("a", { href: hash, class: current.startsWith(hash) ? "active" : "" }, label);
    const items: (HTMLElement | null)[] = [
      link("#/sightings", "Sightings"),
      link("#/path", "Path"),
      role === "admin" ? link("#/admin", "Admin") : null,
      el(
        "button",
        {
          id: "logout",
          onclick: () => {
            this.ctx.setSession(null);
            this.go("#/login");
          },
        },
        "Log out",
      ),
    ];
    return el("nav", {}, ...items);
  }
}
