import { ApiRequestError } from "../api.js";
import { AppContext } from "../context.js";
import { clear, el } from "../dom.js";

export function renderLogin(root: HTMLElement, ctx: AppContext): void {
  clear(root);
  const error = el("div", { class: "error", id: "login-error" });
  const username = el("input", { id: "login-username", name: "username", autocomplete: "username" });
  const password = el("input", {
    id: "login-password",
    name: "password",
    type: "password",
    autocomplete: "current-password",
  });

  const form = el(
    "form",
    {
      id: "login-form",
      onsubmit: (ev) => {
        ev.preventDefault();
        error.textContent = "";
        ctx.api
          .login(username.value, password.value)
          .then((result) => {
            ctx.setSession({
              token: result.token,
              role: result.role,
              expires_at: result.expires_at,
              username: username.value,
            });
            ctx.navigate(result.role === "admin" ? "#/admin" : "#/sightings");
          })
          .catch((err) => {
            error.textContent =
              err instanceof ApiRequestError ? err.body.message : "service unreachable";
          });
      },
    },
    el("h1", {}, "Plate tracking console"),
    el("label", { for: "login-username" }, "Username"),
    username,
    el("label", { for: "login-password" }, "Password"),
    password,
    el("button", { type: "submit" }, "Sign in"),
    error,
  );
  root.append(form);
}
