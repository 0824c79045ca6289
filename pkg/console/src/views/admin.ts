import { ApiRequestError } from "../api.js";
import { AppContext } from "../context.js";
import { clear, el } from "../dom.js";

export function renderDenied(root: HTMLElement): void {
  clear(root);
  root.append(
    el("div", { id: "denied", class: "error" }, "This area requires the admin role."),
  );
}

// Camera and user management. The one-time API key is displayed exactly
// once with a copy control; deletions go through a confirmation.
export function renderAdmin(root: HTMLElement, ctx: AppContext): void {
  const session = ctx.getSession();
  if (!session || session.role !== "admin") {
    renderDenied(root);
    return;
  }
  clear(root);
  const status = el("div", { id: "admin-status" });
  const keyReveal = el("div", { id: "key-reveal", class: "hidden" });
  const cameraList = el("ul", { id: "camera-list" });

  const refreshCameras = () => {
    ctx.api
      .cameras()
      .then((cameras) => {
        clear(cameraList);
        for (const cam of cameras) {
          cameraList.append(
            el(
              "li",
              { "data-camera": cam.camera_id },
              `${cam.camera_id} (${cam.label || "unlabelled"}) @ ${cam.lat}, ${cam.lon} `,
              el(
                "button",
                {
                  class: "delete-camera",
                  onclick: () => {
                    if (!ctx.confirmFn(`Delete camera ${cam.camera_id}?`)) return;
                    ctx.api
                      .deleteCamera(cam.camera_id)
                      .then(refreshCameras)
                      .catch((err) => showError(err));
                  },
                },
                "delete",
              ),
            ),
          );
        }
      })
      .catch((err) => showError(err));
  };

  const showError = (err: unknown) => {
    status.textContent = err instanceof ApiRequestError ? err.body.message : "request failed";
    status.className = "error";
  };
  const showOk = (message: string) => {
    status.textContent = message;
    status.className = "ok";
  };

  const camId = el("input", { id: "cam-id", placeholder: "camera id" });
  const camLabel = el("input", { id: "cam-label", placeholder: "label" });
  const camLat = el("input", { id: "cam-lat", placeholder: "lat" });
  const camLon = el("input", { id: "cam-lon", placeholder: "lon" });
  const cameraForm = el(
    "form",
    {
      id: "camera-form",
      onsubmit: (ev) => {
        ev.preventDefault();
        ctx.api
          .createCamera(camId.value, camLabel.value, Number(camLat.value), Number(camLon.value))
          .then((created) => {
            clear(keyReveal);
            keyReveal.classList.remove("hidden");
            const keyField = el("code", { id: "one-time-key" }, created.api_key);
            keyReveal.append(
              el("strong", {}, `API key for ${created.camera_id}: `),
              keyField,
              el(
                "button",
                {
                  id: "copy-key",
                  type: "button",
                  onclick: () => void navigator.clipboard?.writeText(created.api_key),
                },
                "copy",
              ),
              el("div", { class: "warning" }, "Store it now — this key is never shown again."),
            );
            showOk(`camera ${created.camera_id} created`);
            refreshCameras();
          })
          .catch((err) => showError(err));
      },
    },
    el("h2", {}, "Cameras"),
    camId,
    camLabel,
    camLat,
    camLon,
    el("button", { type: "submit", id: "camera-create" }, "Add camera"),
  );

  const userName = el("input", { id: "user-name", placeholder: "username" });
  const userPassword = el("input", { id: "user-password", type: "password", placeholder: "password" });
  const userRole = el("select", { id: "user-role" }, el("option", { value: "basic" }, "basic"), el("option", { value: "admin" }, "admin"));
  const delName = el("input", { id: "user-del-name", placeholder: "username to remove" });
  const userForm = el(
    "form",
    {
      id: "user-form",
      onsubmit: (ev) => {
        ev.preventDefault();
        ctx.api
          .createUser(userName.value, userPassword.value, userRole.value)
          .then(() => showOk(`user ${userName.value} created`))
          .catch((err) => showError(err));
      },
    },
    el("h2", {}, "Users"),
    userName,
    userPassword,
    userRole,
    el("button", { type: "submit", id: "user-create" }, "Add user"),
  );
  const userDelete = el(
    "div",
    {},
    delName,
    el(
      "button",
      {
        id: "user-delete",
        onclick: () => {
          if (!ctx.confirmFn(`Delete user ${delName.value}?`)) return;
          ctx.api
            .deleteUser(delName.value)
            .then(() => showOk(`user ${delName.value} removed`))
            .catch((err) => showError(err));
        },
      },
      "Remove user",
    ),
  );

  root.append(
    el("h1", {}, "Administration"),
    status,
    cameraForm,
    keyReveal,
    cameraList,
    userForm,
    userDelete,
  );
  refreshCameras();
}
