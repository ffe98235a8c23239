import { MtLoopApi } from "./api.js";
import * as annotator from "./annotator.js";
import * as admin from "./admin.js";
import { renderDashboard, renderWorkspace } from "./render.js";

// DOM glue only: state lives in the two modules, views are pure HTML
// strings, and this file wires events to transitions.

const apiBase =
  document.querySelector<HTMLMetaElement>('meta[name="mtloop-api-base"]')?.content ??
  "/api/v1";
const api = new MtLoopApi(apiBase);

const annotatorId =
  new URLSearchParams(window.location.search).get("annotator") ?? "annotator-1";

let workspace = annotator.initialWorkspace;
let dashboard = admin.initialDashboard;

const workspaceRoot = document.getElementById("workspace")!;
const dashboardRoot = document.getElementById("dashboard")!;

function paintWorkspace(): void {
  workspaceRoot.innerHTML = renderWorkspace(workspace);

  workspaceRoot
    .querySelector<HTMLButtonElement>("#fetch-next")
    ?.addEventListener("click", async () => {
      workspace = await annotator.fetchNext(api, annotatorId, workspace);
      paintWorkspace();
    });

  for (const radio of workspaceRoot.querySelectorAll<HTMLInputElement>(
    'input[name="hypothesis"]',
  )) {
    radio.addEventListener("change", () => {
      workspace = annotator.selectHypothesis(workspace, radio.value);
      paintWorkspace();
    });
  }

  for (const box of workspaceRoot.querySelectorAll<HTMLInputElement>(
    'input[name="category"]',
  )) {
    box.addEventListener("change", () => {
      workspace = annotator.toggleCategory(workspace, box.value);
      paintWorkspace();
    });
  }

  const draft = workspaceRoot.querySelector<HTMLTextAreaElement>("#post-edit");
  draft?.addEventListener("input", () => {
    workspace = annotator.editDraft(workspace, draft.value);
    const submitButton =
      workspaceRoot.querySelector<HTMLButtonElement>("#submit-annotation");
    if (submitButton) submitButton.disabled = !annotator.canSubmit(workspace);
  });

  workspaceRoot
    .querySelector<HTMLButtonElement>("#submit-annotation")
    ?.addEventListener("click", async () => {
      workspace = { ...workspace, busy: true };
      workspace = await annotator.submit(api, annotatorId, workspace);
      paintWorkspace();
      dashboard = await admin.refreshStats(api, dashboard);
      paintDashboard();
    });
}

function paintDashboard(): void {
  dashboardRoot.innerHTML = renderDashboard(dashboard);

  const slider = dashboardRoot.querySelector<HTMLInputElement>("#tau-slider");
  slider?.addEventListener("change", async () => {
    dashboard = await admin.applyThreshold(api, dashboard, Number(slider.value));
    paintDashboard();
  });

  dashboardRoot
    .querySelector<HTMLButtonElement>("#auto-label")
    ?.addEventListener("click", async () => {
      dashboard = await admin.runAutoLabel(api, dashboard);
      paintDashboard();
    });

  for (const radio of dashboardRoot.querySelectorAll<HTMLInputElement>(
    'input[name="rated"]',
  )) {
    radio.addEventListener("change", async () => {
      dashboard = await admin.applyRatedFilter(api, dashboard, radio.value === "true");
      paintDashboard();
    });
  }
}

for (const tab of document.querySelectorAll<HTMLButtonElement>("nav button[data-tab]")) {
  tab.addEventListener("click", () => {
    for (const panel of document.querySelectorAll<HTMLElement>("main > section[data-panel]")) {
      panel.hidden = panel.dataset.panel !== tab.dataset.tab;
    }
  });
}

void (async () => {
  dashboard = await admin.refreshStats(api, dashboard);
  dashboard = await admin.applyRatedFilter(api, dashboard, true);
  paintDashboard();
  paintWorkspace();
})();
