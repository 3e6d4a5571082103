/** App shell: tab bar, notice area, stale-session banner, view switching.
 *
 * `mount` wires the store to the DOM and returns the live pieces so a test
 * can drive the same actions the widgets call.
 */

import { ApiClient } from "./api.js";
import { Actions } from "./actions.js";
import { Store } from "./state.js";
import type { AppState, Tab } from "./state.js";
import { renderCapture } from "./views/capture.js";
import { renderCalibrate } from "./views/calibrate.js";
import { renderMeasure } from "./views/measure.js";
import { renderFit } from "./views/fit.js";
import type { ViewContext } from "./views/context.js";

const TABS: [Tab, string][] = [
  ["capture", "Capture"],
  ["calibrate", "Calibrate"],
  ["measure", "Measure"],
  ["fit", "Fit"],
];

const VIEWS: Record<Tab, (c: HTMLElement, ctx: ViewContext) => void> = {
  capture: renderCapture,
  calibrate: renderCalibrate,
  measure: renderMeasure,
  fit: renderFit,
};

function renderTabs(bar: HTMLElement, state: AppState,
                    actions: Actions): void {
  bar.textContent = "";
  bar.setAttribute("role", "tablist");
  for (const [tab, title] of TABS) {
    const button = document.createElement("button");
    button.type = "button";
    button.setAttribute("role", "tab");
    button.setAttribute("aria-selected", String(state.tab === tab));
    button.dataset.tab = tab;
    button.textContent = title;
    button.tabIndex = state.tab === tab ? 0 : -1;
    button.addEventListener("click", () => actions.setTab(tab));
    button.addEventListener("keydown", (event) => {
      const order = TABS.map(([t]) => t);
      const here = order.indexOf(state.tab);
      if (event.key === "ArrowRight") {
        actions.setTab(order[(here + 1) % order.length]!);
        event.preventDefault();
      } else if (event.key === "ArrowLeft") {
        actions.setTab(order[(here + order.length - 1) % order.length]!);
        event.preventDefault();
      }
    });
    bar.append(button);
  }
}

function renderNotices(area: HTMLElement, state: AppState,
                       actions: Actions): void {
  area.textContent = "";
  if (state.staleSession) {
    const banner = document.createElement("div");
    banner.className = "stale-banner";
    banner.setAttribute("role", "alert");
    banner.append(
      "someone else changed the session (the service reported a newer " +
      "revision); reload to continue from their state ");
    const reload = document.createElement("button");
    reload.type = "button";
    reload.id = "reload-session";
    reload.textContent = "Reload session";
    reload.addEventListener("click", () => void actions.reloadSession());
    banner.append(reload);
    area.append(banner);
  }
  for (const notice of state.notices) {
    const item = document.createElement("div");
    item.className = `notice notice-${notice.kind}`;
    item.setAttribute("role", "alert");
    const code = document.createElement("strong");
    code.className = "notice-code";
    code.textContent = notice.code;
    const detail = document.createElement("span");
    detail.textContent = ` ${notice.detail} `;
    const dismiss = document.createElement("button");
    dismiss.type = "button";
    dismiss.textContent = "×";
    dismiss.setAttribute("aria-label", `dismiss notice ${notice.code}`);
    dismiss.addEventListener("click", () =>
      actions.dismissNotice(notice.id));
    item.append(code, detail, dismiss);
    area.append(item);
  }
}

export interface App {
  store: Store;
  actions: Actions;
  api: ApiClient;
  root: HTMLElement;
}

export function mount(root: HTMLElement, apiBase: string = ""): App {
  const api = new ApiClient(apiBase);
  const store = new Store();
  const actions = new Actions(api, store);

  root.textContent = "";
  root.className = "bench";
  const header = document.createElement("header");
  const title = document.createElement("h1");
  title.textContent = "photospec bench";
  header.append(title);
  const tabBar = document.createElement("nav");
  header.append(tabBar);
  const noticeArea = document.createElement("div");
  noticeArea.className = "notice-area";
  const viewBox = document.createElement("main");
  viewBox.id = "view";
  root.append(header, noticeArea, viewBox);

  const renderAll = (state: AppState) => {
    renderTabs(tabBar, state, actions);
    renderNotices(noticeArea, state, actions);
    VIEWS[state.tab](viewBox, { state, actions, api });
  };

  store.subscribe(renderAll);
  renderAll(store.get());
  void actions.init();
  return { store, actions, api, root };
}
