import type { ApiClient } from "../api.js";
import type { Actions } from "../actions.js";
import type { AppState } from "../state.js";

/** Everything a view render function is handed. */
export interface ViewContext {
  state: AppState;
  actions: Actions;
  api: ApiClient;
}
