/** Entry point: connect to the bridge and mount the requested views.
 *
 * ?bridge=host:port overrides the endpoint (default: the serving
 * host); #tapper / #display / #trial show a single view, no hash
 * shows all three stacked.
 */

import { BridgeClient } from "./bridge.js";
import { ConsoleStore } from "./store.js";
import { displayView } from "./views/display.js";
import { tapperView } from "./views/tapper.js";
import { trialView } from "./views/trial.js";

export function bridgeUrl(location: Location): string {
  const params = new URLSearchParams(location.search);
  const override = params.get("bridge");
  const hostPort = override ?? location.host;
  const scheme = location.protocol === "https:" ? "wss" : "ws";
  return `${scheme}://${hostPort}/bridge`;
}

export function selectedViews(hash: string): string[] {
  const name = hash.replace(/^#/, "");
  if (name === "tapper" || name === "display" || name === "trial") return [name];
  return ["tapper", "display", "trial"];
}

export function boot(root: HTMLElement, location: Location): BridgeClient {
  const store = new ConsoleStore();
  const client = new BridgeClient(bridgeUrl(location), store);
  client.connect();
  for (const view of selectedViews(location.hash)) {
    if (view === "tapper") tapperView(root, client);
    else if (view === "display") displayView(root, store);
    else trialView(root, client);
  }
  return client;
}

if (typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root !== null) boot(root, window.location);
}
