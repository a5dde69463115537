/**
 * Browser entry point: builds the store and session client, binds the
 * joystick canvas, keyboard fallback, and the control buttons, and repaints
 * from store snapshots.  A slow interval repaints even without traffic so
 * the staleness banner appears when frames stop.
 */

import { SessionClient } from "./client.js";
import { KeyboardStick } from "./keyboard.js";
import { SceneRenderer, drawStick } from "./render.js";
import { Store } from "./store.js";
import { buildViewModel, type ViewModel } from "./viewmodel.js";

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) throw new Error(`missing element #${id}`);
  return el as T;
}

function wsUrl(): string {
  const override = new URLSearchParams(window.location.search).get("server");
  if (override !== null) return override;
  const proto = window.location.protocol === "https:" ? "wss" : "ws";
  return `${proto}://${window.location.host}/ws`;
}

function main(): void {
  const scene = new SceneRenderer(byId<HTMLCanvasElement>("scene"));
  const stickCanvas = byId<HTMLCanvasElement>("stick");
  const banner = byId<HTMLDivElement>("banner");
  const roleEl = byId<HTMLSpanElement>("role");
  const modeEl = byId<HTMLSpanElement>("mode");
  const marginEl = byId<HTMLSpanElement>("margin");
  const orientationEl = byId<HTMLSpanElement>("orientation");
  const tickEl = byId<HTMLSpanElement>("tick");
  const errorEl = byId<HTMLDivElement>("error");
  const stickHint = byId<HTMLDivElement>("stick-hint");

  const pauseBtn = byId<HTMLButtonElement>("pause");
  const resumeBtn = byId<HTMLButtonElement>("resume");
  const toppleBtn = byId<HTMLButtonElement>("topple");
  const remapBtn = byId<HTMLButtonElement>("remap");
  const correctBtn = byId<HTMLButtonElement>("correct");
  const reconnectBtn = byId<HTMLButtonElement>("reconnect");
  const limbSel = byId<HTMLSelectElement>("topple-limb");
  const rollSel = byId<HTMLSelectElement>("topple-roll");

  const store = new Store();
  const client = new SessionClient(wsUrl(), store);
  const keys = new KeyboardStick();

  let vm: ViewModel = buildViewModel(store.getState(), Date.now());

  const repaint = (): void => {
    vm = buildViewModel(store.getState(), Date.now());

    banner.textContent = vm.banner ?? "";
    banner.classList.toggle("hidden", vm.banner === null);
    roleEl.textContent = vm.replayBadge ? `${vm.roleLabel} (replay)` : vm.roleLabel;
    modeEl.textContent = vm.modeLabel;
    marginEl.textContent = vm.marginText;
    marginEl.classList.toggle("alert", vm.marginAlert);
    orientationEl.textContent = vm.orientationLabel;
    orientationEl.classList.toggle("alert", !vm.canonical && store.getState().frame !== null);
    tickEl.textContent = vm.tickText;
    errorEl.textContent = store.getState().lastError ?? "";

    pauseBtn.disabled = !vm.driving;
    resumeBtn.disabled = !vm.driving;
    toppleBtn.disabled = !vm.topple.toppleEnabled;
    remapBtn.disabled = !vm.topple.remapEnabled;
    correctBtn.disabled = !vm.topple.correctEnabled;
    limbSel.disabled = !vm.topple.toppleEnabled;
    rollSel.disabled = !vm.topple.toppleEnabled;
    reconnectBtn.disabled = store.getState().connection !== "closed";
    stickHint.textContent = vm.stickDisabledReason ?? "drag or use arrow keys";

    scene.draw(store.getState().frame, vm.banner !== null);
    drawStick(stickCanvas, { knob: vm.knob, ringFraction: vm.ringFraction, enabled: vm.stickEnabled });
  };

  store.subscribe(repaint);
  window.setInterval(repaint, 250); // staleness banner needs a clock, not traffic

  // pointer steering: drag inside the widget, spring back on release
  let dragging = false;
  const widgetFromPointer = (ev: PointerEvent): { x: number; y: number } => {
    const rect = stickCanvas.getBoundingClientRect();
    const radius = Math.min(rect.width, rect.height) / 2 - 8;
    const x = (ev.clientX - rect.left - rect.width / 2) / radius;
    const y = -(ev.clientY - rect.top - rect.height / 2) / radius;
    return { x: Math.max(-1, Math.min(1, x)), y: Math.max(-1, Math.min(1, y)) };
  };
  stickCanvas.addEventListener("pointerdown", (ev) => {
    if (!vm.stickEnabled) return;
    dragging = true;
    stickCanvas.setPointerCapture(ev.pointerId);
    client.setWidget(widgetFromPointer(ev));
  });
  stickCanvas.addEventListener("pointermove", (ev) => {
    if (dragging && vm.stickEnabled) client.setWidget(widgetFromPointer(ev));
  });
  const release = (): void => {
    if (!dragging) return;
    dragging = false;
    client.setWidget({ x: 0, y: 0 });
  };
  stickCanvas.addEventListener("pointerup", release);
  stickCanvas.addEventListener("pointercancel", release);

  // keyboard fallback; shift halves the deflection
  window.addEventListener("keydown", (ev) => {
    if (!vm.stickEnabled) return;
    const pos = keys.keyDown(ev.key, ev.shiftKey);
    if (pos !== null) {
      ev.preventDefault();
      client.setWidget(pos);
    }
  });
  window.addEventListener("keyup", (ev) => {
    const pos = keys.keyUp(ev.key, ev.shiftKey);
    if (pos !== null) client.setWidget(pos);
  });
  window.addEventListener("blur", () => client.setWidget(keys.releaseAll()));

  pauseBtn.addEventListener("click", () => client.pause());
  resumeBtn.addEventListener("click", () => client.resume());
  toppleBtn.addEventListener("click", () => {
    client.injectTopple({
      top_limb: Number(limbSel.value),
      roll_index: Number(rollSel.value),
    });
  });
  remapBtn.addEventListener("click", () => client.remap());
  correctBtn.addEventListener("click", () => client.correctOrientation());
  reconnectBtn.addEventListener("click", () => client.connect());

  client.connect();
  repaint();
}

main();
