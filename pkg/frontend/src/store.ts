/**
 * Single state store.  Every socket message and every input event becomes an
 * action dispatched here; rendering and the command layer only ever see the
 * immutable snapshots it publishes.  There is no other mutable UI state.
 *
 * Role handling across reconnects: the driver role is never assumed to
 * survive a dropped socket.  On disconnect the role resets to null and only
 * a fresh hello (or role promotion) from the server restores it, so a client
 * re-requests driving by reconnecting, explicitly, rather than silently
 * resuming.  The rest of the view (last frame, widget position) persists so
 * a viewer sees the same scene after the socket blips.
 */

import type { HelloMessage, Role, ServerMessage, TelemetryFrame } from "./protocol.js";
import type { WidgetPos } from "./joystick.js";

export type ConnectionStatus = "connecting" | "open" | "closed";

export interface UiSessionState {
  connection: ConnectionStatus;
  role: Role | null;
  hello: HelloMessage | null;
  frame: TelemetryFrame | null;
  /** Monotonic-clock ms of the last frame; staleness is judged against it. */
  lastFrameAt: number | null;
  widget: WidgetPos;
  replayEnded: boolean;
  lastError: string | null;
  framesSeen: number;
}

export type Action =
  | { type: "socket"; status: ConnectionStatus; at: number }
  | { type: "server"; msg: ServerMessage; at: number }
  | { type: "widget"; pos: WidgetPos }
  | { type: "fault"; message: string };

const INITIAL: UiSessionState = {
  connection: "closed",
  role: null,
  hello: null,
  frame: null,
  lastFrameAt: null,
  widget: { x: 0, y: 0 },
  replayEnded: false,
  lastError: null,
  framesSeen: 0,
};

function reduce(state: UiSessionState, action: Action): UiSessionState {
  switch (action.type) {
    case "socket": {
      const next: UiSessionState = { ...state, connection: action.status };
      if (action.status !== "open") {
        next.role = null;
      }
      if (action.status === "connecting") {
        next.replayEnded = false;
        next.lastError = null;
      }
      return next;
    }
    case "widget":
      return { ...state, widget: action.pos };
    case "fault":
      return { ...state, lastError: action.message };
    case "server": {
      const msg = action.msg;
      switch (msg.kind) {
        case "hello":
          return { ...state, hello: msg, role: msg.role };
        case "role":
          return { ...state, role: msg.role };
        case "frame":
          return {
            ...state,
            frame: msg.frame,
            lastFrameAt: action.at,
            framesSeen: state.framesSeen + 1,
          };
        case "error":
          return { ...state, lastError: msg.error };
        case "ack":
          return state.lastError === null ? state : { ...state, lastError: null };
        case "replay_end":
          return { ...state, replayEnded: true };
      }
    }
  }
}

export type Listener = (state: UiSessionState) => void;

export class Store {
  private state: UiSessionState = INITIAL;
  private listeners = new Set<Listener>();

  getState(): UiSessionState {
    return this.state;
  }

  dispatch(action: Action): UiSessionState {
    const next = reduce(this.state, action);
    if (next !== this.state) {
      this.state = Object.freeze(next);
      for (const fn of this.listeners) fn(next);
    }
    return this.state;
  }

  subscribe(fn: Listener): () => void {
    this.listeners.add(fn);
    return () => this.listeners.delete(fn);
  }
}
