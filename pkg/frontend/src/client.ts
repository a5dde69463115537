/**
 * Session controller: owns the websocket, the per-connection seq counter,
 * and the joystick send gate.  All inbound traffic is funnelled into the
 * store; all outbound traffic leaves through here.
 *
 * The stick value actually sent is recomputed from the store at each frame
 * boundary, so the deadzone scale always comes from the live hello and a
 * mid-session role change (viewer promoted to driver) picks up the current
 * widget position instead of a stale one.
 */

import {
  correctCommand,
  encodeCommand,
  joystickCommand,
  parseServerMessage,
  pauseCommand,
  remapCommand,
  resumeCommand,
  setParamsCommand,
  toppleCommand,
  type Command,
  type Orientation,
} from "./protocol.js";
import { JoystickSender, sigmaFromWidget, type StickScale, type WidgetPos } from "./joystick.js";
import type { Store } from "./store.js";

/** The subset of the browser WebSocket surface the client needs; tests plug
 * in a scripted double. */
export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onmessage: ((ev: { data: string }) => void) | null;
  onclose: (() => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export interface ClientOptions {
  socketFactory?: SocketFactory;
  now?: () => number;
  /** Reconnect delay in ms; 0 disables automatic reconnects. */
  reconnectMs?: number;
}

const browserSocket: SocketFactory = (url) => new WebSocket(url) as unknown as SocketLike;

export class SessionClient {
  private socket: SocketLike | null = null;
  private seq = 0;
  private readonly sender: JoystickSender;
  private readonly factory: SocketFactory;
  private readonly now: () => number;
  private readonly reconnectMs: number;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;
  private closing = false;

  constructor(
    private readonly url: string,
    private readonly store: Store,
    opts: ClientOptions = {},
  ) {
    this.factory = opts.socketFactory ?? browserSocket;
    this.now = opts.now ?? Date.now;
    this.reconnectMs = opts.reconnectMs ?? 1500;
    this.sender = new JoystickSender((sx, sy) => this.push(joystickCommand(this.nextSeq(), sx, sy)));
  }

  connect(): void {
    if (this.socket !== null) return;
    this.closing = false;
    this.seq = 0;
    this.sender.reset();
    this.store.dispatch({ type: "socket", status: "connecting", at: this.now() });
    const ws = this.factory(this.url);
    this.socket = ws;
    ws.onopen = () => {
      this.store.dispatch({ type: "socket", status: "open", at: this.now() });
    };
    ws.onmessage = (ev) => this.onText(ev.data);
    ws.onclose = () => {
      this.socket = null;
      this.store.dispatch({ type: "socket", status: "closed", at: this.now() });
      if (!this.closing && this.reconnectMs > 0) {
        this.retryTimer = setTimeout(() => this.connect(), this.reconnectMs);
      }
    };
  }

  disconnect(): void {
    this.closing = true;
    if (this.retryTimer !== null) {
      clearTimeout(this.retryTimer);
      this.retryTimer = null;
    }
    this.socket?.close();
  }

  /** Operator moved the stick (pointer or keyboard).  Store only; the wire
   * sees it at the next frame boundary. */
  setWidget(pos: WidgetPos): void {
    this.store.dispatch({ type: "widget", pos });
  }

  pause(): number | null {
    return this.push(pauseCommand(this.nextSeq()));
  }

  resume(): number | null {
    return this.push(resumeCommand(this.nextSeq()));
  }

  injectTopple(orientation?: Orientation): number | null {
    return this.push(toppleCommand(this.nextSeq(), orientation));
  }

  remap(): number | null {
    return this.push(remapCommand(this.nextSeq()));
  }

  correctOrientation(target?: Orientation): number | null {
    return this.push(correctCommand(this.nextSeq(), target));
  }

  setParams(params: Record<string, number | string>): number | null {
    return this.push(setParamsCommand(this.nextSeq(), params));
  }

  private nextSeq(): number {
    this.seq += 1;
    return this.seq;
  }

  private push(cmd: Command): number | null {
    if (this.socket === null) return null;
    this.socket.send(encodeCommand(cmd));
    return cmd.seq;
  }

  private scale(): StickScale {
    const hello = this.store.getState().hello;
    return { deadzone: hello?.deadzone ?? 0.01, rhoMax: hello?.rho_max ?? 0.12 };
  }

  private onText(text: string): void {
    let msg;
    try {
      msg = parseServerMessage(text);
    } catch (exc) {
      this.store.dispatch({ type: "fault", message: `bad server message: ${(exc as Error).message}` });
      return;
    }
    this.store.dispatch({ type: "server", msg, at: this.now() });

    if (msg.kind === "role" && msg.role === "driver") {
      // promotion zeroes the service-side stick; resend ours next frame
      this.sender.reset();
    }
    if (msg.kind === "frame") {
      const st = this.store.getState();
      if (st.role === "driver" && !(st.hello?.replay ?? false)) {
        const sigma = sigmaFromWidget(st.widget, this.scale());
        this.sender.setTarget(sigma.sx, sigma.sy);
        this.sender.onFrame();
      }
    }
  }
}
