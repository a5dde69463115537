/**
 * Virtual joystick math: widget coordinates to stick values, deadzone
 * snapping, and the frame-gated sender.
 *
 * The widget lives in normalized [-1, 1]^2 with +y meaning "up" (away from
 * the operator).  Full deflection on an axis commands rho_max, so the
 * deadzone occupies a centred band of radius deadzone/rho_max on each axis.
 * Both scale factors come from the service hello; the client hardcodes
 * neither.
 */

export interface StickScale {
  deadzone: number;
  rhoMax: number;
}

export interface WidgetPos {
  x: number;
  y: number;
}

const clamp1 = (v: number) => Math.max(-1, Math.min(1, v));

/** Fraction of the widget radius covered by the deadzone ring. */
export function deadzoneRingFraction(scale: StickScale): number {
  return scale.deadzone / scale.rhoMax;
}

/** Snap a raw widget position: any axis whose commanded stick value would
 * land inside the deadzone collapses to exactly zero.  The knob is drawn at
 * the snapped position, so sub-deadzone input is visibly inert. */
export function snapWidget(pos: WidgetPos, scale: StickScale): WidgetPos {
  const band = deadzoneRingFraction(scale);
  const x = clamp1(pos.x);
  const y = clamp1(pos.y);
  return {
    x: Math.abs(x) <= band ? 0 : x,
    y: Math.abs(y) <= band ? 0 : y,
  };
}

/** Stick values for a snapped widget position. */
export function sigmaFromWidget(pos: WidgetPos, scale: StickScale): { sx: number; sy: number } {
  const snapped = snapWidget(pos, scale);
  return { sx: snapped.x * scale.rhoMax, sy: snapped.y * scale.rhoMax };
}

/**
 * Gate joystick traffic to at most one message per telemetry tick.
 *
 * The widget may move at pointer rate; the service only samples the stick
 * once per tick, so anything faster is waste.  Each incoming frame grants
 * one send, spent only if the snapped stick value changed since the last
 * send.  Repeated jitter inside the deadzone snaps to the same (0, 0) and
 * therefore emits nothing.
 */
export class JoystickSender {
  private desired: { sx: number; sy: number } = { sx: 0, sy: 0 };
  private lastSent: { sx: number; sy: number } | null = null;

  constructor(private readonly send: (sx: number, sy: number) => void) {}

  /** Record the operator's latest intent; nothing goes out yet. */
  setTarget(sx: number, sy: number): void {
    this.desired = { sx, sy };
  }

  /** Telemetry tick boundary: flush the pending value if it changed. */
  onFrame(): void {
    const d = this.desired;
    if (this.lastSent !== null && this.lastSent.sx === d.sx && this.lastSent.sy === d.sy) {
      return;
    }
    this.lastSent = { ...d };
    this.send(d.sx, d.sy);
  }

  /** A reconnect starts a fresh service-side stick; resend unconditionally. */
  reset(): void {
    this.lastSent = null;
  }
}
