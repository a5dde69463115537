/**
 * Canvas drawing.  Top-down orthographic view: the ground plane with the
 * robot at the camera centre, limb backbones taken verbatim from the frame's
 * sampled curves and placed by the frame's pose.  The renderer applies only
 * rigid 2D placement to data the service already computed; it never solves
 * anything itself.
 */

import type { TelemetryFrame } from "./protocol.js";
import type { WidgetPos } from "./joystick.js";

export interface SceneStyle {
  metersAcross: number;
  gridStep: number;
}

export const SCENE_STYLE: SceneStyle = {
  metersAcross: 1.2,
  gridStep: 0.1,
};

const LIMB_COLORS = ["#e2a33d", "#4d9de0", "#5cb47a", "#b06bc4"];
const TRAIL_MAX = 600;

/** World xy to canvas px with the camera centred on `center`, +y up. */
function projector(w: number, h: number, center: [number, number], metersAcross: number) {
  const scale = Math.min(w, h) / metersAcross;
  return (x: number, y: number): [number, number] => [
    w / 2 + (x - center[0]) * scale,
    h / 2 - (y - center[1]) * scale,
  ];
}

export class SceneRenderer {
  private trail: Array<[number, number]> = [];
  private trailTick = -1;

  constructor(private readonly canvas: HTMLCanvasElement) {}

  clearTrail(): void {
    this.trail = [];
    this.trailTick = -1;
  }

  draw(frame: TelemetryFrame | null, degraded: boolean): void {
    const ctx = this.canvas.getContext("2d");
    if (ctx === null) return;
    const { width: w, height: h } = this.canvas;

    ctx.fillStyle = "#10141a";
    ctx.fillRect(0, 0, w, h);
    if (frame === null) return;

    const [bx, by, psi] = frame.pose;
    if (frame.tick !== this.trailTick) {
      this.trailTick = frame.tick;
      this.trail.push([bx, by]);
      if (this.trail.length > TRAIL_MAX) this.trail.shift();
    }

    const toPx = projector(w, h, [bx, by], SCENE_STYLE.metersAcross);

    this.drawGrid(ctx, w, h, bx, by, toPx);
    this.drawTrail(ctx, toPx);
    this.drawBody(ctx, frame, psi, bx, by, toPx);

    if (degraded) {
      ctx.fillStyle = "rgba(16, 20, 26, 0.55)";
      ctx.fillRect(0, 0, w, h);
    }
  }

  private drawGrid(
    ctx: CanvasRenderingContext2D,
    w: number,
    h: number,
    bx: number,
    by: number,
    toPx: (x: number, y: number) => [number, number],
  ): void {
    const half = SCENE_STYLE.metersAcross / 2 + SCENE_STYLE.gridStep;
    const step = SCENE_STYLE.gridStep;
    ctx.strokeStyle = "#1e2630";
    ctx.lineWidth = 1;
    const x0 = Math.floor((bx - half) / step) * step;
    const y0 = Math.floor((by - half) / step) * step;
    for (let gx = x0; gx <= bx + half; gx += step) {
      const [px] = toPx(gx, by);
      ctx.beginPath();
      ctx.moveTo(px, 0);
      ctx.lineTo(px, h);
      ctx.stroke();
    }
    for (let gy = y0; gy <= by + half; gy += step) {
      const [, py] = toPx(bx, gy);
      ctx.beginPath();
      ctx.moveTo(0, py);
      ctx.lineTo(w, py);
      ctx.stroke();
    }
  }

  private drawTrail(ctx: CanvasRenderingContext2D, toPx: (x: number, y: number) => [number, number]): void {
    if (this.trail.length < 2) return;
    ctx.strokeStyle = "#32424f";
    ctx.lineWidth = 2;
    ctx.beginPath();
    this.trail.forEach(([x, y], i) => {
      const [px, py] = toPx(x, y);
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.stroke();
  }

  private drawBody(
    ctx: CanvasRenderingContext2D,
    frame: TelemetryFrame,
    psi: number,
    bx: number,
    by: number,
    toPx: (x: number, y: number) => [number, number],
  ): void {
    const c = Math.cos(psi);
    const s = Math.sin(psi);
    const place = (px: number, py: number): [number, number] =>
      toPx(bx + c * px - s * py, by + s * px + c * py);

    if (frame.curves !== undefined) {
      frame.curves.forEach((curve, i) => {
        ctx.strokeStyle = LIMB_COLORS[i] ?? "#ffffff";
        ctx.lineWidth = 3;
        ctx.beginPath();
        curve.forEach((pt, j) => {
          const [px, py] = place(pt[0], pt[1]);
          if (j === 0) ctx.moveTo(px, py);
          else ctx.lineTo(px, py);
        });
        ctx.stroke();
        const tip = curve[curve.length - 1];
        if (tip !== undefined) {
          const [px, py] = place(tip[0], tip[1]);
          ctx.fillStyle = LIMB_COLORS[i] ?? "#ffffff";
          ctx.beginPath();
          ctx.arc(px, py, 4, 0, 2 * Math.PI);
          ctx.fill();
        }
      });
    }

    const [hx, hy] = toPx(bx, by);
    ctx.fillStyle = "#d7dde4";
    ctx.beginPath();
    ctx.arc(hx, hy, 5, 0, 2 * Math.PI);
    ctx.fill();

    // heading arrow, 0.15 m long in world units
    const [ax, ay] = toPx(bx + 0.15 * c, by + 0.15 * s);
    ctx.strokeStyle = "#d7dde4";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(hx, hy);
    ctx.lineTo(ax, ay);
    ctx.stroke();
    const wing = 6;
    const ang = Math.atan2(ay - hy, ax - hx);
    ctx.beginPath();
    ctx.moveTo(ax, ay);
    ctx.lineTo(ax - wing * Math.cos(ang - 0.5), ay - wing * Math.sin(ang - 0.5));
    ctx.moveTo(ax, ay);
    ctx.lineTo(ax - wing * Math.cos(ang + 0.5), ay - wing * Math.sin(ang + 0.5));
    ctx.stroke();
  }
}

export interface StickRenderInput {
  knob: WidgetPos;
  ringFraction: number;
  enabled: boolean;
}

export function drawStick(canvas: HTMLCanvasElement, input: StickRenderInput): void {
  const ctx = canvas.getContext("2d");
  if (ctx === null) return;
  const { width: w, height: h } = canvas;
  const cx = w / 2;
  const cy = h / 2;
  const radius = Math.min(w, h) / 2 - 8;

  ctx.fillStyle = "#10141a";
  ctx.fillRect(0, 0, w, h);

  ctx.strokeStyle = "#3a4656";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.arc(cx, cy, radius, 0, 2 * Math.PI);
  ctx.stroke();

  // axis crosshair
  ctx.strokeStyle = "#232c38";
  ctx.beginPath();
  ctx.moveTo(cx - radius, cy);
  ctx.lineTo(cx + radius, cy);
  ctx.moveTo(cx, cy - radius);
  ctx.lineTo(cx, cy + radius);
  ctx.stroke();

  // deadzone ring drawn to scale: inputs inside it are snapped to zero
  ctx.fillStyle = "rgba(90, 104, 122, 0.25)";
  ctx.strokeStyle = "#5a687a";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.arc(cx, cy, input.ringFraction * radius, 0, 2 * Math.PI);
  ctx.fill();
  ctx.stroke();

  const kx = cx + input.knob.x * radius;
  const ky = cy - input.knob.y * radius;
  ctx.fillStyle = input.enabled ? "#e2a33d" : "#55606e";
  ctx.beginPath();
  ctx.arc(kx, ky, 9, 0, 2 * Math.PI);
  ctx.fill();

  if (!input.enabled) {
    ctx.fillStyle = "rgba(16, 20, 26, 0.45)";
    ctx.fillRect(0, 0, w, h);
  }
}
