/**
 * Keyboard fallback: arrow keys drive the widget to its extremes, a held
 * modifier scales the deflection down for fine control.  Opposing keys
 * cancel.  This is also what scripted tests use to steer.
 */

import type { WidgetPos } from "./joystick.js";

export const MODIFIER_SCALE = 0.5;

export type ArrowKey = "ArrowUp" | "ArrowDown" | "ArrowLeft" | "ArrowRight";

export function isArrowKey(key: string): key is ArrowKey {
  return key === "ArrowUp" || key === "ArrowDown" || key === "ArrowLeft" || key === "ArrowRight";
}

export function widgetFromKeys(pressed: ReadonlySet<ArrowKey>, modifier: boolean): WidgetPos {
  const scale = modifier ? MODIFIER_SCALE : 1;
  const x = (pressed.has("ArrowRight") ? 1 : 0) - (pressed.has("ArrowLeft") ? 1 : 0);
  const y = (pressed.has("ArrowUp") ? 1 : 0) - (pressed.has("ArrowDown") ? 1 : 0);
  return { x: x * scale, y: y * scale };
}

/** Tracks held arrow keys plus the shift modifier from raw key events. */
export class KeyboardStick {
  private readonly held = new Set<ArrowKey>();
  private modifier = false;

  keyDown(key: string, shift: boolean): WidgetPos | null {
    this.modifier = shift;
    if (!isArrowKey(key)) return null;
    this.held.add(key);
    return this.position();
  }

  keyUp(key: string, shift: boolean): WidgetPos | null {
    this.modifier = shift;
    if (!isArrowKey(key)) return null;
    this.held.delete(key);
    return this.position();
  }

  /** Window blur drops every key; a stuck virtual stick is a runaway robot. */
  releaseAll(): WidgetPos {
    this.held.clear();
    this.modifier = false;
    return this.position();
  }

  position(): WidgetPos {
    return widgetFromKeys(this.held, this.modifier);
  }
}
