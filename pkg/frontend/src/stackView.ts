/**
 * Stop rendering: turn a stopped event plus the endpoint's composed stack
 * into the view the editor shows. The stack list mirrors the response
 * verbatim; synthetic boundary frames (presentationHint "label") get a
 * distinct look and no navigation of their own beyond their call site.
 */

import type { DebugProtocol } from "@vscode/debugprotocol";

export interface StackRow {
  label: string;
  path?: string;
  line?: number;
  boundary: boolean;
  navigable: boolean;
}

export interface StopView {
  reason: string;
  focus: { path: string; line: number } | null;
  rows: StackRow[];
}

export function renderStop(
  stopped: DebugProtocol.StoppedEvent["body"],
  frames: DebugProtocol.StackFrame[]
): StopView {
  if (frames.length === 0) {
    return {
      reason: stopped.reason,
      focus: null,
      rows: [{ label: "(no frames)", boundary: false, navigable: false }],
    };
  }
  const rows = frames.map((frame) => {
    const path = frame.source?.path;
    return {
      label: frame.name,
      path,
      line: frame.line,
      boundary: frame.presentationHint === "label",
      navigable: path !== undefined,
    };
  });
  const top = rows[0];
  const focus =
    top.navigable && top.path !== undefined && top.line !== undefined
      ? { path: top.path, line: top.line }
      : null;
  return { reason: stopped.reason, focus, rows };
}
