import { describe, expect, it } from "vitest";

import { renderStop } from "../src/stackView";

const stopped = { reason: "breakpoint", threadId: 1 };

describe("renderStop", () => {
  it("renders a composed stack verbatim with boundary labels", () => {
    const frames = [
      { id: 1, name: "<module>", source: { path: "/w/sub.js" }, line: 2, column: 1 },
      {
        id: 2,
        name: "polyglotEval(js)",
        source: { path: "/w/main.py" },
        line: 3,
        column: 1,
        presentationHint: "label" as const,
      },
      { id: 3, name: "<module>", source: { path: "/w/main.py" }, line: 3, column: 1 },
    ];
    const view = renderStop(stopped, frames);
    expect(view.focus).toEqual({ path: "/w/sub.js", line: 2 });
    expect(view.rows).toEqual([
      { label: "<module>", path: "/w/sub.js", line: 2, boundary: false, navigable: true },
      {
        label: "polyglotEval(js)",
        path: "/w/main.py",
        line: 3,
        boundary: true,
        navigable: true,
      },
      { label: "<module>", path: "/w/main.py", line: 3, boundary: false, navigable: true },
    ]);
  });

  it("shows a placeholder row for an empty stack", () => {
    const view = renderStop(stopped, []);
    expect(view.focus).toBeNull();
    expect(view.rows).toEqual([
      { label: "(no frames)", boundary: false, navigable: false },
    ]);
  });

  it("keeps frames without a source but disables navigation", () => {
    const frames = [{ id: 1, name: "<unknown>", line: 0, column: 1 }];
    const view = renderStop(stopped, frames);
    expect(view.focus).toBeNull();
    expect(view.rows[0].navigable).toBe(false);
    expect(view.rows[0].label).toBe("<unknown>");
  });

  it("is indistinguishable from a vanilla view for one language", () => {
    const frames = [
      { id: 1, name: "f", source: { path: "/w/a.py" }, line: 7, column: 1 },
      { id: 2, name: "<module>", source: { path: "/w/a.py" }, line: 12, column: 1 },
    ];
    const view = renderStop({ reason: "step", threadId: 1 }, frames);
    expect(view.reason).toBe("step");
    expect(view.rows.every((row) => !row.boundary)).toBe(true);
    expect(view.focus).toEqual({ path: "/w/a.py", line: 7 });
  });
});
