"use strict";
/**
 * Stop rendering: turn a stopped event plus the endpoint's composed stack
 * into the view the editor shows. The stack list mirrors the response
 * verbatim; synthetic boundary frames (presentationHint "label") get a
 * distinct look and no navigation of their own beyond their call site.
 */
Object.defineProperty(exports, "__esModule", { value: true });
exports.renderStop = renderStop;
function renderStop(stopped, frames) {
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
    const focus = top.navigable && top.path !== undefined && top.line !== undefined
        ? { path: top.path, line: top.line }
        : null;
    return { reason: stopped.reason, focus, rows };
}
//# sourceMappingURL=stackView.js.map