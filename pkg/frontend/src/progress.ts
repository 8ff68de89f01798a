/** Progress view: one bar per construct, success rate as width, trend echoed verbatim. */

import { clear, el } from "./dom.js";
import type { ProgressReport } from "./types.js";

export function renderProgress(root: HTMLElement, report: ProgressReport): void {
  const doc = root.ownerDocument;
  clear(root);
  root.className = "progress";

  root.appendChild(el(doc, "h2", "progress-title", "Progress"));
  root.appendChild(el(doc, "p", "progress-theta", `Ability estimate: ${report.theta.toFixed(2)}`));

  const entries = Object.entries(report.constructs).sort((a, b) => b[1].rate - a[1].rate);
  if (entries.length === 0) {
    root.appendChild(el(doc, "p", "progress-empty", "No practice recorded yet."));
    return;
  }

  const list = el(doc, "div", "progress-bars");
  for (const [construct, stats] of entries) {
    const row = el(doc, "div", "progress-row");
    row.dataset.construct = construct;
    row.appendChild(el(doc, "span", "progress-name", construct));

    const track = el(doc, "div", "bar-track");
    track.style.background = "#eee";
    const bar = el(doc, "div", "bar");
    bar.style.width = `${+(stats.rate * 100).toFixed(2)}%`;
    bar.style.background = "#7b68ee";
    bar.style.height = "0.8em";
    track.appendChild(bar);
    row.appendChild(track);

    row.appendChild(el(doc, "span", "progress-rate", `${(stats.rate * 100).toFixed(0)}%`));
    row.appendChild(el(doc, "span", "progress-trend", String(stats.trend)));
    row.appendChild(
      el(doc, "span", "progress-counts", `${stats.successes}/${stats.observations}`),
    );
    list.appendChild(row);
  }
  root.appendChild(list);
}
