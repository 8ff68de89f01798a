/** Teacher preview: candidate highlighting, chunk boxes, construct panel. */

import { ApiError, preview } from "./api.js";
import { clear, el } from "./dom.js";
import type { Preview, PreviewChunk } from "./types.js";

interface ChunkNode {
  chunk: PreviewChunk;
  children: ChunkNode[];
}

/** Nest chunks by containment so each analytic form gets a single box. */
function nestChunks(chunks: PreviewChunk[], from: number, to: number): ChunkNode[] {
  const inRange = chunks
    .filter((c) => c.start >= from && c.end <= to)
    .sort((a, b) => a.start - b.start || (b.end - b.start) - (a.end - a.start));
  const roots: ChunkNode[] = [];
  const stack: ChunkNode[] = [];
  for (const chunk of inRange) {
    const node: ChunkNode = { chunk, children: [] };
    while (stack.length > 0) {
      const top = stack[stack.length - 1]!;
      if (chunk.start >= top.chunk.start && chunk.end <= top.chunk.end) break;
      stack.pop();
    }
    // drop chunks that straddle an open box instead of nesting cleanly
    const top = stack[stack.length - 1];
    if (top && chunk.end > top.chunk.end) continue;
    if (top) top.children.push(node);
    else roots.push(node);
    stack.push(node);
  }
  return roots;
}

function renderTokenRange(
  doc: Document,
  data: Preview,
  container: HTMLElement,
  from: number,
  to: number,
  nodes: ChunkNode[],
  tokenEls: Map<number, HTMLElement>,
  onWordClick: (index: number) => void,
): void {
  let index = from;
  const emitToken = (parent: HTMLElement, i: number): void => {
    const token = data.tokens[i];
    if (!token) return;
    const span = el(doc, "span", token.candidate ? "token candidate" : "token", token.surface);
    span.dataset.index = String(i);
    if (token.candidate) span.style.color = "violet";
    span.addEventListener("click", () => onWordClick(i));
    tokenEls.set(i, span);
    parent.appendChild(span);
    parent.appendChild(doc.createTextNode(" "));
  };
  const emitChunk = (parent: HTMLElement, node: ChunkNode): void => {
    const box = el(doc, "span", `chunk chunk-${node.chunk.kind.toLowerCase()}`);
    box.dataset.kind = node.chunk.kind;
    box.style.border = "1px solid red";
    box.style.borderRadius = "6px";
    let i = node.chunk.start;
    for (const child of node.children) {
      while (i < child.chunk.start) emitToken(box, i++);
      emitChunk(box, child);
      i = child.chunk.end + 1;
    }
    while (i <= node.chunk.end) emitToken(box, i++);
    parent.appendChild(box);
    parent.appendChild(doc.createTextNode(" "));
  };
  for (const node of nodes) {
    while (index < node.chunk.start) emitToken(container, index++);
    emitChunk(container, node);
    index = node.chunk.end + 1;
  }
  while (index < to) emitToken(container, index++);
}

export function renderPreview(root: HTMLElement, data: Preview): void {
  const doc = root.ownerDocument;
  clear(root);
  root.className = "preview";

  const textPane = el(doc, "div", "preview-text");
  const panel = el(doc, "div", "construct-panel");
  const wordBox = el(doc, "div", "word-box");
  wordBox.style.display = "none";
  const tokenEls = new Map<number, HTMLElement>();

  const constructNames = new Map<string, string>();
  for (const entry of data.constructs) constructNames.set(entry.construct, entry.name);

  const showWordBox = (index: number): void => {
    const token = data.tokens[index];
    if (!token) return;
    clear(wordBox);
    wordBox.style.display = "block";
    wordBox.className = "word-box green";
    wordBox.style.border = "2px solid green";
    wordBox.appendChild(el(doc, "strong", "word-box-surface", token.surface));
    const list = el(doc, "ul", "word-box-constructs");
    for (const id of token.constructs) {
      list.appendChild(el(doc, "li", "word-box-construct", constructNames.get(id) ?? id));
    }
    if (token.constructs.length === 0) {
      list.appendChild(el(doc, "li", "word-box-empty", "No constructs at this word."));
    }
    wordBox.appendChild(list);
  };

  for (const [pFrom, pTo] of data.paragraphs) {
    const para = el(doc, "p", "paragraph");
    for (let s = pFrom; s < pTo; s++) {
      const range = data.sentences[s];
      if (!range) continue;
      const [from, to] = range;
      const sentence = el(doc, "span", "sentence");
      renderTokenRange(doc, data, sentence, from, to, nestChunks(data.chunks, from, to - 1), tokenEls, showWordBox);
      para.appendChild(sentence);
    }
    textPane.appendChild(para);
  }

  const heading = el(doc, "h2", "panel-title", "Constructs");
  panel.appendChild(heading);
  if (data.constructs.length === 0) {
    panel.appendChild(el(doc, "p", "panel-empty", "No constructs detected in this story."));
  } else {
    const list = el(doc, "ul", "construct-list");
    for (const entry of data.constructs) {
      const item = el(doc, "li", "construct-entry");
      item.appendChild(el(doc, "span", "construct-name", entry.name));
      item.appendChild(el(doc, "span", "construct-cefr", entry.cefr));
      item.addEventListener("click", () => {
        for (const [i, node] of tokenEls) {
          node.classList.toggle("highlight", entry.matched.includes(i));
        }
      });
      list.appendChild(item);
    }
    panel.appendChild(list);
  }

  root.appendChild(textPane);
  root.appendChild(panel);
  root.appendChild(wordBox);
}

/** Fetch the preview and render it, or show an error banner if the fetch fails. */
export async function renderPreviewPage(root: HTMLElement, token: string, storyId: string): Promise<void> {
  const doc = root.ownerDocument;
  try {
    renderPreview(root, await preview(token, storyId));
  } catch (err) {
    clear(root);
    const message = err instanceof ApiError ? err.detail : String(err);
    const banner = el(doc, "div", "error-banner", `Could not load preview: ${message}`);
    banner.style.background = "#fdd";
    root.appendChild(banner);
  }
}
