/** Single-page shell: hash routing over stories, preview, practice, progress. */

import * as api from "./api.js";
import { configure } from "./config.js";
import { clear, el } from "./dom.js";
import { renderPractice } from "./practice.js";
import { renderPreviewPage } from "./preview.js";
import { renderProgress } from "./progress.js";

const TOKEN_KEY = "lingotutor-token";

function token(): string | null {
  return window.localStorage.getItem(TOKEN_KEY);
}

function banner(root: HTMLElement, message: string): void {
  const node = el(root.ownerDocument, "div", "error-banner", message);
  node.style.background = "#fdd";
  root.prepend(node);
}

async function renderHome(root: HTMLElement): Promise<void> {
  const doc = root.ownerDocument;
  clear(root);
  root.appendChild(el(doc, "h1", "app-title", "Story practice"));

  const auth = token();
  if (!auth) {
    const form = el(doc, "form", "register-form");
    const name = el(doc, "input", "register-name") as HTMLInputElement;
    name.placeholder = "Your name";
    const role = el(doc, "select", "register-role") as HTMLSelectElement;
    for (const value of ["learner", "teacher"]) {
      const option = el(doc, "option", "", value) as HTMLOptionElement;
      option.value = value;
      role.appendChild(option);
    }
    const go = el(doc, "button", "register-go", "Start") as HTMLButtonElement;
    go.type = "submit";
    form.appendChild(name);
    form.appendChild(role);
    form.appendChild(go);
    form.addEventListener("submit", async (event) => {
      event.preventDefault();
      try {
        const user = await api.register(name.value, role.value as "learner" | "teacher");
        window.localStorage.setItem(TOKEN_KEY, user.token);
        await renderHome(root);
      } catch (err) {
        banner(root, String(err));
      }
    });
    root.appendChild(form);
    return;
  }

  try {
    const user = await api.me(auth);
    root.appendChild(el(doc, "p", "whoami", `${user.name} (${user.role})${user.level ? ", level " + user.level : ""}`));
    const nav = el(doc, "p", "nav");
    const progressLink = el(doc, "a", "nav-progress", "Progress") as HTMLAnchorElement;
    progressLink.href = "#/progress";
    nav.appendChild(progressLink);
    root.appendChild(nav);

    const stories = await api.listStories(auth);
    const list = el(doc, "ul", "story-list");
    for (const story of stories) {
      const item = el(doc, "li", "story-item");
      const previewLink = el(doc, "a", "story-preview-link", story.title) as HTMLAnchorElement;
      previewLink.href = `#/preview/${story.id}`;
      const practiceLink = el(doc, "a", "story-practice-link", "practice") as HTMLAnchorElement;
      practiceLink.href = `#/practice/${story.id}`;
      item.appendChild(previewLink);
      item.appendChild(doc.createTextNode(` [${story.language}] `));
      item.appendChild(practiceLink);
      list.appendChild(item);
    }
    root.appendChild(list);
  } catch (err) {
    banner(root, String(err));
  }
}

async function renderPracticePage(root: HTMLElement, storyId: string): Promise<void> {
  const auth = token();
  if (!auth) return renderHome(root);
  clear(root);
  try {
    const session = await api.startSession(auth, storyId, 3, Date.now() % 100000);
    renderPractice(root, session, auth);
  } catch (err) {
    banner(root, String(err));
  }
}

async function renderProgressPage(root: HTMLElement): Promise<void> {
  const auth = token();
  if (!auth) return renderHome(root);
  clear(root);
  try {
    renderProgress(root, await api.progress(auth));
  } catch (err) {
    banner(root, String(err));
  }
}

export async function route(root: HTMLElement): Promise<void> {
  const hash = window.location.hash.replace(/^#\/?/, "");
  const [page, argument] = hash.split("/");
  const auth = token();
  if (page === "preview" && argument && auth) {
    clear(root);
    await renderPreviewPage(root, auth, argument);
  } else if (page === "practice" && argument) {
    await renderPracticePage(root, argument);
  } else if (page === "progress") {
    await renderProgressPage(root);
  } else {
    await renderHome(root);
  }
}

export function mount(root: HTMLElement, baseUrl: string): void {
  configure({ baseUrl });
  window.addEventListener("hashchange", () => void route(root));
  void route(root);
}
