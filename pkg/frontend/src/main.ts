/**
 * Entry point: session handling and a small hash router.
 *
 *   #/home               role-appropriate dashboard
 *   #/annotate/<docId>   two-pane annotation screen
 *   #/graph/<docId>      argument-graph editor
 */

import { AnnotationScreen } from "./annotate";
import { ApiClient, UserInfo } from "./api";
import {
  renderAdminHome,
  renderAnnotatorHome,
  renderEditorHome,
} from "./dashboard";
import { GraphEditor } from "./graphview";
import { scalarSlice } from "./unicode";
import { showToast } from "./toast";

const client = new ApiClient();
let currentUser: UserInfo | null = null;

function appRoot(): HTMLElement {
  return document.getElementById("app")!;
}

function openDocument(docId: string, view: "annotate" | "graph"): void {
  window.location.hash = `#/${view}/${docId}`;
}

function renderTopBar(): HTMLElement {
  const bar = document.createElement("header");
  bar.className = "top-bar";
  const brand = document.createElement("a");
  brand.href = "#/home";
  brand.textContent = "sentag";
  bar.appendChild(brand);
  if (currentUser) {
    const who = document.createElement("span");
    who.textContent = `${currentUser.username} (${currentUser.role})`;
    const logout = document.createElement("button");
    logout.textContent = "Log out";
    logout.addEventListener("click", () => {
      client.token = null;
      currentUser = null;
      window.localStorage.removeItem("sentag-token");
      window.location.hash = "#/login";
    });
    bar.append(who, logout);
  }
  return bar;
}

function renderLogin(): void {
  const root = appRoot();
  root.innerHTML = "";
  root.appendChild(renderTopBar());

  const form = document.createElement("form");
  form.className = "login-form";
  const username = document.createElement("input");
  username.placeholder = "username";
  username.autocomplete = "username";
  const password = document.createElement("input");
  password.type = "password";
  password.placeholder = "password";
  password.autocomplete = "current-password";
  const submit = document.createElement("button");
  submit.type = "submit";
  submit.textContent = "Log in";
  form.append(username, password, submit);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    client
      .login(username.value, password.value)
      .then((user) => {
        currentUser = user;
        if (client.token) {
          window.localStorage.setItem("sentag-token", client.token);
        }
        window.location.hash = "#/home";
      })
      .catch(() => showToast("Login failed.", "error"));
  });
  root.appendChild(form);
}

async function renderHome(): Promise<void> {
  const root = appRoot();
  root.innerHTML = "";
  root.appendChild(renderTopBar());
  const content = document.createElement("div");
  content.className = "home";
  root.appendChild(content);

  if (!currentUser) return;
  if (currentUser.role === "admin") {
    const adminBox = document.createElement("div");
    const editorBox = document.createElement("div");
    content.append(adminBox, editorBox);
    await renderAdminHome(adminBox, client);
    await renderEditorHome(editorBox, client, openDocument);
  } else if (currentUser.role === "editor") {
    await renderEditorHome(content, client, openDocument);
  } else {
    await renderAnnotatorHome(content, client, openDocument);
  }
}

async function renderAnnotate(docId: string): Promise<void> {
  const root = appRoot();
  root.innerHTML = "";
  root.appendChild(renderTopBar());
  const holder = document.createElement("div");
  root.appendChild(holder);
  const screen = new AnnotationScreen(holder, client, docId);
  await screen.load();
}

async function renderGraph(docId: string): Promise<void> {
  const root = appRoot();
  root.innerHTML = "";
  root.appendChild(renderTopBar());
  const holder = document.createElement("div");
  root.appendChild(holder);

  const doc = await client.getDocument(docId);
  const editor = new GraphEditor(holder, client, docId, (node) =>
    node.start !== undefined && node.end !== undefined
      ? scalarSlice(doc.text, node.start, node.end)
      : node.id,
  );
  await editor.load();
}

async function route(): Promise<void> {
  const hash = window.location.hash || "#/home";
  if (!currentUser && hash !== "#/login") {
    window.location.hash = "#/login";
    return;
  }
  const [, view, arg] = hash.split("/");
  try {
    if (view === "login") renderLogin();
    else if (view === "annotate" && arg) await renderAnnotate(arg);
    else if (view === "graph" && arg) await renderGraph(arg);
    else await renderHome();
  } catch (error) {
    showToast(error instanceof Error ? error.message : String(error), "error");
  }
}

async function boot(): Promise<void> {
  const saved = window.localStorage.getItem("sentag-token");
  if (saved) {
    client.token = saved;
    try {
      currentUser = await client.me();
    } catch {
      client.token = null;
      window.localStorage.removeItem("sentag-token");
    }
  }
  window.addEventListener("hashchange", () => void route());
  await route();
}

void boot();
