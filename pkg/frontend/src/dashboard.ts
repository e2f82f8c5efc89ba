/**
 * Role-specific home screens. The annotator home groups assignments by
 * whether annotation is finished; the editor home adds corpus management
 * (schemas, documents, assignment) plus per-document annotator status and
 * the agreement figure; the admin home adds user creation. Views a role
 * may not use are simply never built.
 */

import { ApiClient, ApiError, DocumentSummary, UserInfo } from "./api";
import { showToast } from "./toast";

export function renderAnnotatorHome(
  root: HTMLElement,
  client: ApiClient,
  openDocument: (docId: string, view: "annotate" | "graph") => void,
): Promise<void> {
  return client.myDocuments().then((groups) => {
    root.innerHTML = "";
    const heading = document.createElement("h2");
    heading.textContent = "My documents";
    root.appendChild(heading);

    if (!groups.pending.length && !groups.completed.length) {
      const empty = document.createElement("p");
      empty.className = "empty-state";
      empty.textContent = "Nothing assigned to you yet.";
      root.appendChild(empty);
      return;
    }

    const section = (title: string, entries: typeof groups.pending) => {
      const box = document.createElement("section");
      const h = document.createElement("h3");
      h.textContent = title;
      box.appendChild(h);
      const list = document.createElement("ul");
      list.className = "assignment-list";
      for (const entry of entries) {
        const item = document.createElement("li");
        const open = document.createElement("button");
        open.textContent = `${entry.title ?? entry.document_id} [${entry.status}]`;
        open.addEventListener("click", () =>
          openDocument(entry.document_id, "annotate"),
        );
        const graph = document.createElement("button");
        graph.textContent = "graph";
        graph.className = "open-graph";
        graph.addEventListener("click", () =>
          openDocument(entry.document_id, "graph"),
        );
        item.append(open, graph);
        list.appendChild(item);
      }
      box.appendChild(list);
      return box;
    };

    root.appendChild(section("In progress", groups.pending));
    root.appendChild(section("Completed / validated", groups.completed));
  });
}

export async function renderEditorHome(
  root: HTMLElement,
  client: ApiClient,
  openDocument: (docId: string, view: "annotate" | "graph") => void,
): Promise<void> {
  const [documents, schemas, annotators] = await Promise.all([
    client.listDocuments(),
    client.listSchemas(),
    client.listAnnotators(),
  ]);

  root.innerHTML = "";
  const heading = document.createElement("h2");
  heading.textContent = "Corpus";
  root.appendChild(heading);

  for (const doc of documents) {
    root.appendChild(renderDocumentCard(doc, client, annotators, schemas, openDocument));
  }
  root.appendChild(renderUploadForms(client, schemas));
}

function renderDocumentCard(
  doc: DocumentSummary,
  client: ApiClient,
  annotators: UserInfo[],
  schemas: { schema_id: string }[],
  openDocument: (docId: string, view: "annotate" | "graph") => void,
): HTMLElement {
  const card = document.createElement("section");
  card.className = "doc-card";
  card.dataset.docId = doc.id;

  const title = document.createElement("h3");
  title.textContent = `${doc.title} (${doc.id})`;
  card.appendChild(title);

  const status = document.createElement("ul");
  status.className = "annotator-status";
  for (const a of doc.annotators) {
    const row = document.createElement("li");
    row.textContent = `${a.annotator_id}: ${a.status}`;
    status.appendChild(row);
  }
  card.appendChild(status);

  const alpha = document.createElement("p");
  alpha.className = "alpha";
  alpha.textContent = "agreement: …";
  card.appendChild(alpha);
  client
    .agreement(doc.id)
    .then((report) => {
      alpha.textContent =
        typeof report.alpha === "number"
          ? `agreement: ${report.alpha.toFixed(3)}`
          : `agreement: ${report.alpha}`;
    })
    .catch(() => {
      alpha.textContent = "agreement: n/a";
    });

  // schema binding
  const bind = document.createElement("div");
  const select = document.createElement("select");
  for (const schema of schemas) {
    const option = document.createElement("option");
    option.value = schema.schema_id;
    option.textContent = schema.schema_id;
    option.selected = schema.schema_id === doc.schema_id;
    select.appendChild(option);
  }
  const bindButton = document.createElement("button");
  bindButton.textContent = "Bind schema";
  bindButton.addEventListener("click", () => {
    client
      .bindSchema(doc.id, select.value)
      .then(() => showToast("schema bound", "info"))
      .catch((error: ApiError) => showToast(error.message, "error"));
  });
  bind.append(select, bindButton);
  card.appendChild(bind);

  // assignment checkboxes
  const assign = document.createElement("div");
  assign.className = "assign-panel";
  const boxes: HTMLInputElement[] = [];
  const assigned = new Set(doc.annotators.map((a) => a.annotator_id));
  for (const user of annotators) {
    const label = document.createElement("label");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.value = user.id;
    box.checked = assigned.has(user.id);
    boxes.push(box);
    label.append(box, document.createTextNode(`${user.username} (${user.role})`));
    assign.appendChild(label);
  }
  const assignButton = document.createElement("button");
  assignButton.textContent = "Save annotators";
  assignButton.addEventListener("click", () => {
    const ids = boxes.filter((b) => b.checked).map((b) => b.value);
    client
      .setAnnotators(doc.id, ids)
      .then(() => showToast("assignments saved", "info"))
      .catch((error: ApiError) => showToast(error.message, "error"));
  });
  assign.appendChild(assignButton);
  card.appendChild(assign);

  const open = document.createElement("button");
  open.textContent = "Annotate";
  open.addEventListener("click", () => openDocument(doc.id, "annotate"));
  card.appendChild(open);
  return card;
}

function renderUploadForms(
  client: ApiClient,
  schemas: { schema_id: string }[],
): HTMLElement {
  const box = document.createElement("section");
  box.className = "upload-forms";

  const schemaForm = document.createElement("div");
  const schemaText = document.createElement("textarea");
  schemaText.placeholder = "Paste XML schema…";
  const schemaButton = document.createElement("button");
  schemaButton.textContent = "Upload schema";
  schemaButton.addEventListener("click", () => {
    client
      .uploadSchema(schemaText.value)
      .then((tagset) =>
        showToast(`schema ${tagset.schema_id}: ${tagset.tags.length} tag(s)`, "info"),
      )
      .catch((error: ApiError) => showToast(error.message, "error"));
  });
  schemaForm.append(schemaText, schemaButton);

  const docForm = document.createElement("div");
  const titleInput = document.createElement("input");
  titleInput.placeholder = "Title";
  const textInput = document.createElement("textarea");
  textInput.placeholder = "Document text…";
  const docButton = document.createElement("button");
  docButton.textContent = "Upload document";
  docButton.addEventListener("click", () => {
    client
      .createDocument(titleInput.value, textInput.value)
      .then((doc) => showToast(`document ${doc.id} created`, "info"))
      .catch((error: ApiError) => showToast(error.message, "error"));
  });
  docForm.append(titleInput, textInput, docButton);

  box.append(schemaForm, docForm);
  if (!schemas.length) {
    const hint = document.createElement("p");
    hint.textContent = "Upload a schema first, then documents.";
    box.appendChild(hint);
  }
  return box;
}

export async function renderAdminHome(
  root: HTMLElement,
  client: ApiClient,
): Promise<void> {
  const users = await client.listUsers();
  root.innerHTML = "";
  const heading = document.createElement("h2");
  heading.textContent = "Users";
  root.appendChild(heading);

  const list = document.createElement("ul");
  list.className = "user-list";
  for (const user of users) {
    const row = document.createElement("li");
    row.textContent = `${user.username} — ${user.role}`;
    list.appendChild(row);
  }
  root.appendChild(list);

  const form = document.createElement("div");
  form.className = "user-form";
  const username = document.createElement("input");
  username.placeholder = "username";
  const password = document.createElement("input");
  password.type = "password";
  password.placeholder = "password";
  const role = document.createElement("select");
  for (const value of ["annotator", "editor", "admin"]) {
    const option = document.createElement("option");
    option.value = value;
    option.textContent = value;
    role.appendChild(option);
  }
  const create = document.createElement("button");
  create.textContent = "Create user";
  create.addEventListener("click", () => {
    client
      .createUser(username.value, password.value, role.value)
      .then((user) => showToast(`created ${user.username}`, "info"))
      .catch((error: ApiError) => showToast(error.message, "error"));
  });
  form.append(username, password, role, create);
  root.appendChild(form);
}
