/**
 * The two-pane annotation screen: tag palette with attribute details on the
 * left, highlighted document text on the right. Spans are created by
 * selecting text while a tag is active; attribute values are edited in the
 * panel after creation; Validate renders the server's report anchored to
 * the offending spans.
 *
 * Nothing here is invented client-side: every span, status, and error shown
 * comes from the last successful API response, and a rejected call leaves
 * the view exactly as it was.
 */

import {
  ApiClient,
  ApiError,
  DocumentDetail,
  ReportEntryInfo,
  SpanInfo,
  TagInfo,
} from "./api";
import { renderAnnotatedText, selectionScalarRange } from "./highlight";
import { colorFor } from "./palette";
import { scalarSlice } from "./unicode";
import { showToast } from "./toast";

export class AnnotationScreen {
  doc: DocumentDetail | null = null;
  spans: SpanInfo[] = [];
  activeTag: string | null = null;
  selectedSpanId: string | null = null;
  errors: ReportEntryInfo[] = [];
  status: string | null = null;

  constructor(
    private root: HTMLElement,
    private client: ApiClient,
    private docId: string,
    private selectionProvider: () => Selection | null = () =>
      window.getSelection(),
  ) {}

  async load(): Promise<void> {
    this.doc = await this.client.getDocument(this.docId);
    this.status = this.doc.status;
    const annotations = await this.client.getAnnotations(this.docId);
    this.spans = annotations.spans;
    this.render();
  }

  private tagsByName(): Map<string, TagInfo> {
    const map = new Map<string, TagInfo>();
    for (const tag of this.doc?.tagset?.tags ?? []) map.set(tag.name, tag);
    return map;
  }

  private errorSpanIds(): Set<string> {
    return new Set(
      this.errors
        .map((e) => e.location)
        .filter((loc): loc is string => typeof loc === "string"),
    );
  }

  render(): void {
    if (!this.doc) return;
    this.root.innerHTML = "";

    const layout = document.createElement("div");
    layout.className = "annotate-layout";
    layout.append(this.renderTagPane(), this.renderTextPane());
    this.root.appendChild(layout);
  }

  private renderTagPane(): HTMLElement {
    const pane = document.createElement("aside");
    pane.className = "tag-pane";

    const heading = document.createElement("h2");
    heading.textContent = this.doc!.title;
    const statusLine = document.createElement("p");
    statusLine.className = "status-line";
    statusLine.textContent = `status: ${this.status ?? "n/a"}`;
    pane.append(heading, statusLine);

    const list = document.createElement("ul");
    list.className = "tag-list";
    for (const tag of this.doc!.tagset?.tags ?? []) {
      list.appendChild(this.renderTagItem(tag));
    }
    pane.appendChild(list);

    if (this.selectedSpanId) {
      const span = this.spans.find((s) => s.id === this.selectedSpanId);
      if (span) pane.appendChild(this.renderAttributePanel(span));
    }

    pane.appendChild(this.renderActions());
    if (this.errors.length) pane.appendChild(this.renderErrorList());
    return pane;
  }

  private renderTagItem(tag: TagInfo): HTMLElement {
    const item = document.createElement("li");
    const button = document.createElement("button");
    button.className = "tag-button";
    button.dataset.tag = tag.name;
    if (this.activeTag === tag.name) button.classList.add("active");
    button.style.borderColor = colorFor(tag.color_index);
    button.style.backgroundColor =
      this.activeTag === tag.name ? colorFor(tag.color_index) : "transparent";
    button.textContent = tag.is_graph ? `${tag.name} ⬡` : tag.name;
    button.addEventListener("click", () => {
      this.activeTag = this.activeTag === tag.name ? null : tag.name;
      this.render();
    });
    item.appendChild(button);

    // attribute details appear when the tag is selected, for editing or
    // simply for consultation
    if (this.activeTag === tag.name && tag.attributes.length) {
      const attrs = document.createElement("ul");
      attrs.className = "tag-attrs";
      for (const attr of tag.attributes) {
        const row = document.createElement("li");
        const flags = [
          attr.required ? "required" : "optional",
          attr.enumeration ? `one of: ${attr.enumeration.join(", ")}` : null,
          attr.default !== null ? `default: ${attr.default}` : null,
        ].filter(Boolean);
        row.textContent = `${attr.name} (${flags.join("; ")})`;
        attrs.appendChild(row);
      }
      item.appendChild(attrs);
    }
    return item;
  }

  private renderAttributePanel(span: SpanInfo): HTMLElement {
    const panel = document.createElement("div");
    panel.className = "attr-panel";
    const title = document.createElement("h3");
    title.textContent = `<${span.tag}> ${span.start}–${span.end}`;
    panel.appendChild(title);

    const tag = this.tagsByName().get(span.tag);
    const inputs = new Map<string, HTMLInputElement | HTMLSelectElement>();
    for (const attr of tag?.attributes ?? []) {
      const label = document.createElement("label");
      label.textContent = attr.name + (attr.required ? " *" : "");
      let field: HTMLInputElement | HTMLSelectElement;
      if (attr.enumeration) {
        field = document.createElement("select");
        for (const value of ["", ...attr.enumeration]) {
          const option = document.createElement("option");
          option.value = value;
          option.textContent = value || "(unset)";
          field.appendChild(option);
        }
      } else {
        field = document.createElement("input");
      }
      field.value = span.attributes[attr.name] ?? "";
      field.dataset.attrName = attr.name;
      inputs.set(attr.name, field);
      label.appendChild(field);
      panel.appendChild(label);
    }

    const save = document.createElement("button");
    save.className = "attr-save";
    save.textContent = "Save attributes";
    save.addEventListener("click", () => {
      const attributes: Record<string, string> = {};
      for (const [name, field] of inputs) {
        if (field.value !== "") attributes[name] = field.value;
      }
      void this.updateSpanAttributes(span.id, attributes);
    });

    const remove = document.createElement("button");
    remove.className = "span-delete";
    remove.textContent = "Delete span";
    remove.addEventListener("click", () => void this.deleteSpan(span.id));

    panel.append(save, remove);
    return panel;
  }

  private renderActions(): HTMLElement {
    const actions = document.createElement("div");
    actions.className = "actions";

    const validate = document.createElement("button");
    validate.className = "validate-button";
    validate.textContent = "Validate";
    validate.addEventListener("click", () => void this.validate());
    actions.appendChild(validate);

    if (this.status === "COMPLETED" || this.status === "VALIDATED") {
      const reopen = document.createElement("button");
      reopen.className = "reopen-button";
      reopen.textContent = "Reopen";
      reopen.addEventListener("click", () => void this.setStatus("IN_PROGRESS"));
      actions.appendChild(reopen);
    } else {
      const complete = document.createElement("button");
      complete.className = "complete-button";
      complete.textContent = "Mark completed";
      complete.addEventListener("click", () => void this.setStatus("COMPLETED"));
      actions.appendChild(complete);
    }
    return actions;
  }

  private renderErrorList(): HTMLElement {
    const box = document.createElement("div");
    box.className = "error-list";
    const heading = document.createElement("h3");
    heading.textContent = `validation: ${this.errors.length} error(s)`;
    box.appendChild(heading);
    const list = document.createElement("ul");
    for (const entry of this.errors) {
      const row = document.createElement("li");
      row.className = "error-entry";
      row.dataset.location = String(entry.location);
      row.textContent = `${entry.code}: ${entry.message}`;
      row.addEventListener("click", () => {
        if (typeof entry.location === "string") {
          this.selectedSpanId = entry.location;
          this.render();
        }
      });
      list.appendChild(row);
    }
    box.appendChild(list);
    return box;
  }

  private renderTextPane(): HTMLElement {
    const pane = document.createElement("main");
    pane.className = "text-pane";
    renderAnnotatedText(pane, this.doc!.text, this.spans, {
      tagsByName: this.tagsByName(),
      errorSpanIds: this.errorSpanIds(),
      selectedSpanId: this.selectedSpanId,
      onSpanClick: (spanId) => {
        this.selectedSpanId = spanId;
        this.render();
      },
    });
    pane.addEventListener("mouseup", () => void this.handleSelection(pane));
    return pane;
  }

  async handleSelection(pane: HTMLElement): Promise<void> {
    const range = selectionScalarRange(
      pane,
      this.selectionProvider(),
      this.doc!.text,
    );
    if (!range) return;
    if (!this.activeTag) {
      showToast("Pick a tag first, then select text.", "info");
      return;
    }
    await this.createSpan(this.activeTag, range.start, range.end);
  }

  /** One API call per mutation; local state only updates from the response. */
  async createSpan(tag: string, start: number, end: number): Promise<void> {
    const payload = [
      ...this.spans,
      { tag, start, end, attributes: {} as Record<string, string> },
    ];
    await this.pushSpans(payload);
  }

  async updateSpanAttributes(
    spanId: string,
    attributes: Record<string, string>,
  ): Promise<void> {
    const payload = this.spans.map((span) =>
      span.id === spanId ? { ...span, attributes } : span,
    );
    await this.pushSpans(payload);
  }

  async deleteSpan(spanId: string): Promise<void> {
    this.selectedSpanId = null;
    await this.pushSpans(this.spans.filter((span) => span.id !== spanId));
  }

  private async pushSpans(payload: Omit<SpanInfo, "id">[] | SpanInfo[]) {
    try {
      const response = await this.client.putAnnotations(this.docId, payload);
      this.spans = response.spans;
      this.status = "IN_PROGRESS";
      this.errors = []; // stale report: spans changed
      this.render();
    } catch (error) {
      if (error instanceof ApiError) {
        const anchor = this.anchorFor(error.details["conflicting_span"]);
        showToast(`${error.code}: ${error.message}`, "error", anchor);
        return; // view unchanged
      }
      throw error;
    }
  }

  private anchorFor(spanId: unknown): HTMLElement | undefined {
    if (typeof spanId !== "string") return undefined;
    const el = this.root.querySelector(`[data-span-id="${spanId}"]`);
    return el instanceof HTMLElement ? el : undefined;
  }

  async validate(): Promise<void> {
    const report = await this.client.validate(this.docId);
    this.errors = report.errors;
    if (report.status) this.status = report.status;
    this.render();
    if (report.passed) showToast("Validation passed.", "info");
  }

  async setStatus(status: string): Promise<void> {
    try {
      const response = await this.client.putStatus(this.docId, status);
      this.status = response.status;
      this.render();
    } catch (error) {
      if (error instanceof ApiError) {
        showToast(`${error.code}: ${error.message}`, "error");
        return;
      }
      throw error;
    }
  }

  excerpt(start: number, end: number): string {
    return scalarSlice(this.doc?.text ?? "", start, end);
  }
}
