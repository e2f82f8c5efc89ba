/**
 * Scripted end-to-end UI workflow against the API double: tag selection,
 * span creation with visible tag name, attribute editing, validation error
 * anchored at the offending span, automatic graph nodes, edge drawing with
 * ancestor refresh, and visual cycle rejection.
 */

import { readFileSync } from "node:fs";
import { beforeEach, describe, expect, it } from "vitest";

import { AnnotationScreen } from "../src/annotate";
import { ApiClient } from "../src/api";
import { GraphEditor } from "../src/graphview";
import { colorFor } from "../src/palette";
import { utf16FromScalar } from "../src/unicode";
import { DOC_ID, DOC_TEXT, FakeServer } from "./fakeApi";

function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

function fakeSelection(
  pane: HTMLElement,
  text: string,
  startScalar: number,
  endScalar: number,
): Selection {
  const startU16 = utf16FromScalar(text, startScalar);
  const endU16 = utf16FromScalar(text, endScalar);
  const locate = (u16: number): { node: Node; offset: number } => {
    const walker = document.createTreeWalker(pane, NodeFilter.SHOW_TEXT);
    let total = 0;
    let node: Node | null;
    while ((node = walker.nextNode())) {
      const length = (node as Text).data.length;
      if (u16 <= total + length) return { node, offset: u16 - total };
      total += length;
    }
    throw new Error(`offset ${u16} beyond text`);
  };
  const start = locate(startU16);
  const end = locate(endU16);
  return {
    rangeCount: 1,
    getRangeAt: () => ({
      collapsed: startU16 === endU16,
      startContainer: start.node,
      startOffset: start.offset,
      endContainer: end.node,
      endOffset: end.offset,
    }),
  } as unknown as Selection;
}

describe("annotation workflow", () => {
  let server: FakeServer;
  let client: ApiClient;
  let root: HTMLElement;
  let screen: AnnotationScreen;
  let selection: Selection | null;

  beforeEach(async () => {
    document.body.innerHTML = '<div id="app"></div>';
    root = document.getElementById("app")!;
    server = new FakeServer();
    client = new ApiClient("", server.fetch);
    await client.login("ann1", "pw");
    selection = null;
    screen = new AnnotationScreen(root, client, DOC_ID, () => selection);
    await screen.load();
  });

  const pane = () => root.querySelector<HTMLElement>(".text-pane")!;
  const mouseup = async () => {
    pane().dispatchEvent(new MouseEvent("mouseup", { bubbles: true }));
    await flush();
    await flush();
  };

  it("selecting text with no active tag creates nothing and shows a hint", async () => {
    selection = fakeSelection(pane(), DOC_TEXT, 0, 8);
    await mouseup();
    expect(root.querySelectorAll(".hl").length).toBe(0);
    expect(document.querySelector(".toast")).not.toBeNull();
  });

  it("tag click + selection creates a highlighted span with the tag name visible", async () => {
    root.querySelector<HTMLElement>('[data-tag="claim"]')!.click();
    selection = fakeSelection(pane(), DOC_TEXT, 0, 8);
    await mouseup();

    const highlight = root.querySelector<HTMLElement>(".hl");
    expect(highlight).not.toBeNull();
    expect(highlight!.textContent).toBe("The plan");
    // the tag name rides on every region via data-tag + the ::before rule
    expect(highlight!.dataset.tag).toBe("claim");
    const css = readFileSync("styles.css", "utf-8"); // vitest cwd = frontend/
    expect(css).toMatch(/\.hl::before\s*{[^}]*content:\s*attr\(data-tag\)/);
    // color comes from the server-assigned index
    expect(highlight!.style.backgroundColor).toBe(colorFor(0));
    // nothing invented client-side: the API now owns one span
    expect(server.work.get("u_ann1")!.spans).toHaveLength(1);
  });

  it("validation errors are anchored to the offending span and clear after a fix", async () => {
    // a claim span without its required id attribute
    root.querySelector<HTMLElement>('[data-tag="claim"]')!.click();
    selection = fakeSelection(pane(), DOC_TEXT, 0, 8);
    await mouseup();

    root.querySelector<HTMLElement>(".validate-button")!.click();
    await flush();
    const marked = root.querySelector<HTMLElement>(".hl-error");
    expect(marked).not.toBeNull();
    const spanId = marked!.dataset.spanId!;
    const entry = root.querySelector<HTMLElement>(".error-entry")!;
    expect(entry.dataset.location).toBe(spanId);
    expect(entry.textContent).toContain("MissingRequiredAttribute");

    // fill the attribute through the panel and revalidate
    marked!.click();
    await flush();
    const input = root.querySelector<HTMLInputElement>('[data-attr-name="id"]')!;
    input.value = "c1";
    root.querySelector<HTMLElement>(".attr-save")!.click();
    await flush();
    expect(server.work.get("u_ann1")!.spans[0].attributes).toEqual({ id: "c1" });

    root.querySelector<HTMLElement>(".validate-button")!.click();
    await flush();
    expect(root.querySelector(".hl-error")).toBeNull();
  });

  it("a rejected span save leaves the view unchanged", async () => {
    root.querySelector<HTMLElement>('[data-tag="claim"]')!.click();
    selection = fakeSelection(pane(), DOC_TEXT, 4, 12);
    await mouseup();
    expect(root.querySelectorAll(".hl")).toHaveLength(1);

    // partial overlap: crosses the existing span's end
    selection = fakeSelection(pane(), DOC_TEXT, 8, 20);
    await mouseup();
    expect(root.querySelectorAll(".hl")).toHaveLength(1);
    expect(server.work.get("u_ann1")!.spans).toHaveLength(1);
    expect(document.querySelector(".toast-error")).not.toBeNull();
  });

  it("a full reload reproduces the identical view", async () => {
    root.querySelector<HTMLElement>('[data-tag="claim"]')!.click();
    selection = fakeSelection(pane(), DOC_TEXT, 0, 8);
    await mouseup();
    root.querySelector<HTMLElement>(".hl")!.click();
    await flush();
    const input = root.querySelector<HTMLInputElement>('[data-attr-name="id"]')!;
    input.value = "c1";
    root.querySelector<HTMLElement>(".attr-save")!.click();
    await flush();

    // drop the transient selection highlight; it is view state, not data
    screen.selectedSpanId = null;
    screen.render();

    const fresh = document.createElement("div");
    document.body.appendChild(fresh);
    const again = new AnnotationScreen(fresh, client, DOC_ID, () => null);
    await again.load();
    // same spans, same highlights, same text: the view is purely API state
    expect(fresh.querySelector(".text-pane")!.innerHTML).toBe(
      pane().innerHTML,
    );
  });

  it("completed work moves through validate to VALIDATED", async () => {
    root.querySelector<HTMLElement>('[data-tag="claim"]')!.click();
    selection = fakeSelection(pane(), DOC_TEXT, 0, 8);
    await mouseup();
    root.querySelector<HTMLElement>(".hl")!.click();
    await flush();
    const input = root.querySelector<HTMLInputElement>('[data-attr-name="id"]')!;
    input.value = "c1";
    root.querySelector<HTMLElement>(".attr-save")!.click();
    await flush();

    root.querySelector<HTMLElement>(".complete-button")!.click();
    await flush();
    expect(root.querySelector(".status-line")!.textContent).toContain("COMPLETED");

    root.querySelector<HTMLElement>(".validate-button")!.click();
    await flush();
    expect(root.querySelector(".status-line")!.textContent).toContain("VALIDATED");
  });
});

describe("graph editor workflow", () => {
  let server: FakeServer;
  let client: ApiClient;
  let root: HTMLElement;
  let editor: GraphEditor;

  beforeEach(async () => {
    document.body.innerHTML = '<div id="app"></div>';
    root = document.getElementById("app")!;
    server = new FakeServer();
    client = new ApiClient("", server.fetch);
    await client.login("ann1", "pw");
    // two GRAPH-tagged spans, one plain note
    await client.putAnnotations(DOC_ID, [
      { id: "n1", tag: "claim", start: 0, end: 8, attributes: { id: "a" } },
      { id: "n2", tag: "premise", start: 19, end: 26, attributes: {} },
      { id: "x1", tag: "note", start: 30, end: 34, attributes: {} },
    ]);
    editor = new GraphEditor(root, client, DOC_ID);
    await editor.load();
  });

  const node = (id: string) =>
    root.querySelector<SVGGElement>(`[data-node-id="${id}"]`)!;
  const drag = async (from: string, to: string) => {
    node(from).dispatchEvent(new MouseEvent("mousedown", { bubbles: true }));
    node(to).dispatchEvent(new MouseEvent("mouseup", { bubbles: true }));
    await flush();
    await flush();
  };

  it("graph-tagged spans appear as nodes without further action", () => {
    const ids = [...root.querySelectorAll("[data-node-id]")].map((el) =>
      el.getAttribute("data-node-id"),
    );
    expect(ids).toEqual(["n1", "n2"]); // the note span is not a node
  });

  it("drawing an edge updates the displayed ancestors", async () => {
    await drag("n1", "n2");
    expect(server.work.get("u_ann1")!.edges).toEqual([{ src: "n1", dst: "n2" }]);
    // n2 is now selected; its ancestor list shows n1
    expect(root.querySelector(".ancestor-list")!.textContent).toContain("n1");

    node("n1").dispatchEvent(new MouseEvent("mousedown", { bubbles: true }));
    node("n1").dispatchEvent(new MouseEvent("mouseup", { bubbles: true }));
    await flush();
    expect(root.querySelector(".descendant-list")!.textContent).toContain("n2");
  });

  it("a cycle draw flashes red and never enters committed state", async () => {
    await drag("n1", "n2");
    await drag("n2", "n1"); // would close n1 -> n2 -> n1

    expect(root.querySelector(".edge-rejected")).not.toBeNull();
    expect(document.querySelector(".toast-error")!.textContent).toContain(
      "CycleDetected",
    );
    expect(server.work.get("u_ann1")!.edges).toEqual([{ src: "n1", dst: "n2" }]);
    const committed = [...root.querySelectorAll(".edge:not(.edge-rejected)")];
    expect(committed).toHaveLength(1);

    // reloading from the API shows the same single edge: nothing was faked
    await editor.load();
    expect(editor.graph.edges).toEqual([{ src: "n1", dst: "n2" }]);
  });
});
