/**
 * Color consistency: tag colors are a pure function of the server-assigned
 * color_index, so two sessions rendering the same document agree exactly.
 */

import { beforeEach, describe, expect, it } from "vitest";

import { AnnotationScreen } from "../src/annotate";
import { ApiClient } from "../src/api";
import { colorFor, PALETTE } from "../src/palette";
import { DOC_ID, FakeServer } from "./fakeApi";

describe("palette", () => {
  it("has 16 distinct colors and wraps by modulo", () => {
    expect(new Set(PALETTE).size).toBe(16);
    expect(colorFor(0)).toBe(PALETTE[0]);
    expect(colorFor(16)).toBe(PALETTE[0]);
    expect(colorFor(19)).toBe(PALETTE[3]);
  });
});

describe("two sessions on the same document", () => {
  let server: FakeServer;

  beforeEach(() => {
    document.body.innerHTML = '<div id="one"></div><div id="two"></div>';
    server = new FakeServer();
  });

  async function renderAs(username: string, containerId: string) {
    const client = new ApiClient("", server.fetch);
    await client.login(username, "pw");
    const root = document.getElementById(containerId)!;
    const screen = new AnnotationScreen(root, client, DOC_ID, () => null);
    await screen.load();
    await client.putAnnotations(DOC_ID, [
      { id: "s1", tag: "claim", start: 0, end: 8, attributes: { id: "1" } },
      { id: "s2", tag: "note", start: 10, end: 14, attributes: {} },
    ]);
    await screen.load();
    return root;
  }

  it("renders identical tag colors in both sessions", async () => {
    const one = await renderAs("ann1", "one");
    const two = await renderAs("ann2", "two");

    for (const tag of ["claim", "note"]) {
      const a = one.querySelector<HTMLElement>(`.hl[data-tag="${tag}"]`)!;
      const b = two.querySelector<HTMLElement>(`.hl[data-tag="${tag}"]`)!;
      expect(a.style.backgroundColor).toBe(b.style.backgroundColor);
    }

    const buttonColors = (root: HTMLElement) =>
      [...root.querySelectorAll<HTMLElement>(".tag-button")].map(
        (el) => [el.dataset.tag, el.style.borderColor],
      );
    expect(buttonColors(one)).toEqual(buttonColors(two));
  });
});
