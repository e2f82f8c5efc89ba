/** Non-blocking notifications, optionally anchored near an element. */

export function showToast(
  message: string,
  kind: "info" | "error" = "info",
  anchor?: HTMLElement,
): HTMLElement {
  const toast = document.createElement("div");
  toast.className = `toast toast-${kind}`;
  toast.textContent = message;
  if (anchor) {
    anchor.insertAdjacentElement("afterend", toast);
  } else {
    document.body.appendChild(toast);
  }
  setTimeout(() => toast.remove(), 4000);
  return toast;
}
