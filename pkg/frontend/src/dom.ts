/** Tiny DOM construction helper. */

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: { className?: string; text?: string; title?: string; type?: string } = {},
  children: (HTMLElement | Text)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (attrs.className) node.className = attrs.className;
  if (attrs.text !== undefined) node.textContent = attrs.text;
  if (attrs.title) node.title = attrs.title;
  if (attrs.type && "type" in node) (node as HTMLInputElement | HTMLButtonElement).type = attrs.type;
  for (const child of children) node.appendChild(child);
  return node;
}

export function list(items: string[], className: string): HTMLUListElement {
  const ul = el("ul", { className });
  for (const item of items) ul.appendChild(el("li", { text: item }));
  return ul;
}
