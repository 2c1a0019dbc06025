/** Minimal render model: pure view functions build VNode trees that tests
 * inspect directly and the browser serializes to SVG/HTML. */

export type Attrs = Record<string, string | number | boolean>;

export interface VNode {
  tag: string;
  attrs: Attrs;
  children: (VNode | string)[];
}

export function h(tag: string, attrs: Attrs = {}, ...children: (VNode | string | null)[]): VNode {
  return { tag, attrs, children: children.filter((c): c is VNode | string => c !== null) };
}

const ESCAPES: Record<string, string> = {
  "&": "&amp;",
  "<": "&lt;",
  ">": "&gt;",
  '"': "&quot;",
};

function escapeText(text: string): string {
  return text.replace(/[&<>"]/g, (ch) => ESCAPES[ch]);
}

export function renderToString(node: VNode | string): string {
  if (typeof node === "string") return escapeText(node);
  const attrs = Object.entries(node.attrs)
    .filter(([, value]) => value !== false)
    .map(([key, value]) => ` ${key}="${escapeText(String(value === true ? key : value))}"`)
    .join("");
  const children = node.children.map(renderToString).join("");
  return `<${node.tag}${attrs}>${children}</${node.tag}>`;
}

/** Document-order search over a rendered tree (test helper and event lookup). */
export function findAll(node: VNode, predicate: (n: VNode) => boolean): VNode[] {
  const out: VNode[] = [];
  const visit = (current: VNode): void => {
    if (predicate(current)) out.push(current);
    for (const child of current.children) {
      if (typeof child !== "string") visit(child);
    }
  };
  visit(node);
  return out;
}

export function textOf(node: VNode): string {
  return node.children
    .map((c) => (typeof c === "string" ? c : textOf(c)))
    .join("");
}
