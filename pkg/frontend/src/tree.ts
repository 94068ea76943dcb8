/** Collapsible view of a workflow hierarchy. The tree is a pure function
 * of the service document plus a set of collapsed paths; rendering maps
 * visible rows to DOM elsewhere. */

import type { WorkflowNodeDoc } from "./api.js";

export interface TreeRow {
  /** slash-joined name path from the root; stable across reloads */
  path: string;
  depth: number;
  name: string;
  level: string;
  pre: string;
  post: string;
  concurrent: boolean;
  handlerRef: string | null;
  hasChildren: boolean;
  collapsed: boolean;
}

export function nodePaths(root: WorkflowNodeDoc, prefix = ""): string[] {
  const path = prefix ? `${prefix}/${root.name}` : root.name;
  return [path, ...(root.children ?? []).flatMap((c) => nodePaths(c, path))];
}

export function countNodes(root: WorkflowNodeDoc): number {
  return 1 + (root.children ?? []).reduce((acc, c) => acc + countNodes(c), 0);
}

export class CollapseState {
  private collapsed = new Set<string>();

  isCollapsed(path: string): boolean {
    return this.collapsed.has(path);
  }

  toggle(path: string): void {
    if (this.collapsed.has(path)) this.collapsed.delete(path);
    else this.collapsed.add(path);
  }

  collapseAll(root: WorkflowNodeDoc): void {
    this.collapsed = new Set(nodePaths(root));
  }

  expandAll(): void {
    this.collapsed.clear();
  }
}

/** Rows in document order, skipping the descendants of collapsed nodes. */
export function visibleRows(root: WorkflowNodeDoc, state: CollapseState): TreeRow[] {
  const rows: TreeRow[] = [];
  const walk = (node: WorkflowNodeDoc, prefix: string, depth: number) => {
    const path = prefix ? `${prefix}/${node.name}` : node.name;
    const children = node.children ?? [];
    const collapsed = state.isCollapsed(path);
    rows.push({
      path,
      depth,
      name: node.name,
      level: node.level,
      pre: node.pre ?? "true",
      post: node.post ?? "true",
      concurrent: node.concurrent ?? false,
      handlerRef: node.handler_ref ?? null,
      hasChildren: children.length > 0,
      collapsed,
    });
    if (!collapsed) {
      for (const child of children) walk(child, path, depth + 1);
    }
  };
  walk(root, "", 0);
  return rows;
}

/** Counts per level, e.g. to show "2 Composite Tasks" style badges. */
export function levelCounts(root: WorkflowNodeDoc): Record<string, number> {
  const counts: Record<string, number> = {};
  const walk = (node: WorkflowNodeDoc) => {
    counts[node.level] = (counts[node.level] ?? 0) + 1;
    (node.children ?? []).forEach(walk);
  };
  walk(root);
  return counts;
}
