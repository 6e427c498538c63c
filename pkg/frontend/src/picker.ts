/**
 * Cascading taxonomy picker model: depth-by-depth selection over the
 * schema fetched from the server, independent of any DOM.
 */

import type { TaxonomyNode, TaxonomySchema } from "./api.js";

export type Layer = "lightweight" | "diagnostic";

export class TaxonomyPicker {
  private selected: (TaxonomyNode | null)[] = [null, null, null];

  constructor(
    public schema: TaxonomySchema,
    public layer: Layer,
  ) {}

  /** Options at a depth (1-based) given the shallower selections. */
  options(depth: 1 | 2 | 3): TaxonomyNode[] {
    if (depth === 1) return this.schema.nodes;
    const parent = this.selected[depth - 2];
    if (!parent) return [];
    if (this.layer === "lightweight" && depth === 3) return [];
    return parent.children;
  }

  select(depth: 1 | 2 | 3, nodeId: string | null): void {
    if (nodeId === null) {
      this.selected[depth - 1] = null;
    } else {
      const node = this.options(depth).find((n) => n.id === nodeId);
      if (!node) throw new Error(`no node ${nodeId} at depth ${depth}`);
      this.selected[depth - 1] = node;
    }
    for (let d = depth; d < 3; d++) this.selected[d] = null;
  }

  /** Keyboard shortcut: digits 1..N pick the Nth category. */
  selectCategoryByIndex(index: number): boolean {
    const node = this.schema.nodes[index];
    if (!node) return false;
    this.select(1, node.id);
    return true;
  }

  get category(): TaxonomyNode | null {
    return this.selected[0] ?? null;
  }

  get errorType(): TaxonomyNode | null {
    return this.selected[1] ?? null;
  }

  get subcategory(): TaxonomyNode | null {
    return this.selected[2] ?? null;
  }

  deepest(): TaxonomyNode | null {
    return this.subcategory ?? this.errorType ?? this.category;
  }

  path(): { category?: string; error_type?: string; subcategory?: string } {
    const out: { category?: string; error_type?: string; subcategory?: string } = {};
    if (this.category) out.category = this.category.id;
    if (this.errorType) out.error_type = this.errorType.id;
    if (this.subcategory) out.subcategory = this.subcategory.id;
    return out;
  }

  /**
   * Whether the current selection is complete for the project layer:
   * diagnostic requires reaching a leaf, lightweight requires an error
   * type (or a childless category).
   */
  isComplete(): boolean {
    const deepest = this.deepest();
    if (!deepest) return false;
    if (this.layer === "diagnostic") {
      return deepest.children.length === 0;
    }
    return deepest.depth >= 2 || deepest.children.length === 0;
  }

  reset(): void {
    this.selected = [null, null, null];
  }
}
