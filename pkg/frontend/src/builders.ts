/** Canonical constraint text for the builder dialogs.
 *
 * Output always follows the documented grammar, so everything written
 * through a builder reparses server-side without error.
 */

import { Selection, addrText, selectionCells } from "./addr.js";

export function cellListText(sel: Selection): string {
  return `[${selectionCells(sel).map(addrText).join(",")}]`;
}

export function alldifferentText(sel: Selection): string {
  return `ALLDIFFERENT(${cellListText(sel)})`;
}

export function sumText(sel: Selection, relop: "=" | "!=", value: string): string {
  return `SUM(${cellListText(sel)})${relop}${value.trim()}`;
}

export function memberText(value: string, sel: Selection): string {
  return `MEMBER(${value.trim()},${cellListText(sel)})`;
}

export function countText(
  value: string,
  sel: Selection,
  relop: string,
  bound: string,
): string {
  return `COUNT(${value.trim()},${cellListText(sel)},${relop},${bound.trim()})`;
}

export function sublistText(values: string[], sel: Selection): string {
  const list = values.map((v) => v.trim()).filter(Boolean);
  return `SUBLIST([${list.join(",")}],${cellListText(sel)})`;
}

export function ifThenText(cond: string, then: string): string {
  return `IF(${cond.trim()})THEN(${then.trim()})`;
}

export function domainText(values: string[]): string {
  return `[${values.map((v) => v.trim()).filter(Boolean).join(",")}]`;
}

/** Append a constraint to whatever the cell already holds. */
export function appendConstraint(existing: string, built: string): string {
  return existing ? `${existing};${built}` : built;
}
