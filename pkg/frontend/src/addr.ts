/** A1-style address helpers. */

export interface Addr {
  col: number; // 1-based
  row: number; // 1-based
}

export function colToLetters(col: number): string {
  let out = "";
  while (col > 0) {
    const rem = (col - 1) % 26;
    out = String.fromCharCode(65 + rem) + out;
    col = Math.floor((col - 1) / 26);
  }
  return out;
}

export function lettersToCol(letters: string): number {
  let col = 0;
  for (const ch of letters.toUpperCase()) {
    col = col * 26 + (ch.charCodeAt(0) - 64);
  }
  return col;
}

export function addrText(addr: Addr): string {
  return `${colToLetters(addr.col)}${addr.row}`;
}

const ADDR_RE = /^([A-Za-z]{1,3})([0-9]+)$/;

export function parseAddr(text: string): Addr {
  const m = ADDR_RE.exec(text.trim());
  if (!m) throw new Error(`not a cell address: ${text}`);
  return { col: lettersToCol(m[1]), row: parseInt(m[2], 10) };
}

/** Rectangular selection between two corners (inclusive). */
export interface Selection {
  anchor: Addr;
  extent: Addr;
}

export function singleCell(addr: Addr): Selection {
  return { anchor: addr, extent: addr };
}

export function selectionBounds(sel: Selection) {
  return {
    left: Math.min(sel.anchor.col, sel.extent.col),
    right: Math.max(sel.anchor.col, sel.extent.col),
    top: Math.min(sel.anchor.row, sel.extent.row),
    bottom: Math.max(sel.anchor.row, sel.extent.row),
  };
}

/** Cells of the selection in row-major order. */
export function selectionCells(sel: Selection): Addr[] {
  const { left, right, top, bottom } = selectionBounds(sel);
  const out: Addr[] = [];
  for (let row = top; row <= bottom; row++) {
    for (let col = left; col <= right; col++) {
      out.push({ col, row });
    }
  }
  return out;
}

export function inSelection(sel: Selection, addr: Addr): boolean {
  const { left, right, top, bottom } = selectionBounds(sel);
  return addr.col >= left && addr.col <= right && addr.row >= top && addr.row <= bottom;
}

export function rangeText(sel: Selection): string {
  const { left, right, top, bottom } = selectionBounds(sel);
  const from = addrText({ col: left, row: top });
  const to = addrText({ col: right, row: bottom });
  return from === to ? from : `${from}:${to}`;
}
