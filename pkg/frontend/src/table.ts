import type { Cell } from "./types.js";

// Record table for the active highlight; one row per matching record so the
// reader can check the predicate against concrete values.
export function renderTable(
  container: HTMLElement,
  title: string,
  fieldNames: string[],
  rows: Record<string, Cell>[],
  totalCount: number,
): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  const table = doc.createElement("table");
  table.className = "record-table";

  const caption = doc.createElement("caption");
  caption.textContent = `${totalCount} records matching ${title}`;
  table.appendChild(caption);

  const thead = doc.createElement("thead");
  const headRow = doc.createElement("tr");
  for (const name of fieldNames) {
    const th = doc.createElement("th");
    th.scope = "col";
    th.textContent = name;
    headRow.appendChild(th);
  }
  thead.appendChild(headRow);
  table.appendChild(thead);

  const tbody = doc.createElement("tbody");
  for (const row of rows) {
    const tr = doc.createElement("tr");
    for (const name of fieldNames) {
      const td = doc.createElement("td");
      const value = row[name];
      td.textContent = value === null || value === undefined ? "" : String(value);
      tr.appendChild(td);
    }
    tbody.appendChild(tr);
  }
  table.appendChild(tbody);
  container.appendChild(table);
}

export function clearTable(container: HTMLElement, message: string): void {
  container.textContent = "";
  const p = container.ownerDocument.createElement("p");
  p.className = "table-placeholder";
  p.textContent = message;
  container.appendChild(p);
}
