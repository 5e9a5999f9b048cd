// Attribute panel: one labelled <select> per vocabulary field, built from the
// /api/v1/attributes payload so the viewer never hardcodes label sets.

import type { AttributesPayload } from "./api";

export interface PanelHandle {
  root: HTMLElement;
  selects: Map<string, HTMLSelectElement>;
  read(): Record<string, string>;
}

export function buildAttributePanel(
  doc: Document,
  payload: AttributesPayload,
  onChange?: (field: string, value: string) => void,
): PanelHandle {
  const root = doc.createElement("div");
  root.className = "attribute-panel";
  const selects = new Map<string, HTMLSelectElement>();

  for (const field of payload.fields) {
    const row = doc.createElement("label");
    row.className = "attribute-row";

    const caption = doc.createElement("span");
    caption.textContent = field.name.replace(/_/g, " ");
    row.appendChild(caption);

    const select = doc.createElement("select");
    select.name = field.name;
    for (const value of field.values) {
      const option = doc.createElement("option");
      option.value = value.name;
      option.textContent = value.display_name;
      select.appendChild(option);
    }
    select.addEventListener("change", () => onChange?.(field.name, select.value));
    row.appendChild(select);

    root.appendChild(row);
    selects.set(field.name, select);
  }

  return {
    root,
    selects,
    read() {
      const out: Record<string, string> = {};
      for (const [name, select] of selects) out[name] = select.value;
      return out;
    },
  };
}
