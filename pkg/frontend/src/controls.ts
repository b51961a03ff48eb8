import type { FieldInfo } from "./types.js";

export interface ControlActions {
  generateHighlights(): void;
  generateBins(field: string): void;
  toggleBinMode(): void;
}

export interface Controls {
  container: HTMLElement;
  setPending(pending: boolean): void;
  setBinMode(mode: string): void;
}

export function renderControls(
  container: HTMLElement,
  fields: FieldInfo[],
  actions: ControlActions,
): Controls {
  const doc = container.ownerDocument;
  container.textContent = "";

  const highlightsButton = doc.createElement("button");
  highlightsButton.type = "button";
  highlightsButton.id = "generate-highlights";
  highlightsButton.textContent = "Generate highlights";
  highlightsButton.addEventListener("click", () => actions.generateHighlights());
  container.appendChild(highlightsButton);

  const fieldSelect = doc.createElement("select");
  fieldSelect.id = "bins-field";
  fieldSelect.setAttribute("aria-label", "Field to bin");
  for (const field of fields) {
    const option = doc.createElement("option");
    option.value = field.name;
    option.textContent = `${field.name} (${field.measure})`;
    fieldSelect.appendChild(option);
  }
  container.appendChild(fieldSelect);

  const binsButton = doc.createElement("button");
  binsButton.type = "button";
  binsButton.id = "generate-bins";
  binsButton.textContent = "Generate bins for field";
  binsButton.addEventListener("click", () => actions.generateBins(fieldSelect.value));
  container.appendChild(binsButton);

  const toggleButton = doc.createElement("button");
  toggleButton.type = "button";
  toggleButton.id = "toggle-bin-mode";
  toggleButton.setAttribute("aria-pressed", "false");
  toggleButton.textContent = "Bin mode: semantic";
  toggleButton.addEventListener("click", () => actions.toggleBinMode());
  container.appendChild(toggleButton);

  const buttons = [highlightsButton, binsButton, toggleButton];
  return {
    container,
    setPending(pending: boolean): void {
      // one in-flight generation at a time; the guard also stops duplicate submits
      for (const button of buttons) button.disabled = pending;
      container.setAttribute("aria-busy", pending ? "true" : "false");
    },
    setBinMode(mode: string): void {
      toggleButton.textContent = `Bin mode: ${mode === "equalWidth" ? "equal-width" : "semantic"}`;
      toggleButton.setAttribute("aria-pressed", mode === "equalWidth" ? "true" : "false");
    },
  };
}
