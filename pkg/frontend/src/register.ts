import { ApiClient } from "./api.js";

/** Registration form for new patients. */
export class RegisterForm {
  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly onRegistered: () => void,
  ) {
    this.render();
  }

  render(): void {
    this.root.replaceChildren();
    const form = document.createElement("form");
    form.className = "register";
    const refInput = document.createElement("input");
    refInput.name = "external_ref";
    refInput.placeholder = "external reference";
    refInput.required = true;
    const nameInput = document.createElement("input");
    nameInput.name = "name";
    nameInput.placeholder = "patient name";
    nameInput.required = true;
    const submit = document.createElement("button");
    submit.type = "submit";
    submit.textContent = "Register";
    const status = document.createElement("p");
    status.className = "status";

    form.append(refInput, nameInput, submit, status);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      submit.disabled = true;
      this.api
        .registerPatient(refInput.value.trim(), nameInput.value.trim())
        .then((result) => {
          status.textContent = `Registered as ${result.patient_id}; intake chat opened.`;
          status.classList.remove("error");
          form.reset();
          this.onRegistered();
        })
        .catch((err: Error) => {
          status.textContent = err.message;
          status.classList.add("error");
        })
        .finally(() => {
          submit.disabled = false;
        });
    });
    this.root.appendChild(form);
  }
}
