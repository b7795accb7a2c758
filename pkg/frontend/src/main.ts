/** Entry point: pick or create a project, then mount the authoring shell. */

import { ApiError, StoryloomApi } from "./api.js";
import { AppShell } from "./app.js";

async function boot(): Promise<void> {
  const api = new StoryloomApi();
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");

  const params = new URLSearchParams(window.location.search);
  const projectId = params.get("project");
  if (projectId) {
    const shell = new AppShell(root, { api, projectId });
    await shell.start();
    return;
  }

  const [vocab, listing] = await Promise.all([api.getVocab(), api.listProjects()]);
  root.classList.add("project-picker");
  const heading = document.createElement("h2");
  heading.textContent = "storyloom";
  root.appendChild(heading);

  if (listing.projects.length > 0) {
    const list = document.createElement("ul");
    for (const project of listing.projects) {
      const item = document.createElement("li");
      const link = document.createElement("a");
      link.href = `?project=${project.id}`;
      link.textContent = project.title;
      item.appendChild(link);
      list.appendChild(item);
    }
    root.appendChild(list);
  }

  const form = document.createElement("form");
  const title = document.createElement("input");
  title.placeholder = "Story title";
  const genre = document.createElement("select");
  for (const g of vocab.genres) {
    const option = document.createElement("option");
    option.value = g;
    option.textContent = g;
    genre.appendChild(option);
  }
  const structure = document.createElement("select");
  for (const s of vocab.structures) {
    const option = document.createElement("option");
    option.value = s.value;
    option.textContent = s.display_name;
    structure.appendChild(option);
  }
  const submit = document.createElement("button");
  submit.textContent = "Create project";
  form.append(title, genre, structure, submit);
  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    try {
      const doc = await api.createProject(
        title.value || "Untitled",
        genre.value,
        structure.value as "free" | "three_act" | "five_act",
      );
      window.location.search = `?project=${doc.id}`;
    } catch (error) {
      alert(error instanceof ApiError ? error.message : String(error));
    }
  });
  root.appendChild(form);
}

void boot();
