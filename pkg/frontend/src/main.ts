import { ConsoleApp } from "./app.js";

const baseUrl =
  new URLSearchParams(window.location.search).get("gateway") ?? "http://127.0.0.1:8000";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");

const app = new ConsoleApp(root, baseUrl);
void app.start();
