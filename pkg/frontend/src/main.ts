import { ConsoleApp } from "./app.js";

const root = document.getElementById("app");
if (root === null) {
  throw new Error("console root element #app missing");
}
void new ConsoleApp(root).start();
