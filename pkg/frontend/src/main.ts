import { ApiClient } from "./api.js";
import { QueueController } from "./controller.js";
import { render } from "./view.js";
import { LEVELS, TAGS } from "./types.js";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app container");
}

const controller = new QueueController(new ApiClient(""));
controller.onChange(() => render(root, controller));

// keyboard driving: j/k move, w/m/a/f pick a tag, 1-6 pick a level when
// modifying, Enter submits (and the controller advances to the next pending)
const TAG_KEYS: Record<string, (typeof TAGS)[number]> = {
  w: "Wrong", m: "Modify", a: "Ambiguous", f: "False",
};

document.addEventListener("keydown", (event) => {
  if (event.target instanceof HTMLInputElement) return;
  if (event.key === "j" || event.key === "ArrowDown") {
    controller.selectNext();
  } else if (event.key === "k" || event.key === "ArrowUp") {
    controller.selectPrevious();
  } else if (event.key in TAG_KEYS) {
    controller.chooseTag(TAG_KEYS[event.key]);
  } else if (/^[1-6]$/.test(event.key) && controller.state.form.tag === "Modify") {
    controller.chooseLevel(LEVELS[Number(event.key) - 1]);
  } else if (event.key === "Enter") {
    void controller.submit();
  }
});

void controller.refresh();
