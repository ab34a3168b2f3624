// DOM wiring for the dialogue explorer: two boxes, the internal table,
// the move log, and step controls.  Every control sends exactly one
// protocol message; the view is rebuilt from the reply.

import { Client, type Reply } from "./protocol.js";
import {
  applyDialogue,
  applyNames,
  applyReset,
  applySessionOpened,
  initialViewModel,
  moveLogText,
  type ViewModel,
} from "./viewmodel.js";

let client: Client | null = null;
let vm: ViewModel = initialViewModel();
let busy = false;

const $ = (id: string): HTMLElement => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el;
};

const render = (): void => {
  $("names").textContent = "";
  for (const entry of vm.names.filter((n) => n.kind === "alg")) {
    const li = document.createElement("li");
    li.textContent = entry.name;
    li.onclick = () => {
      (document.getElementById("alg-name") as HTMLInputElement).value = entry.name;
    };
    $("names").appendChild(li);
  }

  $("session-label").textContent =
    vm.session === null ? "no session" : `session ${vm.session}: ${vm.alg}`;

  const requests = $("requests");
  requests.textContent = "";
  for (const cell of vm.cells) {
    const btn = document.createElement("button");
    btn.textContent = `request ${cell}`;
    btn.disabled = busy || vm.session === null;
    btn.onclick = () => dialogue({ op: "request", session: vm.session!, cell });
    requests.appendChild(btn);
  }

  const tableList = $("table-y");
  tableList.textContent = "";
  for (const ev of vm.table) {
    const li = document.createElement("li");
    li.textContent = ev;
    tableList.appendChild(li);
  }

  $("move-log").textContent = moveLogText(vm);

  const answers = $("answers");
  answers.textContent = "";
  if (vm.pending) {
    const label = document.createElement("span");
    label.textContent = `argument must answer valof ${vm.pending.valof}: `;
    answers.appendChild(label);
    for (const value of vm.pending.values) {
      const btn = document.createElement("button");
      btn.textContent = value;
      btn.disabled = busy;
      btn.onclick = () => dialogue({ op: "answer", session: vm.session!, value });
      answers.appendChild(btn);
    }
  }

  $("banner").textContent = vm.banner ?? "";
  $("error").textContent = vm.error ?? "";
  $("function-box").classList.toggle("active", vm.activeBox === "function");
  $("argument-box").classList.toggle("active", vm.activeBox === "argument");
};

const guarded = async (fn: () => Promise<void>): Promise<void> => {
  if (busy || !client) return;
  busy = true;
  render();
  try {
    await fn();
  } catch (e) {
    vm = { ...vm, error: String(e) };
  }
  busy = false;
  render();
};

const dialogue = (op: Parameters<Client["one"]>[0]): void => {
  void guarded(async () => {
    const reply = await client!.one(op);
    vm = op.op === "reset" ? applyReset(vm, reply) : applyDialogue(vm, reply);
  });
};

const connect = (): void => {
  void guarded(async () => {
    const addr = (document.getElementById("addr") as HTMLInputElement).value;
    client = new Client(addr);
    vm = initialViewModel();
    vm = applyNames(vm, await client.one({ op: "list" }));
  });
};

const openSession = (): void => {
  void guarded(async () => {
    const name = (document.getElementById("alg-name") as HTMLInputElement).value;
    const manual = (document.getElementById("manual") as HTMLInputElement).checked;
    const literal = (document.getElementById("arg-literal") as HTMLInputElement).value || "{}";
    const reply = await client!.one({ op: "alg", name, arg: manual ? "manual" : literal });
    vm = applySessionOpened(vm, reply);
  });
};

const autoRun = (): void => {
  void guarded(async () => {
    for (const cell of vm.cells) {
      const reply: Reply = await client!.one({ op: "request", session: vm.session!, cell });
      vm = applyDialogue(vm, reply);
      if (vm.pending || vm.error) break;
    }
  });
};

window.addEventListener("DOMContentLoaded", () => {
  $("connect").onclick = connect;
  $("open").onclick = openSession;
  $("auto-run").onclick = autoRun;
  $("reset").onclick = () => {
    if (vm.session !== null) dialogue({ op: "reset", session: vm.session });
  };
  render();
});
