// The explorer's state, rebuilt from server replies only.  Nothing here
// evaluates anything: the move log is the server's trace verbatim, the
// table is the server's table verbatim, and the banner restates the
// server's outcome.  With the server gone the view cannot change.

import type { NameEntry, Pending, Reply } from "./protocol";

export type ActiveBox = "function" | "argument" | null;

export interface ViewModel {
  names: NameEntry[];
  session: number | null;
  alg: string | null;
  cells: string[];
  table: string[];
  moveLog: string[];
  pending: Pending | null;
  banner: string | null;
  activeBox: ActiveBox;
  error: string | null;
}

export const initialViewModel = (): ViewModel => ({
  names: [],
  session: null,
  alg: null,
  cells: [],
  table: [],
  moveLog: [],
  pending: null,
  banner: null,
  activeBox: null,
  error: null,
});

const withError = (vm: ViewModel, reply: Reply): ViewModel => ({
  ...vm,
  error: `${reply.error ?? "error"}: ${reply.detail ?? ""}`.trim(),
});

export const applyNames = (vm: ViewModel, reply: Reply): ViewModel => {
  if (!reply.ok) return withError(vm, reply);
  const seen = new Set(vm.names.map((n) => `${n.kind}:${n.name}`));
  const added = (reply.names ?? []).filter((n) => !seen.has(`${n.kind}:${n.name}`));
  return { ...vm, error: null, names: [...vm.names, ...added] };
};

export const applySessionOpened = (vm: ViewModel, reply: Reply): ViewModel => {
  if (!reply.ok) return withError(vm, reply);
  return {
    ...vm,
    error: null,
    session: reply.session ?? null,
    alg: reply.alg ?? null,
    cells: reply.cells ?? [],
    table: [],
    moveLog: [],
    pending: null,
    banner: null,
    activeBox: null,
  };
};

// The requested cell is whatever the trace's REQ line says; the banner is a
// restatement of the RESULT line.  Both are string work, not evaluation.
const bannerOf = (reply: Reply): string => {
  if (reply.outcome === "value") {
    const req = (reply.trace ?? [])[0] ?? "";
    const cell = req.startsWith("REQ ") ? req.slice(4) : "?";
    return `${cell} = ${reply.value}`;
  }
  return reply.outcome ?? "?";
};

export const applyDialogue = (vm: ViewModel, reply: Reply): ViewModel => {
  if (!reply.ok) return withError(vm, reply);
  return {
    ...vm,
    error: null,
    table: reply.table ?? vm.table,
    moveLog: reply.trace ?? [],
    pending: reply.pending ?? null,
    banner: reply.pending ? null : bannerOf(reply),
    activeBox: reply.pending ? "argument" : "function",
  };
};

export const applyReset = (vm: ViewModel, reply: Reply): ViewModel => {
  if (!reply.ok) return withError(vm, reply);
  return { ...vm, error: null, table: [], moveLog: [], pending: null, banner: null, activeBox: null };
};

// Exact engine trace text: lines joined, trailing newline included.
export const moveLogText = (vm: ViewModel): string =>
  vm.moveLog.length ? vm.moveLog.join("\n") + "\n" : "";
