import { describe, expect, it } from "vitest";

import { Client, decodeLines, encodeLines, type Op } from "../src/protocol";

describe("ndjson framing", () => {
  it("encodes one line per op with a trailing newline", () => {
    const ops: Op[] = [{ op: "list" }, { op: "request", session: 1, cell: "out" }];
    const body = encodeLines(ops);
    expect(body.endsWith("\n")).toBe(true);
    expect(body.trimEnd().split("\n")).toHaveLength(2);
  });

  it("decodes replies line by line, skipping blanks", () => {
    const replies = decodeLines('{"ok":true}\n\n{"ok":false,"error":"parse"}\n');
    expect(replies).toEqual([{ ok: true }, { ok: false, error: "parse" }]);
  });

  it("round-trips ops through its own framing", () => {
    const ops: Op[] = [{ op: "alg", name: "A", arg: "{a=err}" }];
    expect(decodeLines(encodeLines(ops))).toEqual(ops);
  });

  it("client matches replies to ops one to one", async () => {
    const post = async (_url: string, body: string) =>
      body
        .trimEnd()
        .split("\n")
        .map(() => JSON.stringify({ ok: true }))
        .join("\n") + "\n";
    const client = new Client("localhost:0", post);
    const replies = await client.send({ op: "list" }, { op: "list" });
    expect(replies).toHaveLength(2);
  });

  it("client rejects mismatched reply counts", async () => {
    const post = async () => '{"ok":true}\n';
    const client = new Client("localhost:0", post);
    await expect(client.send({ op: "list" }, { op: "list" })).rejects.toThrow(/replies/);
  });

  it("a dead server rejects the call instead of inventing a reply", async () => {
    const post = async () => {
      throw new Error("ECONNREFUSED");
    };
    const client = new Client("localhost:1", post);
    await expect(client.one({ op: "list" })).rejects.toThrow(/ECONNREFUSED/);
  });
});
