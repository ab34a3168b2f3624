// Client side of the session server's newline-delimited JSON protocol.
// One message per line in, one reply line per message out, same order.

export type Op =
  | { op: "load"; text: string }
  | { op: "list" }
  | { op: "alg"; name: string; arg: string }
  | { op: "request"; session: number; cell: string }
  | { op: "answer"; session: number; value: string }
  | { op: "reset"; session: number }
  | { op: "trace"; session: number };

export interface NameEntry {
  kind: string;
  name: string;
}

export interface Pending {
  valof: string;
  values: string[];
}

export interface Reply {
  ok: boolean;
  error?: string;
  detail?: string;
  names?: NameEntry[];
  session?: number;
  alg?: string;
  from?: string;
  to?: string;
  cells?: string[];
  outcome?: "value" | "err" | "stuck";
  value?: string;
  pending?: Pending;
  trace?: string[];
  table?: string[];
}

export const encodeLines = (ops: Op[]): string =>
  ops.map((op) => JSON.stringify(op)).join("\n") + "\n";

export const decodeLines = (body: string): Reply[] =>
  body
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line) as Reply);

export type PostFn = (url: string, body: string) => Promise<string>;

const fetchPost: PostFn = async (url, body) => {
  const resp = await fetch(url, { method: "POST", body });
  return resp.text();
};

export class Client {
  constructor(
    private readonly addr: string,
    private readonly post: PostFn = fetchPost,
  ) {}

  async send(...ops: Op[]): Promise<Reply[]> {
    const body = encodeLines(ops);
    const replies = decodeLines(await this.post(`http://${this.addr}/api`, body));
    if (replies.length !== ops.length) {
      throw new Error(`protocol: sent ${ops.length} ops, got ${replies.length} replies`);
    }
    return replies;
  }

  async one(op: Op): Promise<Reply> {
    const [reply] = await this.send(op);
    return reply;
  }
}
