// Typed client for the semnav JSON service.

export type Cell = [number, number];

export interface WorldSnapshot {
  width: number;
  height: number;
  rows: string[];
  regions: Record<string, Cell[]>;
  anchors: Record<string, Cell>;
  robot: Cell;
  rooms: Record<string, string>;
}

export interface ChainHop {
  entity: string;
  kind: string;
}

export interface ProposalView {
  destination: string;
  destination_class: string;
  chain: ChainHop[];
  ordinal: number;
}

export interface UnrealizableChain {
  chain: ChainHop[];
  reason: string;
}

// /api/goal and /api/session/{id}/reject both answer with either the next
// proposal or the exhausted report.
export interface GoalResponse {
  session: string;
  proposal?: ProposalView;
  exhausted?: boolean;
  unrealizable?: UnrealizableChain[];
}

export interface AcceptResponse {
  session: string;
  trajectory: Cell[];
  arrived: string | null;
  arrived_class: string | null;
  robot: Cell;
}

export interface MethodDescriptor {
  name: string;
  input: string;
  description: string;
}

export class ApiError extends Error {
  constructor(readonly kind: string, readonly subject: string, readonly status: number) {
    super(`${kind}: ${subject}`);
  }
}

async function unwrap<T>(response: Response): Promise<T> {
  const payload = await response.json();
  if (!response.ok) {
    const error = payload?.error ?? { kind: 'HttpError', subject: String(response.status) };
    throw new ApiError(error.kind, error.subject, response.status);
  }
  return payload as T;
}

export class ApiClient {
  constructor(private readonly base: string) {}

  private async get<T>(path: string): Promise<T> {
    return unwrap<T>(await fetch(this.base + path));
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    return unwrap<T>(await fetch(this.base + path, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    }));
  }

  state(): Promise<WorldSnapshot> {
    return this.get('/api/state');
  }

  methods(): Promise<{ methods: MethodDescriptor[] }> {
    return this.get('/api/kb/methods');
  }

  goal(request: string, backend: string): Promise<GoalResponse> {
    return this.post('/api/goal', { request, backend });
  }

  reject(session: string, ordinal: number): Promise<GoalResponse> {
    return this.post(`/api/session/${session}/reject`, { ordinal });
  }

  accept(session: string, ordinal: number): Promise<AcceptResponse> {
    return this.post(`/api/session/${session}/accept`, { ordinal });
  }
}
