// Console state and its transitions. The server is the source of truth;
// these helpers only reshape its responses, never invent reasoning.

import type { Cell, GoalResponse, ProposalView, UnrealizableChain, WorldSnapshot } from './api.js';

export type Phase = 'idle' | 'proposed' | 'animating' | 'exhausted';
export type BackendName = 'relational' | 'ontology';

export interface HistoryEntry {
  request: string;
  text: string;
}

export interface ConsoleState {
  world: WorldSnapshot | null;
  backend: BackendName;
  sessionId: string | null;
  proposal: ProposalView | null;
  unrealizable: UnrealizableChain[];
  phase: Phase;
  // the cell the grid currently shows; trails the server during animation
  robotCell: Cell | null;
  pendingRequest: string | null;
  history: HistoryEntry[];
  error: string | null;
}

export function initialState(): ConsoleState {
  return {
    world: null,
    backend: 'relational',
    sessionId: null,
    proposal: null,
    unrealizable: [],
    phase: 'idle',
    robotCell: null,
    pendingRequest: null,
    history: [],
    error: null,
  };
}

export function breadcrumbEntities(proposal: ProposalView): string[] {
  return proposal.chain.map((hop) => hop.entity);
}

export function chainText(chain: { entity: string }[]): string {
  return chain.map((hop) => hop.entity).join(' -> ');
}

/** Fold a /api/goal or /reject response into the state. */
export function applyGoalResponse(state: ConsoleState, request: string,
                                  response: GoalResponse): void {
  state.sessionId = response.session;
  state.pendingRequest = request;
  state.error = null;
  if (response.proposal) {
    state.proposal = response.proposal;
    state.unrealizable = [];
    state.phase = 'proposed';
  } else {
    state.proposal = null;
    state.unrealizable = response.unrealizable ?? [];
    state.phase = 'exhausted';
  }
}

export function canSubmit(state: ConsoleState): boolean {
  return state.phase === 'idle' || state.phase === 'exhausted';
}

export function canDecide(state: ConsoleState): boolean {
  return state.phase === 'proposed';
}
