// The navigation console: goal input, inference chain breadcrumb,
// accept/reject controls, history log, and the animated grid.

import { ApiClient, ApiError } from './api.js';
import type { Cell } from './api.js';
import { GridRenderer } from './grid.js';
import {
  ConsoleState,
  applyGoalResponse,
  breadcrumbEntities,
  canDecide,
  canSubmit,
  chainText,
  initialState,
} from './state.js';

export interface ConsoleOptions {
  /** Delay between animation steps; tests pass 0. */
  stepMs?: number;
}

const sleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export class NavConsole {
  readonly state: ConsoleState = initialState();

  private readonly stepMs: number;
  private grid!: GridRenderer;
  private input!: HTMLInputElement;
  private submitBtn!: HTMLButtonElement;
  private acceptBtn!: HTMLButtonElement;
  private rejectBtn!: HTMLButtonElement;
  private backendSelect!: HTMLSelectElement;
  private breadcrumbEl!: HTMLOListElement;
  private proposalPanel!: HTMLElement;
  private destinationEl!: HTMLElement;
  private exhaustedPanel!: HTMLElement;
  private unrealizableEl!: HTMLUListElement;
  private historyEl!: HTMLUListElement;
  private errorEl!: HTMLElement;
  private robotCellEl!: HTMLElement;

  constructor(private readonly root: HTMLElement, private readonly api: ApiClient,
              options: ConsoleOptions = {}) {
    this.stepMs = options.stepMs ?? 60;
  }

  async init(): Promise<void> {
    this.buildDom();
    this.state.world = await this.api.state();
    this.state.robotCell = this.state.world.robot;
    this.render();
  }

  // -- user actions ----------------------------------------------------------

  async submitGoal(request: string): Promise<void> {
    if (!canSubmit(this.state) || !request.trim()) {
      return;
    }
    try {
      const response = await this.api.goal(request, this.state.backend);
      applyGoalResponse(this.state, request, response);
      if (this.state.phase === 'exhausted') {
        this.log(request, 'no destination could be proposed');
      }
    } catch (err) {
      this.showError(err);
    }
    this.render();
  }

  async rejectCurrent(): Promise<void> {
    const { sessionId, proposal } = this.state;
    if (!canDecide(this.state) || !sessionId || !proposal) {
      return;
    }
    try {
      const response = await this.api.reject(sessionId, proposal.ordinal);
      this.log(this.state.pendingRequest ?? '', `rejected ${proposal.destination}`);
      applyGoalResponse(this.state, this.state.pendingRequest ?? '', response);
      if (this.state.phase === 'exhausted') {
        this.log(this.state.pendingRequest ?? '', 'no more possibilities');
      }
    } catch (err) {
      this.showError(err);
    }
    this.render();
  }

  async acceptCurrent(): Promise<void> {
    const { sessionId, proposal } = this.state;
    if (!canDecide(this.state) || !sessionId || !proposal) {
      return;
    }
    let trajectory: Cell[];
    let serverRobot: Cell;
    let arrived: string;
    try {
      const response = await this.api.accept(sessionId, proposal.ordinal);
      trajectory = response.trajectory;
      serverRobot = response.robot;
      arrived = `${response.arrived} (${response.arrived_class})`;
    } catch (err) {
      // NoPath leaves the proposal pending and rejectable
      this.showError(err);
      this.render();
      return;
    }
    this.state.phase = 'animating';
    this.render();
    for (const cell of trajectory) {
      this.state.robotCell = cell;
      this.renderGrid();
      if (this.stepMs > 0) {
        await sleep(this.stepMs);
      }
    }
    // animations drained: the rendered cell must match the server's
    this.state.robotCell = serverRobot;
    if (this.state.world) {
      this.state.world.robot = serverRobot;
    }
    this.log(this.state.pendingRequest ?? '', `arrived at ${arrived}`);
    this.state.phase = 'idle';
    this.state.proposal = null;
    this.state.sessionId = null;
    this.render();
  }

  // -- rendering ---------------------------------------------------------------

  private log(request: string, text: string): void {
    this.state.history.push({ request, text });
  }

  private showError(err: unknown): void {
    this.state.error = err instanceof ApiError
      ? `${err.kind}: ${err.subject}`
      : String(err);
  }

  private render(): void {
    const { state } = this;
    this.errorEl.textContent = state.error ?? '';
    this.errorEl.hidden = state.error === null;

    this.submitBtn.disabled = !canSubmit(state);
    this.acceptBtn.disabled = !canDecide(state);
    this.rejectBtn.disabled = !canDecide(state);
    this.backendSelect.value = state.backend;

    this.proposalPanel.hidden = state.proposal === null;
    if (state.proposal) {
      const cls = state.proposal.destination_class;
      this.destinationEl.textContent = `${state.proposal.destination} (${cls})`;
      this.breadcrumbEl.replaceChildren(...breadcrumbEntities(state.proposal).map((entity) => {
        const li = this.root.ownerDocument.createElement('li');
        li.className = 'hop';
        li.textContent = entity;
        return li;
      }));
    }

    this.exhaustedPanel.hidden = state.phase !== 'exhausted';
    if (state.phase === 'exhausted') {
      this.unrealizableEl.replaceChildren(...state.unrealizable.map((entry) => {
        const li = this.root.ownerDocument.createElement('li');
        li.className = 'unrealizable-chain';
        li.textContent = `${chainText(entry.chain)} — ${entry.reason}`;
        return li;
      }));
    }

    this.historyEl.replaceChildren(...state.history.map((entry) => {
      const li = this.root.ownerDocument.createElement('li');
      li.textContent = `[${entry.request}] ${entry.text}`;
      return li;
    }));

    this.renderGrid();
  }

  private renderGrid(): void {
    if (this.state.world && this.state.robotCell) {
      this.grid.render(this.state.world, this.state.robotCell);
      this.robotCellEl.textContent = `${this.state.robotCell[0]},${this.state.robotCell[1]}`;
    }
  }

  private buildDom(): void {
    this.root.innerHTML = `
      <header>
        <label>backend
          <select id="backend-select">
            <option value="relational">relational</option>
            <option value="ontology">ontology</option>
          </select>
        </label>
      </header>
      <main class="layout">
        <section class="grid-pane">
          <canvas id="grid-canvas"></canvas>
          <p>robot at <span id="robot-cell"></span></p>
        </section>
        <section class="control-pane">
          <form id="goal-form">
            <input id="goal-input" placeholder="where to? e.g. work, soft drink" />
            <button id="goal-submit" type="submit">go</button>
          </form>
          <p id="error" hidden></p>
          <div id="proposal" hidden>
            <p>proposal: <strong id="destination"></strong></p>
            <ol id="breadcrumb" class="breadcrumb"></ol>
            <button id="accept">accept</button>
            <button id="reject">reject</button>
          </div>
          <div id="exhausted" hidden>
            <p>no more possibilities</p>
            <ul id="unrealizable"></ul>
          </div>
          <h3>history</h3>
          <ul id="history"></ul>
        </section>
      </main>`;

    const find = <T extends HTMLElement>(selector: string): T => {
      const el = this.root.querySelector(selector);
      if (!el) {
        throw new Error(`missing element ${selector}`);
      }
      return el as T;
    };
    this.grid = new GridRenderer(find<HTMLCanvasElement>('#grid-canvas'));
    this.input = find<HTMLInputElement>('#goal-input');
    this.submitBtn = find<HTMLButtonElement>('#goal-submit');
    this.acceptBtn = find<HTMLButtonElement>('#accept');
    this.rejectBtn = find<HTMLButtonElement>('#reject');
    this.backendSelect = find<HTMLSelectElement>('#backend-select');
    this.breadcrumbEl = find<HTMLOListElement>('#breadcrumb');
    this.proposalPanel = find('#proposal');
    this.destinationEl = find('#destination');
    this.exhaustedPanel = find('#exhausted');
    this.unrealizableEl = find<HTMLUListElement>('#unrealizable');
    this.historyEl = find<HTMLUListElement>('#history');
    this.errorEl = find('#error');
    this.robotCellEl = find('#robot-cell');

    find<HTMLFormElement>('#goal-form').addEventListener('submit', (event) => {
      event.preventDefault();
      void this.submitGoal(this.input.value);
    });
    this.acceptBtn.addEventListener('click', () => void this.acceptCurrent());
    this.rejectBtn.addEventListener('click', () => void this.rejectCurrent());
    this.backendSelect.addEventListener('change', () => {
      this.state.backend = this.backendSelect.value as ConsoleState['backend'];
    });
  }
}
