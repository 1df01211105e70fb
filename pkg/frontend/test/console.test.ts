// Scripted browser test: the console DOM driven against a live service
// process; nothing is mocked.

import { ChildProcess, spawn } from 'node:child_process';
import { afterAll, beforeAll, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { NavConsole } from '../src/console.js';

let service: ChildProcess;
let base: string;

beforeAll(async () => {
  service = spawn('python3', ['-m', 'semnav.cli', 'serve', '--listen', '127.0.0.1:0'], {
    env: { ...process.env, PYTHONUNBUFFERED: '1' },
  });
  base = await new Promise<string>((resolve, reject) => {
    let output = '';
    service.stdout!.on('data', (chunk: Buffer) => {
      output += chunk.toString();
      const match = output.match(/serving on (http:\/\/[^/]+)\//);
      if (match) {
        resolve(match[1]);
      }
    });
    service.stderr!.on('data', (chunk: Buffer) => {
      output += chunk.toString();
    });
    service.on('exit', (code) => reject(new Error(`service exited ${code}: ${output}`)));
    setTimeout(() => reject(new Error(`service did not start: ${output}`)), 15000);
  });
}, 20000);

afterAll(() => {
  service?.kill();
});

async function mountConsole(): Promise<{ root: HTMLElement; ui: NavConsole }> {
  const root = document.createElement('div');
  document.body.append(root);
  const ui = new NavConsole(root, new ApiClient(base), { stepMs: 0 });
  await ui.init();
  return { root, ui };
}

const texts = (root: HTMLElement, selector: string) =>
  [...root.querySelectorAll(selector)].map((el) => el.textContent ?? '');

it('submits "work", shows the server chain verbatim, and animates to the server cell', async () => {
  const { root, ui } = await mountConsole();

  await ui.submitGoal('work');
  expect(ui.state.proposal).not.toBeNull();
  const serverChain = ui.state.proposal!.chain.map((hop) => hop.entity);
  const breadcrumb = texts(root, '#breadcrumb .hop');
  expect(breadcrumb).toEqual(serverChain);
  expect(breadcrumb).toEqual(['work', 'computer', 'office', 'room1']);
  expect(root.querySelector<HTMLElement>('#destination')!.textContent)
    .toBe('room1 (office)');

  await ui.acceptCurrent();
  const serverState = await new ApiClient(base).state();
  const rendered = root.querySelector<HTMLElement>('#robot-cell')!.textContent;
  expect(rendered).toBe(`${serverState.robot[0]},${serverState.robot[1]}`);
  const canvas = root.querySelector<HTMLCanvasElement>('#grid-canvas')!;
  expect(canvas.dataset.robot).toBe(`${serverState.robot[0]},${serverState.robot[1]}`);
  expect(texts(root, '#history li').at(-1)).toContain('arrived at room1 (office)');
});

it('submits "funny", rejects, and lists both unrealizable chains', async () => {
  const { root, ui } = await mountConsole();

  await ui.submitGoal('funny');
  expect(ui.state.proposal!.destination).toBe('room1');

  await ui.rejectCurrent();
  expect(root.querySelector<HTMLElement>('#exhausted')!.hidden).toBe(false);
  const chains = texts(root, '#unrealizable .unrealizable-chain');
  expect(chains).toHaveLength(2);
  expect(chains.some((text) => text.includes('playstation'))).toBe(true);
  expect(chains.some((text) => text.includes('television'))).toBe(true);
  expect(chains.every((text) => text.includes('living_room'))).toBe(true);
});

it('renders unknown goals as an inline error and keeps the input usable', async () => {
  const { root, ui } = await mountConsole();

  await ui.submitGoal('xyzzy');
  const error = root.querySelector<HTMLElement>('#error')!;
  expect(error.hidden).toBe(false);
  expect(error.textContent).toContain('UnknownEntity');

  await ui.submitGoal('soft drink');
  expect(texts(root, '#breadcrumb .hop'))
    .toEqual(['soft_drink', 'refrigerator', 'kitchen', 'room2']);
});

it('keeps accept/reject unreachable unless a proposal is pending', async () => {
  const { root, ui } = await mountConsole();
  const accept = root.querySelector<HTMLButtonElement>('#accept')!;
  const reject = root.querySelector<HTMLButtonElement>('#reject')!;
  expect(accept.disabled).toBe(true);
  expect(reject.disabled).toBe(true);
  await ui.rejectCurrent(); // no-op, must not throw or call the server

  await ui.submitGoal('office');
  expect(accept.disabled).toBe(false);
  expect(reject.disabled).toBe(false);
});

it('drives the ontology backend through the selector with identical answers', async () => {
  const { root, ui } = await mountConsole();
  const select = root.querySelector<HTMLSelectElement>('#backend-select')!;
  select.value = 'ontology';
  select.dispatchEvent(new Event('change'));
  expect(ui.state.backend).toBe('ontology');

  await ui.submitGoal('work');
  expect(texts(root, '#breadcrumb .hop'))
    .toEqual(['work', 'computer', 'office', 'room1']);
});
