// Grid rendering: a pure mapping from (snapshot, robot cell) to cell
// fills, painted onto a canvas when a 2d context exists (jsdom has none).

import type { Cell, WorldSnapshot } from './api.js';

export const CELL_PX = 28;

const ROOM_FILLS = ['#cde7f0', '#e4d9f2', '#d9f2dc', '#f2e9d0'];

export interface CellFill {
  x: number;
  y: number;
  fill: string;
}

export function roomFill(snapshot: WorldSnapshot, room: string): string {
  const index = Object.keys(snapshot.regions).sort().indexOf(room);
  return ROOM_FILLS[index % ROOM_FILLS.length];
}

/** Every cell's fill color, robot excluded. */
export function cellFills(snapshot: WorldSnapshot): CellFill[] {
  const byCell = new Map<string, string>();
  for (let y = 0; y < snapshot.height; y++) {
    for (let x = 0; x < snapshot.width; x++) {
      const wall = snapshot.rows[y][x] === '#';
      byCell.set(`${x},${y}`, wall ? '#3b3b3b' : '#fafafa');
    }
  }
  for (const [room, cells] of Object.entries(snapshot.regions)) {
    for (const [x, y] of cells) {
      byCell.set(`${x},${y}`, roomFill(snapshot, room));
    }
  }
  return [...byCell.entries()].map(([key, fill]) => {
    const [x, y] = key.split(',').map(Number);
    return { x, y, fill };
  });
}

export class GridRenderer {
  private readonly ctx: CanvasRenderingContext2D | null;

  constructor(private readonly canvas: HTMLCanvasElement) {
    // jsdom returns null here; rendering then degrades to state-only
    this.ctx = canvas.getContext('2d');
  }

  render(snapshot: WorldSnapshot, robot: Cell): void {
    this.canvas.width = snapshot.width * CELL_PX;
    this.canvas.height = snapshot.height * CELL_PX;
    this.canvas.dataset.robot = `${robot[0]},${robot[1]}`;
    if (!this.ctx) {
      return;
    }
    const ctx = this.ctx;
    for (const { x, y, fill } of cellFills(snapshot)) {
      ctx.fillStyle = fill;
      ctx.fillRect(x * CELL_PX, y * CELL_PX, CELL_PX - 1, CELL_PX - 1);
    }
    for (const [room, [ax, ay]] of Object.entries(snapshot.anchors)) {
      ctx.fillStyle = '#555';
      ctx.font = '12px sans-serif';
      ctx.fillText(`${room}`, ax * CELL_PX + 2, ay * CELL_PX + 12);
    }
    ctx.fillStyle = '#d03020';
    ctx.beginPath();
    ctx.arc(robot[0] * CELL_PX + CELL_PX / 2, robot[1] * CELL_PX + CELL_PX / 2,
            CELL_PX * 0.33, 0, Math.PI * 2);
    ctx.fill();
  }
}
