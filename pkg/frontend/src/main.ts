import { ApiClient } from './api.js';
import { NavConsole } from './console.js';

const root = document.getElementById('app');
if (!root) {
  throw new Error('missing #app element');
}
const api = new ApiClient(window.location.origin);
void new NavConsole(root, api).init();
