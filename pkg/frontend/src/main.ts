import './style.css';
import { DashboardApi } from './api';
import { createDashboard } from './app';

const base = import.meta.env.VITE_API_BASE ?? '';
const root = document.getElementById('app');
if (!root) throw new Error("missing '#app' mount point");

createDashboard(root, new DashboardApi(base)).catch((err: unknown) => {
  root.textContent = `failed to load dashboard: ${String(err)}`;
});
