import { defineConfig } from 'vitest/config';

// Where the risk-pattern service runs during `vite dev` / `vite preview`;
// /api and /geo requests are proxied there so the app can fetch same-origin.
const apiTarget = process.env.VITE_API_PROXY ?? 'http://127.0.0.1:8000';
const proxy = {
  '/api': apiTarget,
  '/geo': apiTarget,
};

export default defineConfig({
  server: { proxy },
  preview: { proxy },
  test: {
    globals: true,
    environment: 'jsdom',
    globalSetup: './tests/globalSetup.ts',
    testTimeout: 20000,
    hookTimeout: 60000,
  },
});
