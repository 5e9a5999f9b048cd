import { defineConfig } from "vitest/config";

// Dev server proxies /api to a locally running `fallsynth serve` so the
// viewer stays same-origin; tests spawn their own service (tests/service.ts).
export default defineConfig({
  server: {
    proxy: {
      "/api": "http://127.0.0.1:8000",
    },
  },
  test: {
    globalSetup: "./tests/globalSetup.ts",
    testTimeout: 30_000,
    hookTimeout: 120_000,
  },
});
