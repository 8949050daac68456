import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    // a real page origin, distinct from the engine's: the e2e tests exercise
    // the CORS path exactly like a deployed browser client
    environmentOptions: {
      happyDOM: { url: "http://localhost:5173" },
    },
    include: ["tests/**/*.test.ts"],
    testTimeout: 60_000,
    hookTimeout: 60_000,
  },
});
