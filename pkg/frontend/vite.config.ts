import { defineConfig } from 'vitest/config';

export default defineConfig({
  server: {
    proxy: {
      // The dev server fronts a locally running recommender service.
      '/api': {
        target: 'http://127.0.0.1:8000',
        changeOrigin: true,
        rewrite: (path) => path.replace(/^\/api/, ''),
      },
    },
  },
  test: {
    environment: 'jsdom',
  },
});
