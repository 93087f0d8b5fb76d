// The service base URL is baked in when the bundle is built:
//   VITE_API_BASE=http://fermhost:8765 npm run build
// Unset it falls back to the local development service.
export const API_BASE: string =
  import.meta.env?.VITE_API_BASE ?? "http://127.0.0.1:8765"

export const POLL_INTERVAL_MS = 10_000
