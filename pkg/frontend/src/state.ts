import { ApiClient, ApiError } from "./api"
import type { HistoryResponse, PosteriorSlice, Summary } from "./schema"

export interface SliceSelection {
  axes: number[]
  n: number
}

// State for one campaign page. The server is the source of truth: every
// mutation refetches, nothing is updated optimistically, and the busy flags
// keep buttons disabled while a request is in flight.
export class CampaignStore {
  summary: Summary | null = null
  history: HistoryResponse | null = null
  posterior: PosteriorSlice | null = null
  posteriorError: string | null = null
  slice: SliceSelection = { axes: [0], n: 33 }
  suggestBusy = false
  observeBusy = false
  lastError: string | null = null

  onChange: () => void = () => {}
  onToast: (message: string) => void = () => {}
  private timer: ReturnType<typeof setInterval> | null = null

  constructor(
    public readonly api: ApiClient,
    public readonly id: string,
  ) {}

  startPolling(intervalMs: number): void {
    this.stopPolling()
    this.timer = setInterval(() => {
      void this.refresh()
    }, intervalMs)
  }

  stopPolling(): void {
    if (this.timer !== null) clearInterval(this.timer)
    this.timer = null
  }

  async refresh(): Promise<void> {
    try {
      const [summary, history] = await Promise.all([
        this.api.getSummary(this.id),
        this.api.getHistory(this.id),
      ])
      this.summary = summary
      this.history = history
      if (summary.n_observations > 0) await this.fetchPosterior()
      this.onChange()
    } catch (err) {
      this.surface(err)
    }
  }

  async selectSlice(axes: number[]): Promise<void> {
    this.slice = { ...this.slice, axes }
    await this.fetchPosterior()
    this.onChange()
  }

  private async fetchPosterior(): Promise<void> {
    try {
      this.posterior = await this.api.getPosterior(this.id, this.slice.axes, this.slice.n)
      this.posteriorError = null
    } catch (err) {
      this.posterior = null
      this.posteriorError =
        err instanceof ApiError && err.code === "empty_campaign"
          ? "no observations yet, the posterior appears after the first result"
          : err instanceof Error
            ? err.message
            : String(err)
    }
  }

  async requestSuggestion(): Promise<void> {
    if (this.suggestBusy) return
    this.suggestBusy = true
    this.onChange()
    try {
      const res = await this.api.requestSuggestion(this.id)
      if (res.repeat) this.onToast("a suggestion is already pending")
      await this.refresh()
    } catch (err) {
      if (err instanceof ApiError && err.code === "pending_suggestion_exists") {
        this.onToast("a suggestion is already pending")
      } else {
        this.surface(err)
      }
    } finally {
      this.suggestBusy = false
      this.onChange()
    }
  }

  // Returns true when the server accepted (or had already recorded) it.
  async submitObservation(suggestionId: number, value: number, cost?: number): Promise<boolean> {
    if (this.observeBusy) return false
    this.observeBusy = true
    this.onChange()
    try {
      const res = await this.api.postObservation(this.id, suggestionId, value, cost)
      if (res.repeat) this.onToast("this suggestion was already observed, showing the stored result")
      await this.refresh()
      return true
    } catch (err) {
      this.surface(err)
      return false
    } finally {
      this.observeBusy = false
      this.onChange()
    }
  }

  // Errors land in a toast, verbatim for service errors, and never mutate
  // the rendered campaign state.
  private surface(err: unknown): void {
    const message =
      err instanceof ApiError ? `${err.code}: ${err.message}` : err instanceof Error ? err.message : String(err)
    this.lastError = message
    this.onToast(message)
  }
}
