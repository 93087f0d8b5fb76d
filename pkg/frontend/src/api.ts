import { z } from "zod"
import {
  createResponseSchema,
  errorEnvelopeSchema,
  historyResponseSchema,
  listResponseSchema,
  observeResponseSchema,
  posteriorSchema,
  summarySchema,
  suggestResponseSchema,
  type HistoryResponse,
  type PosteriorSlice,
  type Summary,
} from "./schema"

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public details: unknown = undefined,
  ) {
    super(message)
    this.name = "ApiError"
  }
}

type FetchLike = typeof fetch

// Thin typed client over the campaign service. The console does no
// optimization math of its own; every number it shows came out of here.
export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(
    schema: z.ZodType<T>,
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    let res: Response
    try {
      res = await this.fetchImpl(this.baseUrl + path, {
        method,
        headers: body === undefined ? {} : { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      })
    } catch (err) {
      throw new ApiError(0, "network_error", `service unreachable: ${String(err)}`)
    }
    const text = await res.text()
    let payload: unknown
    try {
      payload = text === "" ? null : JSON.parse(text)
    } catch {
      throw new ApiError(
        res.status,
        res.ok ? "bad_response" : "http_error",
        `non-JSON response (${res.status})`,
      )
    }
    if (!res.ok) {
      const envelope = errorEnvelopeSchema.safeParse(payload)
      if (envelope.success) {
        const e = envelope.data.error
        throw new ApiError(res.status, e.code, e.message, e.details)
      }
      throw new ApiError(res.status, "http_error", `request failed (${res.status})`)
    }
    const parsed = schema.safeParse(payload)
    if (!parsed.success) {
      throw new ApiError(res.status, "bad_response", parsed.error.message)
    }
    return parsed.data
  }

  listCampaigns() {
    return this.request(listResponseSchema, "GET", "/campaigns").then((r) => r.campaigns)
  }

  createCampaign(config: unknown, idempotencyKey?: string) {
    const body: Record<string, unknown> = { config }
    if (idempotencyKey) body.idempotency_key = idempotencyKey
    return this.request(createResponseSchema, "POST", "/campaigns", body)
  }

  getSummary(id: string): Promise<Summary> {
    return this.request(
      z.object({ id: z.string(), summary: summarySchema }),
      "GET",
      `/campaigns/${id}`,
    ).then((r) => r.summary)
  }

  requestSuggestion(id: string) {
    return this.request(suggestResponseSchema, "POST", `/campaigns/${id}/suggestions`)
  }

  postObservation(id: string, suggestionId: number, value: number, cost?: number) {
    const body: Record<string, unknown> = { suggestion_id: suggestionId, value }
    if (cost !== undefined) body.cost = cost
    return this.request(observeResponseSchema, "POST", `/campaigns/${id}/observations`, body)
  }

  getHistory(id: string): Promise<HistoryResponse> {
    return this.request(historyResponseSchema, "GET", `/campaigns/${id}/history`)
  }

  // axes are numeric GP-input indices; the server also accepts names.
  getPosterior(id: string, axes: number[], n: number): Promise<PosteriorSlice> {
    const grid = `${axes.join(",")}:${n}`
    return this.request(
      posteriorSchema,
      "GET",
      `/campaigns/${id}/posterior?grid=${encodeURIComponent(grid)}`,
    )
  }
}
