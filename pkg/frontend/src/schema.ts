import { z } from "zod"

// Response shapes of the campaign service. Parsed at the fetch boundary so
// everything past api.ts works with checked types.

export const suggestionSchema = z.object({
  id: z.number(),
  step: z.number(),
  source: z.number(),
  u: z.array(z.number()),
  x: z.record(z.string(), z.unknown()),
  mkg: z.number(),
  pred_mean: z.number(),
  pred_var: z.number(),
  fallback: z.boolean(),
})
export type Suggestion = z.infer<typeof suggestionSchema>

export const incumbentSchema = z.object({
  kind: z.enum(["observed", "posterior"]),
  u: z.array(z.number()),
  x: z.record(z.string(), z.unknown()),
  value: z.number(),
})
export type Incumbent = z.infer<typeof incumbentSchema>

export const sourceSpecSchema = z.object({
  index: z.number(),
  kind: z.string(),
  cost: z.number(),
  noise: z.number().optional(),
  label: z.string().optional(),
  fidelity: z.number().nullable().optional(),
})
export type SourceSpec = z.infer<typeof sourceSpecSchema>

export const summarySchema = z.object({
  objective: z.string(),
  status: z.string(),
  seed: z.number(),
  budget_spent: z.number(),
  budget: z.number().nullable(),
  hours_per_cost: z.number(),
  steps_taken: z.number(),
  n_observations: z.number(),
  source_counts: z.record(z.string(), z.number()),
  sources: z.array(sourceSpecSchema),
  pending_suggestion: suggestionSchema.nullable(),
  best: incumbentSchema.nullable(),
})
export type Summary = z.infer<typeof summarySchema>

export const observationSchema = z.object({
  ordinal: z.number(),
  source: z.number(),
  u: z.array(z.number()),
  y: z.number(),
  cost: z.number(),
  phase: z.string(),
  suggestion_id: z.number().nullable(),
  step: z.number().nullable(),
  x: z.record(z.string(), z.unknown()).optional(),
})
export type Observation = z.infer<typeof observationSchema>

// record() result: echoed back for an observation post, including repeats.
export const observationResultSchema = z.object({
  suggestion_id: z.number().nullable(),
  ordinal: z.number(),
  source: z.number(),
  u: z.array(z.number()),
  x: z.record(z.string(), z.unknown()),
  value: z.number(),
  cost: z.number(),
  step: z.number().nullable(),
})
export type ObservationResult = z.infer<typeof observationResultSchema>

export const posteriorSchema = z.object({
  axes: z.array(z.number()).min(1).max(2),
  n: z.number(),
  ticks: z.array(z.number()),
  anchor: z.array(z.number()),
  mean: z.array(z.number()),
  std: z.array(z.number()),
})
export type PosteriorSlice = z.infer<typeof posteriorSchema>

export const campaignRefSchema = z.object({ id: z.string(), summary: summarySchema })
export type CampaignRef = z.infer<typeof campaignRefSchema>

export const listResponseSchema = z.object({ campaigns: z.array(campaignRefSchema) })
export const createResponseSchema = campaignRefSchema.extend({ created: z.boolean() })
export const suggestResponseSchema = z.object({
  suggestion: suggestionSchema,
  repeat: z.boolean(),
})
export const observeResponseSchema = z.object({
  observation: observationResultSchema,
  summary: summarySchema,
  repeat: z.boolean(),
})
export const historyResponseSchema = z.object({
  observations: z.array(observationSchema),
  budget_spent: z.number(),
})
export type HistoryResponse = z.infer<typeof historyResponseSchema>

export const errorEnvelopeSchema = z.object({
  error: z.object({
    code: z.string(),
    message: z.string(),
    details: z.unknown().optional(),
  }),
})
