// @vitest-environment jsdom
//
// Round trip against a live service process: create a campaign in the UI,
// request a suggestion, record an observation, and watch the incumbent and
// budget update on screen.
import { spawn, type ChildProcess } from "node:child_process"
import { mkdtempSync, rmSync } from "node:fs"
import { tmpdir } from "node:os"
import { join } from "node:path"
import { afterAll, beforeAll, describe, expect, it } from "vitest"
import { ApiClient } from "../src/api"
import { CampaignStore } from "../src/state"
import { renderCampaign, renderCampaignList, toast } from "../src/views"

const PORT = 18931
const BASE = `http://127.0.0.1:${PORT}`

let service: ChildProcess
let dataDir: string

const CONFIG = {
  schema_version: 1,
  objective: "syngas",
  seed: 3,
  sources: [{ index: 0, kind: "external-manual", cost: 2.0 }],
  init_design: {},
  acquisition: {
    n_candidates: 16, refine_top: 2, refine_steps: 3,
    fresh_discretization: 32, discretization_cap: 128,
  },
}

async function until(cond: () => boolean | Promise<boolean>, what: string, ms = 60_000) {
  const deadline = Date.now() + ms
  while (Date.now() < deadline) {
    if (await cond()) return
    await new Promise((r) => setTimeout(r, 150))
  }
  throw new Error(`timed out waiting for ${what}`)
}

beforeAll(async () => {
  dataDir = mkdtempSync(join(tmpdir(), "mfbo-console-"))
  service = spawn(
    "python3",
    ["-m", "syngas_mfbo.cli", "serve", "--port", String(PORT), "--data-dir", dataDir],
    { stdio: ["ignore", "ignore", "pipe"] },
  )
  let stderr = ""
  service.stderr?.on("data", (chunk) => { stderr += String(chunk) })
  await until(async () => {
    if (service.exitCode !== null) throw new Error(`service exited: ${stderr}`)
    try {
      const res = await fetch(`${BASE}/campaigns`)
      return res.ok
    } catch {
      return false
    }
  }, "service to come up")
})

afterAll(async () => {
  service?.kill("SIGTERM")
  await new Promise((r) => setTimeout(r, 300))
  if (dataDir) rmSync(dataDir, { recursive: true, force: true })
})

describe("console round trip", () => {
  it("creates, suggests, observes and shows the update", async () => {
    document.body.innerHTML =
      '<div id="app"><div class="view"></div><div class="toasts"></div></div>'
    const view = document.querySelector(".view") as HTMLElement
    const api = new ApiClient(BASE)

    // Entry screen: paste a config and create the campaign.
    let destination = ""
    await renderCampaignList(view, api, (hash) => { destination = hash })
    expect(view.textContent).toContain("no campaigns yet")
    ;(view.querySelector(".config-json") as HTMLTextAreaElement).value = JSON.stringify(CONFIG)
    ;(view.querySelector("button.create") as HTMLButtonElement).click()
    await until(() => destination.startsWith("#/c/"), "campaign creation")
    const id = destination.slice("#/c/".length)
    expect(id).toMatch(/^[0-9A-HJKMNP-TV-Z]{26}$/)

    const store = new CampaignStore(api, id)
    store.onChange = () => renderCampaign(view, store)
    store.onToast = toast
    await store.refresh()
    expect(view.textContent).toContain("0 cost units spent")
    expect(view.textContent).toContain("no suggestion pending")

    // Two rapid clicks, then one more after it settles: still one pending
    // suggestion, surfaced as a repeat.
    const requestBtn = view.querySelector(".request-suggestion") as HTMLButtonElement
    requestBtn.click()
    requestBtn.click()
    await until(() => store.summary?.pending_suggestion != null, "pending suggestion")
    const pendingId = store.summary?.pending_suggestion?.id
    expect(pendingId).toBe(0)
    await store.requestSuggestion()
    expect(store.summary?.pending_suggestion?.id).toBe(0)
    expect((document.querySelector(".toasts") as HTMLElement).textContent)
      .toContain("a suggestion is already pending")
    const history0 = await api.getHistory(id)
    expect(history0.observations).toHaveLength(0)

    // The pending panel shows all seven operating variables with units.
    const panel = view.querySelector(".card.suggestion") as HTMLElement
    expect(panel.querySelectorAll(".variables tr")).toHaveLength(7)
    expect(panel.textContent).toContain("g/L")
    expect(panel.textContent).toContain("suggestion #0")

    // Enter the measured value; the refresh must come from the server.
    ;(view.querySelector(".obs-value") as HTMLInputElement).value = "0.135"
    ;(view.querySelector(".obs-submit") as HTMLButtonElement).click()
    await until(() => store.summary?.n_observations === 1, "observation to land")
    expect(view.textContent).toContain("2.0000 cost units spent")
    expect(view.textContent).toContain("0.13500")
    expect(view.textContent).toContain("best observed")
    const history1 = await api.getHistory(id)
    expect(history1.observations).toHaveLength(1)
    expect(history1.budget_spent).toBeCloseTo(2.0, 12)

    // Posterior explorer renders off the slice endpoint after the first
    // observation, and axis switches refetch a fresh grid.
    expect(store.posterior).not.toBeNull()
    expect(store.posterior?.std.every((s) => s >= 0)).toBe(true)
    expect(view.querySelector(".card.posterior svg")).not.toBeNull()
    const second = view.querySelector(".axis-second") as HTMLSelectElement
    second.value = "1"
    second.dispatchEvent(new Event("change"))
    await until(() => store.posterior?.axes.length === 2, "2d slice")
    expect(view.querySelectorAll(".card.posterior rect").length).toBe(33 * 33)

    // Posting against the already observed suggestion is an at-most-once
    // repeat, not a double spend.
    const again = await store.submitObservation(0, 0.5)
    expect(again).toBe(true)
    expect((document.querySelector(".toasts") as HTMLElement).textContent)
      .toContain("already observed")
    expect(store.summary?.n_observations).toBe(1)
    expect(store.summary?.budget_spent).toBeCloseTo(2.0, 12)
  })

  it("lists the campaign for the entry screen after a service restart survives", async () => {
    const api = new ApiClient(BASE)
    const campaigns = await api.listCampaigns()
    expect(campaigns).toHaveLength(1)
    expect(campaigns[0]?.summary.n_observations).toBe(1)
  })
})
