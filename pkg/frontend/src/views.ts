import { ApiClient, ApiError } from "./api"
import { renderPosterior1d, renderPosterior2d, renderTrace, type TracePoint } from "./chart"
import { axisNames, fmtCost, fmtValue, fmtWallTime, physicalRows, validateObservationInput } from "./format"
import type { Summary } from "./schema"
import { CampaignStore } from "./state"

type Navigate = (hash: string) => void

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: Array<Node | string>
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag)
  for (const [k, v] of Object.entries(attrs)) {
    if (k === "class") node.className = v
    else node.setAttribute(k, v)
  }
  node.append(...children)
  return node
}

export function toast(message: string): void {
  const host = document.querySelector(".toasts")
  if (!host) return
  const item = el("div", { class: "toast", role: "status" }, message)
  host.append(item)
  setTimeout(() => item.remove(), 6000)
}

// Entry screen: existing campaigns plus a config-JSON create form.
export async function renderCampaignList(
  view: HTMLElement,
  api: ApiClient,
  navigate: Navigate,
): Promise<void> {
  view.innerHTML = ""
  view.append(el("h1", {}, "Campaigns"))
  const table = el("table", { class: "campaign-list" })
  table.append(el("tr", {},
    el("th", {}, "id"), el("th", {}, "objective"), el("th", {}, "status"),
    el("th", {}, "observations"), el("th", {}, "budget spent")))
  view.append(table)
  try {
    const campaigns = await api.listCampaigns()
    if (campaigns.length === 0) {
      view.insertBefore(el("p", { class: "empty" }, "no campaigns yet"), table)
    }
    for (const c of campaigns) {
      const link = el("a", { href: `#/c/${c.id}` }, c.id)
      link.addEventListener("click", (ev) => {
        ev.preventDefault()
        navigate(`#/c/${c.id}`)
      })
      table.append(el("tr", {},
        el("td", {}, link),
        el("td", {}, c.summary.objective),
        el("td", {}, c.summary.status),
        el("td", {}, String(c.summary.n_observations)),
        el("td", {}, fmtCost(c.summary.budget_spent))))
    }
  } catch (err) {
    toast(err instanceof Error ? err.message : String(err))
  }

  const configInput = el("textarea", {
    class: "config-json", rows: "8", placeholder: "campaign config JSON",
  })
  const keyInput = el("input", { class: "idem-key", placeholder: "idempotency key (optional)" })
  const createBtn = el("button", { class: "create" }, "Create campaign")
  const problem = el("p", { class: "form-error" })
  createBtn.addEventListener("click", async () => {
    let config: unknown
    try {
      config = JSON.parse(configInput.value)
    } catch {
      problem.textContent = "config is not valid JSON"
      return
    }
    problem.textContent = ""
    createBtn.disabled = true
    try {
      const res = await api.createCampaign(config, keyInput.value.trim() || undefined)
      navigate(`#/c/${res.id}`)
    } catch (err) {
      problem.textContent = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err)
    } finally {
      createBtn.disabled = false
    }
  })
  view.append(el("h2", {}, "New campaign"), configInput, keyInput, createBtn, problem)
}

export function renderCampaign(view: HTMLElement, store: CampaignStore): void {
  // Keep whatever the engineer already typed across poll re-renders.
  const keepValue = (view.querySelector(".obs-value") as HTMLInputElement | null)?.value ?? ""
  const keepCost = (view.querySelector(".obs-cost") as HTMLInputElement | null)?.value ?? ""
  const keepError = view.querySelector(".obs-error")?.textContent ?? ""
  view.innerHTML = ""
  const summary = store.summary
  if (!summary) {
    view.append(el("p", { class: "empty" }, "loading campaign..."))
    return
  }
  view.append(header(store.id, summary))
  view.append(budgetBar(summary))
  view.append(sourcesCard(summary))
  view.append(incumbentCard(summary))
  view.append(suggestionPanel(store, summary, keepValue, keepCost, keepError))
  view.append(traceCard(store))
  view.append(posteriorExplorer(store, summary))
}

function header(id: string, summary: Summary): HTMLElement {
  const back = el("a", { href: "#/", class: "back" }, "all campaigns")
  return el("div", { class: "header" },
    back,
    el("h1", {}, `campaign ${id}`),
    el("p", { class: "meta" },
      `objective ${summary.objective}, status ${summary.status}, seed ${summary.seed}, ` +
      `${summary.steps_taken} steps taken`))
}

function budgetBar(summary: Summary): HTMLElement {
  const spent = summary.budget_spent
  const cap = summary.budget
  const spentTime = fmtWallTime(spent, summary.hours_per_cost)
  const card = el("div", { class: "card budget" }, el("h2", {}, "Budget"))
  if (cap !== null && cap > 0) {
    const frac = Math.min(1, spent / cap)
    const bar = el("div", { class: "bar" })
    const fill = el("div", { class: "fill" })
    fill.style.width = `${(frac * 100).toFixed(1)}%`
    bar.append(fill)
    card.append(bar)
    card.append(el("p", { class: "budget-text" },
      `${fmtCost(spent)} of ${fmtCost(cap)} cost units spent ` +
      `(about ${spentTime} of ${fmtWallTime(cap, summary.hours_per_cost)} of experiment time)`))
  } else {
    card.append(el("p", { class: "budget-text" },
      `${fmtCost(spent)} cost units spent (about ${spentTime} of experiment time), no cap`))
  }
  return card
}

function sourcesCard(summary: Summary): HTMLElement {
  const card = el("div", { class: "card sources" }, el("h2", {}, "Information sources"))
  const table = el("table", {})
  table.append(el("tr", {},
    el("th", {}, "source"), el("th", {}, "kind"), el("th", {}, "cost"), el("th", {}, "observations")))
  for (const s of summary.sources) {
    table.append(el("tr", {},
      el("td", {}, String(s.index)),
      el("td", {}, s.kind + (s.fidelity != null ? ` (fidelity ${s.fidelity})` : "")),
      el("td", {}, fmtCost(s.cost)),
      el("td", {}, String(summary.source_counts[String(s.index)] ?? 0))))
  }
  card.append(table)
  return card
}

function incumbentCard(summary: Summary): HTMLElement {
  const card = el("div", { class: "card incumbent" }, el("h2", {}, "Incumbent"))
  const best = summary.best
  if (!best) {
    card.append(el("p", { class: "empty" }, "no observations yet"))
    return card
  }
  card.append(el("p", { class: "incumbent-value" },
    `${fmtValue(best.value)} (${best.kind === "observed" ? "best observed" : "posterior estimate"})`))
  card.append(variableTable(best.x))
  return card
}

function variableTable(x: Record<string, unknown>): HTMLElement {
  const table = el("table", { class: "variables" })
  for (const [label, value, unit] of physicalRows(x)) {
    table.append(el("tr", {},
      el("td", { class: "var-label" }, label),
      el("td", { class: "var-value" }, value),
      el("td", { class: "var-unit" }, unit)))
  }
  return table
}

function suggestionPanel(
  store: CampaignStore,
  summary: Summary,
  keepValue: string,
  keepCost: string,
  keepError: string,
): HTMLElement {
  const card = el("div", { class: "card suggestion" }, el("h2", {}, "Next experiment"))
  const pending = summary.pending_suggestion
  if (!pending) {
    const btn = el("button", { class: "request-suggestion" }, "Request next suggestion")
    btn.disabled = store.suggestBusy || summary.status !== "running"
    btn.addEventListener("click", () => void store.requestSuggestion())
    card.append(el("p", {}, "no suggestion pending"), btn)
    if (summary.status !== "running") {
      card.append(el("p", { class: "empty" }, `campaign status is ${summary.status}`))
    }
    return card
  }

  card.append(el("p", { class: "pending-meta" },
    `suggestion #${pending.id} on source ${pending.source}` +
    (pending.fallback ? " (exploration fallback)" : "")))
  card.append(variableTable(pending.x))
  card.append(el("p", { class: "pred" },
    `model predicts ${fmtValue(pending.pred_mean)} ` +
    `(sd ${fmtValue(Math.sqrt(Math.max(pending.pred_var, 0)))})`))

  const form = el("div", { class: "observation-form" })
  form.append(el("h3", {}, `Record result for suggestion #${pending.id}`))
  const valueInput = el("input", { class: "obs-value", placeholder: "observed value" })
  valueInput.value = keepValue
  const costInput = el("input", { class: "obs-cost", placeholder: "actual cost (optional)" })
  costInput.value = keepCost
  const problem = el("p", { class: "obs-error" }, keepError)
  const submit = el("button", { class: "obs-submit" }, "Submit observation")
  submit.disabled = store.observeBusy
  submit.addEventListener("click", async () => {
    const message = validateObservationInput(valueInput.value, costInput.value)
    if (message) {
      problem.textContent = message
      return
    }
    problem.textContent = ""
    const cost = costInput.value.trim() === "" ? undefined : Number(costInput.value)
    const accepted = await store.submitObservation(pending.id, Number(valueInput.value), cost)
    if (accepted) {
      valueInput.value = ""
      costInput.value = ""
    }
  })
  form.append(valueInput, costInput, submit, problem)
  card.append(form)
  return card
}

function traceCard(store: CampaignStore): HTMLElement {
  const card = el("div", { class: "card trace" }, el("h2", {}, "Best so far"))
  const rows = store.history?.observations ?? []
  const points: TracePoint[] = []
  let budget = 0
  let best: number | null = null
  for (const obs of rows) {
    budget += obs.cost
    if (obs.source !== 0) continue
    if (best === null || obs.y > best) best = obs.y
    points.push({ budget, value: obs.y, best })
  }
  if (points.length === 0) {
    card.append(el("p", { class: "empty" }, "no truth-source observations yet"))
  } else {
    card.append(renderTrace(points))
  }
  return card
}

function posteriorExplorer(store: CampaignStore, summary: Summary): HTMLElement {
  const card = el("div", { class: "card posterior" }, el("h2", {}, "Posterior explorer"))
  const dim = store.posterior?.anchor.length ?? 6
  const names = axisNames(summary.objective, dim)

  const first = el("select", { class: "axis-first" })
  names.forEach((name, i) => first.append(el("option", { value: String(i) }, name)))
  const second = el("select", { class: "axis-second" })
  second.append(el("option", { value: "" }, "none"))
  names.forEach((name, i) => second.append(el("option", { value: String(i) }, name)))
  first.value = String(store.slice.axes[0] ?? 0)
  second.value = store.slice.axes.length > 1 ? String(store.slice.axes[1]) : ""

  const onAxisChange = () => {
    const axes = [Number(first.value)]
    if (second.value !== "" && Number(second.value) !== axes[0]) axes.push(Number(second.value))
    void store.selectSlice(axes)
  }
  first.addEventListener("change", onAxisChange)
  second.addEventListener("change", onAxisChange)
  card.append(el("div", { class: "axis-pick" }, "axes: ", first, " by ", second))

  if (store.posterior) {
    const slice = store.posterior
    if (slice.axes.length === 1) {
      card.append(renderPosterior1d(slice, names[slice.axes[0] ?? 0] ?? "axis"))
      card.append(el("p", { class: "band-note" }, "band is the posterior mean plus and minus two standard deviations"))
    } else {
      card.append(renderPosterior2d(slice, [
        names[slice.axes[0] ?? 0] ?? "axis",
        names[slice.axes[1] ?? 0] ?? "axis",
      ]))
    }
  } else {
    card.append(el("p", { class: "empty" },
      store.posteriorError ?? "no observations yet, the posterior appears after the first result"))
  }
  return card
}
