import { ApiClient } from "./api"
import { API_BASE, POLL_INTERVAL_MS } from "./config"
import { CampaignStore } from "./state"
import { renderCampaign, renderCampaignList, toast } from "./views"
import "./style.css"

const api = new ApiClient(API_BASE)
let activeStore: CampaignStore | null = null

function mount(): { view: HTMLElement } {
  const app = document.getElementById("app")
  if (!app) throw new Error("#app missing from the page")
  app.innerHTML = ""
  const view = document.createElement("div")
  view.className = "view"
  const toasts = document.createElement("div")
  toasts.className = "toasts"
  app.append(view, toasts)
  return { view }
}

function navigate(hash: string): void {
  if (location.hash === hash) route()
  else location.hash = hash
}

function route(): void {
  const { view } = mount()
  activeStore?.stopPolling()
  activeStore = null
  const match = /^#\/c\/(.+)$/.exec(location.hash)
  if (!match || match[1] === undefined) {
    void renderCampaignList(view, api, navigate)
    return
  }
  const store = new CampaignStore(api, match[1])
  activeStore = store
  store.onChange = () => renderCampaign(view, store)
  store.onToast = toast
  renderCampaign(view, store)
  void store.refresh()
  store.startPolling(POLL_INTERVAL_MS)
}

window.addEventListener("hashchange", route)
route()
