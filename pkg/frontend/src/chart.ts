import type { PosteriorSlice } from "./schema"
import { fmtValue } from "./format"

// Hand-rolled SVG charts. Payloads are small (grid <= 201 points), so there
// is no need for a chart library; everything below is a pixel mapping of
// numbers the server produced.

const SVG_NS = "http://www.w3.org/2000/svg"

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number>,
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag)
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, String(v))
  return el
}

interface Extent {
  lo: number
  hi: number
}

function extent(values: number[]): Extent {
  let lo = Infinity
  let hi = -Infinity
  for (const v of values) {
    if (v < lo) lo = v
    if (v > hi) hi = v
  }
  if (!Number.isFinite(lo)) return { lo: 0, hi: 1 }
  if (lo === hi) return { lo: lo - 1, hi: hi + 1 }
  return { lo, hi }
}

const scale = (e: Extent, out0: number, out1: number) => (v: number) =>
  out0 + ((v - e.lo) / (e.hi - e.lo)) * (out1 - out0)

export function renderPosterior1d(slice: PosteriorSlice, axisLabel: string): SVGSVGElement {
  const width = 560
  const height = 260
  const pad = { left: 58, right: 12, top: 12, bottom: 30 }
  const upper = slice.mean.map((m, i) => m + 2 * (slice.std[i] ?? 0))
  const lower = slice.mean.map((m, i) => m - 2 * (slice.std[i] ?? 0))
  const sx = scale({ lo: 0, hi: 1 }, pad.left, width - pad.right)
  const sy = scale(extent([...upper, ...lower]), height - pad.bottom, pad.top)

  const svg = svgEl("svg", { width, height, viewBox: `0 0 ${width} ${height}`, class: "chart" })

  const bandPoints = slice.ticks
    .map((t, i) => `${sx(t)},${sy(upper[i] ?? 0)}`)
    .concat([...slice.ticks].reverse().map((t, i) => {
      const j = slice.ticks.length - 1 - i
      return `${sx(t)},${sy(lower[j] ?? 0)}`
    }))
    .join(" ")
  svg.append(svgEl("polygon", { points: bandPoints, class: "band", fill: "#b3cde8", opacity: 0.55 }))

  const meanPoints = slice.ticks.map((t, i) => `${sx(t)},${sy(slice.mean[i] ?? 0)}`).join(" ")
  svg.append(svgEl("polyline", {
    points: meanPoints, class: "mean", fill: "none", stroke: "#1f4e79", "stroke-width": 2,
  }))

  // Highlight the grid point with the highest posterior mean.
  let peak = 0
  slice.mean.forEach((m, i) => {
    if (m > (slice.mean[peak] ?? -Infinity)) peak = i
  })
  svg.append(svgEl("circle", {
    cx: sx(slice.ticks[peak] ?? 0), cy: sy(slice.mean[peak] ?? 0),
    r: 5, class: "peak", fill: "#d9534f",
  }))

  svg.append(axisText(pad.left, height - 8, `${axisLabel} (normalized)`))
  svg.append(axisText(pad.left, pad.top + 4, `peak mean ${fmtValue(slice.mean[peak] ?? NaN)}`))
  return svg
}

export function renderPosterior2d(
  slice: PosteriorSlice,
  axisLabels: [string, string],
): SVGSVGElement {
  const n = slice.n
  const cell = Math.max(3, Math.floor(420 / n))
  const width = n * cell + 70
  const height = n * cell + 40
  const svg = svgEl("svg", { width, height, viewBox: `0 0 ${width} ${height}`, class: "chart" })
  const e = extent(slice.mean)
  const shade = (v: number) => {
    const t = (v - e.lo) / (e.hi - e.lo || 1)
    const level = Math.round(235 - t * 180)
    return `rgb(${level},${Math.round(240 - t * 120)},255)`
  }
  let peak = 0
  slice.mean.forEach((m, i) => {
    if (m > (slice.mean[peak] ?? -Infinity)) peak = i
  })
  // mean is row-major over (axes[0], axes[1]).
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const idx = i * n + j
      const rect = svgEl("rect", {
        x: 50 + i * cell, y: 10 + (n - 1 - j) * cell,
        width: cell, height: cell, fill: shade(slice.mean[idx] ?? e.lo),
      })
      if (idx === peak) {
        rect.setAttribute("stroke", "#d9534f")
        rect.setAttribute("stroke-width", "2")
        rect.classList.add("peak")
      }
      svg.append(rect)
    }
  }
  svg.append(axisText(50, height - 8, `${axisLabels[0]} horizontal, ${axisLabels[1]} vertical`))
  return svg
}

export interface TracePoint {
  budget: number
  value: number
  best: number
}

// Best-so-far trace: raw truth-source values plus the running best, both
// straight off the history payload.
export function renderTrace(points: TracePoint[]): SVGSVGElement {
  const width = 560
  const height = 180
  const pad = { left: 58, right: 12, top: 10, bottom: 26 }
  const svg = svgEl("svg", { width, height, viewBox: `0 0 ${width} ${height}`, class: "chart" })
  if (points.length === 0) return svg
  const sx = scale(extent(points.map((p) => p.budget)), pad.left, width - pad.right)
  const sy = scale(extent(points.flatMap((p) => [p.value, p.best])), height - pad.bottom, pad.top)
  svg.append(svgEl("polyline", {
    points: points.map((p) => `${sx(p.budget)},${sy(p.best)}`).join(" "),
    fill: "none", stroke: "#2e7d32", "stroke-width": 2, class: "best-line",
  }))
  for (const p of points) {
    svg.append(svgEl("circle", { cx: sx(p.budget), cy: sy(p.value), r: 3, fill: "#555" }))
  }
  svg.append(axisText(pad.left, height - 8, "budget spent (cost units)"))
  return svg
}

function axisText(x: number, y: number, label: string): SVGTextElement {
  const el = svgEl("text", { x, y, class: "axis-label", "font-size": 11, fill: "#444" })
  el.textContent = label
  return el
}
