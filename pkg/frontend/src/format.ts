// Display-only helpers. Objective values pass through untouched except for
// decimal formatting; the one numeric transform here is cost -> wall time,
// using the config-provided hours-per-cost factor.

export const VARIABLE_UNITS: Record<string, string> = {
  c_x: "g/L",
  p: "Pa",
  y_co: "mol frac",
  y_h2: "mol frac",
  y_co2: "mol frac",
  d_b: "m",
  n_gs: "mol/s",
}

export const VARIABLE_LABELS: Record<string, string> = {
  c_x: "biomass conc.",
  p: "pressure",
  y_co: "CO fraction",
  y_h2: "H2 fraction",
  y_co2: "CO2 fraction",
  d_b: "bubble diameter",
  n_gs: "gas flow",
}

export function axisNames(objective: string, dim: number): string[] {
  if (objective === "syngas") return ["c_x", "p", "y_co", "y_h2", "d_b", "n_gs"]
  return Array.from({ length: dim }, (_, i) => `x${i}`)
}

export function fmtValue(v: number): string {
  if (!Number.isFinite(v)) return String(v)
  if (v === 0) return "0"
  const magnitude = Math.abs(v)
  if (magnitude >= 1e5 || magnitude < 1e-3) return v.toExponential(4)
  return v.toPrecision(5)
}

export function fmtCost(v: number): string {
  return fmtValue(v)
}

// Estimated wall time for a given spend in cost units.
export function fmtWallTime(costUnits: number, hoursPerCost: number): string {
  const hours = costUnits * hoursPerCost
  if (!Number.isFinite(hours)) return "n/a"
  if (hours < 1) return `${Math.round(hours * 60)} min`
  if (hours < 72) return `${hours.toFixed(1)} h`
  return `${(hours / 24).toFixed(1)} d`
}

// Operating variables for the suggestion panel: the physical dict as
// (label, value, unit) rows in a stable order. Vector-valued entries (the
// benchmark domain reports {"x": [...]}) expand to one row per component.
export function physicalRows(x: Record<string, unknown>): Array<[string, string, string]> {
  const order = ["c_x", "p", "y_co", "y_h2", "y_co2", "d_b", "n_gs"]
  const keys = [...order.filter((k) => k in x), ...Object.keys(x).filter((k) => !order.includes(k))]
  const rows: Array<[string, string, string]> = []
  for (const key of keys) {
    const value = x[key]
    if (typeof value === "number") {
      rows.push([VARIABLE_LABELS[key] ?? key, fmtValue(value), VARIABLE_UNITS[key] ?? ""])
    } else if (Array.isArray(value)) {
      value.forEach((component, i) => {
        if (typeof component === "number") rows.push([`${key}${i}`, fmtValue(component), ""])
      })
    }
  }
  return rows
}

// Client-side checks for the observation form. Returns an error message or
// null; nothing is sent while this is non-null.
export function validateObservationInput(value: string, cost: string): string | null {
  const v = Number(value)
  if (value.trim() === "" || !Number.isFinite(v)) {
    return "observed value must be a finite number"
  }
  if (cost.trim() !== "") {
    const c = Number(cost)
    if (!Number.isFinite(c) || c <= 0) return "cost must be a positive number"
  }
  return null
}
