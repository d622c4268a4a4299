/**
 * Fixed algorithm -> style table so figures stay comparable across runs.
 * Unknown algorithms fall back to a neutral grey with a circle marker.
 */

export interface SeriesStyle {
  color: string;
  marker: "circle" | "square" | "diamond" | "triangle" | "cross" | "plus" | "star";
  dash?: string;
}

export const ALGORITHM_STYLES: Record<string, SeriesStyle> = {
  IHT: { color: "#1f77b4", marker: "circle" },
  IST: { color: "#ff7f0e", marker: "square", dash: "5,2" },
  ISF: { color: "#2ca02c", marker: "diamond" },
  AMP: { color: "#d62728", marker: "triangle" },
  TMS: { color: "#9467bd", marker: "cross", dash: "7,2" },
  IMS: { color: "#8c564b", marker: "plus" },
  IKS: { color: "#e377c2", marker: "star" },
};

export const FALLBACK_STYLE: SeriesStyle = { color: "#7f7f7f", marker: "circle" };

export function styleFor(algorithm: string): SeriesStyle {
  return ALGORITHM_STYLES[algorithm] ?? FALLBACK_STYLE;
}
