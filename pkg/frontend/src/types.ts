/** Wire types of the what-if service JSON API, consumed verbatim. */

export interface ObjectiveEntry {
  name: string;
  importance: number;
  weight: number;
  loss: number;
}

export interface RiskEntry {
  name: string;
  category: string;
  asset: string;
  likelihood: number;
  criticality: number;
  crr: number;
  residual: number;
}

export interface CountermeasureEntry {
  name: string;
  cost: number;
  oe: number;
  selected: boolean;
}

export interface PortfolioSummary {
  totalCost: number;
  totalResidual: number;
  feasible: boolean;
}

export interface Snapshot {
  model: string;
  objectives: ObjectiveEntry[];
  risks: RiskEntry[];
  countermeasures: CountermeasureEntry[];
  selection: string[];
  portfolio: PortfolioSummary;
}

export interface InfeasiblePayload {
  error: "infeasible";
  threshold: number;
  uncoverable: string[];
}

export const CATEGORY_TITLES: Record<string, string> = {
  S: "Spoofing",
  T: "Tampering",
  R: "Repudiation",
  I: "Information Disclosure",
  D: "Denial of Service",
  E: "Elevation of Privilege",
};

export const CATEGORY_ORDER = ["S", "T", "R", "I", "D", "E"];
