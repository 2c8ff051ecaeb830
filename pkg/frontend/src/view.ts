/** Pure HTML rendering of the view state. No DOM access and no arithmetic
 * beyond bar scaling: every printed number is a formatted payload field. */

import { barPercent, escapeHtml, fmt2 } from "./format.js";
import type { ViewState } from "./state.js";
import type { RiskEntry, Snapshot } from "./types.js";
import { CATEGORY_ORDER, CATEGORY_TITLES } from "./types.js";

export function renderApp(state: ViewState): string {
  if (state.phase === "loading") {
    return `<main class="screen"><p>Loading analysis…</p></main>`;
  }
  if (state.phase === "unreachable" || state.snapshot === null) {
    return `
      <main class="screen error-screen">
        <h1>Service unreachable</h1>
        <p>The what-if service did not answer. Check that it is running, then retry.</p>
        <button data-action="retry">Retry</button>
      </main>`;
  }
  const snapshot = state.snapshot;
  return `
    <header>
      <h1>${escapeHtml(snapshot.model)} risk console</h1>
      ${renderPortfolioSummary(snapshot)}
    </header>
    ${renderBanner(state)}
    <main class="columns">
      <section class="risk-board">${renderRiskBoard(state)}</section>
      <aside class="side">
        ${renderCountermeasures(state)}
        ${renderOptimizer(state)}
        ${renderObjectives(snapshot)}
      </aside>
    </main>`;
}

function renderBanner(state: ViewState): string {
  if (state.banner === null) {
    return "";
  }
  const classes = state.banner.kind === "infeasible" ? "banner infeasible" : "banner error";
  const details =
    state.banner.uncoverable.length > 0
      ? `<ul>${state.banner.uncoverable
          .map((name) => `<li>${escapeHtml(name)}</li>`)
          .join("")}</ul>`
      : "";
  return `<div class="${classes}" role="alert">${escapeHtml(state.banner.message)}${details}</div>`;
}

export function renderRiskBoard(state: ViewState): string {
  const snapshot = state.snapshot;
  if (snapshot === null) {
    return "";
  }
  if (snapshot.risks.length === 0) {
    return `<p class="empty">No risks in this analysis.</p>`;
  }
  const scale = Math.max(...snapshot.risks.map((r) => r.criticality));
  const groups = CATEGORY_ORDER.filter((tag) =>
    snapshot.risks.some((r) => r.category === tag),
  );
  return groups
    .map((tag) => {
      const risks = snapshot.risks.filter((r) => r.category === tag);
      const rows = risks.map((risk) => renderRiskRow(risk, scale, state)).join("");
      return `
        <section class="category-group" data-category="${tag}">
          <h2>${tag} · ${escapeHtml(CATEGORY_TITLES[tag] ?? tag)} <span class="count">${risks.length}</span></h2>
          ${rows}
        </section>`;
    })
    .join("");
}

function renderRiskRow(risk: RiskEntry, scale: number, state: ViewState): string {
  const threshold = parseThreshold(state.thresholdInput);
  const uncovered = threshold !== null && risk.crr < threshold;
  const highlighted = state.banner?.uncoverable.includes(risk.name) ?? false;
  const classes = ["risk-row"];
  if (uncovered) {
    classes.push("uncovered");
  }
  if (highlighted) {
    classes.push("highlighted");
  }
  return `
    <article class="${classes.join(" ")}" data-risk="${escapeHtml(risk.name)}">
      <div class="risk-head">
        <span class="risk-name">${escapeHtml(risk.name)}</span>
        <span class="risk-asset">${escapeHtml(risk.asset)}</span>
        ${uncovered ? `<span class="flag" title="combined risk reduction below threshold">uncovered</span>` : ""}
      </div>
      <div class="bars">
        <div class="bar criticality" style="width: ${barPercent(risk.criticality, scale)}%"></div>
        <div class="bar residual" style="width: ${barPercent(risk.residual, scale)}%"></div>
      </div>
      <div class="risk-numbers">
        <span>criticality <b data-field="criticality">${fmt2(risk.criticality)}</b></span>
        <span>residual <b data-field="residual">${fmt2(risk.residual)}</b></span>
        <span>CRR <b data-field="crr">${fmt2(risk.crr)}</b></span>
        <span>likelihood <b data-field="likelihood">${fmt2(risk.likelihood)}</b></span>
      </div>
    </article>`;
}

export function renderObjectives(snapshot: Snapshot): string {
  if (snapshot.objectives.length === 0) {
    return "";
  }
  const scale = Math.max(...snapshot.objectives.map((o) => o.loss));
  const rows = snapshot.objectives
    .map(
      (objective) => `
      <li data-objective="${escapeHtml(objective.name)}">
        <span class="objective-name">${escapeHtml(objective.name)}</span>
        <div class="bars"><div class="bar loss" style="width: ${barPercent(objective.loss, scale)}%"></div></div>
        <span class="objective-numbers">
          loss <b data-field="loss">${fmt2(objective.loss)}</b>
          · weight <b data-field="weight">${fmt2(objective.weight)}</b>
        </span>
      </li>`,
    )
    .join("");
  return `<section class="objectives"><h2>Objectives</h2><ul>${rows}</ul></section>`;
}

export function renderCountermeasures(state: ViewState): string {
  const snapshot = state.snapshot;
  if (snapshot === null) {
    return "";
  }
  const rows = snapshot.countermeasures
    .map(
      (cm) => `
      <li>
        <label>
          <input type="checkbox" data-toggle="${escapeHtml(cm.name)}"
            ${cm.selected ? "checked" : ""} ${state.busy ? "disabled" : ""}>
          <span class="cm-name">${escapeHtml(cm.name)}</span>
        </label>
        <span class="cm-numbers">
          OE <b data-field="oe">${fmt2(cm.oe)}</b> · cost <b data-field="cost">${fmt2(cm.cost)}</b>
        </span>
      </li>`,
    )
    .join("");
  return `<section class="countermeasures"><h2>Countermeasures</h2><ul>${rows}</ul></section>`;
}

function renderPortfolioSummary(snapshot: Snapshot): string {
  return `
    <div class="summary">
      <span>total cost <b data-field="totalCost">${fmt2(snapshot.portfolio.totalCost)}</b></span>
      <span>total residual <b data-field="totalResidual">${fmt2(snapshot.portfolio.totalResidual)}</b></span>
      <span>${snapshot.selection.length} of ${snapshot.countermeasures.length} selected</span>
    </div>`;
}

export function renderOptimizer(state: ViewState): string {
  return `
    <section class="optimizer">
      <h2>Optimizer</h2>
      <label>threshold
        <input type="text" inputmode="decimal" data-input="threshold"
          value="${escapeHtml(state.thresholdInput)}" ${state.busy ? "disabled" : ""}>
      </label>
      <label>cutoff
        <input type="text" inputmode="decimal" data-input="cutoff"
          value="${escapeHtml(state.cutoffInput)}" ${state.busy ? "disabled" : ""}>
      </label>
      <button data-action="optimize" ${state.busy ? "disabled" : ""}>
        Find cost-minimal portfolio
      </button>
    </section>`;
}

export function parseThreshold(text: string): number | null {
  const value = Number(text);
  return Number.isFinite(value) && value >= 0 && value <= 1 ? value : null;
}

export function parseCutoff(text: string): number | null {
  const value = Number(text);
  return Number.isFinite(value) && value >= 0 ? value : null;
}
