import { canSubmit } from "./annotator.js";
import { ERROR_CATEGORIES } from "./types.js";
// Pure HTML-string views: every displayed figure comes straight off an API
// response field, so views are testable from recorded fixtures alone.
export function escapeHtml(text) {
    return text
        .replaceAll("&", "&amp;")
        .replaceAll("<", "&lt;")
        .replaceAll(">", "&gt;")
        .replaceAll('"', "&quot;");
}
function pct(fraction) {
    return `${(fraction * 100).toFixed(0)}%`;
}
function banner(message) {
    return message ? `<div class="banner" role="alert">${escapeHtml(message)}</div>` : "";
}
export function renderWorkspace(state) {
    const parts = [banner(state.message)];
    if (state.lastReceipt) {
        const r = state.lastReceipt;
        parts.push(`
      <section class="receipt" data-testid="receipt">
        <h3>Last submission</h3>
        <p>Improvement: <strong data-testid="improvement">${r.improvement_pct.toFixed(1)}%</strong></p>
        <p>Resolved: <span data-testid="resolved">${r.resolved_categories.map(escapeHtml).join(", ") || "none"}</span></p>
        <p>Remaining: <span data-testid="remaining">${r.remaining_categories.map(escapeHtml).join(", ") || "none"}</span></p>
        <p>Model version: <span data-testid="model-version">${r.new_model_version}</span></p>
      </section>`);
    }
    if (!state.sample) {
        parts.push(`<button id="fetch-next">Fetch next segment</button>`);
        return parts.join("\n");
    }
    const seg = state.sample.segment;
    const predictions = new Map(state.sample.predictions.map((p) => [p.provider_id, p]));
    const rows = seg.hypotheses
        .map((hyp) => {
        const pred = predictions.get(hyp.provider_id);
        const checked = state.selectedProvider === hyp.provider_id ? "checked" : "";
        return `
      <li>
        <label>
          <input type="radio" name="hypothesis" value="${escapeHtml(hyp.provider_id)}" ${checked}>
          <span class="provider">${escapeHtml(hyp.provider_id)}</span>
          <span class="text">${escapeHtml(hyp.text)}</span>
          ${hyp.llm_score !== null ? `<span class="score">LLM ${hyp.llm_score.toFixed(1)}</span>` : ""}
          ${pred ? `<span class="score">est. quality ${pred.quality.toFixed(1)}, confidence ${pred.confidence.toFixed(2)}</span>` : ""}
        </label>
      </li>`;
    })
        .join("\n");
    const categories = ERROR_CATEGORIES.map((category) => {
        const checked = state.selectedCategories.includes(category) ? "checked" : "";
        return `<label><input type="checkbox" name="category" value="${category}" ${checked}> ${category}</label>`;
    }).join("\n");
    parts.push(`
    <section class="segment">
      <h3>Segment <code>${escapeHtml(seg.id)}</code> (${escapeHtml(seg.source_lang)} &rarr; ${escapeHtml(seg.target_lang)})</h3>
      <p class="source" data-testid="source">${escapeHtml(seg.source_text)}</p>
      <ol class="hypotheses">${rows}</ol>
      <fieldset class="categories"><legend>Error categories</legend>${categories}</fieldset>
      <label class="post-edit">Post-edit
        <textarea id="post-edit">${escapeHtml(state.postEditDraft)}</textarea>
      </label>
      <button id="submit-annotation" ${canSubmit(state) ? "" : "disabled"}>Submit</button>
    </section>`);
    return parts.join("\n");
}
function barChart(counts, testid) {
    const entries = Object.entries(counts);
    if (entries.length === 0) {
        return `<p class="empty" data-testid="${testid}">no data</p>`;
    }
    const max = Math.max(...entries.map(([, v]) => v));
    const bars = entries
        .map(([label, value]) => `
      <div class="bar-row">
        <span class="bar-label">${escapeHtml(label)}</span>
        <span class="bar" style="width:${max ? (100 * value) / max : 0}%"></span>
        <span class="bar-value">${value}</span>
      </div>`)
        .join("\n");
    return `<div class="chart" data-testid="${testid}">${bars}</div>`;
}
export function renderDashboard(state) {
    const parts = [banner(state.message)];
    const stats = state.stats;
    parts.push(`
    <section class="threshold">
      <h3>Auto-labeling</h3>
      <label>Confidence threshold
        <input type="range" id="tau-slider" min="0" max="1" step="0.01" value="${state.sliderTau}">
        <span data-testid="tau-value">${state.sliderTau.toFixed(2)}</span>
      </label>
      <p>Auto-labelable now:
        <strong data-testid="fraction-auto">${stats ? pct(stats.fraction_auto_labelable) : "–"}</strong>
      </p>
      <button id="auto-label">Label automatically</button>
      ${state.lastAutoLabel
        ? `<p data-testid="auto-label-result">Labeled <strong data-testid="labeled-count">${state.lastAutoLabel.labeled_count}</strong> segments (${pct(state.lastAutoLabel.fraction_auto)} of pending)</p>`
        : ""}
    </section>`);
    if (!stats) {
        parts.push(`<p class="empty">Loading statistics…</p>`);
        return parts.join("\n");
    }
    parts.push(`
    <section class="counts">
      <h3>Progress</h3>
      <dl>
        <dt>Human rated</dt><dd data-testid="rated-count">${stats.rated_count}</dd>
        <dt>Pending</dt><dd data-testid="pending-count">${stats.pending_count}</dd>
        <dt>Auto-labeled</dt><dd data-testid="auto-labeled-count">${stats.auto_labeled_count}</dd>
      </dl>
    </section>`);
    const providerTables = Object.entries(stats.per_provider)
        .map(([pid, p]) => `
      <article class="provider">
        <h4>${escapeHtml(pid)}</h4>
        <p>wins <strong>${p.wins}</strong>, accepted unedited <strong>${p.no_edit_count}</strong></p>
        ${barChart(p.error_category_histogram, `provider-${pid}-categories`)}
      </article>`)
        .join("\n");
    parts.push(`<section class="providers"><h3>Providers</h3>${providerTables || "<p class='empty'>no providers yet</p>"}</section>`);
    const annotatorRows = Object.entries(stats.per_annotator)
        .map(([aid, a]) => `<tr><td>${escapeHtml(aid)}</td><td>${a.count}</td><td>${Object.entries(a.category_histogram)
        .map(([c, n]) => `${escapeHtml(c)}: ${n}`)
        .join(", ")}</td></tr>`)
        .join("\n");
    parts.push(`
    <section class="annotators">
      <h3>Annotators</h3>
      <table data-testid="annotator-table">
        <thead><tr><th>Annotator</th><th>Samples</th><th>Categories</th></tr></thead>
        <tbody>${annotatorRows || "<tr><td colspan='3'>none yet</td></tr>"}</tbody>
      </table>
    </section>`);
    if (stats.correlation) {
        const c = stats.correlation;
        parts.push(`
      <section class="correlation" data-testid="correlation">
        <h3>Teacher vs LLM agreement</h3>
        <dl>
          <dt>Spearman</dt><dd>${c.spearman.toFixed(3)}</dd>
          <dt>Pearson</dt><dd>${c.pearson.toFixed(3)}</dd>
          <dt>Kendall</dt><dd>${c.kendall.toFixed(3)}</dd>
          <dt>Samples</dt><dd>${c.n}</dd>
        </dl>
      </section>`);
    }
    if (stats.topk) {
        const rows = Object.entries(stats.topk)
            .map(([name, t]) => `<tr><td>${escapeHtml(name)}</td><td>${pct(t.top1)}</td><td>${pct(t.top3)}</td></tr>`)
            .join("\n");
        parts.push(`
      <section class="topk">
        <h3>Best-hypothesis prediction accuracy</h3>
        <table data-testid="topk-table">
          <thead><tr><th>Model</th><th>Top-1</th><th>Top-3</th></tr></thead>
          <tbody>${rows}</tbody>
        </table>
      </section>`);
    }
    parts.push(`
    <section class="histograms">
      <h3>Segments
        <label><input type="radio" name="rated" value="true" ${state.ratedFilter ? "checked" : ""}> rated</label>
        <label><input type="radio" name="rated" value="false" ${state.ratedFilter ? "" : "checked"}> unrated</label>
      </h3>
      ${state.histograms
        ? `<p data-testid="histogram-count">${state.histograms.count} segments</p>
             <h4>Length</h4>${barChart(state.histograms.length_histogram, "length-histogram")}
             <h4>Topic</h4>${barChart(state.histograms.topic_histogram, "topic-histogram")}`
        : "<p class='empty'>choose a filter</p>"}
    </section>`);
    return parts.join("\n");
}
