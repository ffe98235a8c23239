import { describeError } from "./annotator.js";
export const initialDashboard = {
    sliderTau: 0.9,
    stats: null,
    lastAutoLabel: null,
    ratedFilter: true,
    histograms: null,
    message: null,
};
export function sliderMoved(state, tau) {
    return { ...state, sliderTau: Math.min(1, Math.max(0, tau)) };
}
export function statsLoaded(state, stats) {
    return { ...state, stats, message: null };
}
export function autoLabeled(state, result) {
    return { ...state, lastAutoLabel: result };
}
export function histogramsLoaded(state, rated, histograms) {
    return { ...state, ratedFilter: rated, histograms };
}
// -- async flow glue ---------------------------------------------------
export async function refreshStats(api, state) {
    try {
        return statsLoaded(state, await api.stats());
    }
    catch (error) {
        return { ...state, message: describeError(error) };
    }
}
/** Slider commit: PUT the threshold, then refetch stats so the displayed
 * auto-labelable fraction is the server's, never a local computation. */
export async function applyThreshold(api, state, tau) {
    const moved = sliderMoved(state, tau);
    try {
        await api.setThreshold(moved.sliderTau);
        return statsLoaded(moved, await api.stats());
    }
    catch (error) {
        return { ...moved, message: describeError(error) };
    }
}
export async function runAutoLabel(api, state) {
    try {
        const result = await api.autoLabel();
        return statsLoaded(autoLabeled(state, result), await api.stats());
    }
    catch (error) {
        return { ...state, message: describeError(error) };
    }
}
export async function applyRatedFilter(api, state, rated) {
    try {
        return histogramsLoaded(state, rated, await api.segmentHistograms(rated));
    }
    catch (error) {
        return { ...state, message: describeError(error) };
    }
}
