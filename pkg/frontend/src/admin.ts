import { MtLoopApi } from "./api.js";
import { describeError } from "./annotator.js";
import type { AdminStats, AutoLabelResult, SegmentHistograms } from "./types.js";

export interface DashboardState {
  sliderTau: number;
  stats: AdminStats | null;
  lastAutoLabel: AutoLabelResult | null;
  ratedFilter: boolean;
  histograms: SegmentHistograms | null;
  message: string | null;
}

export const initialDashboard: DashboardState = {
  sliderTau: 0.9,
  stats: null,
  lastAutoLabel: null,
  ratedFilter: true,
  histograms: null,
  message: null,
};

export function sliderMoved(state: DashboardState, tau: number): DashboardState {
  return { ...state, sliderTau: Math.min(1, Math.max(0, tau)) };
}

export function statsLoaded(state: DashboardState, stats: AdminStats): DashboardState {
  return { ...state, stats, message: null };
}

export function autoLabeled(state: DashboardState, result: AutoLabelResult): DashboardState {
  return { ...state, lastAutoLabel: result };
}

export function histogramsLoaded(
  state: DashboardState,
  rated: boolean,
  histograms: SegmentHistograms,
): DashboardState {
  return { ...state, ratedFilter: rated, histograms };
}

// -- async flow glue ---------------------------------------------------

export async function refreshStats(
  api: MtLoopApi,
  state: DashboardState,
): Promise<DashboardState> {
  try {
    return statsLoaded(state, await api.stats());
  } catch (error) {
    return { ...state, message: describeError(error) };
  }
}

/** Slider commit: PUT the threshold, then refetch stats so the displayed
 * auto-labelable fraction is the server's, never a local computation. */
export async function applyThreshold(
  api: MtLoopApi,
  state: DashboardState,
  tau: number,
): Promise<DashboardState> {
  const moved = sliderMoved(state, tau);
  try {
    await api.setThreshold(moved.sliderTau);
    return statsLoaded(moved, await api.stats());
  } catch (error) {
    return { ...moved, message: describeError(error) };
  }
}

export async function runAutoLabel(
  api: MtLoopApi,
  state: DashboardState,
): Promise<DashboardState> {
  try {
    const result = await api.autoLabel();
    return statsLoaded(autoLabeled(state, result), await api.stats());
  } catch (error) {
    return { ...state, message: describeError(error) };
  }
}

export async function applyRatedFilter(
  api: MtLoopApi,
  state: DashboardState,
  rated: boolean,
): Promise<DashboardState> {
  try {
    return histogramsLoaded(state, rated, await api.segmentHistograms(rated));
  } catch (error) {
    return { ...state, message: describeError(error) };
  }
}
