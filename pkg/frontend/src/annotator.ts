import { ApiError, MtLoopApi } from "./api.js";
import type { AnnotationBody, NextSample, Receipt } from "./types.js";

// Workspace state is a plain value; every transition returns a new object so
// rendering stays a pure function of state. No business numbers are computed
// here: receipts and predictions are displayed verbatim.

export interface WorkspaceState {
  sample: NextSample | null;
  selectedProvider: string | null;
  selectedCategories: string[];
  postEditDraft: string;
  lastReceipt: Receipt | null;
  message: string | null;
  busy: boolean;
}

export const initialWorkspace: WorkspaceState = {
  sample: null,
  selectedProvider: null,
  selectedCategories: [],
  postEditDraft: "",
  lastReceipt: null,
  message: null,
  busy: false,
};

export function sampleLoaded(state: WorkspaceState, sample: NextSample): WorkspaceState {
  return {
    ...state,
    sample,
    selectedProvider: null,
    selectedCategories: [],
    postEditDraft: "",
    message: null,
    busy: false,
  };
}

export function selectHypothesis(state: WorkspaceState, providerId: string): WorkspaceState {
  const hypothesis = state.sample?.segment.hypotheses.find(
    (h) => h.provider_id === providerId,
  );
  if (!hypothesis) {
    return state;
  }
  // the draft starts from the selected hypothesis text unless already edited
  const keepDraft =
    state.postEditDraft !== "" &&
    state.postEditDraft !==
      state.sample?.segment.hypotheses.find(
        (h) => h.provider_id === state.selectedProvider,
      )?.text;
  return {
    ...state,
    selectedProvider: providerId,
    postEditDraft: keepDraft ? state.postEditDraft : hypothesis.text,
  };
}

/** NoEdit is exclusive: selecting it clears the rest, selecting anything
 * else clears NoEdit. */
export function toggleCategory(state: WorkspaceState, category: string): WorkspaceState {
  const selected = new Set(state.selectedCategories);
  if (selected.has(category)) {
    selected.delete(category);
  } else if (category === "NoEdit") {
    return { ...state, selectedCategories: ["NoEdit"] };
  } else {
    selected.delete("NoEdit");
    selected.add(category);
  }
  return { ...state, selectedCategories: [...selected].sort() };
}

export function editDraft(state: WorkspaceState, text: string): WorkspaceState {
  return { ...state, postEditDraft: text };
}

export function canSubmit(state: WorkspaceState): boolean {
  return state.sample !== null && state.selectedProvider !== null && !state.busy;
}

export function annotationBody(state: WorkspaceState, annotator: string): AnnotationBody {
  if (!state.sample || !state.selectedProvider) {
    throw new Error("nothing selected");
  }
  const chosen = state.sample.segment.hypotheses.find(
    (h) => h.provider_id === state.selectedProvider,
  )!;
  const noEdit = state.selectedCategories.includes("NoEdit");
  const edited = state.postEditDraft !== "" && state.postEditDraft !== chosen.text;
  return {
    segment_id: state.sample.segment.id,
    annotator_id: annotator,
    chosen_provider_id: state.selectedProvider,
    error_categories: state.selectedCategories,
    post_edit_text: noEdit || !edited ? null : state.postEditDraft,
  };
}

export function receiptReceived(state: WorkspaceState, receipt: Receipt): WorkspaceState {
  return {
    ...state,
    sample: null,
    selectedProvider: null,
    selectedCategories: [],
    postEditDraft: "",
    lastReceipt: receipt,
    message: null,
    busy: false,
  };
}

/** Non-destructive notice: the draft and selections stay untouched. */
export function flowMessage(state: WorkspaceState, message: string): WorkspaceState {
  return { ...state, message, busy: false };
}

// -- async flow glue ---------------------------------------------------

export async function fetchNext(
  api: MtLoopApi,
  annotator: string,
  state: WorkspaceState,
  strategy?: string,
): Promise<WorkspaceState> {
  try {
    const sample = await api.nextSegment(annotator, strategy);
    if (sample === null) {
      return flowMessage(state, "No segments waiting for annotation.");
    }
    return sampleLoaded(state, sample);
  } catch (error) {
    return flowMessage(state, describeError(error));
  }
}

export async function submit(
  api: MtLoopApi,
  annotator: string,
  state: WorkspaceState,
): Promise<WorkspaceState> {
  if (!canSubmit(state)) {
    return flowMessage(state, "Select a hypothesis before submitting.");
  }
  try {
    const receipt = await api.submitAnnotation(annotationBody(state, annotator));
    return receiptReceived(state, receipt);
  } catch (error) {
    return flowMessage(state, describeError(error));
  }
}

export function describeError(error: unknown): string {
  if (error instanceof ApiError) {
    if (error.code === "lease_expired") {
      return "Your lease on this segment expired; your draft is preserved. Fetch it again to continue.";
    }
    if (error.code === "pool_empty") {
      return "No segments waiting for annotation.";
    }
    return `${error.code}: ${error.message}`;
  }
  return String(error);
}
