// Wire formats of the /api/v1 surface. Field names mirror the server's
// JSON exactly; the UI never derives numbers of its own.

export interface HypothesisDto {
  provider_id: string;
  text: string;
  teacher_score: number | null;
  llm_score: number | null;
  predicted_quality: number | null;
  predicted_ter: number | null;
}

export interface SegmentDto {
  id: string;
  source_text: string;
  source_lang: string;
  target_lang: string;
  hypotheses: HypothesisDto[];
  status: string;
  topic: string | null;
}

export interface PredictionDto {
  provider_id: string;
  quality: number;
  ter_estimate: number;
  confidence: number;
  model_version: number;
}

export interface NextSample {
  segment: SegmentDto;
  predictions: PredictionDto[];
  llm: { max_llm_score: number | null };
  lease_expires_at: number;
}

export interface Receipt {
  improvement_pct: number;
  resolved_categories: string[];
  remaining_categories: string[];
  new_model_version: number;
}

export interface AnnotationBody {
  segment_id: string;
  annotator_id: string;
  chosen_provider_id: string;
  error_categories: string[];
  post_edit_text: string | null;
}

export interface ProviderStats {
  wins: number;
  no_edit_count: number;
  error_category_histogram: Record<string, number>;
}

export interface AnnotatorStats {
  count: number;
  category_histogram: Record<string, number>;
}

export interface CorrelationDto {
  spearman: number;
  pearson: number;
  kendall: number;
  n: number;
}

export interface AdminStats {
  rated_count: number;
  pending_count: number;
  auto_labeled_count: number;
  fraction_auto_labelable: number;
  per_provider: Record<string, ProviderStats>;
  per_annotator: Record<string, AnnotatorStats>;
  correlation: CorrelationDto | null;
  topk: Record<string, { top1: number; top3: number }> | null;
}

export interface AutoLabelResult {
  labeled_count: number;
  fraction_auto: number;
}

export interface SegmentHistograms {
  count: number;
  length_histogram: Record<string, number>;
  topic_histogram: Record<string, number>;
}

export const ERROR_CATEGORIES = [
  "Accuracy",
  "Fluency",
  "Terminology",
  "LocaleConvention",
  "Style",
  "Other",
  "NoEdit",
] as const;

export type ErrorCategory = (typeof ERROR_CATEGORIES)[number];
