// Recorded responses from the live service (mock providers), frozen so
// views and flows are testable with no server at all.
const recorded = {
    "annotators": {
        "annotators": {
            "alice": {
                "category_histogram": {
                    "Accuracy": 1
                },
                "count": 1
            },
            "pseudo": {
                "category_histogram": {
                    "NoEdit": 1
                },
                "count": 1
            }
        }
    },
    "auto_label": {
        "fraction_auto": 1.0,
        "labeled_count": 1
    },
    "auto_label_again": {
        "fraction_auto": 0.0,
        "labeled_count": 0
    },
    "histograms_rated": {
        "count": 2,
        "length_histogram": {
            "0-9": 2
        },
        "topic_histogram": {
            "news": 2
        }
    },
    "next_sample": {
        "lease_expires_at": 1900.0,
        "llm": {
            "max_llm_score": 40.0
        },
        "predictions": [
            {
                "confidence": 0.5,
                "model_version": 0,
                "provider_id": "mt-0",
                "quality": 0.0,
                "ter_estimate": 0.0
            },
            {
                "confidence": 0.5,
                "model_version": 0,
                "provider_id": "mt-1",
                "quality": 0.0,
                "ter_estimate": 0.0
            }
        ],
        "segment": {
            "hypotheses": [
                {
                    "llm_score": 40.0,
                    "predicted_quality": null,
                    "predicted_ter": null,
                    "provider_id": "mt-0",
                    "teacher_score": null,
                    "text": "s2 guess a"
                },
                {
                    "llm_score": 10.0,
                    "predicted_quality": null,
                    "predicted_ter": null,
                    "provider_id": "mt-1",
                    "teacher_score": null,
                    "text": "s2 guess b"
                }
            ],
            "id": "s2",
            "source_lang": "en",
            "source_text": "src two",
            "status": "Prioritized",
            "target_lang": "de",
            "topic": "news"
        }
    },
    "pool_empty_status": 204,
    "receipt": {
        "improvement_pct": 150.0,
        "new_model_version": 2,
        "remaining_categories": [],
        "resolved_categories": [
            "Accuracy"
        ]
    },
    "stats": {
        "auto_labeled_count": 0,
        "correlation": null,
        "fraction_auto_labelable": 0.0,
        "pending_count": 1,
        "per_annotator": {
            "alice": {
                "category_histogram": {
                    "Accuracy": 1
                },
                "count": 1
            }
        },
        "per_provider": {
            "mt-0": {
                "error_category_histogram": {
                    "Accuracy": 1
                },
                "no_edit_count": 0,
                "wins": 1
            },
            "mt-1": {
                "error_category_histogram": {},
                "no_edit_count": 0,
                "wins": 0
            }
        },
        "rated_count": 1,
        "topk": {
            "llm": {
                "top1": 1.0,
                "top3": 1.0
            },
            "ranker": {
                "top1": 1.0,
                "top3": 1.0
            }
        }
    },
    "stats_after": {
        "auto_labeled_count": 1,
        "correlation": null,
        "fraction_auto_labelable": 0.0,
        "pending_count": 0,
        "per_annotator": {
            "alice": {
                "category_histogram": {
                    "Accuracy": 1
                },
                "count": 1
            },
            "pseudo": {
                "category_histogram": {
                    "NoEdit": 1
                },
                "count": 1
            }
        },
        "per_provider": {
            "mt-0": {
                "error_category_histogram": {
                    "Accuracy": 1
                },
                "no_edit_count": 0,
                "wins": 1
            },
            "mt-1": {
                "error_category_histogram": {},
                "no_edit_count": 0,
                "wins": 0
            }
        },
        "rated_count": 1,
        "topk": {
            "llm": {
                "top1": 1.0,
                "top3": 1.0
            },
            "ranker": {
                "top1": 1.0,
                "top3": 1.0
            }
        }
    },
    "threshold_ack": {
        "tau": 0.5
    }
};
export const nextSampleFixture = recorded.next_sample;
export const receiptFixture = recorded.receipt;
export const statsFixture = recorded.stats;
export const statsAfterFixture = recorded.stats_after;
export const autoLabelFixture = recorded.auto_label;
export const autoLabelAgainFixture = recorded.auto_label_again;
export const histogramsFixture = recorded.histograms_rated;
