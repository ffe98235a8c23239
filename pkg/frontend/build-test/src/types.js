// Wire formats of the /api/v1 surface. Field names mirror the server's
// JSON exactly; the UI never derives numbers of its own.
export const ERROR_CATEGORIES = [
    "Accuracy",
    "Fluency",
    "Terminology",
    "LocaleConvention",
    "Style",
    "Other",
    "NoEdit",
];
