#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sftkit {

enum class SourceCategory { Specialized, WikiData, RelatedField, General };
enum class CpaSubject {
    Accounting,
    Auditing,
    StrategyAndRisk,
    TaxLaws,
    EconomicLaws,
    FinancialAndCostManagement,
    Others,
};

const char* to_string(SourceCategory c);
const char* to_string(CpaSubject s);
std::optional<SourceCategory> category_from_string(const std::string& s);
std::optional<CpaSubject> subject_from_string(const std::string& s);

constexpr CpaSubject kAllSubjects[] = {
    CpaSubject::Accounting,
    CpaSubject::Auditing,
    CpaSubject::StrategyAndRisk,
    CpaSubject::TaxLaws,
    CpaSubject::EconomicLaws,
    CpaSubject::FinancialAndCostManagement,
    CpaSubject::Others,
};
constexpr SourceCategory kAllCategories[] = {
    SourceCategory::Specialized,
    SourceCategory::WikiData,
    SourceCategory::RelatedField,
    SourceCategory::General,
};

struct RawDocument {
    std::string id;
    std::string source_uri;
    SourceCategory category = SourceCategory::Specialized;
    CpaSubject subject = CpaSubject::Others;
    std::string text;
    std::uint64_t byte_size = 0;  // UTF-8 encoded length of text
    bool expert_validated = false;

    static RawDocument make(std::string id, std::string source_uri,
                            SourceCategory cat, CpaSubject subj, std::string text);
};

struct CleanReport {
    std::size_t docs_in = 0;
    std::size_t docs_out = 0;
    std::size_t exact_dupes_removed = 0;
    std::size_t near_dupes_removed = 0;
    std::size_t pii_redactions = 0;
    std::size_t chars_removed = 0;
};

struct IngestError {
    std::string path;
    std::string reason;
};

struct IngestResult {
    std::vector<RawDocument> documents;
    std::vector<IngestError> errors;
};

// PII redaction rules. Patterns are fixed and documented here:
//   - email addresses            -> [EMAIL]
//   - long digit runs (>= 15)    -> [ID]     (national-ID-shaped)
//   - phone numbers (CN mobile 1[3-9]xxxxxxxxx, and 7+ digit runs with
//     separators like 021-1234-5678 / +86 ...) -> [PHONE]
// Longer patterns are applied first so an ID run is not eaten piecewise
// by the phone rule.
struct CleanRules {
    bool redact_email = true;
    bool redact_phone = true;
    bool redact_id_runs = true;
    std::size_t id_run_min_digits = 15;
    // Extension point: extra (regex, placeholder) pairs applied after the
    // built-in set.
    std::vector<std::pair<std::string, std::string>> extra_patterns;
};

// Walks `path` (sorted, recursive). Plain files become one document each;
// *.jsonl / *.ndjson files yield one document per line-record
// ({"text":..., "category":..., "subject":...}, category/subject falling
// back to the arguments). Ids are relative paths, plus ":<line>" for
// record files. Files that are not valid UTF-8 are reported and skipped.
IngestResult ingest_directory(const std::filesystem::path& path,
                              SourceCategory category, CpaSubject subject);

// Canonicalizes the text (CRLF/CR -> LF, NBSP and ideographic space ->
// space, C0/C1 controls stripped except \n and \t, space/tab runs
// collapsed, blank-run trimming) and replaces PII spans with placeholder
// tokens. Returns the cleaned document and the number of redacted spans.
// Total: a document may clean to empty text; callers flag that case.
std::pair<RawDocument, std::size_t> clean_document(const RawDocument& doc,
                                                   const CleanRules& rules);

// Exact-duplicate pass (identical text) then near-duplicate pass:
// character 5-gram Jaccard >= threshold clusters documents (transitive);
// the earliest document of each cluster survives, in input order.
std::pair<std::vector<RawDocument>, CleanReport> dedup_corpus(
    const std::vector<RawDocument>& docs, double jaccard_threshold);

struct CorpusBucket {
    SourceCategory category;
    CpaSubject subject;
    std::size_t doc_count = 0;
    std::uint64_t byte_total = 0;
};

// Per (category, subject) counts and byte totals, ordered by category
// then subject. Buckets with zero documents are omitted.
std::vector<CorpusBucket> corpus_stats(const std::vector<RawDocument>& docs);

}  // namespace sftkit
