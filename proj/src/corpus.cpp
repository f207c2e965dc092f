#include "sftkit/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <numeric>
#include <regex>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sftkit/text.hpp"

namespace sftkit {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(SourceCategory c) {
    switch (c) {
        case SourceCategory::Specialized: return "specialized";
        case SourceCategory::WikiData: return "wiki_data";
        case SourceCategory::RelatedField: return "related_field";
        case SourceCategory::General: return "general";
    }
    return "specialized";
}

const char* to_string(CpaSubject s) {
    switch (s) {
        case CpaSubject::Accounting: return "accounting";
        case CpaSubject::Auditing: return "auditing";
        case CpaSubject::StrategyAndRisk: return "strategy_and_risk";
        case CpaSubject::TaxLaws: return "tax_laws";
        case CpaSubject::EconomicLaws: return "economic_laws";
        case CpaSubject::FinancialAndCostManagement: return "financial_and_cost_management";
        case CpaSubject::Others: return "others";
    }
    return "others";
}

std::optional<SourceCategory> category_from_string(const std::string& s) {
    for (auto c : kAllCategories) {
        if (s == to_string(c)) return c;
    }
    return std::nullopt;
}

std::optional<CpaSubject> subject_from_string(const std::string& s) {
    for (auto subj : kAllSubjects) {
        if (s == to_string(subj)) return subj;
    }
    return std::nullopt;
}

RawDocument RawDocument::make(std::string id, std::string source_uri,
                              SourceCategory cat, CpaSubject subj, std::string text) {
    RawDocument d;
    d.id = std::move(id);
    d.source_uri = std::move(source_uri);
    d.category = cat;
    d.subject = subj;
    d.text = std::move(text);
    d.byte_size = d.text.size();
    return d;
}

namespace {

bool is_record_file(const fs::path& p) {
    const auto ext = p.extension().string();
    return ext == ".jsonl" || ext == ".ndjson";
}

std::optional<std::string> read_file(const fs::path& p, std::string& error) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        error = "unreadable";
        return std::nullopt;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

IngestResult ingest_directory(const fs::path& path, SourceCategory category,
                              CpaSubject subject) {
    IngestResult result;
    if (!fs::exists(path) || !fs::is_directory(path)) {
        result.errors.push_back({path.string(), "path does not exist or is not a directory"});
        return result;
    }

    // Directory iteration order is unspecified; sort for stable ids and
    // reproducible output.
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(path)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    for (const auto& file : files) {
        const std::string rel = fs::relative(file, path).generic_string();
        std::string error;
        auto content = read_file(file, error);
        if (!content) {
            result.errors.push_back({rel, error});
            continue;
        }
        if (!text::is_valid_utf8(*content)) {
            result.errors.push_back({rel, "invalid UTF-8"});
            continue;
        }
        if (is_record_file(file)) {
            std::istringstream lines(*content);
            std::string line;
            std::size_t lineno = 0;
            while (std::getline(lines, line)) {
                ++lineno;
                if (line.empty()) continue;
                json obj = json::parse(line, nullptr, false);
                if (obj.is_discarded() || !obj.is_object() || !obj.contains("text") ||
                    !obj["text"].is_string()) {
                    result.errors.push_back(
                        {rel, "line " + std::to_string(lineno) + ": not a {\"text\":...} record"});
                    continue;
                }
                auto cat = category;
                auto subj = subject;
                if (obj.contains("category") && obj["category"].is_string()) {
                    if (auto c = category_from_string(obj["category"].get<std::string>())) cat = *c;
                }
                if (obj.contains("subject") && obj["subject"].is_string()) {
                    if (auto s = subject_from_string(obj["subject"].get<std::string>())) subj = *s;
                }
                result.documents.push_back(RawDocument::make(
                    rel + ":" + std::to_string(lineno), file.generic_string(), cat, subj,
                    obj["text"].get<std::string>()));
            }
        } else {
            result.documents.push_back(RawDocument::make(
                rel, file.generic_string(), category, subject, std::move(*content)));
        }
    }
    return result;
}

namespace {

// Codepoint-level canonicalization. Returns the normalized text.
std::string normalize_text(const std::string& raw) {
    std::vector<char32_t> cps;
    text::decode_utf8(raw, cps);

    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    bool at_line_start = true;
    int pending_newlines = 0;
    bool emitted_any = false;

    auto emit = [&](char32_t cp) {
        if (pending_newlines > 0 && emitted_any) {
            // Collapse blank-line runs to at most one blank line.
            out.append(pending_newlines > 1 ? "\n\n" : "\n");
        }
        pending_newlines = 0;
        if (pending_space && !at_line_start) out.push_back(' ');
        pending_space = false;
        text::append_utf8(out, cp);
        emitted_any = true;
        at_line_start = false;
    };

    for (std::size_t i = 0; i < cps.size(); ++i) {
        char32_t cp = cps[i];
        if (cp == U'\r') {
            if (i + 1 < cps.size() && cps[i + 1] == U'\n') continue;  // CRLF -> LF
            cp = U'\n';
        }
        if (cp == 0x00A0u || cp == 0x3000u) cp = U' ';
        if (cp == U'\n') {
            ++pending_newlines;
            pending_space = false;
            at_line_start = true;
            continue;
        }
        if (cp == U' ' || cp == U'\t') {
            pending_space = true;
            continue;
        }
        // Strip remaining C0/C1 controls and zero-width characters.
        if (cp < 0x20u || (cp >= 0x7Fu && cp <= 0x9Fu) || cp == 0xFEFFu ||
            (cp >= 0x200Bu && cp <= 0x200Fu)) {
            continue;
        }
        emit(cp);
    }
    return out;
}

std::size_t redact_all(std::string& s, const std::regex& re, const std::string& placeholder) {
    std::string out;
    std::size_t count = 0;
    auto begin = std::sregex_iterator(s.begin(), s.end(), re);
    auto end = std::sregex_iterator();
    std::size_t last = 0;
    for (auto it = begin; it != end; ++it) {
        out.append(s, last, static_cast<std::size_t>(it->position()) - last);
        out.append(placeholder);
        last = static_cast<std::size_t>(it->position() + it->length());
        ++count;
    }
    if (count == 0) return 0;
    out.append(s, last, std::string::npos);
    s = std::move(out);
    return count;
}

const std::regex& email_re() {
    static const std::regex re(R"(([A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}))");
    return re;
}

std::regex id_run_re(std::size_t min_digits) {
    return std::regex("([0-9Xx][0-9]{" + std::to_string(min_digits - 2) + ",}[0-9Xx])");
}

const std::regex& phone_re() {
    // CN mobile numbers, optionally +86-prefixed, plus separator-grouped
    // landline shapes (e.g. 021-1234-5678). Word-ish boundaries keep the
    // rule away from digits embedded in longer runs.
    static const std::regex re(
        R"((\+?86[- ]?)?(1[3-9][0-9]{9})(?![0-9])|([0-9]{3,4}-[0-9]{3,4}-[0-9]{3,4})(?![0-9]))");
    return re;
}

}  // namespace

std::pair<RawDocument, std::size_t> clean_document(const RawDocument& doc,
                                                   const CleanRules& rules) {
    RawDocument out = doc;
    out.text = normalize_text(doc.text);

    std::size_t redactions = 0;
    if (rules.redact_email) redactions += redact_all(out.text, email_re(), "[EMAIL]");
    if (rules.redact_id_runs && rules.id_run_min_digits >= 2) {
        redactions += redact_all(out.text, id_run_re(rules.id_run_min_digits), "[ID]");
    }
    if (rules.redact_phone) redactions += redact_all(out.text, phone_re(), "[PHONE]");
    for (const auto& [pattern, placeholder] : rules.extra_patterns) {
        redactions += redact_all(out.text, std::regex(pattern), placeholder);
    }

    out.byte_size = out.text.size();
    return {std::move(out), redactions};
}

std::pair<std::vector<RawDocument>, CleanReport> dedup_corpus(
    const std::vector<RawDocument>& docs, double jaccard_threshold) {
    if (!(jaccard_threshold > 0.0 && jaccard_threshold <= 1.0)) {
        throw std::invalid_argument("jaccard threshold must lie in (0,1]");
    }
    CleanReport report;
    report.docs_in = docs.size();

    // Exact pass: identical text, earliest survives.
    std::vector<std::size_t> exact_survivors;
    {
        std::map<std::string, std::size_t> seen;  // text -> first index
        for (std::size_t i = 0; i < docs.size(); ++i) {
            auto [it, inserted] = seen.emplace(docs[i].text, i);
            if (inserted) {
                exact_survivors.push_back(i);
            } else {
                ++report.exact_dupes_removed;
            }
        }
    }

    // Near pass: char 5-gram Jaccard, transitive clusters via union-find.
    const std::size_t n = exact_survivors.size();
    std::vector<std::vector<std::uint64_t>> shingles(n);
    for (std::size_t i = 0; i < n; ++i) {
        shingles[i] = text::char_shingles(docs[exact_survivors[i]].text, 5);
    }

    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const std::size_t sa = shingles[i].size();
            const std::size_t sb = shingles[j].size();
            if (sa == 0 || sb == 0) continue;
            // Size pruning: Jaccard <= min/max.
            const double upper = static_cast<double>(std::min(sa, sb)) /
                                 static_cast<double>(std::max(sa, sb));
            if (upper < jaccard_threshold) continue;
            if (text::jaccard(shingles[i], shingles[j]) >= jaccard_threshold) {
                const auto ri = find(i);
                const auto rj = find(j);
                if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
            }
        }
    }

    std::vector<RawDocument> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (find(i) == i) {
            out.push_back(docs[exact_survivors[i]]);
        } else {
            ++report.near_dupes_removed;
        }
    }
    report.docs_out = out.size();
    return {std::move(out), report};
}

std::vector<CorpusBucket> corpus_stats(const std::vector<RawDocument>& docs) {
    std::map<std::pair<int, int>, CorpusBucket> buckets;
    for (const auto& d : docs) {
        auto key = std::make_pair(static_cast<int>(d.category), static_cast<int>(d.subject));
        auto& b = buckets[key];
        b.category = d.category;
        b.subject = d.subject;
        b.doc_count += 1;
        b.byte_total += d.byte_size;
    }
    std::vector<CorpusBucket> out;
    out.reserve(buckets.size());
    for (auto& [key, b] : buckets) out.push_back(b);
    return out;
}

}  // namespace sftkit
