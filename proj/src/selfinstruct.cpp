#include "sftkit/selfinstruct.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sftkit/text.hpp"

namespace sftkit {

using nlohmann::json;

const char* to_string(TaskKind k) {
    switch (k) {
        case TaskKind::Brainstorming: return "brainstorming";
        case TaskKind::OpenQA: return "open_qa";
        case TaskKind::ClosedQA: return "closed_qa";
        case TaskKind::Rewriting: return "rewriting";
        case TaskKind::Extraction: return "extraction";
        case TaskKind::Generation: return "generation";
        case TaskKind::Classification: return "classification";
        case TaskKind::Chat: return "chat";
        case TaskKind::Summarization: return "summarization";
    }
    return "generation";
}

const char* to_string(Origin o) {
    return o == Origin::Exam ? "exam" : "llm";
}

namespace {

std::string fold_key(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == ' ' || c == '_' || c == '-') continue;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

}  // namespace

std::optional<TaskKind> task_kind_from_string(const std::string& s) {
    const std::string k = fold_key(s);
    static const std::pair<const char*, TaskKind> table[] = {
        {"brainstorming", TaskKind::Brainstorming},
        {"openqa", TaskKind::OpenQA},
        {"closedqa", TaskKind::ClosedQA},
        {"rewriting", TaskKind::Rewriting},
        {"extraction", TaskKind::Extraction},
        {"generation", TaskKind::Generation},
        {"classification", TaskKind::Classification},
        {"chat", TaskKind::Chat},
        {"summarization", TaskKind::Summarization},
    };
    for (const auto& [name, kind] : table) {
        if (k == name) return kind;
    }
    return std::nullopt;
}

std::optional<Origin> origin_from_string(const std::string& s) {
    const std::string k = fold_key(s);
    if (k == "exam") return Origin::Exam;
    if (k == "llm") return Origin::LLM;
    return std::nullopt;
}

const std::string& reference_format_example() {
    static const std::string example = R"([{
"Instruction": "According to the provided accounting rules, classify the following words into the correct categories: Assets, Equity, Expenses, Revenue.",
"Input": "Understanding the accounting rules: Debit increases and credit decreases assets and equity oppositely. Fixed assets are the same overall, remember details clearly and don't confused. Distinguish between profit and loss accounts; expenses and revenue are not the same.",
"Output": "Assets: Fixed assets Equity: Debit increases and credit decreases Expenses: Expenses Revenue: Revenue"
},
{
"Instruction": "Based on the following text, summarize the important characteristics or definitions of the relationship between tax law and tax legislation.",
"Input": "Main question: Is national taxation based on political power or property rights? Subquestion 1: Expression of tax law and tax legislation relationship.",
"Output": "Tax law fundamentally embodies a distribution relationship. The content of tax legislation relationship is the most substantial aspect of tax legislation and the essence of tax law."
}])";
    return example;
}

std::string build_prompt(const PromptRequest& req) {
    std::ostringstream p;
    p << "[Task Description]\n"
      << "You are currently an expert in the field of accounting and finance and have been "
         "tasked with providing "
      << req.n_instructions
      << " diverse task instructions based on [Background Knowledge]. The following "
         "[Requirements] outline the criteria you need to meet when providing instructions, "
         "as detailed in the [Reference Format].\n"
      << "\n"
      << "[Requirements]\n"
      << "1) Avoid repeating verbs in each instruction and strive for diversity in both "
         "instructions and tone.\n"
      << "2) Instructions should encompass various types of tasks, including brainstorming, "
         "open and closed QA, rewriting, extraction, generation, classification, chat, and "
         "summarization.\n"
      << "3) Instructions should be in Chinese and consist of 1 to 2 sentences. Imperative or "
         "interrogative sentences are allowed, without line breaks.\n"
      << "4) You should generate appropriate input for the instruction, including specific "
         "examples that involve real data to make the instruction challenging.\n"
      << "5) Not all instructions require input. For example, for common sense information "
         "inquiries, such as \"what is the highest mountain in the world\", simply state "
         "\"No Input\" in the input field. Text materials (e.g., articles, links) should "
         "provide examples directly in the input section. Other media types, like audio, "
         "images, videos, or links, do not meet the requirements.\n"
      << "6) The output should be an appropriate response to the instruction and input.\n"
      << "\n"
      << "[Reference Format]\n"
      << reference_format_example() << "\n"
      << "\n"
      << "[Background Knowledge]\n"
      << req.chunk.text << "\n";
    return p.str();
}

namespace {

// Maps typographic double quotes (and TeX-style ``/'' pairs) to straight
// quotes so near-JSON generations still parse.
std::string normalize_quotes(const std::string& raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size();) {
        // TeX-style `` and '' become one double quote.
        if (i + 1 < raw.size() &&
            ((raw[i] == '`' && raw[i + 1] == '`') || (raw[i] == '\'' && raw[i + 1] == '\''))) {
            out.push_back('"');
            i += 2;
            continue;
        }
        // U+201C/U+201D/U+201E/U+201F and fullwidth U+FF02.
        if (i + 2 < raw.size() && static_cast<unsigned char>(raw[i]) == 0xE2 &&
            static_cast<unsigned char>(raw[i + 1]) == 0x80) {
            const unsigned char b2 = static_cast<unsigned char>(raw[i + 2]);
            if (b2 >= 0x9C && b2 <= 0x9F) {
                out.push_back('"');
                i += 3;
                continue;
            }
        }
        if (i + 2 < raw.size() && static_cast<unsigned char>(raw[i]) == 0xEF &&
            static_cast<unsigned char>(raw[i + 1]) == 0xBC &&
            static_cast<unsigned char>(raw[i + 2]) == 0x82) {
            out.push_back('"');
            i += 3;
            continue;
        }
        out.push_back(raw[i]);
        ++i;
    }
    return out;
}

// Trims prose around the outermost [...] span, if any.
std::string extract_array_span(const std::string& s) {
    const std::size_t open = s.find('[');
    const std::size_t close = s.rfind(']');
    if (open == std::string::npos || close == std::string::npos || close <= open) return s;
    return s.substr(open, close - open + 1);
}

const json* find_key_ci(const json& obj, const std::string& wanted) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (fold_key(it.key()) == wanted) return &it.value();
    }
    return nullptr;
}

std::string trimmed(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool is_no_input_marker(const std::string& value) {
    const std::string t = trimmed(value);
    std::string lower;
    lower.reserve(t.size());
    for (char c : t) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "no input" || lower == "no input.") return true;
    return t == "\xE6\x97\xA0\xE8\xBE\x93\xE5\x85\xA5" ||   // 无输入
           t == "\xE7\x84\xA1\xE8\xBC\xB8\xE5\x85\xA5";     // 無輸入
}

}  // namespace

ParseResult parse_generation(const std::string& raw, const std::string& source_chunk_id) {
    ParseResult result;

    json arr = json::parse(raw, nullptr, false);
    if (arr.is_discarded() || !arr.is_array()) {
        // Tolerant retry: strip prose, normalize quote styles.
        const std::string candidate = extract_array_span(normalize_quotes(raw));
        arr = json::parse(candidate, nullptr, false);
        if (arr.is_discarded() || !arr.is_array()) {
            // Report the byte offset of the strict parse failure on the
            // original text.
            std::size_t offset = 0;
            try {
                const json probe = json::parse(raw);
                (void)probe;  // parsed but not an array; offset stays 0
            } catch (const json::parse_error& e) {
                offset = e.byte > 0 ? static_cast<std::size_t>(e.byte - 1) : 0;
            }
            result.error = ParseError{"generation is not a structured array", offset};
            return result;
        }
    }

    for (std::size_t i = 0; i < arr.size(); ++i) {
        const json& obj = arr[i];
        if (!obj.is_object()) {
            result.rejected.push_back({i, "not an object"});
            continue;
        }
        const json* instr = find_key_ci(obj, "instruction");
        const json* input = find_key_ci(obj, "input");
        const json* output = find_key_ci(obj, "output");
        if (instr == nullptr || !instr->is_string() || instr->get<std::string>().empty()) {
            result.rejected.push_back({i, "missing or empty instruction"});
            continue;
        }
        if (output == nullptr || !output->is_string() || output->get<std::string>().empty()) {
            result.rejected.push_back({i, "missing or empty output"});
            continue;
        }

        InstructionRecord rec;
        rec.instruction = instr->get<std::string>();
        rec.output = output->get<std::string>();
        if (input != nullptr && input->is_string()) {
            const std::string value = input->get<std::string>();
            rec.input = is_no_input_marker(value) ? "" : value;
        }
        rec.origin = Origin::LLM;
        rec.source_chunk_id = source_chunk_id;
        if (const json* kind = find_key_ci(obj, "taskkind"); kind && kind->is_string()) {
            rec.task_kind = task_kind_from_string(kind->get<std::string>());
        } else if (const json* t = find_key_ci(obj, "task"); t && t->is_string()) {
            rec.task_kind = task_kind_from_string(t->get<std::string>());
        }
        result.records.push_back(std::move(rec));
    }
    return result;
}

std::string serialize_generation(const std::vector<InstructionRecord>& records) {
    json arr = json::array();
    for (const auto& rec : records) {
        json obj;
        obj["Instruction"] = rec.instruction;
        obj["Input"] = rec.input.empty() ? "No Input" : rec.input;
        obj["Output"] = rec.output;
        if (rec.task_kind) obj["Task"] = to_string(*rec.task_kind);
        arr.push_back(std::move(obj));
    }
    return arr.dump(2);
}

namespace {

const char* kMediaExtensions[] = {
    "jpg", "jpeg", "png", "gif", "bmp", "webp", "svg",   // images
    "mp3", "wav",  "ogg", "flac", "aac",                 // audio
    "mp4", "avi",  "mov", "mkv",  "webm", "flv",         // video
};

bool has_media_reference(const std::string& s) {
    std::string lower;
    lower.reserve(s.size());
    for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    for (const char* ext : kMediaExtensions) {
        const std::string needle = std::string(".") + ext;
        std::size_t pos = 0;
        while ((pos = lower.find(needle, pos)) != std::string::npos) {
            const std::size_t after = pos + needle.size();
            // Extension must end the token: next char absent or non-alnum.
            if (after >= lower.size() ||
                !std::isalnum(static_cast<unsigned char>(lower[after]))) {
                return true;
            }
            pos = after;
        }
    }
    return false;
}

}  // namespace

std::vector<Violation> validate_record(const InstructionRecord& rec) {
    std::vector<Violation> out;
    if (trimmed(rec.instruction).empty()) {
        out.push_back({ViolationCode::EmptyInstruction, "instruction is empty"});
    }
    if (trimmed(rec.output).empty()) {
        out.push_back({ViolationCode::EmptyOutput, "output is empty"});
    }
    const std::size_t sentences = text::sentence_count(rec.instruction);
    if (sentences > 2) {
        out.push_back({ViolationCode::TooManySentences,
                       "instruction has " + std::to_string(sentences) + " sentences (max 2)"});
    }
    if (rec.instruction.find('\n') != std::string::npos ||
        rec.instruction.find('\r') != std::string::npos) {
        out.push_back({ViolationCode::LineBreakInInstruction, "instruction contains a line break"});
    }
    if (has_media_reference(rec.input)) {
        out.push_back({ViolationCode::MediaReferenceInInput,
                       "input references a media resource (audio/image/video)"});
    }
    return out;
}

std::vector<InstructionRecord> dedup_instructions(
    const std::vector<InstructionRecord>& records, double similarity_threshold) {
    if (!(similarity_threshold > 0.0 && similarity_threshold <= 1.0)) {
        throw std::invalid_argument("similarity threshold must lie in (0,1]");
    }
    const std::size_t n = records.size();
    std::vector<std::vector<std::string>> tokens(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto t = text::word_tokens(records[i].instruction);
        std::sort(t.begin(), t.end());
        t.erase(std::unique(t.begin(), t.end()), t.end());
        tokens[i] = std::move(t);
    }

    auto jaccard_words = [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
        if (a.empty() && b.empty()) return 1.0;  // two empty instructions are duplicates
        std::size_t inter = 0;
        std::size_t i = 0;
        std::size_t j = 0;
        while (i < a.size() && j < b.size()) {
            if (a[i] < b[j]) {
                ++i;
            } else if (b[j] < a[i]) {
                ++j;
            } else {
                ++inter;
                ++i;
                ++j;
            }
        }
        const std::size_t uni = a.size() + b.size() - inter;
        return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
    };

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
            if (jaccard_words(tokens[i], tokens[j]) >= similarity_threshold) {
                const auto ri = find(i);
                const auto rj = find(j);
                if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
            }
        }
    }

    std::vector<InstructionRecord> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (find(i) == i) out.push_back(records[i]);
    }
    return out;
}

std::string serialize_record(const InstructionRecord& rec) {
    json obj;
    obj["instruction"] = rec.instruction;
    obj["input"] = rec.input;
    obj["output"] = rec.output;
    obj["origin"] = to_string(rec.origin);
    obj["subject"] = to_string(rec.subject);
    if (rec.source_chunk_id) obj["source_chunk_id"] = *rec.source_chunk_id;
    if (rec.task_kind) obj["task_kind"] = to_string(*rec.task_kind);
    return obj.dump();
}

std::string serialize_records(const std::vector<InstructionRecord>& records) {
    std::string out;
    for (const auto& rec : records) {
        out += serialize_record(rec);
        out.push_back('\n');
    }
    return out;
}

std::optional<InstructionRecord> parse_record_line(const std::string& line, std::string* why) {
    const json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
        if (why) *why = "not a JSON object";
        return std::nullopt;
    }
    InstructionRecord rec;
    // Lines without an explicit origin are treated as exam-derived; the
    // pipeline always writes the origin key, hand-prepared files may not.
    rec.origin = Origin::Exam;
    if (!obj.contains("instruction") || !obj["instruction"].is_string() ||
        obj["instruction"].get<std::string>().empty()) {
        if (why) *why = "missing or empty \"instruction\"";
        return std::nullopt;
    }
    if (!obj.contains("output") || !obj["output"].is_string() ||
        obj["output"].get<std::string>().empty()) {
        if (why) *why = "missing or empty \"output\"";
        return std::nullopt;
    }
    rec.instruction = obj["instruction"].get<std::string>();
    rec.output = obj["output"].get<std::string>();
    if (obj.contains("input") && obj["input"].is_string()) {
        rec.input = obj["input"].get<std::string>();
    }
    if (obj.contains("origin") && obj["origin"].is_string()) {
        auto o = origin_from_string(obj["origin"].get<std::string>());
        if (!o) {
            if (why) *why = "unknown origin value";
            return std::nullopt;
        }
        rec.origin = *o;
    }
    if (obj.contains("subject") && obj["subject"].is_string()) {
        auto s = subject_from_string(obj["subject"].get<std::string>());
        if (!s) {
            if (why) *why = "unknown subject value";
            return std::nullopt;
        }
        rec.subject = *s;
    }
    if (obj.contains("source_chunk_id") && obj["source_chunk_id"].is_string()) {
        rec.source_chunk_id = obj["source_chunk_id"].get<std::string>();
    }
    if (obj.contains("task_kind") && obj["task_kind"].is_string()) {
        rec.task_kind = task_kind_from_string(obj["task_kind"].get<std::string>());
    }
    if (rec.origin == Origin::LLM && !rec.source_chunk_id) {
        if (why) *why = "llm-origin record without source_chunk_id";
        return std::nullopt;
    }
    return rec;
}

std::optional<std::vector<InstructionRecord>> parse_records(const std::string& content,
                                                            std::vector<LineIssue>* issues) {
    std::vector<InstructionRecord> out;
    std::istringstream lines(content);
    std::string line;
    std::size_t lineno = 0;
    bool any_issue = false;
    while (std::getline(lines, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::string why;
        auto rec = parse_record_line(line, &why);
        if (!rec) {
            any_issue = true;
            if (issues) issues->push_back({lineno, why});
            continue;
        }
        out.push_back(std::move(*rec));
    }
    if (any_issue && issues == nullptr) return std::nullopt;
    return out;
}

ExamIngestResult ingest_exam_records(const std::string& path) {
    ExamIngestResult result;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        result.errors.push_back({0, "cannot open " + path});
        return result;
    }
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::string why;
        auto rec = parse_record_line(line, &why);
        if (!rec) {
            result.errors.push_back({lineno, why});
            continue;
        }
        rec->origin = Origin::Exam;
        result.records.push_back(std::move(*rec));
    }
    return result;
}

}  // namespace sftkit
