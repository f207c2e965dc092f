// sftkit — dataset factory and quantized-adapter toolkit CLI.
//
// Subcommands cover the pipeline end to end: ingest/clean/dedup raw
// corpora, chunk documents, generate instruction records (mock or live
// endpoint), validate and mix record files, split train/validation, and
// exercise the NF-k quantization and adapter math. All randomness sits
// behind --seed; --mock keeps generation fully offline.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sftkit/chunker.hpp"
#include "sftkit/corpus.hpp"
#include "sftkit/llm_client.hpp"
#include "sftkit/mixer.hpp"
#include "sftkit/mock_llm.hpp"
#include "sftkit/quant/kernels.hpp"
#include "sftkit/quant/linear.hpp"
#include "sftkit/quant/serialize.hpp"
#include "sftkit/rng.hpp"
#include "sftkit/selfinstruct.hpp"
#include "sftkit/stats.hpp"
#include "sftkit/text.hpp"
#include "sftkit/train_config.hpp"

using namespace sftkit;
using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& message) {
    json err;
    err["error"] = message;
    std::cerr << err.dump() << "\n";
    std::exit(1);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail("cannot open " + path + " for writing");
    out << content;
    if (!out) fail("failed writing " + path);
}

json doc_to_json(const RawDocument& doc) {
    json obj;
    obj["id"] = doc.id;
    obj["source_uri"] = doc.source_uri;
    obj["category"] = to_string(doc.category);
    obj["subject"] = to_string(doc.subject);
    obj["text"] = doc.text;
    if (doc.expert_validated) obj["expert_validated"] = true;
    return obj;
}

std::vector<RawDocument> read_documents(const std::string& path) {
    std::vector<RawDocument> docs;
    std::istringstream lines(read_file(path));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (line.empty()) continue;
        const json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.is_object() || !obj.contains("text")) {
            fail(path + ":" + std::to_string(lineno) + ": not a document record");
        }
        RawDocument doc;
        doc.id = obj.value("id", path + ":" + std::to_string(lineno));
        doc.source_uri = obj.value("source_uri", "");
        if (auto c = category_from_string(obj.value("category", "specialized"))) {
            doc.category = *c;
        }
        if (auto s = subject_from_string(obj.value("subject", "others"))) {
            doc.subject = *s;
        }
        doc.text = obj["text"].get<std::string>();
        doc.byte_size = doc.text.size();
        doc.expert_validated = obj.value("expert_validated", false);
        docs.push_back(std::move(doc));
    }
    return docs;
}

std::string documents_to_jsonl(const std::vector<RawDocument>& docs) {
    std::string out;
    for (const auto& doc : docs) {
        out += doc_to_json(doc).dump();
        out.push_back('\n');
    }
    return out;
}

json chunk_to_json(const Chunk& chunk) {
    json obj;
    obj["doc_id"] = chunk.doc_id;
    obj["start_line"] = chunk.start_line;
    obj["end_line"] = chunk.end_line;
    obj["text"] = chunk.text;
    obj["subject"] = to_string(chunk.subject);
    return obj;
}

std::vector<Chunk> read_chunks(const std::string& path) {
    std::vector<Chunk> chunks;
    std::istringstream lines(read_file(path));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (line.empty()) continue;
        const json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded() || !obj.contains("doc_id") || !obj.contains("text")) {
            fail(path + ":" + std::to_string(lineno) + ": not a chunk record");
        }
        Chunk c;
        c.doc_id = obj["doc_id"].get<std::string>();
        c.start_line = obj.value("start_line", std::size_t{0});
        c.end_line = obj.value("end_line", std::size_t{0});
        c.text = obj["text"].get<std::string>();
        if (auto s = subject_from_string(obj.value("subject", "others"))) c.subject = *s;
        chunks.push_back(std::move(c));
    }
    return chunks;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::vector<std::string> out;
    std::istringstream lines(read_file(path));
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& line : lines) {
        out += line;
        out.push_back('\n');
    }
    return out;
}

std::pair<std::uint64_t, std::uint64_t> parse_ratio(const std::string& text) {
    const std::size_t colon = text.find(':');
    if (colon == std::string::npos) fail("ratio must look like 7:3");
    try {
        const std::uint64_t a = std::stoull(text.substr(0, colon));
        const std::uint64_t b = std::stoull(text.substr(colon + 1));
        return {a, b};
    } catch (...) {
        fail("ratio must look like 7:3");
    }
}

std::vector<std::size_t> parse_shape(const std::string& text) {
    std::vector<std::size_t> shape;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t x = text.find('x', start);
        const std::string part = text.substr(start, x == std::string::npos ? x : x - start);
        try {
            shape.push_back(std::stoull(part));
        } catch (...) {
            fail("shape must look like 128x64");
        }
        if (x == std::string::npos) break;
        start = x + 1;
    }
    if (shape.empty()) fail("shape must look like 128x64");
    return shape;
}

std::size_t count_codepoints(const std::string& s) {
    std::vector<char32_t> cps;
    text::decode_utf8(s, cps);
    return cps.size();
}

std::vector<float> read_f32(const std::string& path) {
    const std::string raw = read_file(path);
    if (raw.size() % 4 != 0) fail(path + ": size is not a multiple of 4 bytes");
    std::vector<float> out(raw.size() / 4);
    std::memcpy(out.data(), raw.data(), raw.size());
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sftkit — CPT/SFT dataset factory and NF-k quantized adapter toolkit"};
    app.require_subcommand(1);
    app.fallthrough(true);  // --seed/--mock may follow the subcommand

    std::uint64_t seed = 0;
    bool mock = false;
    app.add_option("--seed", seed, "seed for all randomized stages")->capture_default_str();
    app.add_flag("--mock", mock, "use the offline deterministic generator");

    // ---- ingest ----
    auto* cmd_ingest = app.add_subcommand("ingest", "load raw documents from a directory tree");
    std::string in_dir;
    std::string ingest_out;
    std::string ingest_category = "specialized";
    std::string ingest_subject = "others";
    cmd_ingest->add_option("--input", in_dir, "directory of .txt / .jsonl files")->required();
    cmd_ingest->add_option("--output", ingest_out, "document records out")->required();
    cmd_ingest->add_option("--category", ingest_category, "default source category");
    cmd_ingest->add_option("--subject", ingest_subject, "default CPA subject");

    // ---- clean ----
    auto* cmd_clean = app.add_subcommand("clean", "normalize text and redact PII");
    std::string clean_in;
    std::string clean_out;
    std::string clean_report;
    cmd_clean->add_option("--input", clean_in)->required();
    cmd_clean->add_option("--output", clean_out)->required();
    cmd_clean->add_option("--report", clean_report, "clean-report JSON out");

    // ---- dedup ----
    auto* cmd_dedup = app.add_subcommand("dedup", "remove exact and near duplicates");
    std::string dedup_in;
    std::string dedup_out;
    std::string dedup_report;
    double dedup_threshold = 0.9;
    cmd_dedup->add_option("--input", dedup_in)->required();
    cmd_dedup->add_option("--output", dedup_out)->required();
    cmd_dedup->add_option("--threshold", dedup_threshold, "5-gram Jaccard threshold")
        ->capture_default_str();
    cmd_dedup->add_option("--report", dedup_report, "clean-report JSON out");

    // ---- chunk ----
    auto* cmd_chunk = app.add_subcommand("chunk", "slide a line window over documents");
    std::string chunk_in;
    std::string chunk_out;
    std::size_t window = 50;
    std::size_t stride = 30;
    bool no_tail = false;
    cmd_chunk->add_option("--input", chunk_in, "plain text file or document records")->required();
    cmd_chunk->add_option("--output", chunk_out)->required();
    cmd_chunk->add_option("--window", window, "window size in lines")->capture_default_str();
    cmd_chunk->add_option("--stride", stride, "stride in lines")->capture_default_str();
    cmd_chunk->add_flag("--no-tail", no_tail, "skip the final partial chunk");

    // ---- generate ----
    auto* cmd_generate = app.add_subcommand("generate", "self-instruct records from chunks");
    std::string gen_chunks;
    std::string gen_out;
    std::size_t gen_n = 10;
    double gen_dedup_threshold = 0.7;
    std::string gen_endpoint = "https://api.openai.com";
    std::string gen_model = "gpt-4";
    double gen_temperature = 0.7;
    int gen_max_tokens = 2048;
    std::string gen_key_env = "SFTKIT_API_KEY";
    cmd_generate->add_option("--chunks", gen_chunks)->required();
    cmd_generate->add_option("--output", gen_out)->required();
    cmd_generate->add_option("--n", gen_n, "instructions per chunk")->capture_default_str();
    cmd_generate->add_option("--dedup-threshold", gen_dedup_threshold)->capture_default_str();
    cmd_generate->add_option("--endpoint", gen_endpoint)->capture_default_str();
    cmd_generate->add_option("--model", gen_model)->capture_default_str();
    cmd_generate->add_option("--temperature", gen_temperature)->capture_default_str();
    cmd_generate->add_option("--max-tokens", gen_max_tokens)->capture_default_str();
    cmd_generate->add_option("--api-key-env", gen_key_env, "env var holding the API key")
        ->capture_default_str();

    // ---- validate-records ----
    auto* cmd_validate = app.add_subcommand("validate-records", "check instruction records");
    std::string validate_in;
    std::string validate_chunks;
    bool validate_strict = false;
    cmd_validate->add_option("--input", validate_in)->required();
    cmd_validate->add_option("--chunks", validate_chunks,
                             "chunk records; verifies source_chunk_id references");
    cmd_validate->add_flag("--strict", validate_strict, "nonzero exit on any violation");

    // ---- mix-cpt / mix-sft ----
    auto* cmd_mix_cpt = app.add_subcommand("mix-cpt", "mix two corpora at a ratio");
    auto* cmd_mix_sft = app.add_subcommand("mix-sft", "mix instruction pools at a ratio");
    std::string mix_a;
    std::string mix_b;
    std::string mix_out;
    std::string mix_ratio_cpt = "7:3";
    std::string mix_ratio_sft = "80:20";
    std::string mix_unit = "count";
    for (auto* cmd : {cmd_mix_cpt, cmd_mix_sft}) {
        cmd->add_option("--a", mix_a, "pool A record file")->required();
        cmd->add_option("--b", mix_b, "pool B record file")->required();
        cmd->add_option("--output", mix_out)->required();
        cmd->add_option("--unit", mix_unit, "count | bytes")->capture_default_str();
    }
    cmd_mix_cpt->add_option("--ratio", mix_ratio_cpt)->capture_default_str();
    cmd_mix_sft->add_option("--ratio", mix_ratio_sft)->capture_default_str();

    // ---- split ----
    auto* cmd_split = app.add_subcommand("split", "carve out the validation set");
    std::string split_in;
    std::string split_train;
    std::string split_val;
    double split_fraction = 0.10;
    cmd_split->add_option("--input", split_in)->required();
    cmd_split->add_option("--train", split_train)->required();
    cmd_split->add_option("--val", split_val)->required();
    cmd_split->add_option("--fraction", split_fraction)->capture_default_str();

    // ---- quantize ----
    auto* cmd_quantize = app.add_subcommand("quantize", "block-quantize a raw f32 tensor");
    std::string q_in;
    std::string q_out;
    std::string q_shape;
    int q_bits = 8;
    std::size_t q_block = 64;
    std::size_t q_group = 256;
    int q_const_bits = 8;
    cmd_quantize->add_option("--input", q_in, "raw little-endian float32 file")->required();
    cmd_quantize->add_option("--output", q_out)->required();
    cmd_quantize->add_option("--shape", q_shape, "tensor shape, e.g. 128x64")->required();
    cmd_quantize->add_option("--bits", q_bits, "codebook bits (2-8)")->capture_default_str();
    cmd_quantize->add_option("--block", q_block, "block size")->capture_default_str();
    cmd_quantize->add_option("--group", q_group, "constant group size")->capture_default_str();
    cmd_quantize->add_option("--const-bits", q_const_bits)->capture_default_str();

    // ---- dequantize ----
    auto* cmd_dequantize = app.add_subcommand("dequantize", "restore a quantized container");
    std::string dq_in;
    std::string dq_out;
    std::string dq_reference;
    cmd_dequantize->add_option("--input", dq_in)->required();
    cmd_dequantize->add_option("--output", dq_out)->required();
    cmd_dequantize->add_option("--reference", dq_reference,
                               "original f32 file; prints error stats");

    // ---- qlinear-check ----
    auto* cmd_qcheck = app.add_subcommand("qlinear-check",
                                          "self-test: forward oracle + gradient checks");
    int qcheck_trials = 20;
    cmd_qcheck->add_option("--trials", qcheck_trials)->capture_default_str();

    // ---- stats ----
    auto* cmd_stats = app.add_subcommand("stats", "dataset statistics tables");
    std::string stats_in;
    std::string stats_out = "-";
    std::string stats_field = "output";
    std::string stats_format = "csv";
    std::string stats_corpus;
    bool stats_category = false;
    cmd_stats->add_option("--input", stats_in, "instruction records");
    cmd_stats->add_option("--corpus-input", stats_corpus,
                          "document records; emits per-(category,subject) totals instead");
    cmd_stats->add_option("--output", stats_out, "CSV out (- for stdout)")
        ->capture_default_str();
    cmd_stats->add_option("--field", stats_field, "instruction | input | output")
        ->capture_default_str();
    cmd_stats->add_option("--format", stats_format, "output format (csv)")
        ->capture_default_str();
    cmd_stats->add_flag("--category-report", stats_category,
                        "emit the per-subject distribution instead");

    // ---- emit-config ----
    auto* cmd_config = app.add_subcommand("emit-config", "write the training config bundle");
    std::string config_out = "-";
    std::vector<std::string> config_sets;
    std::string config_check;
    cmd_config->add_option("--output", config_out)->capture_default_str();
    cmd_config->add_option("--set", config_sets, "override, key=value (repeatable)");
    cmd_config->add_option("--check", config_check, "validate an existing config file instead");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_ingest) {
            const auto category = category_from_string(ingest_category);
            const auto subject = subject_from_string(ingest_subject);
            if (!category) fail("unknown category: " + ingest_category);
            if (!subject) fail("unknown subject: " + ingest_subject);
            const IngestResult result = ingest_directory(in_dir, *category, *subject);
            if (result.documents.empty() && !result.errors.empty() &&
                result.errors[0].reason.find("not a directory") != std::string::npos) {
                fail(result.errors[0].path + ": " + result.errors[0].reason);
            }
            write_file(ingest_out, documents_to_jsonl(result.documents));
            json summary;
            summary["documents"] = result.documents.size();
            summary["errors"] = json::array();
            for (const auto& e : result.errors) {
                summary["errors"].push_back({{"path", e.path}, {"reason", e.reason}});
            }
            std::cerr << summary.dump() << "\n";
        } else if (*cmd_clean) {
            const auto docs = read_documents(clean_in);
            std::vector<RawDocument> cleaned;
            CleanReport report;
            report.docs_in = docs.size();
            std::size_t emptied = 0;
            for (const auto& doc : docs) {
                auto [out, redactions] = clean_document(doc, CleanRules{});
                report.pii_redactions += redactions;
                const std::size_t before = count_codepoints(doc.text);
                const std::size_t after = count_codepoints(out.text);
                report.chars_removed += before > after ? before - after : 0;
                if (out.text.empty()) {
                    ++emptied;  // flagged, not an error
                    continue;
                }
                cleaned.push_back(std::move(out));
            }
            report.docs_out = cleaned.size();
            write_file(clean_out, documents_to_jsonl(cleaned));
            json rep;
            rep["docs_in"] = report.docs_in;
            rep["docs_out"] = report.docs_out;
            rep["pii_redactions"] = report.pii_redactions;
            rep["chars_removed"] = report.chars_removed;
            rep["cleaned_to_empty"] = emptied;
            if (!clean_report.empty()) write_file(clean_report, rep.dump(2) + "\n");
            std::cerr << rep.dump() << "\n";
        } else if (*cmd_dedup) {
            const auto docs = read_documents(dedup_in);
            if (!(dedup_threshold > 0.0 && dedup_threshold <= 1.0)) {
                fail("threshold must lie in (0,1]");
            }
            const auto [kept, report] = dedup_corpus(docs, dedup_threshold);
            write_file(dedup_out, documents_to_jsonl(kept));
            json rep;
            rep["docs_in"] = report.docs_in;
            rep["docs_out"] = report.docs_out;
            rep["exact_dupes_removed"] = report.exact_dupes_removed;
            rep["near_dupes_removed"] = report.near_dupes_removed;
            if (!dedup_report.empty()) write_file(dedup_report, rep.dump(2) + "\n");
            std::cerr << rep.dump() << "\n";
        } else if (*cmd_chunk) {
            const WindowSpec spec(window, stride, !no_tail);
            std::vector<RawDocument> docs;
            if (chunk_in.size() > 6 && chunk_in.substr(chunk_in.size() - 6) == ".jsonl") {
                docs = read_documents(chunk_in);
            } else {
                RawDocument doc;
                doc.id = std::filesystem::path(chunk_in).filename().string();
                doc.text = read_file(chunk_in);
                doc.byte_size = doc.text.size();
                docs.push_back(std::move(doc));
            }
            std::string out;
            std::size_t count = 0;
            for (const auto& doc : docs) {
                for (const auto& chunk : chunk_document(doc, spec)) {
                    out += chunk_to_json(chunk).dump();
                    out.push_back('\n');
                    ++count;
                }
            }
            write_file(chunk_out, out);
            std::cerr << json{{"chunks", count}}.dump() << "\n";
        } else if (*cmd_generate) {
            const auto chunks = read_chunks(gen_chunks);
            std::unique_ptr<CompletionClient> client;
            if (mock) {
                client = std::make_unique<DeterministicMockClient>(seed);
            } else {
                LlmClient::Config config;
                config.api_key_env = gen_key_env;
                client = std::make_unique<LlmClient>(
                    config, make_http_transport(gen_endpoint, gen_key_env));
            }
            CompletionParams params;
            params.model_name = gen_model;
            params.temperature = gen_temperature;
            params.max_output_tokens = gen_max_tokens;

            std::vector<InstructionRecord> records;
            std::size_t invalid = 0;
            std::size_t parse_failures = 0;
            for (const auto& chunk : chunks) {
                PromptRequest req;
                req.chunk = chunk;
                req.n_instructions = gen_n;
                const auto outcome = client->complete(build_prompt(req), params);
                if (!outcome.ok()) {
                    fail(std::string("completion failed: ") + to_string(outcome.status) + ": " +
                         outcome.message);
                }
                auto parsed = parse_generation(outcome.text, chunk.id());
                if (!parsed.ok()) {
                    ++parse_failures;
                    continue;
                }
                for (auto& rec : parsed.records) {
                    rec.subject = chunk.subject;
                    if (validate_record(rec).empty()) {
                        records.push_back(std::move(rec));
                    } else {
                        ++invalid;
                    }
                }
            }
            const std::size_t before_dedup = records.size();
            records = dedup_instructions(records, gen_dedup_threshold);
            write_file(gen_out, serialize_records(records));
            json summary;
            summary["chunks"] = chunks.size();
            summary["records"] = records.size();
            summary["invalid_dropped"] = invalid;
            summary["near_duplicates_dropped"] = before_dedup - records.size();
            summary["parse_failures"] = parse_failures;
            std::cerr << summary.dump() << "\n";
        } else if (*cmd_validate) {
            std::vector<LineIssue> issues;
            const auto parsed = parse_records(read_file(validate_in), &issues);
            std::size_t violation_count = issues.size();
            json report;
            report["line_errors"] = json::array();
            for (const auto& issue : issues) {
                report["line_errors"].push_back({{"line", issue.line}, {"message", issue.message}});
            }
            report["violations"] = json::array();
            if (parsed) {
                std::optional<std::set<std::string>> chunk_ids;
                if (!validate_chunks.empty()) {
                    chunk_ids.emplace();
                    for (const auto& chunk : read_chunks(validate_chunks)) {
                        chunk_ids->insert(chunk.id());
                    }
                }
                std::size_t index = 0;
                for (const auto& rec : *parsed) {
                    ++index;
                    for (const auto& v : validate_record(rec)) {
                        ++violation_count;
                        report["violations"].push_back(
                            {{"record", index}, {"message", v.message}});
                    }
                    if (chunk_ids && rec.origin == Origin::LLM && rec.source_chunk_id &&
                        chunk_ids->count(*rec.source_chunk_id) == 0) {
                        ++violation_count;
                        report["violations"].push_back(
                            {{"record", index},
                             {"message", "source_chunk_id \"" + *rec.source_chunk_id +
                                             "\" not present in the chunk file"}});
                    }
                }
                report["records"] = parsed->size();
            }
            std::cout << report.dump(2) << "\n";
            if (validate_strict && violation_count > 0) return 1;
        } else if (*cmd_mix_cpt || *cmd_mix_sft) {
            const auto [ra, rb] = parse_ratio(*cmd_mix_cpt ? mix_ratio_cpt : mix_ratio_sft);
            MixUnit unit;
            if (mix_unit == "count") {
                unit = MixUnit::DocumentCount;
            } else if (mix_unit == "bytes") {
                unit = MixUnit::ByteWeighted;
            } else {
                fail("unit must be count or bytes");
            }
            const MixSpec spec(ra, rb, unit, seed);
            const auto mixed = mix(read_lines(mix_a), read_lines(mix_b), spec);
            write_file(mix_out, join_lines(mixed));
            std::cerr << json{{"mixed", mixed.size()}}.dump() << "\n";
        } else if (*cmd_split) {
            const SplitSpec spec(split_fraction, seed);
            const auto result = split(read_lines(split_in), spec);
            write_file(split_train, join_lines(result.train));
            write_file(split_val, join_lines(result.validation));
            std::cerr << json{{"train", result.train.size()},
                              {"validation", result.validation.size()}}
                             .dump()
                      << "\n";
        } else if (*cmd_quantize) {
            const auto data = read_f32(q_in);
            quant::Tensor tensor;
            tensor.shape = parse_shape(q_shape);
            tensor.data = data;
            if (tensor.element_count() != data.size()) {
                fail("shape does not match the file: " + std::to_string(data.size()) +
                     " elements on disk");
            }
            quant::BlockSpec spec;
            spec.block_size = q_block;
            spec.const_group_size = q_group;
            spec.const_bits = q_const_bits;
            const auto cb = quant::build_nf_codebook(q_bits);
            const auto qt = quant::quantize_blockwise(tensor, spec, cb);
            quant::save_quantized(q_out, qt);
            json summary;
            summary["elements"] = qt.element_count();
            summary["blocks"] = qt.block_count();
            summary["bytes"] = quant::serialized_size(qt);
            summary["kernels"] = quant::active_backend_name();
            std::cerr << summary.dump() << "\n";
        } else if (*cmd_dequantize) {
            const auto qt = quant::load_quantized(dq_in);
            const auto cb = quant::build_nf_codebook(qt.codebook_bits);
            const auto restored = quant::dequantize(qt, cb);
            std::string raw(restored.data.size() * 4, '\0');
            std::memcpy(raw.data(), restored.data.data(), raw.size());
            write_file(dq_out, raw);
            if (!dq_reference.empty()) {
                quant::Tensor reference;
                reference.shape = qt.shape;
                reference.data = read_f32(dq_reference);
                if (reference.element_count() != reference.data.size()) {
                    fail("reference size does not match the container shape");
                }
                const auto stats = quant::quant_error_stats(reference, qt, cb);
                std::cout << json{{"rms_error", stats.rms_error},
                                  {"max_abs_error", stats.max_abs_error}}
                                 .dump()
                          << "\n";
            }
        } else if (*cmd_qcheck) {
            // Forward vs dense materialization, then adapter gradients vs
            // central finite differences, on random small layers.
            Rng rng(seed == 0 ? 7 : seed);
            bool all_ok = true;
            for (int trial = 0; trial < qcheck_trials; ++trial) {
                const std::size_t in = 2 + rng.next_below(6);
                const std::size_t out = 2 + rng.next_below(6);
                const std::size_t batch = 1 + rng.next_below(4);
                const int rank = 1 + static_cast<int>(rng.next_below(3));

                quant::Matrix w(in, out);
                for (auto& v : w.data) v = rng.next_gaussian();
                auto layer = quant::QuantLinear::from_weights(w, quant::BlockSpec{16, 4, 8}, 8,
                                                              rank);
                for (auto& v : layer.adapter.l1.data) v = rng.next_gaussian() * 0.3;
                for (auto& v : layer.adapter.l2.data) v = rng.next_gaussian() * 0.3;
                quant::Matrix x(batch, in);
                for (auto& v : x.data) v = rng.next_gaussian();

                const quant::Matrix y = quant::forward(layer, x);
                const quant::Matrix w_full = layer.materialize();
                double forward_err = 0.0;
                for (std::size_t i = 0; i < batch; ++i) {
                    for (std::size_t j = 0; j < out; ++j) {
                        double acc = 0.0;
                        for (std::size_t k = 0; k < in; ++k) {
                            acc += x.at(i, k) * w_full.at(k, j);
                        }
                        const double denom = std::max(std::abs(acc), 1e-9);
                        forward_err = std::max(forward_err,
                                               std::abs(acc - y.at(i, j)) / denom);
                    }
                }

                const auto grads = quant::adapter_grads(layer, x, y);
                auto loss = [&] {
                    const quant::Matrix out_y = quant::forward(layer, x);
                    double total = 0.0;
                    for (double v : out_y.data) total += v * v;
                    return 0.5 * total;
                };
                double grad_err = 0.0;
                const double h = 1e-5;
                auto check_param = [&](double& param, double analytic) {
                    const double saved = param;
                    param = saved + h;
                    const double up = loss();
                    param = saved - h;
                    const double down = loss();
                    param = saved;
                    const double numeric = (up - down) / (2.0 * h);
                    const double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
                    grad_err = std::max(grad_err, std::abs(numeric - analytic) / denom);
                };
                for (std::size_t i = 0; i < layer.adapter.l1.data.size(); ++i) {
                    check_param(layer.adapter.l1.data[i], grads.d_l1.data[i]);
                }
                for (std::size_t i = 0; i < layer.adapter.l2.data.size(); ++i) {
                    check_param(layer.adapter.l2.data[i], grads.d_l2.data[i]);
                }

                const bool ok = forward_err < 1e-6 && grad_err < 1e-4;
                all_ok = all_ok && ok;
                std::printf("trial %2d: forward_rel_err=%.3e grad_rel_err=%.3e %s\n", trial,
                            forward_err, grad_err, ok ? "ok" : "FAIL");
            }
            if (!all_ok) fail("qlinear-check found mismatches");
        } else if (*cmd_stats) {
            if (stats_format != "csv") fail("unsupported format: " + stats_format);
            if (!stats_corpus.empty()) {
                const auto buckets = corpus_stats(read_documents(stats_corpus));
                std::string csv = "category,subject,doc_count,byte_total\n";
                for (const auto& b : buckets) {
                    csv += std::string(to_string(b.category)) + "," + to_string(b.subject) + "," +
                           std::to_string(b.doc_count) + "," + std::to_string(b.byte_total) +
                           "\n";
                }
                write_file(stats_out, csv);
                return 0;
            }
            if (stats_in.empty()) fail("--input (or --corpus-input) is required");
            std::vector<LineIssue> issues;
            const auto parsed = parse_records(read_file(stats_in), &issues);
            if (!parsed || parsed->empty()) fail("no parseable records in " + stats_in);
            if (stats_category) {
                write_file(stats_out, distribution_csv(category_distribution(*parsed)));
            } else {
                const auto field = field_from_string(stats_field);
                if (!field) fail("field must be instruction, input or output");
                write_file(stats_out, histogram_csv(histogram(*parsed, *field)));
            }
        } else if (*cmd_config) {
            if (!config_check.empty()) {
                const auto result = validate_config(read_file(config_check));
                if (std::holds_alternative<std::vector<ConfigViolation>>(result)) {
                    json violations = json::array();
                    for (const auto& v : std::get<std::vector<ConfigViolation>>(result)) {
                        violations.push_back({{"key", v.key}, {"message", v.message}});
                    }
                    std::cerr << json{{"violations", violations}}.dump() << "\n";
                    return 1;
                }
                std::cerr << json{{"valid", true}}.dump() << "\n";
                return 0;
            }
            const auto result = apply_overrides(config_sets);
            if (std::holds_alternative<std::vector<ConfigViolation>>(result)) {
                const auto& violations = std::get<std::vector<ConfigViolation>>(result);
                fail("invalid override for key \"" + violations[0].key +
                     "\": " + violations[0].message);
            }
            write_file(config_out, emit_config(std::get<TrainConfig>(result)));
        }
    } catch (const std::exception& e) {
        fail(e.what());
    }
    return 0;
}
