#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "sftkit/mock_llm.hpp"
#include "sftkit/rng.hpp"
#include "sftkit/selfinstruct.hpp"

using namespace sftkit;

namespace {

Chunk make_chunk(const std::string& text, const std::string& doc_id = "doc") {
    Chunk c;
    c.doc_id = doc_id;
    c.start_line = 0;
    c.end_line = 0;
    c.text = text;
    return c;
}

InstructionRecord make_record(const std::string& instr, const std::string& input,
                              const std::string& output) {
    InstructionRecord rec;
    rec.instruction = instr;
    rec.input = input;
    rec.output = output;
    rec.origin = Origin::LLM;
    rec.source_chunk_id = "doc#0-0";
    return rec;
}

}  // namespace

TEST_SUITE("selfinstruct") {

TEST_CASE("prompt contains the four sections in order with the count substituted") {
    PromptRequest req;
    req.chunk = make_chunk("Financial statement auditing is the core business.");
    req.n_instructions = 10;
    const std::string prompt = build_prompt(req);

    const std::size_t task = prompt.find("[Task Description]");
    const std::size_t reqs = prompt.find("[Requirements]");
    const std::size_t fmt = prompt.find("[Reference Format]");
    const std::size_t bg = prompt.find("[Background Knowledge]\n", fmt);
    REQUIRE(task != std::string::npos);
    REQUIRE(reqs != std::string::npos);
    REQUIRE(fmt != std::string::npos);
    REQUIRE(bg != std::string::npos);
    CHECK(task < reqs);
    CHECK(reqs < fmt);
    CHECK(fmt < bg);

    // The requested count appears inside the task-description section.
    const std::string task_section = prompt.substr(task, reqs - task);
    CHECK(task_section.find("10") != std::string::npos);
    CHECK(prompt.find(req.chunk.text, bg) != std::string::npos);
}

TEST_CASE("prompts for two chunks differ only in the background section") {
    PromptRequest a;
    a.chunk = make_chunk("first background body");
    PromptRequest b;
    b.chunk = make_chunk("second background body");
    const std::string pa = build_prompt(a);
    const std::string pb = build_prompt(b);
    CHECK(pa != pb);
    const std::string marker = "[Background Knowledge]\n";
    CHECK(pa.substr(0, pa.rfind(marker)) == pb.substr(0, pb.rfind(marker)));
    CHECK(build_prompt(a) == pa);  // byte-stable
}

TEST_CASE("the embedded reference example parses to exactly two records") {
    const auto result = parse_generation(reference_format_example(), "chunk-1");
    REQUIRE(result.ok());
    REQUIRE(result.records.size() == 2);
    CHECK(result.records[0].instruction.find("classify the following words into the correct "
                                             "categories") != std::string::npos);
    CHECK(result.records[0].origin == Origin::LLM);
    CHECK(result.records[0].source_chunk_id == "chunk-1");
    CHECK(result.records[1].instruction.find("tax law and tax legislation") !=
          std::string::npos);
}

TEST_CASE("No Input markers normalize to the empty string") {
    const std::string raw = R"([
        {"Instruction": "What is the highest mountain in the world?",
         "Input": "No Input",
         "Output": "Mount Everest."},
        {"instruction": "Name the accounting equation.",
         "input": "no input",
         "output": "Assets = Liabilities + Equity."},
        {"INSTRUCTION": "资产是什么？",
         "INPUT": "无输入",
         "OUTPUT": "资产是资源。"}
    ])";
    const auto result = parse_generation(raw, "c");
    REQUIRE(result.ok());
    REQUIRE(result.records.size() == 3);
    for (const auto& rec : result.records) CHECK(rec.input.empty());
}

TEST_CASE("typographic quotes and surrounding prose are tolerated") {
    const std::string raw =
        "Here are the instructions:\n"
        "[{“Instruction”: “Define depreciation.”, "
        "“Output”: “Allocation of cost over useful life.”}]\n"
        "Hope this helps!";
    const auto result = parse_generation(raw, "c");
    REQUIRE(result.ok());
    REQUIRE(result.records.size() == 1);
    CHECK(result.records[0].instruction == "Define depreciation.");
    CHECK(result.records[0].input.empty());
}

TEST_CASE("malformed structure fails with a byte offset and zero records") {
    const auto result = parse_generation("this is just prose, no array here", "c");
    CHECK_FALSE(result.ok());
    CHECK(result.records.empty());
    const auto bad_nesting = parse_generation("[{\"Instruction\": \"x\", ", "c");
    CHECK_FALSE(bad_nesting.ok());
    CHECK(bad_nesting.error->byte_offset > 0);
}

TEST_CASE("objects missing required keys are rejected individually") {
    const std::string raw = R"([
        {"Instruction": "Valid one.", "Input": "", "Output": "Yes."},
        {"Instruction": "No output here.", "Input": "x"},
        {"Input": "orphan", "Output": "y"},
        {"Instruction": "Another valid.", "Output": "Sure."}
    ])";
    const auto result = parse_generation(raw, "c");
    REQUIRE(result.ok());
    CHECK(result.records.size() == 2);
    REQUIRE(result.rejected.size() == 2);
    CHECK(result.rejected[0].index == 1);
    CHECK(result.rejected[1].index == 2);
}

TEST_CASE("validator accepts the reference-format records") {
    const auto parsed = parse_generation(reference_format_example(), "c");
    REQUIRE(parsed.records.size() == 2);
    for (const auto& rec : parsed.records) {
        CHECK(validate_record(rec).empty());
    }
}

TEST_CASE("validator flags each documented violation class") {
    SUBCASE("three sentences") {
        const auto v = validate_record(make_record("First. Second. Third.", "", "out"));
        REQUIRE(v.size() == 1);
        CHECK(v[0].code == ViolationCode::TooManySentences);
    }
    SUBCASE("two sentences pass") {
        CHECK(validate_record(make_record("First. Second.", "", "out")).empty());
    }
    SUBCASE("empty output") {
        const auto v = validate_record(make_record("Ask something?", "", ""));
        REQUIRE(v.size() == 1);
        CHECK(v[0].code == ViolationCode::EmptyOutput);
    }
    SUBCASE("media reference in input") {
        const auto v = validate_record(make_record("Look at this.", "see photo.jpg for details",
                                                   "ok"));
        REQUIRE(v.size() == 1);
        CHECK(v[0].code == ViolationCode::MediaReferenceInInput);
    }
    SUBCASE("audio and video extensions") {
        CHECK(validate_record(make_record("x?", "listen to clip.mp3", "ok")).size() == 1);
        CHECK(validate_record(make_record("x?", "watch https://a.b/v.mp4", "ok")).size() == 1);
        CHECK(validate_record(make_record("x?", "read report.pdf", "ok")).empty());
    }
    SUBCASE("line break in instruction") {
        const auto v = validate_record(make_record("line one\nline two", "", "ok"));
        REQUIRE(v.size() == 1);
        CHECK(v[0].code == ViolationCode::LineBreakInInstruction);
    }
    SUBCASE("empty instruction") {
        const auto v = validate_record(make_record("  ", "", "ok"));
        REQUIRE(v.size() == 1);
        CHECK(v[0].code == ViolationCode::EmptyInstruction);
    }
}

TEST_CASE("instruction dedup follows hand-computed word Jaccard") {
    // Ten-word instructions sharing eight words: J = 8/12 = 0.667.
    const std::string a = "w1 w2 w3 w4 w5 w6 w7 w8 x1 x2";
    const std::string b = "w1 w2 w3 w4 w5 w6 w7 w8 y1 y2";
    std::vector<InstructionRecord> recs{make_record(a, "", "o1"), make_record(b, "", "o2")};
    CHECK(dedup_instructions(recs, 0.7).size() == 2);   // kept at 0.7
    CHECK(dedup_instructions(recs, 0.6).size() == 1);   // merged at 0.6
}

TEST_CASE("instruction dedup: identical collapse, disjoint survive, idempotent, order-stable") {
    std::vector<InstructionRecord> recs{
        make_record("Define assets.", "", "a"),
        make_record("Define assets.", "", "b"),
        make_record("Explain liabilities thoroughly.", "", "c"),
    };
    const auto once = dedup_instructions(recs, 0.7);
    REQUIRE(once.size() == 2);
    CHECK(once[0].output == "a");  // earliest survives
    CHECK(once[1].output == "c");
    const auto twice = dedup_instructions(once, 0.7);
    CHECK(twice == once);
}

TEST_CASE("parse_generation inverts serialize_generation for one chunk's records") {
    std::vector<InstructionRecord> records;
    for (int i = 0; i < 40; ++i) {
        InstructionRecord rec;
        rec.instruction = "Generated instruction " + std::to_string(i) + "?";
        rec.input = (i % 2 == 0) ? "" : "given text " + std::to_string(i);
        rec.output = "answer " + std::to_string(i) + ".";
        rec.origin = Origin::LLM;
        rec.source_chunk_id = "doc#10-59";
        if (i % 3 == 0) rec.task_kind = TaskKind::Extraction;
        records.push_back(rec);
    }
    const std::string rendered = serialize_generation(records);
    const auto parsed = parse_generation(rendered, "doc#10-59");
    REQUIRE(parsed.ok());
    CHECK(parsed.rejected.empty());
    CHECK(parsed.records == records);
}

TEST_CASE("dedup threshold precondition") {
    CHECK_THROWS_AS(dedup_instructions({}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(dedup_instructions({}, 1.5), std::invalid_argument);
}

TEST_CASE("serialize then parse is the identity on record lists") {
    Rng rng(77);
    std::vector<InstructionRecord> records;
    for (int i = 0; i < 200; ++i) {
        InstructionRecord rec;
        rec.instruction = "Instruction \"quoted\" #" + std::to_string(i) + "?";
        rec.input = (i % 3 == 0) ? "" : "input with\nnewline and \xE4\xB8\xAD\xE6\x96\x87";
        rec.output = "output " + std::to_string(rng.next_u64());
        rec.origin = (i % 2 == 0) ? Origin::LLM : Origin::Exam;
        if (rec.origin == Origin::LLM) {
            rec.source_chunk_id = "doc#" + std::to_string(i) + "-5";
        }
        rec.subject = kAllSubjects[i % 7];
        if (i % 4 == 0) rec.task_kind = TaskKind::Summarization;
        records.push_back(rec);
    }
    const std::string serialized = serialize_records(records);
    std::vector<LineIssue> issues;
    const auto parsed = parse_records(serialized, &issues);
    REQUIRE(parsed.has_value());
    CHECK(issues.empty());
    CHECK(*parsed == records);
}

TEST_CASE("exam ingestion: well-formed records load with origin=exam") {
    namespace fs = std::filesystem;
    const fs::path file = fs::temp_directory_path() /
                          ("sftkit_exam_" + std::to_string(std::random_device{}()) + ".jsonl");
    {
        std::ofstream out(file);
        out << R"({"instruction":"List the ways in which investment properties can be converted and the corresponding accounting treatment, and briefly explain the principles of conversion.","input":"Method of conversion of investment properties, Accounting treatment, Explanation of conversion principles","output":"An enterprise that converts investment property follows the cost or fair value model with the book value rules."})"
            << "\n";
        for (int i = 0; i < 4; ++i) {
            out << R"({"instruction":"Q)" << i << R"(?","input":"","output":"A)" << i << R"("})"
                << "\n";
        }
        out << R"({"instruction":"missing output","input":""})" << "\n";
    }
    const auto result = ingest_exam_records(file.string());
    fs::remove(file);

    REQUIRE(result.records.size() == 5);
    for (const auto& rec : result.records) CHECK(rec.origin == Origin::Exam);
    CHECK(result.records[0].instruction.find("investment properties") != std::string::npos);
    CHECK(result.records[0].input.find("Accounting treatment") != std::string::npos);
    REQUIRE(result.errors.size() == 1);
    CHECK(result.errors[0].line == 6);
}

TEST_CASE("deterministic mock emits parseable, reproducible generations") {
    DeterministicMockClient client(42);
    PromptRequest req;
    req.chunk = make_chunk(
        "Financial statement auditing is the core business of certified public accountants.\n"
        "A financial statement audit provides reasonable assurance about misstatement.\n"
        "Revenue recognition depends on performance obligations being satisfied.");
    req.n_instructions = 10;
    const std::string prompt = build_prompt(req);

    const auto first = client.complete(prompt, CompletionParams{});
    REQUIRE(first.ok());
    const auto second = DeterministicMockClient(42).complete(prompt, CompletionParams{});
    CHECK(first.text == second.text);

    const auto parsed = parse_generation(first.text, req.chunk.id());
    REQUIRE(parsed.ok());
    CHECK(parsed.records.size() == 10);
    for (const auto& rec : parsed.records) {
        CHECK(validate_record(rec).empty());
        CHECK(rec.source_chunk_id == req.chunk.id());
    }

    const auto other_seed = DeterministicMockClient(43).complete(prompt, CompletionParams{});
    CHECK(first.text != other_seed.text);
}

}  // TEST_SUITE
