#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sftkit/chunker.hpp"
#include "sftkit/corpus.hpp"

namespace sftkit {

enum class TaskKind {
    Brainstorming,
    OpenQA,
    ClosedQA,
    Rewriting,
    Extraction,
    Generation,
    Classification,
    Chat,
    Summarization,
};

enum class Origin { Exam, LLM };

const char* to_string(TaskKind k);
const char* to_string(Origin o);
std::optional<TaskKind> task_kind_from_string(const std::string& s);
std::optional<Origin> origin_from_string(const std::string& s);

struct InstructionRecord {
    std::string instruction;
    std::string input;  // empty means "no input required"
    std::string output;
    Origin origin = Origin::LLM;
    std::optional<std::string> source_chunk_id;
    CpaSubject subject = CpaSubject::Others;
    std::optional<TaskKind> task_kind;

    bool operator==(const InstructionRecord&) const = default;
};

struct PromptRequest {
    Chunk chunk;
    std::size_t n_instructions = 10;
};

// The generation prompt: four fixed sections, in order —
// [Task Description], [Requirements], [Reference Format],
// [Background Knowledge] — with the requested instruction count
// substituted into the task description and the chunk text substituted
// as background knowledge. Byte-stable across runs.
std::string build_prompt(const PromptRequest& req);

// The worked two-record example embedded in the prompt's reference
// format section (valid JSON array).
const std::string& reference_format_example();

struct RejectedObject {
    std::size_t index = 0;  // position in the parsed array
    std::string reason;
};

struct ParseError {
    std::string message;
    std::size_t byte_offset = 0;  // offset of first failure in the raw text
};

struct ParseResult {
    std::vector<InstructionRecord> records;
    std::vector<RejectedObject> rejected;
    std::optional<ParseError> error;  // set when the structure itself is malformed

    bool ok() const { return !error.has_value(); }
};

// Parses a structured array of {Instruction, Input, Output} objects.
// Key matching is case-insensitive; typographic double quotes are
// tolerated; surrounding prose around the array is skipped. Input values
// equal to "No Input" (or the Chinese 无输入) normalize to the empty
// string. Objects missing instruction or output are rejected
// individually; a malformed structure fails as a whole with the byte
// offset of the first parse failure.
ParseResult parse_generation(const std::string& raw, const std::string& source_chunk_id);

// Renders records back into the generation array format (the inverse of
// parse_generation for records of one chunk): Instruction/Input/Output
// keys, empty input written as "No Input". parse_generation ∘
// serialize_generation is the identity on such lists.
std::string serialize_generation(const std::vector<InstructionRecord>& records);

enum class ViolationCode {
    EmptyInstruction,
    EmptyOutput,
    TooManySentences,       // instruction longer than 2 sentences
    LineBreakInInstruction,
    MediaReferenceInInput,  // audio/image/video file references
};

struct Violation {
    ViolationCode code;
    std::string message;
};

// Checks a record against the generation requirements. Empty result
// means valid. Total: never throws.
std::vector<Violation> validate_record(const InstructionRecord& rec);

// Near-duplicate removal over the instruction field: word-unigram
// Jaccard >= threshold clusters records (transitive); the earliest
// record of each cluster survives, in input order.
std::vector<InstructionRecord> dedup_instructions(
    const std::vector<InstructionRecord>& records, double similarity_threshold);

struct LineIssue {
    std::size_t line = 0;  // 1-based
    std::string message;
};

struct ExamIngestResult {
    std::vector<InstructionRecord> records;
    std::vector<LineIssue> errors;
};

// Loads exam-derived records from the canonical line-record file format
// (lowercase keys instruction/input/output + optional metadata). Records
// load with origin=exam; lines missing required fields are reported with
// their line numbers.
ExamIngestResult ingest_exam_records(const std::string& path);

// Canonical line-record serialization (one JSON object per line, lowercase
// keys, metadata keys origin/subject/source_chunk_id/task_kind).
std::string serialize_record(const InstructionRecord& rec);
std::string serialize_records(const std::vector<InstructionRecord>& records);

// Parses one canonical line. Returns nullopt with `why` set on failure.
std::optional<InstructionRecord> parse_record_line(const std::string& line,
                                                   std::string* why = nullptr);
std::optional<std::vector<InstructionRecord>> parse_records(const std::string& text,
                                                            std::vector<LineIssue>* issues = nullptr);

}  // namespace sftkit
