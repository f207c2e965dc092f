#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sftkit/selfinstruct.hpp"

namespace sftkit {

enum class RecordField { Instruction, Input, Output };

const char* to_string(RecordField f);
std::optional<RecordField> field_from_string(const std::string& s);

struct HistogramBin {
    std::size_t word_count = 0;
    std::size_t frequency = 0;
    double log10_frequency = 0.0;
};

struct Histogram {
    RecordField field = RecordField::Output;
    std::vector<HistogramBin> bins;  // sorted by word_count, frequencies >= 1
};

// Word-count distribution of the chosen field over the records. Bin
// frequencies sum to the record count.
Histogram histogram(const std::vector<InstructionRecord>& records, RecordField field);

struct SubjectShare {
    CpaSubject subject;
    std::size_t count = 0;
    double percent = 0.0;
};

// Per-subject counts and percentages (only subjects that appear).
// Percentages sum to 100 within rounding.
std::vector<SubjectShare> category_distribution(const std::vector<InstructionRecord>& records);

// CSV emitters (header + rows, LF line endings).
std::string histogram_csv(const Histogram& h);
std::string distribution_csv(const std::vector<SubjectShare>& shares);

}  // namespace sftkit
