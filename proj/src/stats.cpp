#include "sftkit/stats.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "sftkit/text.hpp"

namespace sftkit {

const char* to_string(RecordField f) {
    switch (f) {
        case RecordField::Instruction: return "instruction";
        case RecordField::Input: return "input";
        case RecordField::Output: return "output";
    }
    return "output";
}

std::optional<RecordField> field_from_string(const std::string& s) {
    if (s == "instruction") return RecordField::Instruction;
    if (s == "input") return RecordField::Input;
    if (s == "output") return RecordField::Output;
    return std::nullopt;
}

namespace {

const std::string& field_of(const InstructionRecord& rec, RecordField f) {
    switch (f) {
        case RecordField::Instruction: return rec.instruction;
        case RecordField::Input: return rec.input;
        case RecordField::Output: return rec.output;
    }
    return rec.output;
}

}  // namespace

Histogram histogram(const std::vector<InstructionRecord>& records, RecordField field) {
    if (records.empty()) {
        throw std::invalid_argument("histogram requires a non-empty record list");
    }
    std::map<std::size_t, std::size_t> counts;
    for (const auto& rec : records) {
        ++counts[text::word_count(field_of(rec, field))];
    }
    Histogram h;
    h.field = field;
    h.bins.reserve(counts.size());
    for (const auto& [wc, freq] : counts) {
        h.bins.push_back({wc, freq, std::log10(static_cast<double>(freq))});
    }
    return h;
}

std::vector<SubjectShare> category_distribution(const std::vector<InstructionRecord>& records) {
    if (records.empty()) {
        throw std::invalid_argument("category_distribution requires a non-empty record list");
    }
    std::map<int, std::size_t> counts;
    for (const auto& rec : records) ++counts[static_cast<int>(rec.subject)];
    std::vector<SubjectShare> out;
    out.reserve(counts.size());
    for (const auto& [subj, count] : counts) {
        SubjectShare share;
        share.subject = static_cast<CpaSubject>(subj);
        share.count = count;
        share.percent = 100.0 * static_cast<double>(count) / static_cast<double>(records.size());
        out.push_back(share);
    }
    return out;
}

namespace {

std::string format_double(double v) {
    std::ostringstream ss;
    ss.precision(12);
    ss << v;
    return ss.str();
}

}  // namespace

std::string histogram_csv(const Histogram& h) {
    std::string out = "word_count,frequency,log10_frequency\n";
    for (const auto& bin : h.bins) {
        out += std::to_string(bin.word_count) + "," + std::to_string(bin.frequency) + "," +
               format_double(bin.log10_frequency) + "\n";
    }
    return out;
}

std::string distribution_csv(const std::vector<SubjectShare>& shares) {
    std::string out = "subject,count,percent\n";
    for (const auto& s : shares) {
        out += std::string(to_string(s.subject)) + "," + std::to_string(s.count) + "," +
               format_double(s.percent) + "\n";
    }
    return out;
}

}  // namespace sftkit
