#include <doctest.h>

#include <cmath>

#include "sftkit/rng.hpp"
#include "sftkit/stats.hpp"

using namespace sftkit;

namespace {

InstructionRecord rec_with_output(const std::string& output, CpaSubject subject = CpaSubject::Others) {
    InstructionRecord rec;
    rec.instruction = "i?";
    rec.output = output;
    rec.origin = Origin::Exam;
    rec.subject = subject;
    return rec;
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("word counts [3,2,3] bin to {2:1, 3:2} with log10 {0, log10(2)}") {
    std::vector<InstructionRecord> records{
        rec_with_output("one two three"),
        rec_with_output("one two"),
        rec_with_output("x y z"),
    };
    const Histogram h = histogram(records, RecordField::Output);
    REQUIRE(h.bins.size() == 2);
    CHECK(h.bins[0].word_count == 2);
    CHECK(h.bins[0].frequency == 1);
    CHECK(h.bins[0].log10_frequency == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(h.bins[1].word_count == 3);
    CHECK(h.bins[1].frequency == 2);
    CHECK(std::abs(h.bins[1].log10_frequency - std::log10(2.0)) < 1e-12);
    CHECK(h.bins[1].log10_frequency == doctest::Approx(0.30103).epsilon(1e-4));
}

TEST_CASE("ten identical lengths give one bin with log10 = 1") {
    std::vector<InstructionRecord> records(10, rec_with_output("a b c d"));
    const Histogram h = histogram(records, RecordField::Output);
    REQUIRE(h.bins.size() == 1);
    CHECK(h.bins[0].frequency == 10);
    CHECK(h.bins[0].log10_frequency == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("single record gives a single bin with log10 = 0") {
    const Histogram h = histogram({rec_with_output("hello")}, RecordField::Output);
    REQUIRE(h.bins.size() == 1);
    CHECK(h.bins[0].log10_frequency == 0.0);
}

TEST_CASE("frequencies sum to input size for every field, order-invariant") {
    Rng rng(3003);
    std::vector<InstructionRecord> records;
    for (int i = 0; i < 250; ++i) {
        std::string out;
        const std::size_t words = rng.next_below(20);
        for (std::size_t w = 0; w < words; ++w) out += "w" + std::to_string(w) + " ";
        auto rec = rec_with_output(out);
        rec.instruction = "instr " + std::to_string(rng.next_below(5));
        rec.input = (i % 2) ? "some input" : "";
        records.push_back(rec);
    }
    for (RecordField field :
         {RecordField::Instruction, RecordField::Input, RecordField::Output}) {
        const Histogram h = histogram(records, field);
        std::size_t total = 0;
        for (const auto& bin : h.bins) {
            CHECK(bin.frequency >= 1);
            total += bin.frequency;
        }
        CHECK(total == records.size());
        for (std::size_t i = 1; i < h.bins.size(); ++i) {
            CHECK(h.bins[i].word_count > h.bins[i - 1].word_count);
        }
    }

    // Permutation invariance.
    auto shuffled = records;
    Rng perm_rng(4);
    for (std::size_t i = shuffled.size(); i > 1; --i) {
        std::swap(shuffled[i - 1], shuffled[perm_rng.next_below(i)]);
    }
    const Histogram a = histogram(records, RecordField::Output);
    const Histogram b = histogram(shuffled, RecordField::Output);
    REQUIRE(a.bins.size() == b.bins.size());
    for (std::size_t i = 0; i < a.bins.size(); ++i) {
        CHECK(a.bins[i].word_count == b.bins[i].word_count);
        CHECK(a.bins[i].frequency == b.bins[i].frequency);
    }
}

TEST_CASE("empty input is an error") {
    CHECK_THROWS_AS(histogram({}, RecordField::Output), std::invalid_argument);
    CHECK_THROWS_AS(category_distribution({}), std::invalid_argument);
}

TEST_CASE("uniform subject distribution: one record per subject is 1/7 each") {
    std::vector<InstructionRecord> records;
    for (CpaSubject s : kAllSubjects) records.push_back(rec_with_output("x", s));
    const auto shares = category_distribution(records);
    REQUIRE(shares.size() == 7);
    double total = 0.0;
    for (const auto& share : shares) {
        CHECK(share.count == 1);
        CHECK(share.percent == doctest::Approx(100.0 / 7.0).epsilon(1e-9));
        total += share.percent;
    }
    CHECK(total == doctest::Approx(100.0).epsilon(1e-4));
}

TEST_CASE("single-subject corpus reports one row at 100%") {
    std::vector<InstructionRecord> records(5, rec_with_output("x", CpaSubject::Auditing));
    const auto shares = category_distribution(records);
    REQUIRE(shares.size() == 1);
    CHECK(shares[0].subject == CpaSubject::Auditing);
    CHECK(shares[0].percent == 100.0);
}

TEST_CASE("mixed fixture matches a hand tally") {
    std::vector<InstructionRecord> records;
    for (int i = 0; i < 3; ++i) records.push_back(rec_with_output("x", CpaSubject::Accounting));
    for (int i = 0; i < 1; ++i) records.push_back(rec_with_output("x", CpaSubject::TaxLaws));
    for (int i = 0; i < 4; ++i) records.push_back(rec_with_output("x", CpaSubject::Others));
    const auto shares = category_distribution(records);
    REQUIRE(shares.size() == 3);
    CHECK(shares[0].subject == CpaSubject::Accounting);
    CHECK(shares[0].count == 3);
    CHECK(shares[0].percent == doctest::Approx(37.5));
    CHECK(shares[1].count == 1);
    CHECK(shares[2].count == 4);
    CHECK(shares[2].percent == doctest::Approx(50.0));
}

TEST_CASE("CSV emitters produce one row per bin plus header") {
    const Histogram h = histogram({rec_with_output("a b"), rec_with_output("c")},
                                  RecordField::Output);
    const std::string csv = histogram_csv(h);
    CHECK(csv.find("word_count,frequency,log10_frequency\n") == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

}  // TEST_SUITE
