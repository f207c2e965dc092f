#include "sftkit/mock_llm.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sftkit/rng.hpp"
#include "sftkit/text.hpp"

namespace sftkit {

using nlohmann::json;

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string background_section(const std::string& prompt) {
    const std::string marker = "[Background Knowledge]\n";
    const std::size_t pos = prompt.rfind(marker);
    if (pos == std::string::npos) return prompt;
    return prompt.substr(pos + marker.size());
}

std::size_t requested_count(const std::string& prompt) {
    // "...tasked with providing N diverse task instructions..."
    const std::string marker = "tasked with providing ";
    const std::size_t pos = prompt.find(marker);
    if (pos == std::string::npos) return 10;
    std::size_t i = pos + marker.size();
    std::size_t n = 0;
    while (i < prompt.size() && prompt[i] >= '0' && prompt[i] <= '9') {
        n = n * 10 + static_cast<std::size_t>(prompt[i] - '0');
        ++i;
    }
    return n == 0 ? 10 : n;
}

}  // namespace

CompletionOutcome DeterministicMockClient::complete(const std::string& prompt,
                                                    const CompletionParams&) {
    CompletionOutcome outcome;
    if (prompt.empty()) {
        outcome.status = CompletionStatus::EmptyPrompt;
        outcome.message = "prompt must be non-empty";
        return outcome;
    }

    const std::string background = background_section(prompt);
    const std::size_t want = requested_count(prompt);
    Rng rng(seed_ ^ fnv1a(background));

    auto terms = text::word_tokens(background);
    if (terms.empty()) terms = {"accounting"};
    auto lines = std::vector<std::string>();
    {
        std::size_t start = 0;
        while (start < background.size()) {
            std::size_t nl = background.find('\n', start);
            if (nl == std::string::npos) nl = background.size();
            if (nl > start) lines.push_back(background.substr(start, nl - start));
            start = nl + 1;
        }
        if (lines.empty()) lines.push_back(background);
    }

    auto pick_term = [&]() -> const std::string& {
        return terms[rng.next_below(terms.size())];
    };
    auto pick_line = [&]() -> const std::string& {
        return lines[rng.next_below(lines.size())];
    };

    struct Template {
        const char* task;
        const char* lead;
        bool wants_input;
    };
    static const Template templates[] = {
        {"brainstorming", "List several considerations related to", false},
        {"open_qa", "Explain the meaning of", false},
        {"closed_qa", "Based on the given text, answer whether the passage discusses", true},
        {"rewriting", "Rewrite the following sentence about", true},
        {"extraction", "Extract the key figures concerning", true},
        {"generation", "Draft a short memo covering", false},
        {"classification", "Classify the following items related to", true},
        {"chat", "As an accounting advisor, respond to a client asking about", false},
        {"summarization", "Summarize the main points of the passage about", true},
    };

    json arr = json::array();
    for (std::size_t i = 0; i < want; ++i) {
        const Template& tpl = templates[rng.next_below(std::size(templates))];
        const std::string& topic = pick_term();
        const std::string instruction =
            std::string(tpl.lead) + " " + topic + ".";
        json obj;
        obj["Instruction"] = instruction;
        obj["Input"] = tpl.wants_input ? pick_line() : std::string("No Input");
        obj["Output"] = "Regarding " + topic + ": " + pick_line();
        obj["Task"] = tpl.task;
        arr.push_back(std::move(obj));
    }

    outcome.status = CompletionStatus::Ok;
    outcome.text = arr.dump(2);
    outcome.attempts = 1;
    return outcome;
}

}  // namespace sftkit
