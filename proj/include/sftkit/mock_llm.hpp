#pragma once

#include <cstdint>

#include "sftkit/llm_client.hpp"

namespace sftkit {

// Fully offline stand-in for the strong-LLM endpoint. Given the same
// seed and prompt it fabricates byte-identical reference-format JSON
// arrays of task instructions from the prompt's background-knowledge
// section. Exists so the whole generation pipeline runs and reproduces
// without network access.
class DeterministicMockClient : public CompletionClient {
public:
    explicit DeterministicMockClient(std::uint64_t seed) : seed_(seed) {}

    CompletionOutcome complete(const std::string& prompt,
                               const CompletionParams& params) override;

private:
    std::uint64_t seed_;
};

}  // namespace sftkit
