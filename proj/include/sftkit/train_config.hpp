#pragma once

#include <string>
#include <variant>
#include <vector>

namespace sftkit {

enum class Scheduler { CosineAnnealing };
enum class Optimizer { AdamW };

// The training hyperparameter bundle handed to an external trainer.
// Defaults are the published fine-tuning settings this toolkit targets.
struct TrainConfig {
    double learning_rate = 5e-05;
    Scheduler scheduler = Scheduler::CosineAnnealing;
    double grad_clip_threshold = 1.0;
    int max_input_tokens = 512;
    int max_response_tokens = 4096;
    int lora_rank = 8;
    double dropout = 0.1;
    bool half_precision = true;  // fp16
    int zero_stage = 2;
    double validation_fraction = 0.10;
    Optimizer optimizer = Optimizer::AdamW;

    bool operator==(const TrainConfig&) const = default;
};

struct ConfigViolation {
    std::string key;
    std::string message;
};

// Emits the key-value config text (stable key order, one "key = value"
// per line, '#' comments).
std::string emit_config(const TrainConfig& config = TrainConfig{});

// Applies "key=value" override strings to the defaults; returns either
// the config or the violations (unknown key, bad type, out of range).
std::variant<TrainConfig, std::vector<ConfigViolation>> apply_overrides(
    const std::vector<std::string>& overrides);

// Parses config text back into a TrainConfig. Unknown keys produce a
// violation with the nearest known key suggested; missing keys take
// their defaults. Round-trips emit_config output exactly.
std::variant<TrainConfig, std::vector<ConfigViolation>> validate_config(const std::string& text);

}  // namespace sftkit
