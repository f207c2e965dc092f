#include <doctest.h>

#include "sftkit/train_config.hpp"

using namespace sftkit;

TEST_SUITE("train_config") {

TEST_CASE("emitted defaults carry the published hyperparameter values") {
    const std::string text = emit_config();
    CHECK(text.find("learning_rate = 5e-05\n") != std::string::npos);
    CHECK(text.find("scheduler = cosine_annealing\n") != std::string::npos);
    CHECK(text.find("grad_clip_threshold = 1\n") != std::string::npos);
    CHECK(text.find("max_input_tokens = 512\n") != std::string::npos);
    CHECK(text.find("max_response_tokens = 4096\n") != std::string::npos);
    CHECK(text.find("lora_rank = 8\n") != std::string::npos);
    CHECK(text.find("dropout = 0.1\n") != std::string::npos);
    CHECK(text.find("half_precision = true\n") != std::string::npos);
    CHECK(text.find("zero_stage = 2\n") != std::string::npos);
    CHECK(text.find("validation_fraction = 0.1\n") != std::string::npos);
    CHECK(text.find("optimizer = adamw\n") != std::string::npos);
}

TEST_CASE("emit then validate round-trips to the identical config") {
    TrainConfig config;
    config.learning_rate = 3e-4;
    config.lora_rank = 16;
    config.dropout = 0.05;
    config.zero_stage = 3;
    config.half_precision = false;
    const auto result = validate_config(emit_config(config));
    REQUIRE(std::holds_alternative<TrainConfig>(result));
    CHECK(std::get<TrainConfig>(result) == config);

    const auto defaults = validate_config(emit_config());
    REQUIRE(std::holds_alternative<TrainConfig>(defaults));
    CHECK(std::get<TrainConfig>(defaults) == TrainConfig{});
}

TEST_CASE("missing keys take their defaults") {
    const auto result = validate_config("lora_rank = 32\n");
    REQUIRE(std::holds_alternative<TrainConfig>(result));
    const auto& config = std::get<TrainConfig>(result);
    CHECK(config.lora_rank == 32);
    CHECK(config.learning_rate == 5e-05);
    CHECK(config.max_input_tokens == 512);
}

TEST_CASE("override isolation: one override changes only that key") {
    const auto result = apply_overrides({"validation_fraction=0.2"});
    REQUIRE(std::holds_alternative<TrainConfig>(result));
    const auto& config = std::get<TrainConfig>(result);
    TrainConfig expected;
    expected.validation_fraction = 0.2;
    CHECK(config == expected);
}

TEST_CASE("out-of-range override names the offending key") {
    const auto result = apply_overrides({"dropout=1.5"});
    REQUIRE(std::holds_alternative<std::vector<ConfigViolation>>(result));
    const auto& violations = std::get<std::vector<ConfigViolation>>(result);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].key == "dropout");
}

TEST_CASE("unknown key suggests the nearest known key") {
    const auto result = validate_config("learning_rte = 1e-4\n");
    REQUIRE(std::holds_alternative<std::vector<ConfigViolation>>(result));
    const auto& violations = std::get<std::vector<ConfigViolation>>(result);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].key == "learning_rte");
    CHECK(violations[0].message.find("learning_rate") != std::string::npos);
}

TEST_CASE("type mismatches are violations") {
    const auto result = validate_config("lora_rank = eight\nzero_stage = 9\n");
    REQUIRE(std::holds_alternative<std::vector<ConfigViolation>>(result));
    CHECK(std::get<std::vector<ConfigViolation>>(result).size() == 2);
}

TEST_CASE("comments and blank lines are ignored") {
    const auto result = validate_config("# a comment\n\nlora_rank = 4  # trailing\n");
    REQUIRE(std::holds_alternative<TrainConfig>(result));
    CHECK(std::get<TrainConfig>(result).lora_rank == 4);
}

}  // TEST_SUITE
