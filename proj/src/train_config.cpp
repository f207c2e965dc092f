#include "sftkit/train_config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <functional>
#include <sstream>

namespace sftkit {

namespace {

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::size_t levenshtein(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1);
    std::vector<std::size_t> cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

struct KeyHandler {
    const char* key;
    std::function<std::string(const TrainConfig&)> get;
    // Returns an error message, or empty on success.
    std::function<std::string(TrainConfig&, const std::string&)> set;
};

std::string parse_double(const std::string& value, double& out) {
    try {
        std::size_t used = 0;
        out = std::stod(value, &used);
        if (used != value.size()) return "not a number";
    } catch (...) {
        return "not a number";
    }
    return "";
}

std::string parse_int(const std::string& value, int& out) {
    try {
        std::size_t used = 0;
        out = std::stoi(value, &used);
        if (used != value.size()) return "not an integer";
    } catch (...) {
        return "not an integer";
    }
    return "";
}

const std::vector<KeyHandler>& handlers() {
    static const std::vector<KeyHandler> table = {
        {"learning_rate",
         [](const TrainConfig& c) { return format_value(c.learning_rate); },
         [](TrainConfig& c, const std::string& v) {
             double d = 0;
             if (auto err = parse_double(v, d); !err.empty()) return err;
             if (!(d > 0)) return std::string("must be > 0");
             c.learning_rate = d;
             return std::string();
         }},
        {"scheduler",
         [](const TrainConfig&) { return std::string("cosine_annealing"); },
         [](TrainConfig& c, const std::string& v) {
             if (v != "cosine_annealing") return std::string("unknown scheduler \"" + v + "\"");
             c.scheduler = Scheduler::CosineAnnealing;
             return std::string();
         }},
        {"grad_clip_threshold",
         [](const TrainConfig& c) { return format_value(c.grad_clip_threshold); },
         [](TrainConfig& c, const std::string& v) {
             double d = 0;
             if (auto err = parse_double(v, d); !err.empty()) return err;
             if (!(d > 0)) return std::string("must be > 0");
             c.grad_clip_threshold = d;
             return std::string();
         }},
        {"max_input_tokens",
         [](const TrainConfig& c) { return std::to_string(c.max_input_tokens); },
         [](TrainConfig& c, const std::string& v) {
             int i = 0;
             if (auto err = parse_int(v, i); !err.empty()) return err;
             if (i < 1) return std::string("must be >= 1");
             c.max_input_tokens = i;
             return std::string();
         }},
        {"max_response_tokens",
         [](const TrainConfig& c) { return std::to_string(c.max_response_tokens); },
         [](TrainConfig& c, const std::string& v) {
             int i = 0;
             if (auto err = parse_int(v, i); !err.empty()) return err;
             if (i < 1) return std::string("must be >= 1");
             c.max_response_tokens = i;
             return std::string();
         }},
        {"lora_rank",
         [](const TrainConfig& c) { return std::to_string(c.lora_rank); },
         [](TrainConfig& c, const std::string& v) {
             int i = 0;
             if (auto err = parse_int(v, i); !err.empty()) return err;
             if (i < 1) return std::string("must be >= 1");
             c.lora_rank = i;
             return std::string();
         }},
        {"dropout",
         [](const TrainConfig& c) { return format_value(c.dropout); },
         [](TrainConfig& c, const std::string& v) {
             double d = 0;
             if (auto err = parse_double(v, d); !err.empty()) return err;
             if (d < 0 || d >= 1) return std::string("must lie in [0,1)");
             c.dropout = d;
             return std::string();
         }},
        {"half_precision",
         [](const TrainConfig& c) { return std::string(c.half_precision ? "true" : "false"); },
         [](TrainConfig& c, const std::string& v) {
             if (v == "true") {
                 c.half_precision = true;
             } else if (v == "false") {
                 c.half_precision = false;
             } else {
                 return std::string("must be true or false");
             }
             return std::string();
         }},
        {"zero_stage",
         [](const TrainConfig& c) { return std::to_string(c.zero_stage); },
         [](TrainConfig& c, const std::string& v) {
             int i = 0;
             if (auto err = parse_int(v, i); !err.empty()) return err;
             if (i < 0 || i > 3) return std::string("must lie in [0,3]");
             c.zero_stage = i;
             return std::string();
         }},
        {"validation_fraction",
         [](const TrainConfig& c) { return format_value(c.validation_fraction); },
         [](TrainConfig& c, const std::string& v) {
             double d = 0;
             if (auto err = parse_double(v, d); !err.empty()) return err;
             if (!(d > 0 && d < 1)) return std::string("must lie in (0,1)");
             c.validation_fraction = d;
             return std::string();
         }},
        {"optimizer",
         [](const TrainConfig&) { return std::string("adamw"); },
         [](TrainConfig& c, const std::string& v) {
             if (v != "adamw") return std::string("unknown optimizer \"" + v + "\"");
             c.optimizer = Optimizer::AdamW;
             return std::string();
         }},
    };
    return table;
}

const KeyHandler* find_handler(const std::string& key) {
    for (const auto& h : handlers()) {
        if (key == h.key) return &h;
    }
    return nullptr;
}

std::string nearest_key(const std::string& key) {
    std::size_t best = SIZE_MAX;
    std::string name;
    for (const auto& h : handlers()) {
        const std::size_t d = levenshtein(key, h.key);
        if (d < best) {
            best = d;
            name = h.key;
        }
    }
    return best <= 3 ? name : std::string();
}

}  // namespace

std::string emit_config(const TrainConfig& config) {
    std::ostringstream out;
    out << "# sftkit training configuration\n";
    for (const auto& h : handlers()) {
        if (std::string(h.key) == "dropout") {
            out << "# dropout placement (adapter input vs elsewhere) is left to the trainer\n";
        }
        out << h.key << " = " << h.get(config) << "\n";
    }
    return out.str();
}

std::variant<TrainConfig, std::vector<ConfigViolation>> apply_overrides(
    const std::vector<std::string>& overrides) {
    TrainConfig config;
    std::vector<ConfigViolation> violations;
    for (const auto& item : overrides) {
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos) {
            violations.push_back({item, "expected key=value"});
            continue;
        }
        const std::string key = trim(item.substr(0, eq));
        const std::string value = trim(item.substr(eq + 1));
        const KeyHandler* h = find_handler(key);
        if (h == nullptr) {
            std::string msg = "unknown key";
            if (auto near = nearest_key(key); !near.empty()) msg += "; did you mean \"" + near + "\"?";
            violations.push_back({key, msg});
            continue;
        }
        if (auto err = h->set(config, value); !err.empty()) {
            violations.push_back({key, err});
        }
    }
    if (!violations.empty()) return violations;
    return config;
}

std::variant<TrainConfig, std::vector<ConfigViolation>> validate_config(const std::string& text) {
    TrainConfig config;
    std::vector<ConfigViolation> violations;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (const std::size_t hash = line.find('#'); hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            violations.push_back({line, "expected key = value"});
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const KeyHandler* h = find_handler(key);
        if (h == nullptr) {
            std::string msg = "unknown key";
            if (auto near = nearest_key(key); !near.empty()) msg += "; did you mean \"" + near + "\"?";
            violations.push_back({key, msg});
            continue;
        }
        if (auto err = h->set(config, value); !err.empty()) {
            violations.push_back({key, err});
        }
    }
    if (!violations.empty()) return violations;
    return config;
}

}  // namespace sftkit
