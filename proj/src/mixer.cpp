#include "sftkit/mixer.hpp"

#include <algorithm>
#include <cmath>

namespace sftkit {

namespace {

std::string ratio_string(std::uint64_t a, std::uint64_t b) {
    const std::uint64_t g = std::gcd(a, b);
    if (g > 1) {
        a /= g;
        b /= g;
    }
    return std::to_string(a) + ":" + std::to_string(b);
}

// round(x/y) for nonnegative integers, half away from zero.
std::uint64_t div_round(std::uint64_t x, std::uint64_t y) {
    return (2 * x + y) / (2 * y);
}

}  // namespace

std::pair<std::size_t, std::size_t> mix_counts(std::size_t n_a, std::size_t n_b,
                                               const MixSpec& spec) {
    const std::uint64_t a = spec.ratio_a;
    const std::uint64_t b = spec.ratio_b;
    if (a == 0) return {0, n_b};
    if (b == 0) return {n_a, 0};
    if (n_a == 0) {
        throw MixError("pool A is empty but the ratio requires it; achievable ratio is " +
                       ratio_string(n_a, n_b));
    }
    if (n_b == 0) {
        throw MixError("pool B is empty but the ratio requires it; achievable ratio is " +
                       ratio_string(n_a, n_b));
    }

    const std::uint64_t lhs = static_cast<std::uint64_t>(n_a) * b;
    const std::uint64_t rhs = static_cast<std::uint64_t>(n_b) * a;
    if (lhs == rhs) return {n_a, n_b};
    if (lhs > rhs) {
        // Pool A over-supplied relative to the ratio: keep all of B.
        const std::uint64_t k_a = div_round(rhs, b);
        return {static_cast<std::size_t>(k_a), n_b};
    }
    const std::uint64_t k_b = div_round(lhs, a);
    return {n_a, static_cast<std::size_t>(k_b)};
}

namespace {

// Draw order is pinned: subsample A, subsample B, then interleave.
template <typename Item>
std::vector<Item> run_mix(const std::vector<Item>& pool_a, const std::vector<Item>& pool_b,
                          std::size_t keep_a, std::size_t keep_b, Rng& rng) {
    auto select = [&rng](const std::vector<Item>& pool, std::size_t keep) {
        std::vector<Item> out;
        out.reserve(keep);
        if (keep >= pool.size()) {
            out = pool;
        } else {
            for (std::size_t idx : rng.sample_indices(pool.size(), keep)) {
                out.push_back(pool[idx]);
            }
        }
        return out;
    };
    const std::vector<Item> sel_a = select(pool_a, keep_a);
    const std::vector<Item> sel_b = select(pool_b, keep_b);

    std::vector<Item> out;
    out.reserve(sel_a.size() + sel_b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < sel_a.size() || j < sel_b.size()) {
        const std::size_t rem_a = sel_a.size() - i;
        const std::size_t rem_b = sel_b.size() - j;
        const std::uint64_t draw = rng.next_below(rem_a + rem_b);
        if (draw < rem_a) {
            out.push_back(sel_a[i++]);
        } else {
            out.push_back(sel_b[j++]);
        }
    }
    return out;
}

// ByteWeighted: keep the byte-deficient pool whole and fill from the
// other pool (seeded walk, skip-on-overshoot) up to the ratio's byte
// target. The realized byte ratio is within max(ratio) * largest-item
// of exact.
std::vector<std::size_t> select_bytes(const std::vector<WeightedItem>& pool,
                                      std::uint64_t target_bytes, Rng& rng) {
    std::vector<std::size_t> order = rng.permutation(pool.size());
    std::vector<std::size_t> chosen;
    std::uint64_t total = 0;
    for (std::size_t idx : order) {
        const std::uint64_t w = pool[idx].bytes;
        if (total + w <= target_bytes) {
            chosen.push_back(idx);
            total += w;
        }
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

}  // namespace

std::vector<std::string> mix(const std::vector<std::string>& pool_a,
                             const std::vector<std::string>& pool_b, const MixSpec& spec) {
    if (spec.unit == MixUnit::ByteWeighted) {
        auto lift = [](const std::vector<std::string>& pool) {
            std::vector<WeightedItem> out;
            out.reserve(pool.size());
            for (const auto& s : pool) out.push_back({s, s.size()});
            return out;
        };
        return mix_weighted(lift(pool_a), lift(pool_b), spec);
    }
    const auto [keep_a, keep_b] = mix_counts(pool_a.size(), pool_b.size(), spec);
    Rng rng(spec.seed);
    return run_mix(pool_a, pool_b, keep_a, keep_b, rng);
}

std::vector<std::string> mix_weighted(const std::vector<WeightedItem>& pool_a,
                                      const std::vector<WeightedItem>& pool_b,
                                      const MixSpec& spec) {
    const std::uint64_t a = spec.ratio_a;
    const std::uint64_t b = spec.ratio_b;
    Rng rng(spec.seed);

    auto payloads = [](const std::vector<WeightedItem>& pool) {
        std::vector<std::string> out;
        out.reserve(pool.size());
        for (const auto& item : pool) out.push_back(item.payload);
        return out;
    };

    if (spec.unit == MixUnit::DocumentCount) {
        const auto [keep_a, keep_b] = mix_counts(pool_a.size(), pool_b.size(), spec);
        auto pa = payloads(pool_a);
        auto pb = payloads(pool_b);
        return run_mix(pa, pb, keep_a, keep_b, rng);
    }

    if (a > 0 && pool_a.empty()) {
        throw MixError("pool A is empty but the ratio requires it");
    }
    if (b > 0 && pool_b.empty()) {
        throw MixError("pool B is empty but the ratio requires it");
    }

    std::uint64_t bytes_a = 0;
    std::uint64_t bytes_b = 0;
    for (const auto& item : pool_a) bytes_a += item.bytes;
    for (const auto& item : pool_b) bytes_b += item.bytes;

    std::vector<std::string> sel_a;
    std::vector<std::string> sel_b;
    if (a == 0) {
        sel_b = payloads(pool_b);
    } else if (b == 0) {
        sel_a = payloads(pool_a);
    } else if (bytes_a * b >= bytes_b * a) {
        // A over-supplied by bytes.
        sel_b = payloads(pool_b);
        const std::uint64_t target = div_round(bytes_b * a, b);
        for (std::size_t idx : select_bytes(pool_a, target, rng)) {
            sel_a.push_back(pool_a[idx].payload);
        }
    } else {
        sel_a = payloads(pool_a);
        const std::uint64_t target = div_round(bytes_a * b, a);
        for (std::size_t idx : select_bytes(pool_b, target, rng)) {
            sel_b.push_back(pool_b[idx].payload);
        }
    }

    std::vector<std::string> out;
    out.reserve(sel_a.size() + sel_b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < sel_a.size() || j < sel_b.size()) {
        const std::size_t rem_a = sel_a.size() - i;
        const std::size_t rem_b = sel_b.size() - j;
        const std::uint64_t draw = rng.next_below(rem_a + rem_b);
        out.push_back(draw < rem_a ? sel_a[i++] : sel_b[j++]);
    }
    return out;
}

SplitResult split(const std::vector<std::string>& records, const SplitSpec& spec) {
    const std::size_t n = records.size();
    if (n < 2) {
        throw std::invalid_argument("split requires at least 2 records");
    }
    std::size_t val = static_cast<std::size_t>(
        std::floor(static_cast<double>(n) * spec.validation_fraction + 0.5));
    val = std::clamp<std::size_t>(val, 1, n - 1);

    Rng rng(spec.seed);
    const auto val_indices = rng.sample_indices(n, val);

    SplitResult result;
    result.validation.reserve(val);
    result.train.reserve(n - val);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (next < val_indices.size() && val_indices[next] == i) {
            result.validation.push_back(records[i]);
            ++next;
        } else {
            result.train.push_back(records[i]);
        }
    }
    return result;
}

}  // namespace sftkit
