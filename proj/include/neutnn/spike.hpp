#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace neutnn {

/// Error type for contract violations surfaced to callers.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Discrete computation window: spike times live in [0, t_max), synaptic
/// weights in [0, w_max] with w_max = 2^weight_bits - 1.
struct GammaCycle {
    int t_max = 8;
    int weight_bits = 3;

    int w_max() const { return (1 << weight_bits) - 1; }

    void validate() const {
        if (t_max < 2) throw Error("GammaCycle: t_max must be >= 2");
        if (weight_bits < 1) throw Error("GammaCycle: weight_bits must be >= 1");
    }
};

/// Spike latency within a gamma cycle, or ABSENT (no spike this cycle).
/// ABSENT orders strictly later than every finite time; earlier = stronger.
class SpikeTime {
public:
    constexpr SpikeTime() : v_(kAbsentValue) {}

    static constexpr SpikeTime absent() { return SpikeTime(); }
    static constexpr SpikeTime at(int t) {
        SpikeTime s;
        s.v_ = t;
        return s;
    }

    constexpr bool is_absent() const { return v_ == kAbsentValue; }
    constexpr bool is_finite() const { return v_ != kAbsentValue; }

    /// Finite tick value; only meaningful when is_finite().
    constexpr int ticks() const { return v_; }

    friend constexpr auto operator<=>(SpikeTime a, SpikeTime b) = default;

    friend constexpr SpikeTime min(SpikeTime a, SpikeTime b) { return a < b ? a : b; }

    std::string str() const { return is_absent() ? "-" : std::to_string(v_); }

private:
    static constexpr int kAbsentValue = std::numeric_limits<int>::max();
    int v_;
};

/// One spike time per input line, ordered.
using SpikeVolley = std::vector<SpikeTime>;

}  // namespace neutnn
