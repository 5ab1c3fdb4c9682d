#pragma once

#include <span>
#include <vector>

#include "neutnn/spike.hpp"

namespace neutnn {

/// Non-decaying synaptic response shape.
enum class ResponseKind { Rnl, Snl };

enum class SegmentKind { Proximal, Distal };

/// Point-neuron-equivalent accumulator with its own threshold.
/// input_offset selects where in the consuming window this segment's
/// synapses attach: synapse j reads window line (input_offset + j) mod W.
struct SegmentSpec {
    SegmentKind kind = SegmentKind::Proximal;
    int synapse_count = 1;
    int threshold = 1;
    ResponseKind response = ResponseKind::Rnl;
    int input_offset = 0;

    void validate() const {
        if (synapse_count < 1) throw Error("SegmentSpec: synapse_count must be >= 1");
        if (threshold < 1) throw Error("SegmentSpec: threshold must be >= 1");
        if (input_offset < 0) throw Error("SegmentSpec: input_offset must be >= 0");
    }
};

/// Default segment threshold when a config leaves it unspecified:
/// ceil(0.5 * synapse_count * w_max).
int default_threshold(int synapse_count, int w_max);

struct DendriteSpec {
    std::vector<SegmentSpec> segments;

    int synapse_count() const;
    void validate() const;
};

struct NeuronSpec {
    std::vector<DendriteSpec> dendrites;
    int distal_advance = 1;  // ticks gained per dendrite with timely distal context

    int synapse_count() const;
    /// can_fire: requires >= 1 proximal segment somewhere when enforced
    void validate(bool require_proximal = false) const;
};

/// Contribution of one synapse to its segment's potential at tick t.
/// RNL ramps +1 per tick from t_in, saturating at w; SNL steps to w at t_in.
/// ABSENT input contributes zero forever.
int synapse_response(int w, SpikeTime t_in, ResponseKind kind, int t);

/// Earliest tick at which the accumulated synaptic response reaches the
/// segment threshold; ABSENT if never reached within the cycle.
/// Event-driven (no per-tick scan); equals the tick-by-tick oracle.
SpikeTime segment_fire_time(std::span<const int> weights, std::span<const SpikeTime> inputs,
                            const SegmentSpec& spec, const GammaCycle& cycle);

struct DendriteOutput {
    SpikeTime proximal = SpikeTime::absent();
    SpikeTime distal = SpikeTime::absent();
};

struct SegmentResult {
    SegmentKind kind;
    SpikeTime time;
};

/// Earliest-firing (highest activated) segment per kind.
DendriteOutput dendrite_output(std::span<const SegmentResult> segments);

/// Body integration: proximal drive is necessary to fire; each dendrite
/// whose distal context arrives no later than the proximal time advances
/// the output by `alpha` ticks, floored at 0.
SpikeTime neuron_fire_time(std::span<const DendriteOutput> dendrites, int alpha);

/// Clustering-voter gate: a proximal segment degenerated to a 1-bit enable.
SpikeTime cv_unit_fire(bool enable, SpikeTime segment_time);

}  // namespace neutnn
