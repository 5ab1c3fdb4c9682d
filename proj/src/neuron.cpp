#include "neutnn/neuron.hpp"

#include <algorithm>

namespace neutnn {

int default_threshold(int synapse_count, int w_max) {
    return (synapse_count * w_max + 1) / 2;
}

int DendriteSpec::synapse_count() const {
    int n = 0;
    for (const auto& s : segments) n += s.synapse_count;
    return n;
}

void DendriteSpec::validate() const {
    if (segments.empty()) throw Error("DendriteSpec: needs at least one segment");
    for (const auto& s : segments) s.validate();
}

int NeuronSpec::synapse_count() const {
    int n = 0;
    for (const auto& d : dendrites) n += d.synapse_count();
    return n;
}

void NeuronSpec::validate(bool require_proximal) const {
    if (dendrites.empty()) throw Error("NeuronSpec: needs at least one dendrite");
    if (distal_advance < 0) throw Error("NeuronSpec: distal_advance must be >= 0");
    for (const auto& d : dendrites) d.validate();
    if (require_proximal) {
        bool has_proximal = false;
        for (const auto& d : dendrites)
            for (const auto& s : d.segments)
                if (s.kind == SegmentKind::Proximal) has_proximal = true;
        if (!has_proximal) throw Error("NeuronSpec: neuron can never fire without a proximal segment");
    }
}

int synapse_response(int w, SpikeTime t_in, ResponseKind kind, int t) {
    if (t_in.is_absent() || t < t_in.ticks()) return 0;
    if (kind == ResponseKind::Snl) return w;
    return std::min(t - t_in.ticks() + 1, w);
}

SpikeTime segment_fire_time(std::span<const int> weights, std::span<const SpikeTime> inputs,
                            const SegmentSpec& spec, const GammaCycle& cycle) {
    if (weights.size() != inputs.size() || int(weights.size()) != spec.synapse_count)
        throw Error("segment_fire_time: weights/inputs length mismatch");

    // Per-tick potential deltas expressed as events: a slope change of +1
    // over [t_in, t_in+w) for RNL, a single jump of w at t_in for SNL.
    struct Event {
        int t;
        int slope_delta;
        int jump;
    };
    std::vector<Event> events;
    events.reserve(weights.size() * 2);
    for (size_t i = 0; i < weights.size(); ++i) {
        const int w = weights[i];
        if (w <= 0 || inputs[i].is_absent()) continue;
        const int t_in = inputs[i].ticks();
        if (t_in >= cycle.t_max) continue;
        if (spec.response == ResponseKind::Snl) {
            events.push_back({t_in, 0, w});
        } else {
            events.push_back({t_in, +1, 0});
            events.push_back({t_in + w, -1, 0});
        }
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.t < b.t; });

    long long potential = 0;
    int slope = 0;
    int t_prev = -1;  // potential is P(t_prev)
    size_t i = 0;
    while (i < events.size()) {
        const int b = events[i].t;
        // ticks t_prev+1 .. b-1 accumulate `slope` each
        if (slope > 0 && potential < spec.threshold) {
            const long long need = spec.threshold - potential;
            const long long k = (need + slope - 1) / slope;
            const long long t_fire = t_prev + k;
            if (t_fire <= b - 1 && t_fire < cycle.t_max) return SpikeTime::at(int(t_fire));
        }
        if (b - 1 > t_prev) {
            potential += (long long)slope * (b - 1 - t_prev);
            t_prev = b - 1;
        }
        int jump = 0;
        while (i < events.size() && events[i].t == b) {
            slope += events[i].slope_delta;
            jump += events[i].jump;
            ++i;
        }
        // tick b itself
        potential += slope + jump;
        t_prev = b;
        if (b < cycle.t_max && potential >= spec.threshold) return SpikeTime::at(b);
    }
    // after the last event the RNL slope has fully decayed and SNL is flat
    if (slope > 0 && potential < spec.threshold) {
        const long long need = spec.threshold - potential;
        const long long k = (need + slope - 1) / slope;
        const long long t_fire = t_prev + k;
        if (t_fire < cycle.t_max) return SpikeTime::at(int(t_fire));
    }
    return SpikeTime::absent();
}

DendriteOutput dendrite_output(std::span<const SegmentResult> segments) {
    if (segments.empty()) throw Error("dendrite_output: needs at least one segment result");
    DendriteOutput out;
    for (const auto& s : segments) {
        if (s.kind == SegmentKind::Proximal)
            out.proximal = min(out.proximal, s.time);
        else
            out.distal = min(out.distal, s.time);
    }
    return out;
}

SpikeTime neuron_fire_time(std::span<const DendriteOutput> dendrites, int alpha) {
    if (dendrites.empty()) throw Error("neuron_fire_time: needs at least one dendrite output");
    SpikeTime p = SpikeTime::absent();
    for (const auto& d : dendrites) p = min(p, d.proximal);
    if (p.is_absent()) return SpikeTime::absent();
    int context = 0;
    for (const auto& d : dendrites)
        if (d.distal.is_finite() && d.distal <= p) ++context;
    return SpikeTime::at(std::max(0, p.ticks() - alpha * context));
}

SpikeTime cv_unit_fire(bool enable, SpikeTime segment_time) {
    return enable ? segment_time : SpikeTime::absent();
}

}  // namespace neutnn
