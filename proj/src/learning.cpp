#include "neutnn/learning.hpp"

#include "neutnn/encode.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

namespace neutnn {

int stdp_update(int w, SpikeTime t_in, SpikeTime t_out, const StdpParams& p, int w_max) {
    int next = w;
    if (t_in.is_finite() && t_out.is_finite()) {
        next = t_in <= t_out ? w + p.capture : w - p.backoff;
    } else if (t_in.is_finite()) {
        next = w + p.search;
    } else if (t_out.is_finite()) {
        next = w - p.backoff;
    }
    return std::clamp(next, 0, w_max);
}

namespace {

struct LayerUpdate {
    const LayerSpec* layer;
    long long offset;  // into the flat weight matrix
};

void update_layer(const LayerSpec& layer, const GammaCycle& gamma, WeightMatrix& weights,
                  long long base, const LayerTrace& trace, const SpikeVolley& input,
                  std::optional<int> label, const StdpParams& params, PruneMode mode,
                  std::vector<int>& staged) {
    const bool supervised = layer.learning == Learning::Supervised;
    const int w_max = gamma.w_max();
    staged.assign(weights.w.begin() + base, weights.w.begin() + base + layer.synapse_count());

    SpikeVolley window;
    long long off = 0;  // relative to base
    int ci = 0;
    for (int pos = 0; pos < layer.positions(); ++pos) {
        const auto lines = layer.window_lines(pos);
        window.resize(lines.size());
        for (size_t i = 0; i < lines.size(); ++i) window[i] = input[lines[i]];
        const int ww = int(window.size());
        for (const auto& mc : layer.minicolumns) {
            const ColumnTrace& col = trace.columns[ci++];
            for (size_t u = 0; u < mc.neurons.size(); ++u) {
                const auto& neuron = mc.neurons[u];
                const int n_syn = neuron.synapse_count();
                const bool gated_off = supervised && int(u) != *label;
                if (gated_off) {
                    off += n_syn;
                    continue;
                }
                // post-inhibition output; the supervised (enabled) unit
                // learns against its own raw response
                const SpikeTime t_out =
                    supervised ? col.raw_neuron_times[u] : col.neuron_times[u];
                int so = 0;
                for (const auto& dendrite : neuron.dendrites) {
                    for (const auto& seg : dendrite.segments) {
                        for (int j = 0; j < seg.synapse_count; ++j) {
                            const long long idx = off + so + j;
                            if (weights.pruned[base + idx]) {
                                if (mode == PruneMode::RemoveZero) continue;
                            }
                            const SpikeTime t_in = window[(seg.input_offset + j) % ww];
                            staged[size_t(idx)] = stdp_update(staged[size_t(idx)], t_in, t_out,
                                                              params, w_max);
                        }
                        so += seg.synapse_count;
                    }
                }
                off += n_syn;
            }
        }
    }
    // commit
    for (size_t i = 0; i < staged.size(); ++i) {
        weights.w[base + i] = staged[i];
        if (weights.pruned[base + i] && staged[i] != 0) weights.pruned[base + i] = 0;
    }
}

bool model_is_supervised(const ModelSpec& model) {
    for (const auto& l : model.layers)
        if (l.learning == Learning::Supervised) return true;
    return false;
}

}  // namespace

std::vector<SpikeVolley> train_cycle(const ModelSpec& model, WeightMatrix& weights,
                                     const SpikeVolley& input, std::optional<int> label,
                                     const StdpParams& params, PruneMode mode) {
    params.validate(model.gamma.w_max());
    if (model_is_supervised(model) && !label)
        throw Error("train_cycle: supervised mode requires a label per sample");

    ModelLayout layout(model);
    if ((long long)weights.size() != layout.total_synapses())
        throw Error("train_cycle: weight matrix size mismatch");

    std::vector<SpikeVolley> volleys;
    std::vector<int> staged;
    const SpikeVolley* cur = &input;
    for (size_t i = 0; i < model.layers.size(); ++i) {
        const auto& layer = model.layers[i];
        const long long base = layout.layer_offset(int(i));
        std::span<const int> slice(weights.w.data() + base, size_t(layer.synapse_count()));

        ForwardOptions opts;
        if (layer.kind == LayerKind::CvGroup && layer.learning == Learning::Supervised) {
            const int classes = layer.minicolumns.front().output_width();
            if (*label < 0 || *label >= classes)
                throw Error("train_cycle: label out of range for CV group");
            opts.cv_enables.assign(size_t(classes), 0);
            opts.cv_enables[size_t(*label)] = 1;
        }
        LayerTrace trace = layer_forward(layer, model.gamma, slice, *cur, opts);
        update_layer(layer, model.gamma, weights, base, trace, *cur, label, params, mode, staged);
        volleys.push_back(std::move(trace.output));
        cur = &volleys.back();
    }
    return volleys;
}

void init_weights(WeightMatrix& weights, int w_max, uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (auto& w : weights.w) w = int(rng() % uint64_t(w_max + 1));
    std::fill(weights.pruned.begin(), weights.pruned.end(), 0);
}

double evaluate_accuracy(const ModelSpec& model, const WeightMatrix& weights,
                         const std::vector<TrainSample>& dataset) {
    if (dataset.empty()) throw Error("evaluate_accuracy: empty dataset");
    int correct = 0;
    for (const auto& s : dataset) {
        const auto pred = model_classify(model, weights, s.volley);
        if (pred && *pred == s.label) ++correct;
    }
    return double(correct) / double(dataset.size());
}

double evaluate_rand_index(const ModelSpec& model, const WeightMatrix& weights,
                           const std::vector<TrainSample>& dataset) {
    if (dataset.size() < 2) throw Error("evaluate_rand_index: need at least 2 samples");
    std::vector<int> predicted, truth;
    for (const auto& s : dataset) {
        const auto pred = model_classify(model, weights, s.volley);
        predicted.push_back(pred ? *pred : -1);
        truth.push_back(s.label);
    }
    return rand_index(predicted, truth);
}

TrainReport train_dataset(const ModelSpec& model, WeightMatrix& weights,
                          const std::vector<TrainSample>& dataset, int epochs, uint64_t seed,
                          const StdpParams& params, PruneMode mode) {
    if (dataset.empty()) throw Error("train_dataset: empty dataset");
    model.validate();
    const bool supervised = model_is_supervised(model);
    for (const auto& s : dataset) {
        if (int(s.volley.size()) != model.input_width())
            throw Error("train_dataset: sample width does not match model input width");
        if (supervised && s.label < 0) throw Error("train_dataset: supervised mode requires labels");
    }

    std::mt19937_64 rng(seed);
    std::vector<size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);

    TrainReport report;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (size_t idx : order) {
            const auto& s = dataset[idx];
            train_cycle(model, weights, s.volley,
                        supervised ? std::optional<int>(s.label) : std::nullopt, params, mode);
        }
        EpochMetric m;
        m.epoch = epoch;
        m.metric = supervised ? "accuracy" : "rand_index";
        m.value = supervised ? evaluate_accuracy(model, weights, dataset)
                             : evaluate_rand_index(model, weights, dataset);
        m.synapse_count = count_synapses(model, weights, mode);
        report.epochs.push_back(m);
    }
    return report;
}

std::string metrics_to_csv(const TrainReport& report) {
    std::ostringstream csv;
    csv << "epoch,metric,value,synapse_count\n";
    for (const auto& m : report.epochs)
        csv << m.epoch << "," << m.metric << "," << m.value << "," << m.synapse_count << "\n";
    return csv.str();
}

}  // namespace neutnn
