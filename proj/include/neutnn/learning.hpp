#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "neutnn/network.hpp"

namespace neutnn {

/// Integer STDP step sizes. The update is a deterministic case table over
/// (t_in, t_out): capture when the input precedes or meets the output,
/// backoff when it arrives late or never while the segment fired, search
/// when the input fired but the segment stayed silent.
struct StdpParams {
    int capture = 1;
    int backoff = 1;
    int search = 1;

    void validate(int w_max) const {
        if (capture < 0 || backoff < 0 || search < 0)
            throw Error("StdpParams: step sizes must be >= 0");
        if (capture > w_max || backoff > w_max || search > w_max)
            throw Error("StdpParams: step sizes must be <= w_max");
    }
};

/// One-synapse STDP update, clamped to [0, w_max].
int stdp_update(int w, SpikeTime t_in, SpikeTime t_out, const StdpParams& p, int w_max);

struct TrainSample {
    SpikeVolley volley;
    int label = -1;
};

/// One synchronous learning cycle: forward pass, per-synapse updates
/// against post-inhibition output times, atomic end-of-cycle commit.
/// Supervised layers gate updates by the label (one-hot enable): only the
/// labeled unit's synapses may change. Under RemoveZero, pruned synapses
/// are not instantiated and never update; under KeepZero they may regrow.
/// Returns the per-layer output volleys of the forward pass.
std::vector<SpikeVolley> train_cycle(const ModelSpec& model, WeightMatrix& weights,
                                     const SpikeVolley& input, std::optional<int> label,
                                     const StdpParams& params,
                                     PruneMode mode = PruneMode::KeepZero);

/// Uniform pseudo-random weights in [0, w_max], deterministic in seed.
/// Pruned flags are cleared.
void init_weights(WeightMatrix& weights, int w_max, uint64_t seed);

struct EpochMetric {
    int epoch = 0;
    std::string metric;
    double value = 0.0;
    long long synapse_count = 0;
};

struct TrainReport {
    std::vector<EpochMetric> epochs;
};

/// Epoch loop over a dataset with per-epoch shuffling; deterministic given
/// seed. Emits rand_index (unsupervised) or accuracy (supervised) per
/// epoch, measured on the same dataset. Weights are trained in place; call
/// init_weights first for a fresh start.
TrainReport train_dataset(const ModelSpec& model, WeightMatrix& weights,
                          const std::vector<TrainSample>& dataset, int epochs, uint64_t seed,
                          const StdpParams& params, PruneMode mode = PruneMode::KeepZero);

/// Fraction of samples whose model_classify prediction equals the label.
double evaluate_accuracy(const ModelSpec& model, const WeightMatrix& weights,
                         const std::vector<TrainSample>& dataset);

/// Rand index between predicted winner indices and dataset labels.
/// Samples with no prediction fall into a dedicated "silent" cluster.
double evaluate_rand_index(const ModelSpec& model, const WeightMatrix& weights,
                           const std::vector<TrainSample>& dataset);

/// CSV rows: epoch,metric,value,synapse_count (with header).
std::string metrics_to_csv(const TrainReport& report);

}  // namespace neutnn
