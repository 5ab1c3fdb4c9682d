#pragma once

#include <string>
#include <vector>

#include "neutnn/network.hpp"

namespace neutnn {

struct PruneConfig {
    int threshold = -1;  // -1: default ceil(w_max/2) at apply time
    bool binarize = false;
    PruneMode mode = PruneMode::KeepZero;

    int effective_threshold(int w_max) const {
        return threshold < 0 ? (w_max + 1) / 2 : threshold;
    }
    void validate(int w_max) const {
        if (threshold > w_max + 1) throw Error("PruneConfig: threshold must be <= w_max + 1");
    }
};

struct ScopeReduction {
    std::string scope;  // e.g. layer id
    long long original = 0;
    long long pruned = 0;
};

struct PruneReport {
    long long original = 0;
    long long pruned = 0;
    long long surviving = 0;
    int threshold = 0;
    bool binarized = false;
    PruneMode mode = PruneMode::KeepZero;
    std::vector<ScopeReduction> per_layer;

    std::string to_text() const;
};

enum class HistogramScope { Segment, Dendrite, Neuron, Layer, Model };

struct Histogram {
    std::string scope_id;             // canonical instance path
    std::vector<long long> buckets;   // w_max+1 buckets
};

/// Weight-value histograms, one per scope instance, in canonical order.
std::vector<Histogram> weight_histogram(const ModelSpec& model, const WeightMatrix& weights,
                                        HistogramScope scope);

/// Zeroes and marks every weight strictly below the threshold; optionally
/// raises every survivor to w_max (1-bit weights). Idempotent.
PruneReport prune(const ModelSpec& model, WeightMatrix& weights, const PruneConfig& cfg);

struct SweepRow {
    int threshold = 0;
    long long surviving = 0;
    double metric = 0.0;
};

/// Evaluates a copy of the weights pruned at each threshold; the base
/// weights are untouched. `metric` is supplied by the caller.
template <typename MetricFn>
std::vector<SweepRow> prune_sweep(const ModelSpec& model, const WeightMatrix& weights,
                                  const std::vector<int>& thresholds, bool binarize,
                                  MetricFn&& metric) {
    std::vector<SweepRow> rows;
    for (int tau : thresholds) {
        WeightMatrix pruned_w = weights;
        PruneConfig cfg;
        cfg.threshold = tau;
        cfg.binarize = binarize;
        cfg.mode = PruneMode::RemoveZero;
        const PruneReport rep = prune(model, pruned_w, cfg);
        SweepRow row;
        row.threshold = tau;
        row.surviving = rep.surviving;
        row.metric = metric(pruned_w);
        rows.push_back(row);
    }
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows, const std::string& metric_name);

}  // namespace neutnn
