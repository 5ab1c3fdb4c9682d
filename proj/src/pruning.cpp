#include "neutnn/pruning.hpp"

#include <sstream>

namespace neutnn {

namespace {

// Walks synapses in canonical order, reporting the instance path at the
// requested scope granularity.
template <typename Visit>
void walk_scopes(const ModelSpec& model, HistogramScope scope, Visit&& visit) {
    long long idx = 0;
    for (size_t li = 0; li < model.layers.size(); ++li) {
        const auto& layer = model.layers[li];
        for (int pos = 0; pos < layer.positions(); ++pos) {
            for (size_t m = 0; m < layer.minicolumns.size(); ++m) {
                const auto& mc = layer.minicolumns[m];
                const int col = pos * int(layer.minicolumns.size()) + int(m);
                for (size_t n = 0; n < mc.neurons.size(); ++n) {
                    const auto& neuron = mc.neurons[n];
                    for (size_t d = 0; d < neuron.dendrites.size(); ++d) {
                        const auto& dendrite = neuron.dendrites[d];
                        for (size_t s = 0; s < dendrite.segments.size(); ++s) {
                            const auto& seg = dendrite.segments[s];
                            std::string path;
                            switch (scope) {
                                case HistogramScope::Model: path = "model"; break;
                                case HistogramScope::Layer: path = layer.id; break;
                                case HistogramScope::Neuron:
                                    path = layer.id + ".P" + std::to_string(col) + ".N" +
                                           std::to_string(n);
                                    break;
                                case HistogramScope::Dendrite:
                                    path = layer.id + ".P" + std::to_string(col) + ".N" +
                                           std::to_string(n) + ".D" + std::to_string(d);
                                    break;
                                case HistogramScope::Segment:
                                    path = layer.id + ".P" + std::to_string(col) + ".N" +
                                           std::to_string(n) + ".D" + std::to_string(d) + ".S" +
                                           std::to_string(s);
                                    break;
                            }
                            visit(path, idx, seg.synapse_count);
                            idx += seg.synapse_count;
                        }
                    }
                }
            }
        }
    }
}

}  // namespace

std::vector<Histogram> weight_histogram(const ModelSpec& model, const WeightMatrix& weights,
                                        HistogramScope scope) {
    model.validate();
    const int w_max = model.gamma.w_max();
    std::vector<Histogram> out;
    walk_scopes(model, scope, [&](const std::string& path, long long idx, int count) {
        if (out.empty() || out.back().scope_id != path) {
            out.push_back({path, std::vector<long long>(size_t(w_max) + 1, 0)});
        }
        for (int j = 0; j < count; ++j) ++out.back().buckets[size_t(weights.w[idx + j])];
    });
    return out;
}

PruneReport prune(const ModelSpec& model, WeightMatrix& weights, const PruneConfig& cfg) {
    model.validate();
    const int w_max = model.gamma.w_max();
    cfg.validate(w_max);
    const int tau = cfg.effective_threshold(w_max);

    PruneReport report;
    report.threshold = tau;
    report.binarized = cfg.binarize;
    report.mode = cfg.mode;
    report.original = count_synapses(model);

    walk_scopes(model, HistogramScope::Layer, [&](const std::string& layer_id, long long idx,
                                                  int count) {
        if (report.per_layer.empty() || report.per_layer.back().scope != layer_id)
            report.per_layer.push_back({layer_id, 0, 0});
        auto& scope = report.per_layer.back();
        scope.original += count;
        for (int j = 0; j < count; ++j) {
            const long long i = idx + j;
            if (weights.pruned[i]) {
                ++scope.pruned;
                continue;
            }
            if (weights.w[i] < tau) {
                weights.w[i] = 0;
                weights.pruned[i] = 1;
                ++scope.pruned;
            } else if (cfg.binarize) {
                weights.w[i] = w_max;
            }
        }
    });
    for (const auto& s : report.per_layer) report.pruned += s.pruned;
    report.surviving = report.original - report.pruned;
    return report;
}

std::string PruneReport::to_text() const {
    std::ostringstream out;
    out << "prune threshold " << threshold << (binarized ? " binarize" : "") << " mode "
        << (mode == PruneMode::KeepZero ? "keep_zero" : "remove_zero") << "\n";
    out << "original " << original << "\npruned " << pruned << "\nsurviving " << surviving << "\n";
    for (const auto& s : per_layer) {
        const double pct = s.original ? 100.0 * double(s.pruned) / double(s.original) : 0.0;
        out << "scope " << s.scope << " original " << s.original << " pruned " << s.pruned
            << " reduction_pct " << pct << "\n";
    }
    return out.str();
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows, const std::string& metric_name) {
    std::ostringstream csv;
    csv << "threshold,surviving," << metric_name << "\n";
    for (const auto& r : rows) csv << r.threshold << "," << r.surviving << "," << r.metric << "\n";
    return csv.str();
}

}  // namespace neutnn
