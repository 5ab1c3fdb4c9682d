#include "neutnn/network.hpp"

#include <algorithm>
#include <numeric>

namespace neutnn {

int MinicolumnSpec::synapse_count() const {
    int n = 0;
    for (const auto& neuron : neurons) n += neuron.synapse_count();
    return n;
}

void MinicolumnSpec::validate() const {
    if (neurons.empty()) throw Error("MinicolumnSpec: needs at least one neuron");
    if (wta_k < 1 || wta_k > int(neurons.size()))
        throw Error("MinicolumnSpec: wta_k must be in [1, neuron count]");
    for (const auto& n : neurons) n.validate();
}

int LayerSpec::input_width() const {
    int w = rails;
    for (int d : input_dims) w *= d;
    return w;
}

int LayerSpec::positions() const {
    if (!kernel) return 1;
    int p = 1;
    for (size_t d = 0; d < input_dims.size(); ++d) {
        const int n = (input_dims[d] - kernel->size[d]) / kernel->stride[d] + 1;
        p *= n;
    }
    return p;
}

int LayerSpec::window_width() const {
    if (!kernel) return input_width();
    int w = rails;
    for (int k : kernel->size) w *= k;
    return w;
}

int LayerSpec::output_width() const {
    int per_pos = 0;
    for (const auto& mc : minicolumns) per_pos += mc.output_width();
    return positions() * per_pos;
}

int LayerSpec::synapse_count() const {
    int per_pos = 0;
    for (const auto& mc : minicolumns) per_pos += mc.synapse_count();
    return positions() * per_pos;
}

void LayerSpec::validate() const {
    if (input_dims.empty() || input_dims.size() > 2)
        throw Error("LayerSpec '" + id + "': input_dims must have 1 or 2 dimensions");
    for (int d : input_dims)
        if (d < 1) throw Error("LayerSpec '" + id + "': input dimensions must be >= 1");
    if (rails < 1) throw Error("LayerSpec '" + id + "': rails must be >= 1");
    if (minicolumns.empty()) throw Error("LayerSpec '" + id + "': needs at least one minicolumn");
    if (kernel) {
        if (minicolumns.size() != 1)
            throw Error("LayerSpec '" + id + "': kernel layers take exactly one column template");
        if (kernel->size.size() != input_dims.size() || kernel->stride.size() != input_dims.size())
            throw Error("LayerSpec '" + id + "': kernel rank must match input_dims rank");
        for (size_t d = 0; d < input_dims.size(); ++d) {
            if (kernel->size[d] < 1 || kernel->stride[d] < 1)
                throw Error("LayerSpec '" + id + "': kernel size/stride must be >= 1");
            if (kernel->size[d] > input_dims[d])
                throw Error("LayerSpec '" + id + "': kernel exceeds input extent");
        }
    }
    for (const auto& mc : minicolumns) mc.validate();
    if (kind == LayerKind::CvGroup) {
        for (const auto& mc : minicolumns)
            for (const auto& n : mc.neurons)
                if (n.dendrites.size() != 1)
                    throw Error("LayerSpec '" + id + "': CV units are single-dendrite neurons");
    }
}

std::vector<int> LayerSpec::window_lines(int pos) const {
    std::vector<int> lines;
    const int ww = window_width();
    lines.reserve(ww);
    if (!kernel) {
        lines.resize(ww);
        std::iota(lines.begin(), lines.end(), 0);
        return lines;
    }
    if (input_dims.size() == 1) {
        const int start = pos * kernel->stride[0];
        for (int x = 0; x < kernel->size[0]; ++x)
            for (int r = 0; r < rails; ++r) lines.push_back((start + x) * rails + r);
    } else {
        const int px = (input_dims[1] - kernel->size[1]) / kernel->stride[1] + 1;
        const int y0 = (pos / px) * kernel->stride[0];
        const int x0 = (pos % px) * kernel->stride[1];
        for (int ky = 0; ky < kernel->size[0]; ++ky)
            for (int kx = 0; kx < kernel->size[1]; ++kx)
                for (int r = 0; r < rails; ++r)
                    lines.push_back(((y0 + ky) * input_dims[1] + (x0 + kx)) * rails + r);
    }
    return lines;
}

void ModelSpec::validate() const {
    gamma.validate();
    if (layers.empty()) throw Error("ModelSpec: needs at least one layer");
    for (size_t i = 0; i < layers.size(); ++i) {
        layers[i].validate();
        for (size_t j = i + 1; j < layers.size(); ++j)
            if (layers[i].id == layers[j].id)
                throw Error("ModelSpec: duplicate layer id '" + layers[i].id + "'");
        if (i > 0 && layers[i - 1].output_width() != layers[i].input_width())
            throw Error("ModelSpec: width mismatch between layers '" + layers[i - 1].id +
                        "' and '" + layers[i].id + "'");
    }
}

int ModelSpec::input_width() const { return layers.front().input_width(); }
int ModelSpec::output_width() const { return layers.back().output_width(); }

std::optional<WidthDiagnostic> add_layer(ModelSpec& model, LayerSpec layer) {
    layer.validate();
    if (layer.id.empty()) layer.id = "L" + std::to_string(model.layers.size());
    for (const auto& l : model.layers)
        if (l.id == layer.id) throw Error("add_layer: duplicate layer id '" + layer.id + "'");

    if (!model.layers.empty()) {
        const int expected = model.output_width();
        const int actual = layer.input_width();
        if (expected != actual) {
            WidthDiagnostic diag;
            diag.expected = expected;
            diag.actual = actual;
            diag.message = "layer '" + layer.id + "' input width " + std::to_string(actual) +
                           " does not match previous output width " + std::to_string(expected) +
                           "; suggest input_dims=[" + std::to_string(expected) +
                           "] with rails=1, or resize the previous layer to " +
                           std::to_string(actual) + " outputs";
            return diag;
        }
    }
    model.layers.push_back(std::move(layer));
    return std::nullopt;
}

long long WeightMatrix::pruned_count() const {
    long long n = 0;
    for (uint8_t p : pruned) n += p;
    return n;
}

void WeightMatrix::validate(int w_max) const {
    if (pruned.size() != w.size()) throw Error("WeightMatrix: pruned flag size mismatch");
    for (size_t i = 0; i < w.size(); ++i) {
        if (w[i] < 0 || w[i] > w_max) throw Error("WeightMatrix: weight out of [0, w_max]");
        if (pruned[i] && w[i] != 0) throw Error("WeightMatrix: pruned synapse with nonzero weight");
    }
}

ModelLayout::ModelLayout(const ModelSpec& spec) {
    layer_off_.reserve(spec.layers.size());
    for (const auto& layer : spec.layers) {
        layer_off_.push_back(total_);
        std::vector<int> syn;
        std::vector<std::vector<int>> noff;
        for (const auto& mc : layer.minicolumns) {
            std::vector<int> offs;
            int o = 0;
            for (const auto& n : mc.neurons) {
                offs.push_back(o);
                o += n.synapse_count();
            }
            noff.push_back(std::move(offs));
            syn.push_back(o);
        }
        mc_syn_.push_back(std::move(syn));
        neuron_off_.push_back(std::move(noff));
        total_ += (long long)layer.synapse_count();
    }
}

long long ModelLayout::column_offset(int layer, int pos, int mc) const {
    const auto& syn = mc_syn_[layer];
    long long per_pos = 0;
    for (int s : syn) per_pos += s;
    long long off = layer_off_[layer] + pos * per_pos;
    for (int m = 0; m < mc; ++m) off += syn[m];
    return off;
}

int ModelLayout::neuron_offset(int layer, int mc, int neuron) const {
    return neuron_off_[layer][mc][neuron];
}

WeightMatrix make_weights(const ModelSpec& spec) {
    ModelLayout layout(spec);
    WeightMatrix w;
    w.w.assign(size_t(layout.total_synapses()), 0);
    w.pruned.assign(size_t(layout.total_synapses()), 0);
    return w;
}

std::vector<SpikeTime> wta_inhibit(std::span<const SpikeTime> times, int k) {
    std::vector<int> order(times.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return times[a] < times[b]; });
    std::vector<SpikeTime> out(times.size(), SpikeTime::absent());
    int kept = 0;
    for (int idx : order) {
        if (kept >= k || times[idx].is_absent()) break;
        out[idx] = times[idx];
        ++kept;
    }
    return out;
}

namespace {

SpikeTime evaluate_neuron(const NeuronSpec& neuron, const GammaCycle& gamma,
                          std::span<const int> weights, const SpikeVolley& window,
                          bool cv_mode) {
    int off = 0;
    std::vector<DendriteOutput> dendrites;
    dendrites.reserve(neuron.dendrites.size());
    SpikeTime cv_time = SpikeTime::absent();
    SpikeVolley seg_in;
    const int ww = int(window.size());
    for (const auto& dendrite : neuron.dendrites) {
        std::vector<SegmentResult> results;
        results.reserve(dendrite.segments.size());
        for (const auto& seg : dendrite.segments) {
            seg_in.clear();
            for (int j = 0; j < seg.synapse_count; ++j)
                seg_in.push_back(window[(seg.input_offset + j) % ww]);
            const SpikeTime t = segment_fire_time(weights.subspan(off, seg.synapse_count),
                                                  seg_in, seg, gamma);
            results.push_back({seg.kind, t});
            off += seg.synapse_count;
        }
        if (cv_mode) {
            for (const auto& r : results) cv_time = min(cv_time, r.time);
        } else {
            dendrites.push_back(dendrite_output(results));
        }
    }
    if (cv_mode) return cv_time;
    return neuron_fire_time(dendrites, neuron.distal_advance);
}

}  // namespace

LayerTrace layer_forward(const LayerSpec& layer, const GammaCycle& gamma,
                         std::span<const int> weights, const SpikeVolley& input,
                         const ForwardOptions& opts) {
    if (int(input.size()) != layer.input_width())
        throw Error("layer_forward: input width mismatch for layer '" + layer.id + "'");

    const bool cv = layer.kind == LayerKind::CvGroup;
    LayerTrace trace;
    SpikeVolley window;
    long long off = 0;
    for (int pos = 0; pos < layer.positions(); ++pos) {
        const auto lines = layer.window_lines(pos);
        window.resize(lines.size());
        for (size_t i = 0; i < lines.size(); ++i) window[i] = input[lines[i]];
        for (const auto& mc : layer.minicolumns) {
            ColumnTrace col;
            col.raw_neuron_times.reserve(mc.neurons.size());
            for (const auto& neuron : mc.neurons) {
                const int n_syn = neuron.synapse_count();
                col.raw_neuron_times.push_back(
                    evaluate_neuron(neuron, gamma, weights.subspan(off, n_syn), window, cv));
                off += n_syn;
            }
            if (cv) {
                col.neuron_times = col.raw_neuron_times;
                if (!opts.cv_enables.empty()) {
                    if (opts.cv_enables.size() != mc.neurons.size())
                        throw Error("layer_forward: enable vector width mismatch");
                    for (size_t u = 0; u < col.neuron_times.size(); ++u)
                        col.neuron_times[u] =
                            cv_unit_fire(opts.cv_enables[u] != 0, col.neuron_times[u]);
                }
            } else {
                col.neuron_times = wta_inhibit(col.raw_neuron_times, mc.wta_k);
            }
            trace.output.insert(trace.output.end(), col.neuron_times.begin(),
                                col.neuron_times.end());
            trace.columns.push_back(std::move(col));
        }
    }
    return trace;
}

std::vector<SpikeVolley> model_forward(const ModelSpec& model, const WeightMatrix& weights,
                                       const SpikeVolley& input) {
    model.validate();
    ModelLayout layout(model);
    if ((long long)weights.size() != layout.total_synapses())
        throw Error("model_forward: weight matrix size mismatch");

    std::vector<SpikeVolley> volleys;
    const SpikeVolley* cur = &input;
    for (size_t i = 0; i < model.layers.size(); ++i) {
        const auto& layer = model.layers[i];
        std::span<const int> slice(weights.w.data() + layout.layer_offset(int(i)),
                                   size_t(layer.synapse_count()));
        volleys.push_back(layer_forward(layer, model.gamma, slice, *cur).output);
        cur = &volleys.back();
    }
    return volleys;
}

std::optional<int> cv_group_classify(std::span<const SpikeTime> unit_times) {
    std::optional<int> best;
    for (size_t i = 0; i < unit_times.size(); ++i) {
        if (unit_times[i].is_absent()) continue;
        if (!best || unit_times[i] < unit_times[*best]) best = int(i);
    }
    return best;
}

std::optional<int> model_classify(const ModelSpec& model, const WeightMatrix& weights,
                                  const SpikeVolley& input) {
    const auto volleys = model_forward(model, weights, input);
    const auto& last = model.layers.back();
    const auto& out = volleys.back();
    if (last.kind == LayerKind::CvGroup) {
        // Each group casts one vote split evenly among its earliest-firing
        // units (an outright tie carries no preference on its own), and every
        // firing unit also earns a small time-advantage bonus. This keeps the
        // decision driven by which class fires first while still using the
        // full temporal code instead of collapsing ties to the lowest index.
        const int classes = last.minicolumns.front().output_width();
        const int t_max = model.gamma.t_max;
        std::vector<double> score(size_t(classes), 0.0);
        bool any = false;
        for (size_t g = 0; g + classes <= out.size(); g += classes) {
            SpikeTime best = SpikeTime::absent();
            int tied = 0;
            for (int c = 0; c < classes; ++c) {
                const SpikeTime t = out[g + size_t(c)];
                if (t.is_absent()) continue;
                any = true;
                score[size_t(c)] += 0.1 * double(t_max - t.ticks());
                if (t < best) {
                    best = t;
                    tied = 1;
                } else if (t == best) {
                    ++tied;
                }
            }
            if (tied == 0) continue;
            for (int c = 0; c < classes; ++c)
                if (out[g + size_t(c)] == best) score[size_t(c)] += 1.0 / double(tied);
        }
        if (!any) return std::nullopt;
        int arg = 0;
        for (int c = 1; c < classes; ++c)
            if (score[size_t(c)] > score[size_t(arg)]) arg = c;
        return arg;
    }
    return cv_group_classify(out);  // earliest output line, lowest index on ties
}

long long count_synapses(const ModelSpec& model) {
    long long n = 0;
    for (const auto& layer : model.layers) n += layer.synapse_count();
    return n;
}

long long count_synapses(const ModelSpec& model, const WeightMatrix& weights, PruneMode mode) {
    const long long keep = count_synapses(model);
    if (mode == PruneMode::KeepZero) return keep;
    return keep - weights.pruned_count();
}

}  // namespace neutnn
