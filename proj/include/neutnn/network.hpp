#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "neutnn/neuron.hpp"
#include "neutnn/spike.hpp"

namespace neutnn {

/// Neurons sharing one input window and competing via k-WTA inhibition.
struct MinicolumnSpec {
    std::vector<NeuronSpec> neurons;
    int wta_k = 1;

    int output_width() const { return int(neurons.size()); }
    int synapse_count() const;
    void validate() const;
};

enum class LayerKind { Minicolumn, CvGroup };
enum class Learning { Unsupervised, Supervised };

/// Kernel geometry per input dimension (1-D or 2-D).
struct Kernel {
    std::vector<int> size;
    std::vector<int> stride;
};

/// A layer is either a sliding-kernel replication of one column template
/// (independent weights per position) or, without a kernel, a list of
/// parallel columns each consuming the full layer input.
/// CvGroup layers hold clustering-voter units: single-AD neurons gated by a
/// per-class 1-bit enable; one unit per output class.
struct LayerSpec {
    std::string id;
    LayerKind kind = LayerKind::Minicolumn;
    std::vector<int> input_dims;  // spatial extents, rails excluded
    int rails = 1;
    std::optional<Kernel> kernel;
    std::vector<MinicolumnSpec> minicolumns;  // exactly 1 when kernel is set
    Learning learning = Learning::Unsupervised;

    int input_width() const;
    /// Kernel positions per dimension multiplied out (1 without kernel).
    int positions() const;
    /// Input lines seen by one column instance.
    int window_width() const;
    int output_width() const;
    int synapse_count() const;
    /// Total column instances = positions() * minicolumns.size().
    int column_instances() const { return positions() * int(minicolumns.size()); }
    void validate() const;

    /// Window line indices (into the layer input volley) for kernel
    /// position `pos`, in canonical row-major rail-minor order.
    std::vector<int> window_lines(int pos) const;
};

struct ModelSpec {
    GammaCycle gamma;
    std::vector<LayerSpec> layers;

    void validate() const;
    int input_width() const;
    int output_width() const;
};

/// Outcome of attempting to append a layer with mismatched widths.
struct WidthDiagnostic {
    int expected = 0;  // output width of the last layer
    int actual = 0;    // input width of the candidate layer
    std::string message;
};

/// Appends `layer` if its input width matches the model's current output
/// width, assigning a unique id when the layer has none. On mismatch the
/// model is untouched and a diagnostic naming both widths plus suggested
/// parameter adjustments is returned.
std::optional<WidthDiagnostic> add_layer(ModelSpec& model, LayerSpec layer);

// ---------------------------------------------------------------------------
// Weight storage: flat canonical (layer, position, neuron, dendrite,
// segment, synapse) order with a per-synapse pruned flag.

enum class PruneMode { KeepZero, RemoveZero };

struct WeightMatrix {
    std::vector<int> w;
    std::vector<uint8_t> pruned;  // pruned implies w == 0

    size_t size() const { return w.size(); }
    long long pruned_count() const;
    void validate(int w_max) const;
};

/// Precomputed flat offsets for canonical synapse addressing.
class ModelLayout {
public:
    explicit ModelLayout(const ModelSpec& spec);

    long long total_synapses() const { return total_; }
    long long layer_offset(int layer) const { return layer_off_[layer]; }
    /// Synapses per column instance of a layer's template `m`.
    long long column_offset(int layer, int pos, int mc) const;
    /// Offset of a neuron's first synapse within its column instance.
    int neuron_offset(int layer, int mc, int neuron) const;

private:
    std::vector<long long> layer_off_;
    std::vector<std::vector<int>> mc_syn_;          // per layer, synapses per template
    std::vector<std::vector<std::vector<int>>> neuron_off_;  // [layer][mc][neuron]
    long long total_ = 0;
};

WeightMatrix make_weights(const ModelSpec& spec);

// ---------------------------------------------------------------------------
// Forward evaluation

/// Per-column-instance evaluation detail kept for learning.
struct ColumnTrace {
    std::vector<SpikeTime> neuron_times;       // post-inhibition
    std::vector<SpikeTime> raw_neuron_times;   // pre-inhibition
};

struct LayerTrace {
    SpikeVolley output;
    std::vector<ColumnTrace> columns;
};

/// Enables for CvGroup layers: one bit per class, applied to every group.
/// Empty means all-enabled (inference).
struct ForwardOptions {
    std::vector<uint8_t> cv_enables;
};

LayerTrace layer_forward(const LayerSpec& layer, const GammaCycle& gamma,
                         std::span<const int> weights, const SpikeVolley& input,
                         const ForwardOptions& opts = {});

/// k-WTA lateral inhibition: the wta_k earliest finite firers keep their
/// times, everything else is suppressed to ABSENT; ties go to lowest index.
std::vector<SpikeTime> wta_inhibit(std::span<const SpikeTime> times, int k);

/// Volleys threaded through all layers in order; result[i] is layer i's output.
std::vector<SpikeVolley> model_forward(const ModelSpec& model, const WeightMatrix& weights,
                                       const SpikeVolley& input);

/// Class vote of one CV group: argmin over unit fire times, lowest index on
/// ties; nullopt when every unit is silent.
std::optional<int> cv_group_classify(std::span<const SpikeTime> unit_times);

/// End-to-end prediction. CvGroup final layer: majority vote of per-group
/// classes (silent groups abstain). Minicolumn final layer: index of the
/// earliest-firing output line. nullopt when the model stays silent.
std::optional<int> model_classify(const ModelSpec& model, const WeightMatrix& weights,
                                  const SpikeVolley& input);

/// Total instantiated synapse sites. RemoveZero excludes pruned synapses.
long long count_synapses(const ModelSpec& model, const WeightMatrix& weights, PruneMode mode);
/// Structural count, independent of weights (equals KeepZero).
long long count_synapses(const ModelSpec& model);

}  // namespace neutnn
