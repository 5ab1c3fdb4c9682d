#include "neutnn/placecells.hpp"

#include <random>
#include <sstream>

namespace neutnn {

namespace {

MinicolumnSpec make_structural_minicolumn(const PlaceCellConfig::McShape& shape, int window,
                                          int w_max) {
    MinicolumnSpec mc;
    mc.wta_k = 1;
    for (int n = 0; n < shape.neurons; ++n) {
        NeuronSpec neuron;
        neuron.distal_advance = 1;
        int tile = 0;
        for (int d = 0; d < shape.dendrites; ++d) {
            DendriteSpec dendrite;
            for (int s = 0; s < shape.segments; ++s) {
                SegmentSpec seg;
                // first segment of each dendrite drives, the rest provide context
                seg.kind = s == 0 ? SegmentKind::Proximal : SegmentKind::Distal;
                seg.synapse_count = shape.synapses;
                seg.threshold = default_threshold(shape.synapses, w_max);
                seg.response = ResponseKind::Rnl;
                seg.input_offset = tile % window;
                tile += shape.synapses;
                dendrite.segments.push_back(seg);
            }
            neuron.dendrites.push_back(std::move(dendrite));
        }
        mc.neurons.push_back(std::move(neuron));
    }
    return mc;
}

}  // namespace

ModelSpec build_place_cells(const PlaceCellConfig& cfg, GammaCycle gamma) {
    gamma.validate();
    ModelSpec model;
    model.gamma = gamma;
    LayerSpec layer;
    layer.id = "place_cells";
    layer.kind = LayerKind::Minicolumn;
    layer.input_dims = {cfg.mc1.synapses};
    layer.rails = 1;
    layer.learning = Learning::Supervised;
    const int window = layer.input_width();
    const int w_max = gamma.w_max();
    layer.minicolumns.push_back(make_structural_minicolumn(cfg.mc1, window, w_max));
    layer.minicolumns.push_back(make_structural_minicolumn(cfg.mc2, window, w_max));
    layer.minicolumns.push_back(make_structural_minicolumn(cfg.mc2, window, w_max));
    model.layers.push_back(std::move(layer));
    model.validate();
    return model;
}

void Environment::validate() const {
    if (rows < 1 || cols < 1 || features.size() != size_t(rows) * size_t(cols))
        throw Error("Environment: feature grid does not match rows*cols");
    for (int f : features)
        if (f < 0) throw Error("Environment: negative feature id");
}

Environment make_distinct_environment(int rows, int cols, int id) {
    Environment env{id, rows, cols, {}};
    env.features.resize(size_t(rows) * cols);
    for (size_t i = 0; i < env.features.size(); ++i) env.features[i] = int(i);
    return env;
}

Environment make_ambiguous_environment(int rows, int cols, int feature, int id) {
    Environment env{id, rows, cols, {}};
    env.features.assign(size_t(rows) * cols, feature);
    return env;
}

Environment make_random_environment(int rows, int cols, int alphabet, uint64_t seed, int id) {
    Environment env{id, rows, cols, {}};
    std::mt19937_64 rng(seed);
    env.features.resize(size_t(rows) * cols);
    for (auto& f : env.features) f = int(rng() % uint64_t(alphabet));
    return env;
}

std::string environment_to_text(const Environment& env) {
    env.validate();
    std::ostringstream out;
    out << "environment " << env.id << " " << env.rows << " " << env.cols << "\n";
    for (int r = 0; r < env.rows; ++r) {
        for (int c = 0; c < env.cols; ++c) {
            if (c) out << " ";
            out << env.at(r, c);
        }
        out << "\n";
    }
    return out.str();
}

Environment environment_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string tag;
    Environment env;
    if (!(in >> tag >> env.id >> env.rows >> env.cols) || tag != "environment")
        throw Error("environment file: bad header");
    env.features.resize(size_t(std::max(env.rows, 0)) * size_t(std::max(env.cols, 0)));
    for (auto& f : env.features)
        if (!(in >> f)) throw Error("environment file: truncated grid");
    env.validate();
    return env;
}

SpikeVolley encode_observation(const Environment& env, int row, int col, int alphabet,
                               const GammaCycle& cycle) {
    env.validate();
    cycle.validate();
    if (row < 0 || row >= env.rows || col < 0 || col >= env.cols)
        throw Error("encode_observation: location outside the grid");

    SpikeVolley volley(size_t(alphabet) * 5, SpikeTime::absent());
    const int f = env.at(row, col);
    if (f >= alphabet) throw Error("encode_observation: feature outside the alphabet");
    volley[size_t(f)] = SpikeTime::at(0);

    const int dr[4] = {-1, 0, 1, 0};  // N, E, S, W
    const int dc[4] = {0, 1, 0, -1};
    for (int k = 0; k < 4; ++k) {
        const int r = row + dr[k], c = col + dc[k];
        if (r < 0 || r >= env.rows || c < 0 || c >= env.cols) continue;
        const int nf = env.at(r, c);
        if (nf >= alphabet) throw Error("encode_observation: feature outside the alphabet");
        volley[size_t(alphabet) * (1 + k) + nf] = SpikeTime::at(0);
    }
    return volley;
}

PlaceCellTask::PlaceCellTask(int rows, int cols, int alphabet, bool distal_enabled,
                             GammaCycle gamma)
    : rows_(rows), cols_(cols), alphabet_(alphabet) {
    if (rows < 1 || cols < 1 || alphabet < 1) throw Error("PlaceCellTask: bad grid parameters");
    gamma.validate();
    const int w_max = gamma.w_max();
    const int locations = rows * cols;

    LayerSpec layer;
    layer.id = "orientation";
    layer.kind = LayerKind::Minicolumn;
    layer.input_dims = {alphabet * 5};
    layer.rails = 1;
    layer.learning = Learning::Supervised;
    MinicolumnSpec mc;
    mc.wta_k = 1;
    for (int loc = 0; loc < locations; ++loc) {
        NeuronSpec neuron;
        // an advance of 2 lets timely context clearly precede proximal drive
        neuron.distal_advance = distal_enabled ? 2 : 0;
        DendriteSpec dendrite;
        SegmentSpec proximal;
        proximal.kind = SegmentKind::Proximal;
        proximal.synapse_count = alphabet;
        proximal.input_offset = 0;
        proximal.response = ResponseKind::Rnl;
        proximal.threshold = w_max;  // a single fully-learned feature line fires it
        dendrite.segments.push_back(proximal);
        SegmentSpec distal;
        distal.kind = SegmentKind::Distal;
        distal.synapse_count = alphabet * 4;
        distal.input_offset = alphabet;
        distal.response = ResponseKind::Rnl;
        distal.threshold = 3 * w_max;  // demands at least three matching neighbors
        dendrite.segments.push_back(distal);
        neuron.dendrites.push_back(std::move(dendrite));
        mc.neurons.push_back(std::move(neuron));
    }
    layer.minicolumns.push_back(std::move(mc));
    model_.gamma = gamma;
    model_.layers.push_back(std::move(layer));
    model_.validate();
}

void PlaceCellTask::train(const Environment& env, int epochs, uint64_t seed) {
    env.validate();
    if (env.rows != rows_ || env.cols != cols_)
        throw Error("PlaceCellTask: environment grid does not match the task grid");

    std::vector<TrainSample> samples;
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c)
            samples.push_back({encode_observation(env, r, c, alphabet_, model_.gamma),
                               r * cols_ + c});

    WeightMatrix weights = make_weights(model_);
    init_weights(weights, model_.gamma.w_max(), seed);
    StdpParams params;
    train_dataset(model_, weights, samples, epochs, seed, params);
    weights_[env.id] = std::move(weights);
}

int PlaceCellTask::query(const Environment& env, int row, int col) const {
    auto it = weights_.find(env.id);
    if (it == weights_.end())
        throw Error("PlaceCellTask: environment " + std::to_string(env.id) + " is untrained");
    const auto pred = model_classify(model_, it->second,
                                     encode_observation(env, row, col, alphabet_, model_.gamma));
    return pred ? *pred : -1;
}

std::vector<PlaceCellTask::EnvResult> PlaceCellTask::recall_per_env(
    const std::vector<Environment>& envs, int trials, uint64_t seed) const {
    if (trials < 1) throw Error("PlaceCellTask: recall over zero trials is undefined");
    if (envs.empty()) throw Error("PlaceCellTask: no environments");
    std::vector<EnvResult> results;
    std::mt19937_64 rng(seed);
    for (const auto& env : envs) {
        int correct = 0;
        for (int t = 0; t < trials; ++t) {
            const int r = int(rng() % uint64_t(rows_));
            const int c = int(rng() % uint64_t(cols_));
            if (query(env, r, c) == r * cols_ + c) ++correct;
        }
        results.push_back({env.id, trials, double(correct) / double(trials)});
    }
    return results;
}

double PlaceCellTask::recall(const std::vector<Environment>& envs, int trials,
                             uint64_t seed) const {
    const auto results = recall_per_env(envs, trials, seed);
    double sum = 0.0;
    for (const auto& r : results) sum += r.recall;
    return sum / double(results.size());
}

std::string orientation_to_csv(const std::vector<PlaceCellTask::EnvResult>& results) {
    std::ostringstream csv;
    csv << "environment,trials,recall\n";
    for (const auto& r : results) csv << r.env_id << "," << r.trials << "," << r.recall << "\n";
    return csv.str();
}

}  // namespace neutnn
