#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "neutnn/learning.hpp"
#include "neutnn/network.hpp"

namespace neutnn {

/// Structural parameters of the three-minicolumn place-cells design:
/// one large minicolumn plus two copies of a smaller one.
struct PlaceCellConfig {
    struct McShape {
        int neurons;
        int dendrites;
        int segments;
        int synapses;  // per segment

        long long total() const {
            return (long long)neurons * dendrites * segments * synapses;
        }
    };
    McShape mc1{40, 10, 16, 71};
    McShape mc2{30, 10, 16, 81};

    int grid_rows = 5;
    int grid_cols = 5;
    int feature_count = 4;
};

/// Builds the place-cells model: 1x minicolumn #1 and 2x minicolumn #2 in
/// one layer. At default parameters this counts 454,400 + 2*388,800 =
/// 1,232,000 synapses.
ModelSpec build_place_cells(const PlaceCellConfig& cfg, GammaCycle gamma = {});

/// A 2-D grid of feature identifiers.
struct Environment {
    int id = 0;
    int rows = 0;
    int cols = 0;
    std::vector<int> features;  // row-major

    int at(int r, int c) const { return features[size_t(r) * cols + c]; }
    void validate() const;
};

Environment make_distinct_environment(int rows, int cols, int id);
Environment make_ambiguous_environment(int rows, int cols, int feature, int id);
Environment make_random_environment(int rows, int cols, int alphabet, uint64_t seed, int id);

std::string environment_to_text(const Environment& env);
Environment environment_from_text(const std::string& text);

/// Spike encoding of one observation: the feature at a location goes to
/// proximal rails (one-hot over the alphabet, spike at 0) and the four
/// neighboring features go to distal rails (4 x alphabet one-hot blocks in
/// N,E,S,W order; missing neighbors stay ABSENT).
SpikeVolley encode_observation(const Environment& env, int row, int col, int alphabet,
                               const GammaCycle& cycle);

/// Desk-scale feature-location association task. One model per trained
/// environment: a supervised minicolumn with one neuron per location, each
/// neuron holding a proximal feature segment and a distal context segment.
class PlaceCellTask {
public:
    PlaceCellTask(int rows, int cols, int alphabet, bool distal_enabled,
                  GammaCycle gamma = {});

    const ModelSpec& model() const { return model_; }

    /// Exhaustive supervised training of location labels for one environment.
    void train(const Environment& env, int epochs, uint64_t seed);

    bool is_trained(int env_id) const { return weights_.count(env_id) != 0; }

    /// Predicted location for an observation; -1 when the model is silent.
    int query(const Environment& env, int row, int col) const;

    /// Fraction of random (environment, location) queries answered with the
    /// correct location. Throws on zero trials or an untrained environment.
    double recall(const std::vector<Environment>& envs, int trials, uint64_t seed) const;

    /// Per-environment recall over `trials` queries each.
    struct EnvResult {
        int env_id = 0;
        int trials = 0;
        double recall = 0.0;
    };
    std::vector<EnvResult> recall_per_env(const std::vector<Environment>& envs, int trials,
                                          uint64_t seed) const;

private:
    int rows_, cols_, alphabet_;
    ModelSpec model_;
    std::map<int, WeightMatrix> weights_;
};

std::string orientation_to_csv(const std::vector<PlaceCellTask::EnvResult>& results);

}  // namespace neutnn
