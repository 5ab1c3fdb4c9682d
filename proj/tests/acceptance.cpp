// End-to-end acceptance checklist. Each criterion prints exactly one
// "criterion N (<name>): PASS|FAIL" line; the process exits nonzero if any
// criterion fails. Tolerances are stated inline next to each check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "neutnn/datasets.hpp"
#include "neutnn/encode.hpp"
#include "neutnn/flow.hpp"
#include "neutnn/learning.hpp"
#include "neutnn/netlist.hpp"
#include "neutnn/placecells.hpp"
#include "neutnn/pruning.hpp"

using namespace neutnn;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
    std::cout << "criterion " << number << " (" << name << "): " << (pass ? "PASS" : "FAIL")
              << " — " << detail << "\n";
    if (!pass) ++g_failures;
}

void run_criterion(int number, const std::string& name,
                   const std::function<std::pair<bool, std::string>()>& body) {
    try {
        const auto [pass, detail] = body();
        report(number, name, pass, detail);
    } catch (const std::exception& e) {
        report(number, name, false, std::string("exception: ") + e.what());
    }
}

// --- shared model builders --------------------------------------------------

SegmentSpec proximal_segment(int synapses, int threshold) {
    SegmentSpec s;
    s.synapse_count = synapses;
    s.threshold = threshold;
    return s;
}

NeuronSpec single_segment_neuron(int synapses, int threshold) {
    NeuronSpec n;
    n.dendrites.push_back({{proximal_segment(synapses, threshold)}});
    return n;
}

// 28x28 MNIST front: CV groups over a sliding kernel, 10 units per group.
ModelSpec mnist_cv_model(int kernel, int stride, int unit_synapses, int theta) {
    ModelSpec m;
    LayerSpec l;
    l.id = "cv";
    l.kind = LayerKind::CvGroup;
    l.input_dims = {28, 28};
    l.kernel = Kernel{{kernel, kernel}, {stride, stride}};
    l.learning = Learning::Supervised;
    MinicolumnSpec mc;
    for (int u = 0; u < 10; ++u) mc.neurons.push_back(single_segment_neuron(unit_synapses, theta));
    l.minicolumns.push_back(std::move(mc));
    m.layers.push_back(std::move(l));
    m.validate();
    return m;
}

// One unsupervised minicolumn over a dual-rail time-series volley.
ModelSpec clustering_model(int width, int neurons, int theta) {
    ModelSpec m;
    LayerSpec l;
    l.id = "col";
    l.input_dims = {width};
    MinicolumnSpec mc;
    for (int i = 0; i < neurons; ++i) mc.neurons.push_back(single_segment_neuron(width, theta));
    l.minicolumns.push_back(std::move(mc));
    m.layers.push_back(std::move(l));
    m.validate();
    return m;
}

// Three length-32 prototypes with disjoint support plus Gaussian noise.
std::vector<TrainSample> clustering_dataset(int per_class, uint64_t seed, double sigma) {
    const int len = 32;
    std::vector<std::vector<double>> protos(3, std::vector<double>(len, -1.0));
    for (int c = 0; c < 3; ++c)
        for (int i = c * len / 3; i < (c + 1) * len / 3; ++i) protos[size_t(c)][size_t(i)] = 1.0;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    std::vector<TrainSample> data;
    for (int c = 0; c < 3; ++c)
        for (int k = 0; k < per_class; ++k) {
            auto s = protos[size_t(c)];
            for (double& v : s) v += noise(rng);
            data.push_back({encode_timeseries(s, GammaCycle{}, true), c});
        }
    return data;
}

std::vector<TrainSample> encode_image_set(const ImageSet& set, const GammaCycle& g) {
    std::vector<TrainSample> data;
    data.reserve(set.images.size());
    for (size_t i = 0; i < set.images.size(); ++i)
        data.push_back({encode_image(set.images[i], g, 1), set.labels[i]});
    return data;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Tick-by-tick reference for criterion 4, independent of the event sweep.
SpikeTime oracle_fire_time(const std::vector<int>& weights, const SpikeVolley& inputs,
                           const SegmentSpec& spec, const GammaCycle& cycle) {
    for (int t = 0; t < cycle.t_max; ++t) {
        long long potential = 0;
        for (size_t i = 0; i < weights.size(); ++i)
            potential += synapse_response(weights[i], inputs[i], spec.response, t);
        if (potential >= spec.threshold) return SpikeTime::at(t);
    }
    return SpikeTime::absent();
}

// The trained desk-scale MNIST model is shared between criteria 6 and 7.
struct MnistResult {
    ModelSpec model;
    WeightMatrix weights;
    std::vector<TrainSample> test;
    double accuracy = 0.0;
    bool ready = false;
};
MnistResult g_mnist;

constexpr int kMnistTheta = 50;      // unit threshold for the 25-synapse CV units
constexpr int kMnistEpochs = 3;      // <= 5 per the criterion
constexpr uint64_t kMnistSeed = 17;  // pinned: init and presentation order

}  // namespace

int main() {
    const fs::path data_dir(NEUTNN_DATA_DIR);

    run_criterion(1, "synapse accounting", []() -> std::pair<bool, std::string> {
        const auto t0 = std::chrono::steady_clock::now();
        // full-scale MNIST configuration: 576 CV groups x 10 units x 432 sites
        const ModelSpec mnist = mnist_cv_model(5, 1, 432, default_threshold(432, 7));
        const long long mnist_count = count_synapses(mnist);

        const PlaceCellConfig pc;
        const long long mc1 = pc.mc1.total();
        const long long mc2 = pc.mc2.total();
        const long long pc_total = count_synapses(build_place_cells(pc));

        const bool pass = mnist_count == 2488320 && mc1 == 454400 && mc2 == 388800 &&
                          pc_total == 1232000 && elapsed_s(t0) < 1.0;
        std::ostringstream d;
        d << "mnist=" << mnist_count << " (exact 2488320), place-cells=" << mc1 << "/" << mc2
          << "/" << pc_total << " (exact 454400/388800/1232000), " << elapsed_s(t0) << "s";
        return {pass, d.str()};
    });

    run_criterion(2, "cost-line fidelity", []() -> std::pair<bool, std::string> {
        const auto t0 = std::chrono::steady_clock::now();
        double worst = 0.0;
        for (Pdk pdk : {Pdk::FreePDK45, Pdk::ASAP7, Pdk::TNN7}) {
            const auto model = fit_ppa(pdk);
            worst = std::max({worst, model.leakage.max_rel_err, model.area.max_rel_err});
        }
        // spot values straight from the embedded table
        const auto table = ucr_ppa_table();
        const bool spots = table.front().synapses == 130 &&
                           table.front().leakage[size_t(Pdk::TNN7)] == 0.74 &&
                           table.back().synapses == 6750 &&
                           table.back().leakage[size_t(Pdk::TNN7)] == 40.27;
        const bool pass = worst < 0.15 && spots && elapsed_s(t0) < 1.0;
        std::ostringstream d;
        d << "max relative error " << worst * 100.0 << "% (< 15%), spot values 0.74uW@130 / "
          << "40.27uW@6750 " << (spots ? "exact" : "WRONG") << ", " << elapsed_s(t0) << "s";
        return {pass, d.str()};
    });

    run_criterion(3, "node ordering", []() -> std::pair<bool, std::string> {
        const auto asap7 = fit_ppa(Pdk::ASAP7);
        const auto tnn7 = fit_ppa(Pdk::TNN7);
        bool ordered = true;
        for (const auto& row : ucr_ppa_table()) {
            const double s = double(row.synapses);
            ordered = ordered && (tnn7.leakage.slope * s + tnn7.leakage.intercept <
                                  asap7.leakage.slope * s + asap7.leakage.intercept);
        }
        return {ordered, ordered ? "fitted TNN7 leakage < ASAP7 at all 12 table synapse counts"
                                 : "TNN7 leakage not below ASAP7 everywhere"};
    });

    run_criterion(4, "oracle equivalence", []() -> std::pair<bool, std::string> {
        const auto t0 = std::chrono::steady_clock::now();
        std::mt19937_64 rng(424242);
        const GammaCycle g;
        const int trials = 10000;
        for (int trial = 0; trial < trials; ++trial) {
            const int n = 1 + int(rng() % 8);
            std::vector<int> w(size_t(n), 0);
            SpikeVolley in(size_t(n), SpikeTime::absent());
            for (int i = 0; i < n; ++i) {
                w[size_t(i)] = int(rng() % 8);
                in[size_t(i)] =
                    (rng() % 4 == 0) ? SpikeTime::absent() : SpikeTime::at(int(rng() % 8));
            }
            SegmentSpec spec = proximal_segment(n, 1 + int(rng() % (n * 7 + 2)));
            spec.response = rng() % 2 ? ResponseKind::Rnl : ResponseKind::Snl;
            if (segment_fire_time(w, in, spec, g) != oracle_fire_time(w, in, spec, g)) {
                std::ostringstream d;
                d << "mismatch at trial " << trial;
                return {false, d.str()};
            }
        }
        std::ostringstream d;
        d << trials << " random segments exact-equal, " << elapsed_s(t0) << "s (< 30s)";
        return {elapsed_s(t0) < 30.0, d.str()};
    });

    run_criterion(5, "desk-scale clustering", []() -> std::pair<bool, std::string> {
        // 3 prototypes, length 32, dual rail; one minicolumn of 3 neurons;
        // winner-only STDP (search step 0); 20 epochs, fixed seed
        const auto data = clustering_dataset(20, 99, 0.1);
        ModelSpec m = clustering_model(64, 3, 120);
        WeightMatrix w = make_weights(m);
        init_weights(w, 7, 7);
        StdpParams params;
        params.search = 0;
        const auto rep = train_dataset(m, w, data, 20, 7, params);
        const double ri = rep.epochs.back().value;
        std::ostringstream d;
        d << "rand index " << ri << " (>= 0.8) after 20 epochs";
        return {ri >= 0.8, d.str()};
    });

    run_criterion(6, "desk-scale classification", [&]() -> std::pair<bool, std::string> {
        const auto train_set = load_mnist_idx((data_dir / "mnist/train-images.idx3-ubyte").string(),
                                              (data_dir / "mnist/train-labels.idx1-ubyte").string());
        const auto test_set = load_mnist_idx((data_dir / "mnist/test-images.idx3-ubyte").string(),
                                             (data_dir / "mnist/test-labels.idx1-ubyte").string());
        const GammaCycle g;
        const auto train_data = encode_image_set(train_set, g);
        g_mnist.test = encode_image_set(test_set, g);
        g_mnist.model = mnist_cv_model(5, 2, 25, kMnistTheta);  // 144 groups x 10 units
        g_mnist.weights = make_weights(g_mnist.model);
        init_weights(g_mnist.weights, 7, kMnistSeed);

        const StdpParams params{1, 2, 1};
        std::mt19937_64 rng(kMnistSeed);
        std::vector<size_t> order(train_data.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        for (int epoch = 0; epoch < kMnistEpochs; ++epoch) {
            std::shuffle(order.begin(), order.end(), rng);
            for (size_t idx : order)
                train_cycle(g_mnist.model, g_mnist.weights, train_data[idx].volley,
                            train_data[idx].label, params);
        }
        g_mnist.accuracy = evaluate_accuracy(g_mnist.model, g_mnist.weights, g_mnist.test);
        g_mnist.ready = true;
        std::ostringstream d;
        d << "test accuracy " << g_mnist.accuracy << " (>= 0.75) after " << kMnistEpochs
          << " epochs on " << train_data.size() << "/" << g_mnist.test.size() << " samples";
        return {g_mnist.accuracy >= 0.75, d.str()};
    });

    run_criterion(7, "pruning behavior", [&]() -> std::pair<bool, std::string> {
        if (!g_mnist.ready) return {false, "skipped: classification model unavailable"};
        const long long original = count_synapses(g_mnist.model);

        // idempotence + count arithmetic, exact
        WeightMatrix once = g_mnist.weights;
        PruneConfig cfg;
        cfg.threshold = 4;
        cfg.binarize = true;
        cfg.mode = PruneMode::RemoveZero;
        const auto rep1 = prune(g_mnist.model, once, cfg);
        WeightMatrix twice = once;
        const auto rep2 = prune(g_mnist.model, twice, cfg);
        const bool idem = once.w == twice.w && once.pruned == twice.pruned &&
                          rep1.pruned == rep2.pruned;
        const bool arith = rep1.original == original &&
                           rep1.surviving == original - rep1.pruned &&
                           rep1.surviving ==
                               count_synapses(g_mnist.model, once, PruneMode::RemoveZero);

        // tau sweep: find a point with <= 70% survivors within 0.02 accuracy
        std::vector<int> taus{1, 2, 3, 4, 5, 6, 7, 8};
        const auto rows =
            prune_sweep(g_mnist.model, g_mnist.weights, taus, false, [&](const WeightMatrix& pw) {
                return evaluate_accuracy(g_mnist.model, pw, g_mnist.test);
            });
        bool found = false;
        int best_tau = -1;
        double best_frac = 1.0, best_acc = 0.0;
        for (const auto& row : rows) {
            const double frac = double(row.surviving) / double(original);
            if (frac <= 0.70 && row.metric >= g_mnist.accuracy - 0.02) {
                if (!found || frac < best_frac) {
                    best_tau = row.threshold;
                    best_frac = frac;
                    best_acc = row.metric;
                }
                found = true;
            }
        }
        std::ostringstream d;
        if (found)
            d << "tau=" << best_tau << " keeps " << best_frac * 100.0 << "% of " << original
              << " synapses at accuracy " << best_acc << " (unpruned " << g_mnist.accuracy
              << ", drop <= 0.02)";
        else
            d << "no sweep point met <= 70% survivors within 0.02 accuracy";
        d << "; idempotent=" << (idem ? "yes" : "NO") << " counts=" << (arith ? "exact" : "WRONG");
        return {found && idem && arith, d.str()};
    });

    run_criterion(8, "determinism", [&]() -> std::pair<bool, std::string> {
        const fs::path dir = fs::temp_directory_path() / "neutnn_acceptance_det";
        fs::remove_all(dir);
        fs::create_directories(dir);

        // seed model document: untrained clustering column
        ModelDoc doc;
        doc.spec = clustering_model(64, 3, 120);
        doc.weights = make_weights(doc.spec);
        save_model_doc(doc, (dir / "model_in.json").string());

        // dataset file
        {
            std::ofstream out(dir / "data.tsv");
            const auto data = clustering_dataset(5, 4, 0.1);
            std::mt19937_64 rng(4);
            std::normal_distribution<double> noise(0.0, 0.1);
            for (int c = 0; c < 3; ++c)
                for (int k = 0; k < 5; ++k) {
                    out << (c + 1);
                    for (int i = 0; i < 32; ++i) {
                        const double base = (i >= c * 32 / 3 && i < (c + 1) * 32 / 3) ? 1.0 : -1.0;
                        out << "\t" << base + noise(rng);
                    }
                    out << "\n";
                }
        }

        auto run_once = [&](const std::string& sub) {
            FlowConfig cfg;
            cfg.flow = {Stage::Train, Stage::Eval, Stage::Prune, Stage::Sweep, Stage::Netlist,
                        Stage::Forecast};
            cfg.node = Pdk::TNN7;
            cfg.model_path = (dir / "model_in.json").string();
            cfg.dataset_path = (dir / "data.tsv").string();
            cfg.seed = 9;
            cfg.epochs = 5;
            cfg.out_dir = (dir / sub).string();
            std::ostringstream log;
            return run_flow(cfg, log) == 0;
        };
        if (!run_once("a") || !run_once("b")) return {false, "flow run failed"};
        bool identical = true;
        std::string first_diff;
        for (const char* f :
             {"model.json", "train_metrics.csv", "eval.csv", "model_pruned.json",
              "prune_report.txt", "sweep.csv", "netlist.txt", "forecast.csv", "pdk_compare.csv"}) {
            if (read_file(dir / "a" / f) != read_file(dir / "b" / f)) {
                identical = false;
                if (first_diff.empty()) first_diff = f;
            }
        }
        return {identical, identical ? "two identical-seed flow runs byte-identical across 9 artifacts"
                                     : "artifact differs: " + first_diff};
    });

    run_criterion(9, "netlist integrity", []() -> std::pair<bool, std::string> {
        // a heterogeneous trained model with kernel + plain layers
        ModelDoc doc;
        LayerSpec a;
        a.id = "front";
        a.input_dims = {12};
        a.kernel = Kernel{{4}, {4}};
        MinicolumnSpec mca;
        NeuronSpec na;
        na.distal_advance = 1;
        SegmentSpec prox = proximal_segment(4, 6);
        SegmentSpec dist = proximal_segment(3, 5);
        dist.kind = SegmentKind::Distal;
        dist.response = ResponseKind::Snl;
        dist.input_offset = 1;
        na.dendrites.push_back({{prox, dist}});
        mca.neurons.push_back(na);
        mca.neurons.push_back(na);
        a.minicolumns.push_back(std::move(mca));
        doc.spec.layers.push_back(std::move(a));
        LayerSpec b;
        b.id = "back";
        b.input_dims = {6};
        MinicolumnSpec mcb;
        mcb.neurons.push_back(single_segment_neuron(6, 9));
        mcb.neurons.push_back(single_segment_neuron(6, 9));
        b.minicolumns.push_back(std::move(mcb));
        doc.spec.layers.push_back(std::move(b));
        doc.spec.validate();
        doc.weights = make_weights(doc.spec);
        for (size_t i = 0; i < doc.weights.size(); ++i) doc.weights.w[i] = int((i * 5) % 8);
        doc.trained = true;

        PruneConfig cfg;
        cfg.threshold = 3;
        const auto rep = prune(doc.spec, doc.weights, cfg);

        doc.prune_mode = PruneMode::KeepZero;
        const std::string keep_text = emit_netlist_string(doc);
        const ModelDoc back = parse_netlist(keep_text);
        const bool round_trip = model_doc_to_string(back) == model_doc_to_string(doc) &&
                                emit_netlist_string(back) == keep_text;

        std::ostringstream removed;
        doc.prune_mode = PruneMode::RemoveZero;
        const auto rm_stats = emit_netlist(doc, removed);
        doc.prune_mode = PruneMode::KeepZero;
        std::ostringstream kept;
        const auto keep_stats = emit_netlist(doc, kept);
        const bool counts = keep_stats.total_synapses - rm_stats.total_synapses == rep.pruned &&
                            rep.pruned > 0;
        std::ostringstream d;
        d << "KeepZero round-trip " << (round_trip ? "identity" : "NOT identity")
          << "; KeepZero-RemoveZero = " << keep_stats.total_synapses - rm_stats.total_synapses
          << " = pruned count " << rep.pruned;
        return {round_trip && counts, d.str()};
    });

    run_criterion(10, "place-cells property", []() -> std::pair<bool, std::string> {
        const int rows = 4, cols = 4, alphabet = 4;
        std::vector<Environment> envs;
        envs.push_back(make_random_environment(rows, cols, alphabet, 11, 0));
        envs.push_back(make_ambiguous_environment(rows, cols, 1, 1));
        PlaceCellTask with(rows, cols, alphabet, true);
        PlaceCellTask without(rows, cols, alphabet, false);
        for (const auto& env : envs) {
            with.train(env, 10, 42);
            without.train(env, 10, 42);
        }
        const double r_with = with.recall(envs, 60, 5);
        const double r_without = without.recall(envs, 60, 5);

        // distinct-feature memorization at desk scale
        PlaceCellTask memo(3, 3, 9, true);
        const Environment distinct = make_distinct_environment(3, 3, 7);
        memo.train(distinct, 10, 1234);
        const double r_distinct = memo.recall({distinct}, 40, 3);

        std::ostringstream d;
        d << "recall with distal " << r_with << " >= without " << r_without
          << "; distinct-feature recall " << r_distinct << " (= 1.0)";
        return {r_with >= r_without && r_distinct == 1.0, d.str()};
    });

    std::cout << (g_failures == 0 ? "all criteria passed"
                                  : std::to_string(g_failures) + " criteria failed")
              << "\n";
    return g_failures == 0 ? 0 : 1;
}
