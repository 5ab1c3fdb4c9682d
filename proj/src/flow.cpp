#include "neutnn/flow.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "neutnn/datasets.hpp"
#include "neutnn/encode.hpp"
#include "neutnn/learning.hpp"
#include "neutnn/model_doc.hpp"
#include "neutnn/netlist.hpp"
#include "neutnn/placecells.hpp"
#include "neutnn/pruning.hpp"

namespace neutnn {

namespace fs = std::filesystem;

std::string stage_name(Stage s) {
    switch (s) {
        case Stage::Train: return "train";
        case Stage::Eval: return "eval";
        case Stage::Prune: return "prune";
        case Stage::Sweep: return "sweep";
        case Stage::Netlist: return "netlist";
        case Stage::Forecast: return "forecast";
        case Stage::Placecell: return "placecell";
    }
    return "?";
}

namespace {

Stage stage_from_name(const std::string& s) {
    for (Stage st : {Stage::Train, Stage::Eval, Stage::Prune, Stage::Sweep, Stage::Netlist,
                     Stage::Forecast, Stage::Placecell})
        if (stage_name(st) == s) return st;
    throw Error("unknown flow stage '" + s +
                "' (valid: train, eval, prune, sweep, netlist, forecast, placecell)");
}

Pdk node_to_pdk(const std::string& node) {
    if (node == "nangate45") return Pdk::FreePDK45;
    if (node == "asap7") return Pdk::ASAP7;
    if (node == "asap7_tnn7") return Pdk::TNN7;
    throw Error("invalid node '" + node + "' (valid: nangate45, asap7, asap7_tnn7)");
}

std::string pdk_to_node(Pdk pdk) {
    switch (pdk) {
        case Pdk::FreePDK45: return "nangate45";
        case Pdk::ASAP7: return "asap7";
        case Pdk::TNN7: return "asap7_tnn7";
    }
    return "?";
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

bool parse_bool(const std::string& v, const std::string& key, size_t line) {
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    throw Error("config line " + std::to_string(line) + ": " + key + " must be 0/1/true/false");
}

}  // namespace

bool FlowConfig::has_stage(Stage s) const {
    return std::find(flow.begin(), flow.end(), s) != flow.end();
}

std::string FlowConfig::echo() const {
    std::ostringstream out;
    out << "flow=";
    for (size_t i = 0; i < flow.size(); ++i) out << (i ? "," : "") << stage_name(flow[i]);
    out << "\n";
    if (node) out << "node=" << pdk_to_node(*node) << "\n";
    out << "model=" << model_path << "\n";
    out << "dataset=" << dataset_path << "\n";
    out << "dataset_kind=" << dataset_kind << "\n";
    out << "seed=" << seed << "\n";
    out << "out=" << out_dir << "\n";
    out << "epochs=" << epochs << "\n";
    out << "dual_rail=" << (dual_rail ? 1 : 0) << "\n";
    out << "absent_threshold=" << absent_threshold << "\n";
    out << "sample_limit=" << sample_limit << "\n";
    out << "prune_threshold=" << prune_threshold << "\n";
    out << "prune_binarize=" << (prune_binarize ? 1 : 0) << "\n";
    out << "prune_mode=" << prune_mode << "\n";
    out << "sweep_taus=";
    for (size_t i = 0; i < sweep_taus.size(); ++i) out << (i ? "," : "") << sweep_taus[i];
    out << "\n";
    out << "pc_rows=" << pc_rows << "\npc_cols=" << pc_cols << "\npc_features=" << pc_features
        << "\npc_environments=" << pc_environments << "\npc_trials=" << pc_trials
        << "\npc_epochs=" << pc_epochs << "\n";
    return out.str();
}

FlowConfig parse_config(const std::string& text) {
    FlowConfig cfg;
    bool has_flow = false;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);

        if (key == "flow") {
            for (const auto& s : split_list(value)) cfg.flow.push_back(stage_from_name(s));
            has_flow = !cfg.flow.empty();
        } else if (key == "node") {
            cfg.node = node_to_pdk(value);
        } else if (key == "model") {
            cfg.model_path = value;
        } else if (key == "dataset") {
            cfg.dataset_path = value;
        } else if (key == "dataset_kind") {
            if (value != "ucr" && value != "mnist")
                throw Error("config line " + std::to_string(lineno) +
                            ": dataset_kind must be ucr or mnist");
            cfg.dataset_kind = value;
        } else if (key == "seed") {
            cfg.seed = std::stoull(value);
        } else if (key == "out") {
            cfg.out_dir = value;
        } else if (key == "epochs") {
            cfg.epochs = std::stoi(value);
        } else if (key == "dual_rail") {
            cfg.dual_rail = parse_bool(value, key, lineno);
        } else if (key == "absent_threshold") {
            cfg.absent_threshold = std::stoi(value);
        } else if (key == "sample_limit") {
            cfg.sample_limit = std::stoi(value);
        } else if (key == "prune_threshold") {
            cfg.prune_threshold = std::stoi(value);
        } else if (key == "prune_binarize") {
            cfg.prune_binarize = parse_bool(value, key, lineno);
        } else if (key == "prune_mode") {
            prune_mode_from_name(value);  // validates
            cfg.prune_mode = value;
        } else if (key == "sweep_taus") {
            for (const auto& s : split_list(value)) cfg.sweep_taus.push_back(std::stoi(s));
        } else if (key == "pc_rows") {
            cfg.pc_rows = std::stoi(value);
        } else if (key == "pc_cols") {
            cfg.pc_cols = std::stoi(value);
        } else if (key == "pc_features") {
            cfg.pc_features = std::stoi(value);
        } else if (key == "pc_environments") {
            cfg.pc_environments = std::stoi(value);
        } else if (key == "pc_trials") {
            cfg.pc_trials = std::stoi(value);
        } else if (key == "pc_epochs") {
            cfg.pc_epochs = std::stoi(value);
        } else {
            throw Error("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    if (!has_flow) throw Error("config: required field 'flow' is missing or empty");
    if (cfg.has_stage(Stage::Forecast) && !cfg.node)
        throw Error("config: 'node' is required when the forecast stage is requested");
    if (const char* env = std::getenv("NEUTNN_OUT_DIR")) cfg.out_dir = env;
    return cfg;
}

FlowConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace {

struct PipelineState {
    std::optional<ModelDoc> doc;
    std::vector<TrainSample> dataset;
    bool dataset_loaded = false;
};

void require_model(PipelineState& state, const FlowConfig& cfg) {
    if (state.doc) return;
    if (cfg.model_path.empty()) throw Error("no model document configured");
    state.doc = load_model_doc(cfg.model_path);
}

void require_dataset(PipelineState& state, const FlowConfig& cfg, const ModelSpec& model) {
    if (state.dataset_loaded) return;
    if (cfg.dataset_path.empty()) throw Error("no dataset configured");
    if (cfg.dataset_kind == "ucr") {
        const auto series = load_ucr(cfg.dataset_path);
        for (const auto& s : series)
            state.dataset.push_back(
                {encode_timeseries(s.samples, model.gamma, cfg.dual_rail), s.label});
    } else {
        const fs::path dir(cfg.dataset_path);
        const auto set = load_mnist_idx((dir / "train-images.idx3-ubyte").string(),
                                        (dir / "train-labels.idx1-ubyte").string());
        for (size_t i = 0; i < set.images.size(); ++i)
            state.dataset.push_back({encode_image(set.images[i], model.gamma,
                                                  uint8_t(cfg.absent_threshold)),
                                     set.labels[i]});
    }
    if (cfg.sample_limit > 0 && int(state.dataset.size()) > cfg.sample_limit)
        state.dataset.resize(size_t(cfg.sample_limit));
    for (const auto& s : state.dataset)
        if (int(s.volley.size()) != model.input_width())
            throw Error("dataset width " + std::to_string(s.volley.size()) +
                        " does not match model input width " +
                        std::to_string(model.input_width()));
    state.dataset_loaded = true;
}

double eval_metric(const ModelDoc& doc, const std::vector<TrainSample>& dataset,
                   std::string& name) {
    const bool supervised = doc.spec.layers.back().learning == Learning::Supervised;
    name = supervised ? "accuracy" : "rand_index";
    return supervised ? evaluate_accuracy(doc.spec, doc.weights, dataset)
                      : evaluate_rand_index(doc.spec, doc.weights, dataset);
}

void run_stage(Stage stage, const FlowConfig& cfg, PipelineState& state, const fs::path& out,
               std::ostream& log) {
    switch (stage) {
        case Stage::Train: {
            require_model(state, cfg);
            require_dataset(state, cfg, state.doc->spec);
            if (!state.doc->trained)
                init_weights(state.doc->weights, state.doc->spec.gamma.w_max(), cfg.seed);
            StdpParams params;
            const auto report = train_dataset(state.doc->spec, state.doc->weights, state.dataset,
                                              cfg.epochs, cfg.seed, params,
                                              state.doc->prune_mode);
            state.doc->trained = true;
            save_model_doc(*state.doc, (out / "model.json").string());
            atomic_write((out / "train_metrics.csv").string(), metrics_to_csv(report));
            if (!report.epochs.empty())
                log << "train: final " << report.epochs.back().metric << " "
                    << report.epochs.back().value << "\n";
            break;
        }
        case Stage::Eval: {
            require_model(state, cfg);
            if (!state.doc->trained) throw Error("model has no trained weights");
            require_dataset(state, cfg, state.doc->spec);
            std::string name;
            const double value = eval_metric(*state.doc, state.dataset, name);
            std::ostringstream csv;
            csv << "metric,value,synapse_count\n"
                << name << "," << value << ","
                << count_synapses(state.doc->spec, state.doc->weights, state.doc->prune_mode)
                << "\n";
            atomic_write((out / "eval.csv").string(), csv.str());
            log << "eval: " << name << " " << value << "\n";
            break;
        }
        case Stage::Prune: {
            require_model(state, cfg);
            if (!state.doc->trained) throw Error("model has no trained weights");
            PruneConfig pcfg;
            pcfg.threshold = cfg.prune_threshold;
            pcfg.binarize = cfg.prune_binarize;
            pcfg.mode = prune_mode_from_name(cfg.prune_mode);
            const auto report = prune(state.doc->spec, state.doc->weights, pcfg);
            state.doc->prune_mode = pcfg.mode;
            save_model_doc(*state.doc, (out / "model_pruned.json").string());
            atomic_write((out / "prune_report.txt").string(), report.to_text());
            log << "prune: " << report.pruned << " of " << report.original << " synapses\n";
            break;
        }
        case Stage::Sweep: {
            require_model(state, cfg);
            if (!state.doc->trained) throw Error("model has no trained weights");
            require_dataset(state, cfg, state.doc->spec);
            std::vector<int> taus = cfg.sweep_taus;
            if (taus.empty())
                for (int t = 0; t <= state.doc->spec.gamma.w_max() + 1; ++t) taus.push_back(t);
            std::string name;
            const auto& doc = *state.doc;
            const auto rows = prune_sweep(doc.spec, doc.weights, taus, cfg.prune_binarize,
                                          [&](const WeightMatrix& w) {
                                              ModelDoc probe{doc.spec, w, true, doc.prune_mode};
                                              return eval_metric(probe, state.dataset, name);
                                          });
            atomic_write((out / "sweep.csv").string(), sweep_to_csv(rows, name));
            break;
        }
        case Stage::Netlist: {
            require_model(state, cfg);
            std::ostringstream text;
            const auto stats = emit_netlist(*state.doc, text);
            atomic_write((out / "netlist.txt").string(), text.str());
            log << "netlist: " << stats.total_synapses << " synapses\n";
            break;
        }
        case Stage::Forecast: {
            require_model(state, cfg);
            const long long count =
                count_synapses(state.doc->spec, state.doc->weights, state.doc->prune_mode);
            const PpaModel model = fit_ppa(*cfg.node);
            const Forecast f = forecast(model, count);
            std::ostringstream csv;
            csv << "pdk,synapses,leakage,leakage_unit,area,area_unit,extrapolated\n"
                << pdk_name(model.pdk) << "," << count << "," << f.leakage << ","
                << f.leakage_unit << "," << f.area << "," << f.area_unit << ","
                << (f.extrapolated ? 1 : 0) << "\n";
            atomic_write((out / "forecast.csv").string(), csv.str());
            if (f.extrapolated)
                log << "forecast: warning: " << count
                    << " synapses is outside the fitted range [" << model.fit_min_synapses << ", "
                    << model.fit_max_synapses << "]\n";
            std::ostringstream cmp;
            cmp << "pdk,leakage_uW,area_um2\n";
            for (const auto& row : compare_pdks(count))
                cmp << pdk_name(row.pdk) << "," << row.leakage_uw << "," << row.area_um2 << "\n";
            atomic_write((out / "pdk_compare.csv").string(), cmp.str());
            break;
        }
        case Stage::Placecell: {
            PlaceCellTask task(cfg.pc_rows, cfg.pc_cols,
                               std::max(cfg.pc_features, cfg.pc_rows * cfg.pc_cols), true);
            std::vector<Environment> envs;
            envs.push_back(make_distinct_environment(cfg.pc_rows, cfg.pc_cols, 0));
            envs.push_back(make_ambiguous_environment(cfg.pc_rows, cfg.pc_cols, 0, 1));
            for (int e = 2; e < cfg.pc_environments; ++e)
                envs.push_back(make_random_environment(cfg.pc_rows, cfg.pc_cols, cfg.pc_features,
                                                       cfg.seed + uint64_t(e), e));
            for (size_t e = 0; e < envs.size(); ++e) {
                task.train(envs[e], cfg.pc_epochs, cfg.seed + uint64_t(e));
                atomic_write((out / ("environment_" + std::to_string(envs[e].id) + ".txt"))
                                 .string(),
                             environment_to_text(envs[e]));
            }
            const auto results = task.recall_per_env(envs, cfg.pc_trials, cfg.seed);
            atomic_write((out / "placecell.csv").string(), orientation_to_csv(results));
            for (const auto& r : results)
                log << "placecell: environment " << r.env_id << " recall " << r.recall << "\n";
            break;
        }
    }
}

}  // namespace

int run_flow(const FlowConfig& cfg, std::ostream& log) {
    const fs::path out(cfg.out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) {
        log << "error: cannot create output directory " << out << "\n";
        return 1;
    }
    log << cfg.echo();

    PipelineState state;
    for (Stage stage : {Stage::Train, Stage::Eval, Stage::Prune, Stage::Sweep, Stage::Netlist,
                        Stage::Forecast, Stage::Placecell}) {
        if (!cfg.has_stage(stage)) continue;
        try {
            run_stage(stage, cfg, state, out, log);
        } catch (const std::exception& e) {
            log << "error: " << stage_name(stage) << ": " << e.what() << "\n";
            return 1;
        }
    }
    return 0;
}

}  // namespace neutnn
