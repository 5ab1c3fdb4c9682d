#include "neutnn/model_doc.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace neutnn {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string kind_name(LayerKind k) { return k == LayerKind::Minicolumn ? "minicolumn" : "cv_group"; }
std::string learning_name(Learning l) {
    return l == Learning::Unsupervised ? "unsupervised" : "supervised";
}
std::string segkind_name(SegmentKind k) {
    return k == SegmentKind::Proximal ? "proximal" : "distal";
}
std::string response_name(ResponseKind r) { return r == ResponseKind::Rnl ? "rnl" : "snl"; }

LayerKind kind_from(const std::string& s) {
    if (s == "minicolumn") return LayerKind::Minicolumn;
    if (s == "cv_group") return LayerKind::CvGroup;
    throw Error("model doc: unknown layer kind '" + s + "'");
}
Learning learning_from(const std::string& s) {
    if (s == "unsupervised") return Learning::Unsupervised;
    if (s == "supervised") return Learning::Supervised;
    throw Error("model doc: unknown learning mode '" + s + "'");
}
SegmentKind segkind_from(const std::string& s) {
    if (s == "proximal") return SegmentKind::Proximal;
    if (s == "distal") return SegmentKind::Distal;
    throw Error("model doc: unknown segment kind '" + s + "'");
}
ResponseKind response_from(const std::string& s) {
    if (s == "rnl") return ResponseKind::Rnl;
    if (s == "snl") return ResponseKind::Snl;
    throw Error("model doc: unknown response kind '" + s + "'");
}

ordered_json minicolumn_to_json(const MinicolumnSpec& mc) {
    ordered_json jmc;
    jmc["wta_k"] = mc.wta_k;
    ordered_json jneurons = ordered_json::array();
    for (const auto& n : mc.neurons) {
        ordered_json jn;
        jn["alpha"] = n.distal_advance;
        ordered_json jdend = ordered_json::array();
        for (const auto& d : n.dendrites) {
            ordered_json jsegs = ordered_json::array();
            for (const auto& s : d.segments) {
                ordered_json js;
                js["kind"] = segkind_name(s.kind);
                js["threshold"] = s.threshold;
                js["response"] = response_name(s.response);
                js["synapses"] = s.synapse_count;
                js["offset"] = s.input_offset;
                jsegs.push_back(std::move(js));
            }
            jdend.push_back({{"segments", std::move(jsegs)}});
        }
        jn["dendrites"] = std::move(jdend);
        jneurons.push_back(std::move(jn));
    }
    jmc["neurons"] = std::move(jneurons);
    return jmc;
}

MinicolumnSpec minicolumn_from_json(const ordered_json& jmc) {
    MinicolumnSpec mc;
    mc.wta_k = jmc.at("wta_k").get<int>();
    for (const auto& jn : jmc.at("neurons")) {
        NeuronSpec n;
        n.distal_advance = jn.at("alpha").get<int>();
        for (const auto& jd : jn.at("dendrites")) {
            DendriteSpec d;
            for (const auto& js : jd.at("segments")) {
                SegmentSpec s;
                s.kind = segkind_from(js.at("kind").get<std::string>());
                s.threshold = js.at("threshold").get<int>();
                s.response = response_from(js.at("response").get<std::string>());
                s.synapse_count = js.at("synapses").get<int>();
                s.input_offset = js.at("offset").get<int>();
                d.segments.push_back(s);
            }
            n.dendrites.push_back(std::move(d));
        }
        mc.neurons.push_back(std::move(n));
    }
    return mc;
}

}  // namespace

std::string prune_mode_name(PruneMode mode) {
    return mode == PruneMode::KeepZero ? "keep_zero" : "remove_zero";
}

PruneMode prune_mode_from_name(const std::string& name) {
    if (name == "keep_zero") return PruneMode::KeepZero;
    if (name == "remove_zero") return PruneMode::RemoveZero;
    throw Error("model doc: unknown prune mode '" + name + "'");
}

std::string model_doc_to_string(const ModelDoc& doc) {
    doc.spec.validate();
    doc.weights.validate(doc.spec.gamma.w_max());

    ordered_json j;
    j["gamma"] = {{"t_max", doc.spec.gamma.t_max}, {"weight_bits", doc.spec.gamma.weight_bits}};
    ordered_json jlayers = ordered_json::array();
    for (const auto& layer : doc.spec.layers) {
        ordered_json jl;
        jl["id"] = layer.id;
        jl["kind"] = kind_name(layer.kind);
        jl["input_dims"] = layer.input_dims;
        jl["rails"] = layer.rails;
        if (layer.kernel)
            jl["kernel"] = {{"size", layer.kernel->size}, {"stride", layer.kernel->stride}};
        else
            jl["kernel"] = nullptr;
        jl["learning"] = learning_name(layer.learning);
        ordered_json jmcs = ordered_json::array();
        for (const auto& mc : layer.minicolumns) jmcs.push_back(minicolumn_to_json(mc));
        jl["minicolumns"] = std::move(jmcs);
        jlayers.push_back(std::move(jl));
    }
    j["layers"] = std::move(jlayers);
    j["trained"] = doc.trained;
    j["prune_mode"] = prune_mode_name(doc.prune_mode);
    j["weights"] = doc.weights.w;
    ordered_json jpruned = ordered_json::array();
    for (size_t i = 0; i < doc.weights.pruned.size(); ++i)
        if (doc.weights.pruned[i]) jpruned.push_back(i);
    j["pruned"] = std::move(jpruned);
    return j.dump() + "\n";
}

ModelDoc model_doc_from_string(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("model doc: invalid JSON: ") + e.what());
    }
    ModelDoc doc;
    try {
        doc.spec.gamma.t_max = j.at("gamma").at("t_max").get<int>();
        doc.spec.gamma.weight_bits = j.at("gamma").at("weight_bits").get<int>();
        for (const auto& jl : j.at("layers")) {
            LayerSpec layer;
            layer.id = jl.at("id").get<std::string>();
            layer.kind = kind_from(jl.at("kind").get<std::string>());
            layer.input_dims = jl.at("input_dims").get<std::vector<int>>();
            layer.rails = jl.at("rails").get<int>();
            if (!jl.at("kernel").is_null()) {
                Kernel k;
                k.size = jl.at("kernel").at("size").get<std::vector<int>>();
                k.stride = jl.at("kernel").at("stride").get<std::vector<int>>();
                layer.kernel = std::move(k);
            }
            layer.learning = learning_from(jl.at("learning").get<std::string>());
            for (const auto& jmc : jl.at("minicolumns"))
                layer.minicolumns.push_back(minicolumn_from_json(jmc));
            doc.spec.layers.push_back(std::move(layer));
        }
        doc.trained = j.at("trained").get<bool>();
        doc.prune_mode = prune_mode_from_name(j.at("prune_mode").get<std::string>());
        doc.weights.w = j.at("weights").get<std::vector<int>>();
        doc.weights.pruned.assign(doc.weights.w.size(), 0);
        for (const auto& idx : j.at("pruned")) {
            const size_t i = idx.get<size_t>();
            if (i >= doc.weights.pruned.size()) throw Error("model doc: pruned index out of range");
            doc.weights.pruned[i] = 1;
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("model doc: missing or malformed field: ") + e.what());
    }
    doc.spec.validate();
    ModelLayout layout(doc.spec);
    if ((long long)doc.weights.size() != layout.total_synapses())
        throw Error("model doc: weight count does not match model structure");
    doc.weights.validate(doc.spec.gamma.w_max());
    return doc;
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write file: " + tmp);
        out << content;
        if (!out.flush()) throw Error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw Error("cannot rename " + tmp + " to " + path);
}

void save_model_doc(const ModelDoc& doc, const std::string& path) {
    atomic_write(path, model_doc_to_string(doc));
}

ModelDoc load_model_doc(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open model document: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return model_doc_from_string(ss.str());
}

}  // namespace neutnn
