#include "neutnn/netlist.hpp"

#include <ostream>
#include <sstream>

namespace neutnn {

namespace {

constexpr const char* kHeader = "NEUTNN-NETLIST v1";
const char* kModules[] = {"top", "layer", "minicolumn", "neuron", "dendrite", "segment", "synapse"};

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s;
}

std::vector<int> split_ints(const std::string& s) {
    std::vector<int> out;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

using AttrMap = std::map<std::string, std::string>;

AttrMap parse_attrs(std::istringstream& fields) {
    AttrMap attrs;
    std::string tok;
    while (fields >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw Error("netlist: malformed attribute '" + tok + "'");
        attrs[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return attrs;
}

const std::string& attr(const AttrMap& m, const std::string& key) {
    auto it = m.find(key);
    if (it == m.end()) throw Error("netlist: missing attribute '" + key + "'");
    return it->second;
}

}  // namespace

NetlistStats emit_netlist(const ModelDoc& doc, std::ostream& out) {
    doc.spec.validate();
    ModelLayout layout(doc.spec);
    if ((long long)doc.weights.size() != layout.total_synapses())
        throw Error("emit_netlist: weight matrix size mismatch");
    const bool keep_zero = doc.prune_mode == PruneMode::KeepZero;

    NetlistStats stats;
    for (const char* m : kModules) stats.instances[m] = 0;

    out << kHeader << "\n";
    out << "meta t_max " << doc.spec.gamma.t_max << "\n";
    out << "meta weight_bits " << doc.spec.gamma.weight_bits << "\n";
    out << "meta prune_mode " << prune_mode_name(doc.prune_mode) << "\n";
    out << "meta trained " << (doc.trained ? 1 : 0) << "\n";
    // silicon-flow context carried as metadata only
    out << "meta floorplan_density_pct 60\n";
    out << "meta clock_khz 100\n";
    for (const char* m : kModules) out << "def " << m << " in out\n";

    out << "inst top top\n";
    stats.instances["top"] = 1;

    long long widx = 0;
    for (size_t li = 0; li < doc.spec.layers.size(); ++li) {
        const auto& layer = doc.spec.layers[li];
        const std::string lpath = "L" + std::to_string(li);
        out << "inst " << lpath << " layer id=" << layer.id
            << " kind=" << (layer.kind == LayerKind::Minicolumn ? "minicolumn" : "cv_group")
            << " learning="
            << (layer.learning == Learning::Unsupervised ? "unsupervised" : "supervised")
            << " dims=" << join_ints(layer.input_dims) << " rails=" << layer.rails;
        if (layer.kernel)
            out << " kernel_size=" << join_ints(layer.kernel->size)
                << " kernel_stride=" << join_ints(layer.kernel->stride);
        out << "\n";
        ++stats.instances["layer"];

        const int mcs = int(layer.minicolumns.size());
        for (int pos = 0; pos < layer.positions(); ++pos) {
            for (int m = 0; m < mcs; ++m) {
                const auto& mc = layer.minicolumns[m];
                const int col = pos * mcs + m;
                const std::string cpath = lpath + ".P" + std::to_string(col);
                out << "inst " << cpath << " minicolumn wta_k=" << mc.wta_k << "\n";
                ++stats.instances["minicolumn"];
                for (size_t n = 0; n < mc.neurons.size(); ++n) {
                    const auto& neuron = mc.neurons[n];
                    const std::string npath = cpath + ".N" + std::to_string(n);
                    out << "inst " << npath << " neuron alpha=" << neuron.distal_advance << "\n";
                    ++stats.instances["neuron"];
                    for (size_t d = 0; d < neuron.dendrites.size(); ++d) {
                        const std::string dpath = npath + ".D" + std::to_string(d);
                        out << "inst " << dpath << " dendrite\n";
                        ++stats.instances["dendrite"];
                        const auto& segs = neuron.dendrites[d].segments;
                        for (size_t s = 0; s < segs.size(); ++s) {
                            const auto& seg = segs[s];
                            const std::string spath = dpath + ".S" + std::to_string(s);
                            out << "inst " << spath << " segment kind="
                                << (seg.kind == SegmentKind::Proximal ? "proximal" : "distal")
                                << " response="
                                << (seg.response == ResponseKind::Rnl ? "rnl" : "snl")
                                << " theta=" << seg.threshold << " offset=" << seg.input_offset
                                << " synapses=" << seg.synapse_count << "\n";
                            ++stats.instances["segment"];
                            const int ww = layer.window_width();
                            for (int y = 0; y < seg.synapse_count; ++y, ++widx) {
                                const bool pr = doc.weights.pruned[widx] != 0;
                                if (pr && !keep_zero) continue;
                                out << "inst " << spath << ".Y" << y << " synapse line="
                                    << (seg.input_offset + y) % ww << " w=" << doc.weights.w[widx];
                                if (pr) out << " pruned=1";
                                out << "\n";
                                ++stats.instances["synapse"];
                            }
                        }
                    }
                }
            }
        }
    }

    // inter-level connectivity: one driver per net
    const int in_w = doc.spec.input_width();
    for (int i = 0; i < in_w; ++i) out << "net top.in[" << i << "] L0.in[" << i << "]\n";
    for (size_t li = 0; li + 1 < doc.spec.layers.size(); ++li) {
        const int w = doc.spec.layers[li].output_width();
        for (int i = 0; i < w; ++i)
            out << "net L" << li << ".out[" << i << "] L" << (li + 1) << ".in[" << i << "]\n";
    }
    const int out_w = doc.spec.output_width();
    const size_t last = doc.spec.layers.size() - 1;
    for (int i = 0; i < out_w; ++i)
        out << "net L" << last << ".out[" << i << "] top.out[" << i << "]\n";

    stats.total_synapses = stats.instances["synapse"];
    for (const char* m : kModules)
        out << "stat instances." << m << " " << stats.instances[m] << "\n";
    out << "stat total_synapses " << stats.total_synapses << "\n";
    out << "end\n";
    return stats;
}

std::string emit_netlist_string(const ModelDoc& doc) {
    std::ostringstream out;
    emit_netlist(doc, out);
    return out.str();
}

ModelDoc parse_netlist(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kHeader) throw Error("netlist: bad header");

    ModelDoc doc;
    std::vector<int> weights;
    std::vector<uint8_t> pruned;
    LayerSpec* cur_layer = nullptr;
    MinicolumnSpec* cur_mc = nullptr;
    long long declared_total = -1;

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string rec;
        fields >> rec;
        if (rec == "meta") {
            std::string key, value;
            fields >> key >> value;
            if (key == "t_max") doc.spec.gamma.t_max = std::stoi(value);
            else if (key == "weight_bits") doc.spec.gamma.weight_bits = std::stoi(value);
            else if (key == "prune_mode") doc.prune_mode = prune_mode_from_name(value);
            else if (key == "trained") doc.trained = value == "1";
        } else if (rec == "inst") {
            std::string path, module;
            fields >> path >> module;
            AttrMap attrs = parse_attrs(fields);
            if (module == "layer") {
                LayerSpec layer;
                layer.id = attr(attrs, "id");
                layer.kind = attr(attrs, "kind") == "cv_group" ? LayerKind::CvGroup
                                                               : LayerKind::Minicolumn;
                layer.learning = attr(attrs, "learning") == "supervised" ? Learning::Supervised
                                                                         : Learning::Unsupervised;
                layer.input_dims = split_ints(attr(attrs, "dims"));
                layer.rails = std::stoi(attr(attrs, "rails"));
                if (attrs.count("kernel_size")) {
                    Kernel k;
                    k.size = split_ints(attrs["kernel_size"]);
                    k.stride = split_ints(attrs["kernel_stride"]);
                    layer.kernel = std::move(k);
                }
                doc.spec.layers.push_back(std::move(layer));
                cur_layer = &doc.spec.layers.back();
                cur_mc = nullptr;
            } else if (module == "minicolumn") {
                if (!cur_layer) throw Error("netlist: minicolumn outside a layer");
                // kernel layers replicate one template across positions
                if (cur_layer->kernel && !cur_layer->minicolumns.empty()) {
                    cur_mc = nullptr;  // replicated position, structure already known
                } else {
                    MinicolumnSpec mc;
                    mc.wta_k = std::stoi(attr(attrs, "wta_k"));
                    cur_layer->minicolumns.push_back(std::move(mc));
                    cur_mc = &cur_layer->minicolumns.back();
                }
            } else if (module == "neuron") {
                if (cur_mc) {
                    NeuronSpec n;
                    n.distal_advance = std::stoi(attr(attrs, "alpha"));
                    cur_mc->neurons.push_back(std::move(n));
                }
            } else if (module == "dendrite") {
                if (cur_mc) cur_mc->neurons.back().dendrites.push_back({});
            } else if (module == "segment") {
                if (cur_mc) {
                    SegmentSpec s;
                    s.kind = attr(attrs, "kind") == "proximal" ? SegmentKind::Proximal
                                                               : SegmentKind::Distal;
                    s.response =
                        attr(attrs, "response") == "snl" ? ResponseKind::Snl : ResponseKind::Rnl;
                    s.threshold = std::stoi(attr(attrs, "theta"));
                    s.input_offset = std::stoi(attr(attrs, "offset"));
                    s.synapse_count = std::stoi(attr(attrs, "synapses"));
                    cur_mc->neurons.back().dendrites.back().segments.push_back(s);
                }
            } else if (module == "synapse") {
                weights.push_back(std::stoi(attr(attrs, "w")));
                pruned.push_back(attrs.count("pruned") ? 1 : 0);
            }
        } else if (rec == "stat") {
            std::string key;
            long long value;
            fields >> key >> value;
            if (key == "total_synapses") declared_total = value;
        } else if (rec == "net" || rec == "def" || rec == "end") {
            continue;
        } else {
            throw Error("netlist: unknown record '" + rec + "'");
        }
    }

    doc.spec.validate();
    ModelLayout layout(doc.spec);
    if (doc.prune_mode == PruneMode::KeepZero) {
        if ((long long)weights.size() != layout.total_synapses())
            throw Error("netlist: synapse instance count does not match structure");
        doc.weights.w = std::move(weights);
        doc.weights.pruned = std::move(pruned);
    } else {
        // RemoveZero drops pruned sites; reconstruct what remains as unpruned
        doc.weights = make_weights(doc.spec);
        throw Error("netlist: RemoveZero netlists cannot be round-tripped to a full model");
    }
    if (declared_total >= 0 && declared_total != (long long)doc.weights.size())
        throw Error("netlist: declared total_synapses mismatch");
    return doc;
}

}  // namespace neutnn
