#include <algorithm>

#include "doctest.h"
#include "neutnn/network.hpp"

using namespace neutnn;

namespace {

SegmentSpec seg(int synapses, int threshold, ResponseKind r = ResponseKind::Rnl,
                SegmentKind k = SegmentKind::Proximal, int offset = 0) {
    SegmentSpec s;
    s.kind = k;
    s.synapse_count = synapses;
    s.threshold = threshold;
    s.response = r;
    s.input_offset = offset;
    return s;
}

NeuronSpec simple_neuron(int synapses, int threshold) {
    NeuronSpec n;
    n.dendrites.push_back({{seg(synapses, threshold)}});
    return n;
}

LayerSpec simple_layer(const std::string& id, int width, int neurons, int threshold) {
    LayerSpec l;
    l.id = id;
    l.input_dims = {width};
    MinicolumnSpec mc;
    for (int i = 0; i < neurons; ++i) mc.neurons.push_back(simple_neuron(width, threshold));
    l.minicolumns.push_back(std::move(mc));
    return l;
}

}  // namespace

TEST_CASE("k-WTA keeps the k earliest firers, lowest index on ties") {
    const std::vector<SpikeTime> times{SpikeTime::at(3), SpikeTime::at(1), SpikeTime::at(3),
                                       SpikeTime::absent(), SpikeTime::at(1)};
    const auto one = wta_inhibit(times, 1);
    CHECK(one[1] == SpikeTime::at(1));  // index 1 beats index 4 on the tie
    for (size_t i : {0u, 2u, 3u, 4u}) CHECK(one[i].is_absent());

    const auto three = wta_inhibit(times, 3);
    CHECK(three[0] == SpikeTime::at(3));  // index 0 beats index 2 on the tie
    CHECK(three[1] == SpikeTime::at(1));
    CHECK(three[2].is_absent());
    CHECK(three[3].is_absent());
    CHECK(three[4] == SpikeTime::at(1));
}

TEST_CASE("k-WTA never resurrects silent neurons") {
    const std::vector<SpikeTime> times{SpikeTime::absent(), SpikeTime::absent()};
    const auto out = wta_inhibit(times, 2);
    CHECK(out[0].is_absent());
    CHECK(out[1].is_absent());
}

TEST_CASE("layer geometry: kernel positions, window width, output width") {
    LayerSpec l;
    l.id = "conv";
    l.input_dims = {28, 28};
    l.rails = 1;
    l.kernel = Kernel{{5, 5}, {1, 1}};
    MinicolumnSpec mc;
    for (int i = 0; i < 10; ++i) mc.neurons.push_back(simple_neuron(432, 88));
    l.minicolumns.push_back(std::move(mc));
    l.validate();
    CHECK(l.input_width() == 784);
    CHECK(l.positions() == 576);   // 24 x 24
    CHECK(l.window_width() == 25);
    CHECK(l.output_width() == 5760);
    CHECK(l.column_instances() == 576);
    CHECK(l.synapse_count() == 576 * 10 * 432);
}

TEST_CASE("strided kernels reduce the position count") {
    LayerSpec l = simple_layer("s", 25, 1, 1);
    l.input_dims = {28, 28};
    l.kernel = Kernel{{5, 5}, {2, 2}};
    l.minicolumns[0].neurons[0] = simple_neuron(25, 1);
    CHECK(l.positions() == 144);  // 12 x 12
}

TEST_CASE("2-D kernel windows enumerate lines row-major, rail-minor") {
    LayerSpec l;
    l.id = "k";
    l.input_dims = {3, 3};
    l.rails = 2;
    l.kernel = Kernel{{2, 2}, {1, 1}};
    l.minicolumns.push_back({{simple_neuron(8, 1)}, 1});
    l.validate();
    CHECK(l.positions() == 4);
    // position 3 = bottom-right: cells (1,1),(1,2),(2,1),(2,2), two rails each
    const auto lines = l.window_lines(3);
    CHECK(lines == std::vector<int>{8, 9, 10, 11, 14, 15, 16, 17});
    // position 0 = top-left
    CHECK(l.window_lines(0) == std::vector<int>{0, 1, 2, 3, 6, 7, 8, 9});
}

TEST_CASE("kernel-free layers see the whole input") {
    LayerSpec l = simple_layer("full", 6, 2, 3);
    CHECK(l.positions() == 1);
    CHECK(l.window_width() == 6);
    const auto lines = l.window_lines(0);
    CHECK(lines == std::vector<int>{0, 1, 2, 3, 4, 5});
}

TEST_CASE("layer validation rejects malformed geometry") {
    LayerSpec l = simple_layer("bad", 4, 1, 1);
    l.input_dims = {};
    CHECK_THROWS_AS(l.validate(), Error);
    l.input_dims = {4, 4, 4};
    CHECK_THROWS_AS(l.validate(), Error);
    l.input_dims = {4};
    l.rails = 0;
    CHECK_THROWS_AS(l.validate(), Error);
    l.rails = 1;
    l.kernel = Kernel{{5}, {1}};  // kernel wider than the input
    CHECK_THROWS_AS(l.validate(), Error);
    l.kernel = Kernel{{2, 2}, {1, 1}};  // rank mismatch
    CHECK_THROWS_AS(l.validate(), Error);
}

TEST_CASE("kernel layers allow exactly one column template") {
    LayerSpec l = simple_layer("k", 4, 1, 1);
    l.kernel = Kernel{{2}, {1}};
    l.minicolumns.push_back(l.minicolumns[0]);
    CHECK_THROWS_AS(l.validate(), Error);
}

TEST_CASE("model validation enforces unique ids and width continuity") {
    ModelSpec m;
    m.layers.push_back(simple_layer("a", 4, 3, 2));
    m.layers.push_back(simple_layer("b", 3, 2, 2));
    CHECK_NOTHROW(m.validate());
    m.layers[1].id = "a";
    CHECK_THROWS_AS(m.validate(), Error);
    m.layers[1].id = "b";
    m.layers[1].input_dims = {5};
    m.layers[1].minicolumns[0].neurons[0] = simple_neuron(5, 2);
    m.layers[1].minicolumns[0].neurons[1] = simple_neuron(5, 2);
    CHECK_THROWS_AS(m.validate(), Error);
}

TEST_CASE("add_layer reports both widths and suggests a fix on mismatch") {
    ModelSpec m;
    CHECK_FALSE(add_layer(m, simple_layer("a", 4, 3, 2)));
    const auto diag = add_layer(m, simple_layer("b", 7, 2, 2));
    REQUIRE(diag.has_value());
    CHECK(diag->expected == 3);
    CHECK(diag->actual == 7);
    CHECK(diag->message.find("3") != std::string::npos);
    CHECK(diag->message.find("7") != std::string::npos);
    CHECK(diag->message.find("suggest") != std::string::npos);
    CHECK(m.layers.size() == 1);  // model untouched
    CHECK_FALSE(add_layer(m, simple_layer("b", 3, 2, 2)));
    CHECK(m.layers.size() == 2);
}

TEST_CASE("add_layer assigns ids and rejects duplicates") {
    ModelSpec m;
    LayerSpec anon = simple_layer("", 4, 2, 2);
    CHECK_FALSE(add_layer(m, anon));
    CHECK(m.layers[0].id == "L0");
    LayerSpec dup = simple_layer("L0", 2, 2, 2);
    CHECK_THROWS_AS(add_layer(m, dup), Error);
}

TEST_CASE("flat weight layout walks layer, position, neuron order") {
    ModelSpec m;
    LayerSpec l = simple_layer("k", 4, 2, 1);
    l.kernel = Kernel{{2}, {1}};
    l.minicolumns[0].neurons[0] = simple_neuron(2, 1);
    l.minicolumns[0].neurons[1] = simple_neuron(2, 1);
    m.layers.push_back(l);
    m.validate();
    const ModelLayout layout(m);
    CHECK(layout.total_synapses() == 3 * 2 * 2);  // 3 positions, 2 neurons, 2 synapses
    CHECK(layout.layer_offset(0) == 0);
    CHECK(layout.column_offset(0, 0, 0) == 0);
    CHECK(layout.column_offset(0, 1, 0) == 4);
    CHECK(layout.column_offset(0, 2, 0) == 8);
    CHECK(layout.neuron_offset(0, 0, 1) == 2);
    const auto w = make_weights(m);
    CHECK(w.size() == 12);
    CHECK(w.pruned_count() == 0);
}

TEST_CASE("weight matrix validation enforces range and prune invariants") {
    WeightMatrix w;
    w.w = {0, 7, 3};
    w.pruned = {0, 0, 0};
    CHECK_NOTHROW(w.validate(7));
    w.w[1] = 8;
    CHECK_THROWS_AS(w.validate(7), Error);
    w.w[1] = 7;
    w.pruned[1] = 1;  // pruned but nonzero
    CHECK_THROWS_AS(w.validate(7), Error);
    w.pruned.pop_back();
    CHECK_THROWS_AS(w.validate(7), Error);
}

TEST_CASE("layer_forward applies WTA within each minicolumn") {
    ModelSpec m;
    m.layers.push_back(simple_layer("l", 2, 2, 2));
    m.validate();
    WeightMatrix w = make_weights(m);
    // neuron 0 strong (fires early), neuron 1 weak (fires late)
    w.w = {7, 7, 1, 1};
    const SpikeVolley in{SpikeTime::at(0), SpikeTime::at(0)};
    const auto trace = layer_forward(m.layers[0], m.gamma, w.w, in);
    REQUIRE(trace.columns.size() == 1);
    CHECK(trace.columns[0].raw_neuron_times[0].is_finite());
    CHECK(trace.columns[0].raw_neuron_times[1].is_finite());
    CHECK(trace.output[0].is_finite());
    CHECK(trace.output[1].is_absent());  // inhibited
}

TEST_CASE("synapses wrap around the window when a segment oversubscribes it") {
    // 3 synapses over a 2-line window: synapse 2 re-reads line 0
    ModelSpec m;
    LayerSpec l;
    l.id = "wrap";
    l.input_dims = {2};
    MinicolumnSpec mc;
    NeuronSpec n;
    n.dendrites.push_back({{seg(3, 6)}});
    mc.neurons.push_back(n);
    l.minicolumns.push_back(mc);
    m.layers.push_back(l);
    m.validate();
    WeightMatrix w = make_weights(m);
    w.w = {7, 0, 7};  // lines 0 and 0 again; line 1 contributes nothing
    const auto trace = layer_forward(m.layers[0], m.gamma, w.w,
                                     SpikeVolley{SpikeTime::at(0), SpikeTime::absent()});
    // two saturating RNL ramps on line 0: potential 2,4,6 -> fires at t=2
    CHECK(trace.output[0] == SpikeTime::at(2));
}

TEST_CASE("model_forward threads volleys through consecutive layers") {
    ModelSpec m;
    m.layers.push_back(simple_layer("a", 2, 2, 1));
    m.layers.push_back(simple_layer("b", 2, 2, 1));
    m.validate();
    WeightMatrix w = make_weights(m);
    std::fill(w.w.begin(), w.w.end(), 7);
    const auto volleys = model_forward(m, w, SpikeVolley{SpikeTime::at(0), SpikeTime::at(0)});
    REQUIRE(volleys.size() == 2);
    CHECK(volleys[0].size() == 2);
    CHECK(volleys[1].size() == 2);
    CHECK(volleys[1][0].is_finite());
}

TEST_CASE("CV group classification: argmin with lowest-index tie break") {
    const std::vector<SpikeTime> t1{SpikeTime::at(4), SpikeTime::at(2), SpikeTime::at(2)};
    CHECK(cv_group_classify(t1) == 1);
    const std::vector<SpikeTime> silent{SpikeTime::absent(), SpikeTime::absent()};
    CHECK_FALSE(cv_group_classify(silent).has_value());
}

TEST_CASE("synapse accounting: structural count and RemoveZero subtraction") {
    ModelSpec m;
    m.layers.push_back(simple_layer("a", 4, 3, 2));
    m.validate();
    CHECK(count_synapses(m) == 12);
    WeightMatrix w = make_weights(m);
    CHECK(count_synapses(m, w, PruneMode::KeepZero) == 12);
    CHECK(count_synapses(m, w, PruneMode::RemoveZero) == 12);
    w.pruned[0] = w.pruned[5] = 1;
    CHECK(count_synapses(m, w, PruneMode::KeepZero) == 12);
    CHECK(count_synapses(m, w, PruneMode::RemoveZero) == 10);
}
