#include <iostream>

#include "CLI11.hpp"
#include "neutnn/flow.hpp"
#include "neutnn/model_doc.hpp"
#include "neutnn/ppa.hpp"

int main(int argc, char** argv) {
    CLI::App app{"NeuTNN functional simulator and hardware-design compiler"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "execute the flow stages of a configuration file");
    run->add_option("config", config_path, "configuration file")->required();

    std::string model_path;
    auto* validate = app.add_subcommand("validate", "validate a model document");
    validate->add_option("model", model_path, "model document path")->required();

    std::string count_path, count_mode = "keep_zero";
    auto* count = app.add_subcommand("count", "count instantiated synapses of a model");
    count->add_option("model", count_path, "model document path")->required();
    count->add_option("--mode", count_mode, "keep_zero or remove_zero");

    std::string pdk_filter;
    auto* fit = app.add_subcommand("fit-ppa", "fit cost lines to the embedded UCR tables");
    fit->add_option("--pdk", pdk_filter, "FreePDK45, ASAP7 or TNN7 (default: all)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            return neutnn::run_flow(neutnn::load_config(config_path), std::cout);
        }
        if (*validate) {
            const auto doc = neutnn::load_model_doc(model_path);
            std::cout << "ok: " << doc.spec.layers.size() << " layers, "
                      << neutnn::count_synapses(doc.spec) << " synapses\n";
            return 0;
        }
        if (*count) {
            const auto doc = neutnn::load_model_doc(count_path);
            std::cout << neutnn::count_synapses(doc.spec, doc.weights,
                                                neutnn::prune_mode_from_name(count_mode))
                      << "\n";
            return 0;
        }
        if (*fit) {
            std::vector<neutnn::PpaModel> models;
            if (pdk_filter.empty()) {
                for (auto pdk :
                     {neutnn::Pdk::FreePDK45, neutnn::Pdk::ASAP7, neutnn::Pdk::TNN7})
                    models.push_back(neutnn::fit_ppa(pdk));
            } else {
                models.push_back(neutnn::fit_ppa(neutnn::pdk_from_name(pdk_filter)));
            }
            std::cout << neutnn::fits_to_csv(models);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
