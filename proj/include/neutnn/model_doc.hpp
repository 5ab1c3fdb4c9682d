#pragma once

#include <string>

#include "neutnn/network.hpp"

namespace neutnn {

/// On-disk model document: structure + weights + training/prune state.
/// Serialization is canonical: field order and number formatting are fixed,
/// so semantically equal models produce identical bytes.
struct ModelDoc {
    ModelSpec spec;
    WeightMatrix weights;
    bool trained = false;
    PruneMode prune_mode = PruneMode::KeepZero;
};

std::string model_doc_to_string(const ModelDoc& doc);
ModelDoc model_doc_from_string(const std::string& text);

void save_model_doc(const ModelDoc& doc, const std::string& path);
ModelDoc load_model_doc(const std::string& path);

/// Writes `content` via a temp file in the same directory, then renames.
void atomic_write(const std::string& path, const std::string& content);

std::string prune_mode_name(PruneMode mode);
PruneMode prune_mode_from_name(const std::string& name);

}  // namespace neutnn
