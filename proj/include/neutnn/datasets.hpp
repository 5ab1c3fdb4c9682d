#pragma once

#include <string>
#include <vector>

#include "neutnn/encode.hpp"
#include "neutnn/spike.hpp"

namespace neutnn {

/// One labeled time series (UCR-style row).
struct LabeledSeries {
    int label = 0;
    std::vector<double> samples;
};

/// UCR archive text format: one series per line, first field an integer
/// class label, remaining fields real samples. Tab or comma separated.
std::vector<LabeledSeries> load_ucr(const std::string& path);
std::vector<LabeledSeries> parse_ucr(const std::string& text);

/// Labeled image set loaded from IDX files.
struct ImageSet {
    std::vector<ByteImage> images;
    std::vector<int> labels;
};

/// Standard IDX byte format: big-endian magic, dimension sizes, raw bytes.
/// images_path must be a rank-3 u8 file (count x rows x cols), labels_path
/// a rank-1 u8 file with matching count.
ImageSet load_mnist_idx(const std::string& images_path, const std::string& labels_path);

}  // namespace neutnn
