#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "neutnn/spike.hpp"

namespace neutnn {

/// Rectangular 8-bit image, row-major.
struct ByteImage {
    int rows = 0;
    int cols = 0;
    std::vector<uint8_t> pixels;  // rows*cols entries

    void validate() const {
        if (rows < 0 || cols < 0 || pixels.size() != size_t(rows) * size_t(cols))
            throw Error("ByteImage: pixel count does not match rows*cols");
    }
};

/// Intensity-to-latency encoding of a real-valued sequence.
/// Each sample is min-max normalized over the sequence to v in [0,1];
/// positive rail spikes at round((1-v)*(t_max-1)). With dual_rail a second
/// rail spiking at round(v*(t_max-1)) is interleaved after each positive
/// rail, doubling the volley width. An all-equal sequence normalizes to
/// v=1 everywhere (all positive rails spike at 0).
SpikeVolley encode_timeseries(std::span<const double> samples, const GammaCycle& cycle,
                              bool dual_rail);

/// Latency encoding of an image: pixels below absent_threshold never spike,
/// brighter pixels spike earlier: t = round((1 - p/255)*(t_max-1)).
/// Row-major output order.
SpikeVolley encode_image(const ByteImage& img, const GammaCycle& cycle,
                         uint8_t absent_threshold);

/// Pairwise-agreement similarity of two partitions, in [0,1].
double rand_index(std::span<const int> labels_a, std::span<const int> labels_b);

}  // namespace neutnn
