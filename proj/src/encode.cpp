#include "neutnn/encode.hpp"

#include <algorithm>
#include <cmath>

namespace neutnn {

namespace {

// round-half-up, stated once so encodings are bit-reproducible
int round_half_up(double x) { return int(std::floor(x + 0.5)); }

}  // namespace

SpikeVolley encode_timeseries(std::span<const double> samples, const GammaCycle& cycle,
                              bool dual_rail) {
    cycle.validate();
    if (samples.empty()) throw Error("encode_timeseries: empty sequence");
    for (double s : samples)
        if (!std::isfinite(s)) throw Error("encode_timeseries: non-finite sample");

    auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *lo_it, hi = *hi_it;
    const double span = hi - lo;

    SpikeVolley volley;
    volley.reserve(samples.size() * (dual_rail ? 2 : 1));
    const int t_last = cycle.t_max - 1;
    for (double s : samples) {
        const double v = span > 0.0 ? (s - lo) / span : 1.0;
        volley.push_back(SpikeTime::at(round_half_up((1.0 - v) * t_last)));
        if (dual_rail) volley.push_back(SpikeTime::at(round_half_up(v * t_last)));
    }
    return volley;
}

SpikeVolley encode_image(const ByteImage& img, const GammaCycle& cycle,
                         uint8_t absent_threshold) {
    cycle.validate();
    img.validate();

    SpikeVolley volley;
    volley.reserve(img.pixels.size());
    const int t_last = cycle.t_max - 1;
    for (uint8_t p : img.pixels) {
        if (p < absent_threshold) {
            volley.push_back(SpikeTime::absent());
        } else {
            volley.push_back(SpikeTime::at(round_half_up((1.0 - p / 255.0) * t_last)));
        }
    }
    return volley;
}

double rand_index(std::span<const int> labels_a, std::span<const int> labels_b) {
    if (labels_a.size() != labels_b.size())
        throw Error("rand_index: partition length mismatch");
    const size_t n = labels_a.size();
    if (n < 2) throw Error("rand_index: need at least 2 elements");

    long long agree = 0, total = 0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            const bool same_a = labels_a[i] == labels_a[j];
            const bool same_b = labels_b[i] == labels_b[j];
            agree += (same_a == same_b);
            ++total;
        }
    }
    return double(agree) / double(total);
}

}  // namespace neutnn
