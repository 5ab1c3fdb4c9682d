#include "neutnn/datasets.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace neutnn {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

uint32_t read_be32(const std::string& buf, size_t off, const std::string& path) {
    if (off + 4 > buf.size()) throw Error("truncated IDX file: " + path);
    return (uint32_t(uint8_t(buf[off])) << 24) | (uint32_t(uint8_t(buf[off + 1])) << 16) |
           (uint32_t(uint8_t(buf[off + 2])) << 8) | uint32_t(uint8_t(buf[off + 3]));
}

}  // namespace

std::vector<LabeledSeries> parse_ucr(const std::string& text) {
    std::vector<LabeledSeries> out;
    std::istringstream lines(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        for (char& c : line)
            if (c == ',' || c == '\t') c = ' ';
        std::istringstream fields(line);
        LabeledSeries series;
        double label;
        if (!(fields >> label))
            throw Error("UCR line " + std::to_string(lineno) + ": missing class label");
        series.label = int(label);
        double v;
        while (fields >> v) series.samples.push_back(v);
        if (series.samples.empty())
            throw Error("UCR line " + std::to_string(lineno) + ": no samples");
        out.push_back(std::move(series));
    }
    return out;
}

std::vector<LabeledSeries> load_ucr(const std::string& path) {
    return parse_ucr(read_file(path));
}

ImageSet load_mnist_idx(const std::string& images_path, const std::string& labels_path) {
    const std::string ibuf = read_file(images_path);
    if (read_be32(ibuf, 0, images_path) != 0x00000803u)
        throw Error("not a rank-3 u8 IDX file: " + images_path);
    const uint32_t count = read_be32(ibuf, 4, images_path);
    const uint32_t rows = read_be32(ibuf, 8, images_path);
    const uint32_t cols = read_be32(ibuf, 12, images_path);
    const size_t pix = size_t(rows) * cols;
    if (ibuf.size() != 16 + size_t(count) * pix)
        throw Error("IDX payload size mismatch: " + images_path);

    const std::string lbuf = read_file(labels_path);
    if (read_be32(lbuf, 0, labels_path) != 0x00000801u)
        throw Error("not a rank-1 u8 IDX file: " + labels_path);
    if (read_be32(lbuf, 4, labels_path) != count)
        throw Error("IDX image/label count mismatch");
    if (lbuf.size() != 8 + size_t(count)) throw Error("IDX payload size mismatch: " + labels_path);

    ImageSet set;
    set.images.reserve(count);
    set.labels.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        ByteImage img;
        img.rows = int(rows);
        img.cols = int(cols);
        const char* p = ibuf.data() + 16 + size_t(i) * pix;
        img.pixels.assign(reinterpret_cast<const uint8_t*>(p),
                          reinterpret_cast<const uint8_t*>(p) + pix);
        set.images.push_back(std::move(img));
        set.labels.push_back(int(uint8_t(lbuf[8 + i])));
    }
    return set;
}

}  // namespace neutnn
