#include "resflow/idx.hpp"

#include <cstdint>
#include <fstream>
#include <map>
#include <stdexcept>

namespace resflow {

namespace {

std::uint32_t read_be32(std::istream& in, const std::string& path) {
    unsigned char buf[4];
    if (!in.read(reinterpret_cast<char*>(buf), 4))
        throw std::runtime_error("truncated IDX file: " + path);
    return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
           (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

std::ifstream open_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open IDX file: " + path);
    return in;
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 const std::vector<int>& classes, int limit) {
    if (classes.empty()) throw std::invalid_argument("load_idx needs a nonempty class list");
    if (limit < 0) throw std::invalid_argument("load_idx needs limit >= 0");

    auto img = open_binary(images_path);
    if (read_be32(img, images_path) != 0x00000803u)
        throw std::runtime_error("bad IDX image magic in " + images_path);
    const std::uint32_t count = read_be32(img, images_path);
    const std::uint32_t rows = read_be32(img, images_path);
    const std::uint32_t cols = read_be32(img, images_path);

    auto lab = open_binary(labels_path);
    if (read_be32(lab, labels_path) != 0x00000801u)
        throw std::runtime_error("bad IDX label magic in " + labels_path);
    const std::uint32_t label_count = read_be32(lab, labels_path);
    if (label_count != count)
        throw std::runtime_error("IDX image/label counts differ: " + std::to_string(count) +
                                 " vs " + std::to_string(label_count));

    std::map<int, int> class_index;
    for (size_t i = 0; i < classes.size(); ++i)
        class_index[classes[i]] = static_cast<int>(i);
    std::map<int, int> taken;

    const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
    std::vector<unsigned char> buf(pixels);
    Dataset data;
    for (std::uint32_t i = 0; i < count; ++i) {
        if (!img.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(pixels)))
            throw std::runtime_error("truncated IDX file: " + images_path);
        char label_byte;
        if (!lab.read(&label_byte, 1))
            throw std::runtime_error("truncated IDX file: " + labels_path);
        const int label = static_cast<unsigned char>(label_byte);
        auto it = class_index.find(label);
        if (it == class_index.end()) continue;
        if (taken[label] >= limit) continue;
        ++taken[label];

        Sample smp;
        smp.d.resize(static_cast<Eigen::Index>(pixels));
        for (std::size_t p = 0; p < pixels; ++p)
            smp.d[static_cast<Eigen::Index>(p)] = static_cast<double>(buf[p]) / 255.0;
        const double norm = smp.d.norm();
        if (norm > 1.0) smp.d /= norm;
        smp.g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(classes.size()));
        smp.g[it->second] = 1.0;
        data.push_back(std::move(smp));
    }
    if (limit > 0) {
        for (int cls : classes) {
            if (taken.find(cls) == taken.end())
                throw std::runtime_error("requested class " + std::to_string(cls) +
                                         " absent from " + labels_path);
        }
    }
    return data;
}

}  // namespace resflow
