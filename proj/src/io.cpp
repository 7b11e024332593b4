#include "resflow/io.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace resflow {

namespace {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_binary_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void append_u64(std::string& buf, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void append_f64(std::string& buf, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    append_u64(buf, bits);
}

void append_matrix(std::string& buf, const Eigen::MatrixXd& mat) {
    for (Eigen::Index i = 0; i < mat.rows(); ++i)
        for (Eigen::Index j = 0; j < mat.cols(); ++j) append_f64(buf, mat(i, j));
}

struct BinaryReader {
    const std::string& bytes;
    size_t pos = 0;
    explicit BinaryReader(const std::string& b) : bytes(b) {}

    std::uint64_t u64() {
        if (pos + 8 > bytes.size()) throw std::runtime_error("truncated parameter file");
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }
    double f64() {
        std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols) {
        Eigen::MatrixXd mat(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) mat(i, j) = f64();
        return mat;
    }
};

nlohmann::json matrix_to_json(const Eigen::MatrixXd& mat) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < mat.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < mat.cols(); ++j) row.push_back(mat(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows) {
    const auto r = rows.size();
    const auto c = r == 0 ? 0 : rows.at(0).size();
    Eigen::MatrixXd mat(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < c; ++j) mat(static_cast<Eigen::Index>(i),
                                           static_cast<Eigen::Index>(j)) = rows.at(i).at(j);
    return mat;
}

}  // namespace

std::string format_cell(const Cell& cell) {
    if (std::holds_alternative<std::int64_t>(cell))
        return std::to_string(std::get<std::int64_t>(cell));
    if (std::holds_alternative<double>(cell)) return format_double(std::get<double>(cell));
    return std::get<std::string>(cell);
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<CsvRow>& rows) {
    std::string out;
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) out.push_back(',');
        out += header[i];
    }
    out.push_back('\n');
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out.push_back(',');
            out += format_cell(row[i]);
        }
        out.push_back('\n');
    }
    write_binary_file(path, out);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    write_binary_file(path, text);
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return std::string(buf);
}

std::string hash_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for hashing: " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return fnv1a_hex(bytes);
}

std::vector<ManifestEntry> write_manifest(const std::filesystem::path& output_dir,
                                          const std::vector<std::string>& files) {
    std::vector<ManifestEntry> entries;
    nlohmann::json listing = nlohmann::json::array();
    for (const auto& file : files) {
        ManifestEntry entry;
        entry.path = file;
        const auto full = output_dir / file;
        entry.bytes = static_cast<std::uint64_t>(std::filesystem::file_size(full));
        entry.hash = hash_file(full);
        listing.push_back({{"path", entry.path}, {"bytes", entry.bytes}, {"hash", entry.hash}});
        entries.push_back(std::move(entry));
    }
    nlohmann::json manifest{{"files", listing}};
    write_text(output_dir / "manifest.json", manifest.dump(2) + "\n");
    entries.push_back({"manifest.json", 0, ""});
    return entries;
}

void write_train_log(const std::filesystem::path& path, const TrainLog& log) {
    std::vector<CsvRow> rows;
    rows.reserve(log.size());
    for (const auto& row : log)
        rows.push_back({static_cast<std::int64_t>(row.epoch), row.train_loss, row.test_loss,
                        row.param_inf_norm, row.wall_ms});
    write_csv(path, {"epoch", "train_loss", "test_loss", "param_inf_norm", "wall_ms"}, rows);
}

void save_params_binary(const DiscreteParams& params, const std::filesystem::path& path) {
    validate(params);
    std::string buf;
    append_u64(buf, static_cast<std::uint64_t>(params.n_d()));
    append_u64(buf, static_cast<std::uint64_t>(params.n()));
    append_u64(buf, static_cast<std::uint64_t>(params.m()));
    append_u64(buf, static_cast<std::uint64_t>(params.depth()));
    append_f64(buf, params.horizon);
    append_matrix(buf, params.pre.U);
    append_matrix(buf, params.pre.a);
    for (const auto& layer : params.layers) {
        append_matrix(buf, layer.V);
        append_matrix(buf, layer.W);
        append_matrix(buf, layer.b);
        append_matrix(buf, layer.c);
    }
    write_binary_file(path, buf);
}

DiscreteParams load_params_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open parameter file: " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    BinaryReader reader(bytes);
    const auto n_d = static_cast<Eigen::Index>(reader.u64());
    const auto n = static_cast<Eigen::Index>(reader.u64());
    const auto m = static_cast<Eigen::Index>(reader.u64());
    const auto L = static_cast<Eigen::Index>(reader.u64());
    DiscreteParams params;
    params.horizon = reader.f64();
    params.pre.U = reader.matrix(n, n_d);
    params.pre.a = reader.matrix(n, 1).col(0);
    for (Eigen::Index l = 0; l < L; ++l) {
        LayerParams layer;
        layer.V = reader.matrix(m, n);
        layer.W = reader.matrix(n, m);
        layer.b = reader.matrix(m, 1).col(0);
        layer.c = reader.matrix(n, 1).col(0);
        params.layers.push_back(std::move(layer));
    }
    validate(params);
    return params;
}

std::string params_to_json(const DiscreteParams& params) {
    validate(params);
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : params.layers) {
        layers.push_back({{"V", matrix_to_json(layer.V)},
                          {"W", matrix_to_json(layer.W)},
                          {"b", matrix_to_json(layer.b)},
                          {"c", matrix_to_json(layer.c)}});
    }
    nlohmann::json doc{{"T", params.horizon},
                       {"U", matrix_to_json(params.pre.U)},
                       {"a", matrix_to_json(params.pre.a)},
                       {"layers", layers}};
    return doc.dump(2) + "\n";
}

DiscreteParams params_from_json(const std::string& text) {
    const auto doc = nlohmann::json::parse(text);
    DiscreteParams params;
    params.horizon = doc.at("T").get<double>();
    params.pre.U = matrix_from_json(doc.at("U"));
    params.pre.a = matrix_from_json(doc.at("a")).col(0);
    for (const auto& layer_doc : doc.at("layers")) {
        LayerParams layer;
        layer.V = matrix_from_json(layer_doc.at("V"));
        layer.W = matrix_from_json(layer_doc.at("W"));
        layer.b = matrix_from_json(layer_doc.at("b")).col(0);
        layer.c = matrix_from_json(layer_doc.at("c")).col(0);
        params.layers.push_back(std::move(layer));
    }
    validate(params);
    return params;
}

}  // namespace resflow
