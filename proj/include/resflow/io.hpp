#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "resflow/params.hpp"
#include "resflow/train.hpp"

namespace resflow {

using Cell = std::variant<std::int64_t, double, std::string>;
using CsvRow = std::vector<Cell>;

// Renders a cell with the repository conventions: '.' decimal point, shortest
// round-trip form for doubles, literal "nan"/"inf" for non-finite values.
std::string format_cell(const Cell& cell);

// Writes a CSV with '\n' line endings; byte-deterministic for equal inputs.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<CsvRow>& rows);

void write_text(const std::filesystem::path& path, const std::string& text);

// FNV-1a 64-bit content hash, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);
std::string hash_file(const std::filesystem::path& path);

struct ManifestEntry {
    std::string path;  // relative to the output directory
    std::uint64_t bytes = 0;
    std::string hash;
};

// Hashes every listed file and writes manifest.json next to them; returns the
// entries including the manifest itself (listed with an empty hash).
std::vector<ManifestEntry> write_manifest(const std::filesystem::path& output_dir,
                                          const std::vector<std::string>& files);

// Per-epoch training log with columns
// (epoch, train_loss, test_loss, param_inf_norm, wall_ms). Note wall_ms
// carries timing, so these files are not byte-reproducible across runs.
void write_train_log(const std::filesystem::path& path, const TrainLog& log);

// Flat binary parameter layout: n_d, n, m, L as little-endian u64, T as
// little-endian f64, then row-major f64 blocks U, a, and per layer V, W, b, c.
void save_params_binary(const DiscreteParams& params, const std::filesystem::path& path);
DiscreteParams load_params_binary(const std::filesystem::path& path);

std::string params_to_json(const DiscreteParams& params);
DiscreteParams params_from_json(const std::string& text);

}  // namespace resflow
