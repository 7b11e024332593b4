#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "resflow/params.hpp"
#include "resflow/train.hpp"

namespace resflow {

enum class DatasetKind { teacher_net, gaussian_mixture, two_moons, mnist_subset };

DatasetKind dataset_kind_from_string(const std::string& name);
std::string to_string(DatasetKind kind);

// Dataset generator settings. Inputs always land in the unit l2 ball and
// targets satisfy ||g||_2 <= 1, so ||d||_2 + ||g||_2 <= 2 holds by
// construction (the data bound with B_in = 2).
struct DatasetSpec {
    DatasetKind kind = DatasetKind::teacher_net;
    int s_train = 256;
    int s_test = 256;
    std::uint64_t seed = 0;       // sample draws
    std::uint64_t task_seed = 0;  // the task itself (teacher parameters)

    // teacher_net: architecture of the generating network. In regression mode
    // the teacher budget keeps sqrt(n) * B_out <= 1 so labels are bounded
    // without clamping; in classify mode labels are one-hot over the argmax
    // coordinate of the teacher output, which frees the teacher scale.
    NetDims teacher_dims{3, 2, 6, 3, 1.0};
    double teacher_b_theta = 0.2;
    bool teacher_classify = false;

    // gaussian_mixture: number of components / input dimension / spread.
    int classes = 2;
    int input_dim = 2;
    double mixture_sigma = 0.25;

    // two_moons
    double moons_noise = 0.08;

    // mnist_subset
    std::string images_path;
    std::string labels_path;
    std::vector<int> class_list{0, 1};
    int per_class_limit = 2000;
};

constexpr double kDataBound = 2.0;  // B_in enforced by construction

struct GeneratedData {
    Dataset train;
    Dataset test;
    // teacher_net only: the generating parameters, kept so labels can be
    // recomputed and matched exactly.
    std::optional<DiscreteParams> teacher;
};

GeneratedData generate_dataset(const DatasetSpec& spec);

}  // namespace resflow
