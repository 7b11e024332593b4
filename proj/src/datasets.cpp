#include "resflow/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "resflow/idx.hpp"
#include "resflow/resnet.hpp"
#include "resflow/rng.hpp"

namespace resflow {

DatasetKind dataset_kind_from_string(const std::string& name) {
    if (name == "teacher_net") return DatasetKind::teacher_net;
    if (name == "gaussian_mixture") return DatasetKind::gaussian_mixture;
    if (name == "two_moons") return DatasetKind::two_moons;
    if (name == "mnist_subset") return DatasetKind::mnist_subset;
    throw std::invalid_argument("unknown dataset kind '" + name + "'");
}

std::string to_string(DatasetKind kind) {
    switch (kind) {
        case DatasetKind::teacher_net: return "teacher_net";
        case DatasetKind::gaussian_mixture: return "gaussian_mixture";
        case DatasetKind::two_moons: return "two_moons";
        case DatasetKind::mnist_subset: return "mnist_subset";
    }
    return "?";
}

namespace {

// Uniform direction scaled by u^(1/dim): uniform on the unit ball.
Eigen::VectorXd ball_point(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
    const double norm = v.norm();
    if (norm == 0.0) return Eigen::VectorXd::Zero(dim);
    return v * (std::pow(unit(rng), 1.0 / static_cast<double>(dim)) / norm);
}

Eigen::VectorXd into_unit_ball(Eigen::VectorXd v) {
    const double norm = v.norm();
    if (norm > 1.0) v /= norm;
    return v;
}

Eigen::VectorXd one_hot(int idx, int classes) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(classes);
    g[idx] = 1.0;
    return g;
}

Dataset teacher_samples(const DiscreteParams& teacher, const ActivationSpec& act, int count,
                        std::uint64_t seed, bool classify) {
    auto rng = make_rng(seed);
    Dataset data;
    data.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        Sample smp;
        smp.d = ball_point(teacher.n_d(), rng);
        const Eigen::VectorXd out = discrete_forward(teacher, act, smp.d).states.back();
        if (classify) {
            Eigen::Index cls;
            out.maxCoeff(&cls);
            smp.g = one_hot(static_cast<int>(cls), teacher.n());
        } else {
            smp.g = out;
        }
        data.push_back(std::move(smp));
    }
    return data;
}

Dataset mixture_samples(const DatasetSpec& spec, int count, std::uint64_t seed) {
    auto rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<int> which(0, spec.classes - 1);
    // Component means spread on the unit circle of the first two coordinates.
    Dataset data;
    data.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        const int cls = which(rng);
        const double angle = 2.0 * M_PI * static_cast<double>(cls) / spec.classes;
        Eigen::VectorXd d(spec.input_dim);
        for (int k = 0; k < spec.input_dim; ++k) d[k] = spec.mixture_sigma * gauss(rng);
        d[0] += 0.6 * std::cos(angle);
        if (spec.input_dim > 1) d[1] += 0.6 * std::sin(angle);
        data.push_back({into_unit_ball(std::move(d)), one_hot(cls, spec.classes)});
    }
    return data;
}

Dataset moons_samples(const DatasetSpec& spec, int count, std::uint64_t seed) {
    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Dataset data;
    data.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        const int cls = (rng() >> 63) & 1;
        const double t = M_PI * unit(rng);
        Eigen::VectorXd d(2);
        if (cls == 0) {
            d << std::cos(t), std::sin(t);
        } else {
            d << 1.0 - std::cos(t), 0.5 - std::sin(t);
        }
        d[0] += spec.moons_noise * gauss(rng);
        d[1] += spec.moons_noise * gauss(rng);
        d *= 0.5;  // both moons inside the unit ball even with noise
        data.push_back({into_unit_ball(std::move(d)), one_hot(cls, 2)});
    }
    return data;
}

}  // namespace

GeneratedData generate_dataset(const DatasetSpec& spec) {
    if (spec.s_train < 1 || spec.s_test < 0)
        throw std::invalid_argument("dataset sizes must be positive");
    GeneratedData out;
    const std::uint64_t train_seed = derive_seed(spec.seed, stream::dataset_train);
    const std::uint64_t test_seed = derive_seed(spec.seed, stream::dataset_test);
    switch (spec.kind) {
        case DatasetKind::teacher_net: {
            ParamBudget budget{spec.teacher_b_theta, kDataBound};
            DiscreteParams teacher = random_discrete_params(
                spec.teacher_dims, budget,
                derive_seed(spec.task_seed, stream::init, 0x7eacULL));
            if (spec.teacher_classify) {
                // Bias-free teacher: with an odd activation the output is an
                // odd function of the input, so the argmax classes balance.
                teacher.pre.a.setZero();
                for (auto& layer : teacher.layers) {
                    layer.b.setZero();
                    layer.c.setZero();
                }
            }
            const ActivationSpec act = catalog("Tanh");
            out.train = teacher_samples(teacher, act, spec.s_train, train_seed,
                                        spec.teacher_classify);
            out.test = teacher_samples(teacher, act, spec.s_test, test_seed,
                                       spec.teacher_classify);
            out.teacher = std::move(teacher);
            break;
        }
        case DatasetKind::gaussian_mixture:
            out.train = mixture_samples(spec, spec.s_train, train_seed);
            out.test = mixture_samples(spec, spec.s_test, test_seed);
            break;
        case DatasetKind::two_moons:
            out.train = moons_samples(spec, spec.s_train, train_seed);
            out.test = moons_samples(spec, spec.s_test, test_seed);
            break;
        case DatasetKind::mnist_subset: {
            auto all = load_idx(spec.images_path, spec.labels_path, spec.class_list,
                                spec.per_class_limit);
            if (static_cast<int>(all.size()) < spec.s_train + spec.s_test)
                throw std::runtime_error("mnist subset too small: have " +
                                         std::to_string(all.size()) + ", need " +
                                         std::to_string(spec.s_train + spec.s_test));
            // Deterministic shuffle, then split train/test disjointly.
            auto rng = make_rng(train_seed);
            std::shuffle(all.begin(), all.end(), rng);
            out.train.assign(all.begin(), all.begin() + spec.s_train);
            out.test.assign(all.begin() + spec.s_train,
                            all.begin() + spec.s_train + spec.s_test);
            break;
        }
    }
    return out;
}

}  // namespace resflow
