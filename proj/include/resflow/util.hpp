#pragma once

#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>

namespace resflow {

// Compensated (Neumaier) summation; keeps long enumeration sums accurate to a
// few ulps independent of term count.
struct NeumaierSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double get() const { return sum + comp; }
};

// Worker-count cap: RESFLOW_THREADS when set, otherwise available cores.
inline unsigned thread_budget() {
    if (const char* env = std::getenv("RESFLOW_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace resflow
