#pragma once

#include <string>
#include <vector>

#include "resflow/train.hpp"

namespace resflow {

// Loads an IDX image/label pair (magic 0x00000803 / 0x00000801, big-endian
// dimensions). Pixels are scaled to [0,1], flattened, then the input is
// normalized into the unit l2 ball; labels become one-hot over `classes` in
// the given order. At most `limit` samples are kept per class. Throws on bad
// magic, truncation, or a requested class with no samples.
Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 const std::vector<int>& classes, int limit);

}  // namespace resflow
