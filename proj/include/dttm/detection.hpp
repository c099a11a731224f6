#pragma once

#include <optional>
#include <vector>

#include "dttm/geometry.hpp"

namespace dttm {

using Embedding = std::vector<double>;

struct Detection {
    BBox bbox;
    double conf = 0.0;
    Embedding embedding;
    std::optional<BinaryMask> mask;

    bool operator==(const Detection&) const = default;
};

// Throws dttm::Error naming the violated field.
void validate(const Detection& d);

} // namespace dttm
