#include "dttm/detection.hpp"

#include <cmath>

#include "dttm/error.hpp"

namespace dttm {

void validate(const Detection& d) {
    if (!is_valid(d.bbox)) throw Error("bbox: width and height must be positive and all fields finite");
    if (!std::isfinite(d.conf) || d.conf < 0.0 || d.conf > 1.0) throw Error("conf out of range");
    if (d.embedding.empty()) throw Error("embedding must have at least one component");
    for (double x : d.embedding)
        if (!std::isfinite(x)) throw Error("embedding entries must be finite");
}

} // namespace dttm
