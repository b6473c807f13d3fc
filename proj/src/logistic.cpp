#include "rebal/logistic.hpp"

#include <cmath>

#include "rebal/errors.hpp"

namespace rebal {

double cross_entropy(int y, double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw domain_error("cross_entropy requires p in (0,1)");
    }
    return y ? -std::log(p) : -std::log1p(-p);
}

}  // namespace rebal
