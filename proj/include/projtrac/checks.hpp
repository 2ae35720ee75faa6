#pragma once
#include <memory>
#include <string>

#include "projtrac/extended.hpp"

namespace projtrac {

// N^a pole-free and lambda_0 = -detd hbar = iota^* nu^-1 = +-iota^* tau^2 pairwise, through order hi.
CheckReport scale_criterion_check(const ScaledModel& s, int hi);
// Rescale tau by the given factor (iota^* tau != sqrt|lambda_0|) and expect ScaleNotDistinguished.
CheckReport scale_negative_control(std::shared_ptr<const CompactModel> m, const std::string& factor);

// From random starting gauges, metric_gauge returns the same upsilon as the metric gauge itself.
CheckReport metric_gauge_uniqueness_check(std::shared_ptr<const ScaledModel> s, int gauges, unsigned seed, int hi,
                                          double tolerance = 1e-13);

// f = 0, lambda_A = lambda-bar Y_A, lambda-bar (1 - lambda-bar nu) = 0 and no poles in the components of the
// extended metric, its inverse and upsilon.
CheckReport boundary_gauge_check(const GaugedStructure& g, int hi);

// |det H^{AB}| / prod |row| of the extended metric at the anchor (Hadamard ratio), required above bound.
CheckReport extended_invertibility_check(const GaugedStructure& g, double bound = 1e-3);

// F_ab = 0 for the extended connection of the structure.
CheckReport extended_flatness_check(const GaugedStructure& g, int hi);

}  // namespace projtrac
