#pragma once

#include "afnlab/correlation.hpp"

#include <string>

namespace afn {

// Named observables; Y-supported ones need e0.  Accepted names:
//   one | x | x2 | xq:<q> | tentY | stepY | sin1
Observable make_observable(const std::string& name, double e0);

} // namespace afn
