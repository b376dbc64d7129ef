#include "afnlab/obs.hpp"

#include <cmath>
#include <stdexcept>

namespace afn {

Observable make_observable(const std::string& name, double e0) {
  Observable o;
  o.name = name;
  if (name == "one") {
    o.eval = [](double) { return 1.0; };
    return o;
  }
  if (name == "x") {
    o.eval = [](double x) { return x; };
    return o;
  }
  if (name == "x2") {
    o.eval = [](double x) { return x * x; };
    return o;
  }
  if (name.rfind("xq:", 0) == 0) {
    double q = std::stod(name.substr(3));
    o.eval = [q](double x) { return x <= 0 ? 0.0 : std::pow(x, q); };
    return o;
  }
  if (name == "tentY") {
    double m = 0.5 * (e0 + 1.0), h = 0.5 * (1.0 - e0);
    o.eval = [m, h](double x) {
      double t = 1.0 - std::fabs(x - m) / h;
      return t > 0 ? t : 0.0;
    };
    o.support = Observable::Support::BaseOnly;
    return o;
  }
  if (name == "stepY") {
    o.eval = [e0](double x) { return x >= e0 ? 1.0 : 0.0; };
    o.support = Observable::Support::BaseOnly;
    return o;
  }
  if (name == "sin1") {
    o.eval = [](double x) { return 1.2 + std::sin(2.0 * M_PI * x); };
    return o;
  }
  throw std::invalid_argument("unknown observable: " + name);
}

} // namespace afn
