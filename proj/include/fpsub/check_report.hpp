#pragma once

#include <cmath>
#include <string>

namespace fpsub {

/// Outcome of one numerical certification. `pass` holds iff
/// residual <= tolerance (a NaN residual never passes).
struct CheckReport {
  std::string check;
  std::string anchor;  // the identity being certified, in formula form
  std::string route;
  std::string point;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
  double seconds = 0.0;

  static CheckReport make(std::string check, std::string anchor, double residual,
                          double tolerance) {
    CheckReport r;
    r.check = std::move(check);
    r.anchor = std::move(anchor);
    r.residual = residual;
    r.tolerance = tolerance;
    r.pass = !std::isnan(residual) && residual <= tolerance;
    return r;
  }

  /// A check that could not be evaluated (domain error and the like).
  static CheckReport failed(std::string check, std::string anchor, double tolerance,
                            std::string reason) {
    CheckReport r;
    r.check = std::move(check);
    r.anchor = std::move(anchor);
    r.residual = std::nan("");
    r.tolerance = tolerance;
    r.pass = false;
    r.note = std::move(reason);
    return r;
  }
};

}  // namespace fpsub
