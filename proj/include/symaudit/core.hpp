#pragma once

// Shared vocabulary: error types, tagged lattice units, reproducible sums,
// and the 17-significant-digit number format used by every artifact.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace symaudit {

using complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define SYMAUDIT_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                        \
   public:                                                           \
    using Error::Error;                                              \
    const char* kind() const noexcept override { return #Name; }     \
  };

SYMAUDIT_DEFINE_ERROR(UnitMismatch)
SYMAUDIT_DEFINE_ERROR(BudgetExceeded)
SYMAUDIT_DEFINE_ERROR(DomainError)
SYMAUDIT_DEFINE_ERROR(UnsupportedSpec)
SYMAUDIT_DEFINE_ERROR(DegenerateSample)
SYMAUDIT_DEFINE_ERROR(RepresentationLost)
SYMAUDIT_DEFINE_ERROR(RepresentationOverflow)
SYMAUDIT_DEFINE_ERROR(QuadratureUnderresolved)
SYMAUDIT_DEFINE_ERROR(ViolatedDominance)
SYMAUDIT_DEFINE_ERROR(DerivativeUnstable)
SYMAUDIT_DEFINE_ERROR(ParseError)

#undef SYMAUDIT_DEFINE_ERROR

/// A physical lattice spacing together with a symbolic token. Two units with
/// different tags are treated as incommensurable, whatever their numeric values.
struct LatticeUnit {
  double value = 1.0;
  std::string tag = "1";

  friend bool operator==(const LatticeUnit&, const LatticeUnit&) = default;
};

/// Resolves the tokens accepted on the command line and in JSON:
/// `1`, `sqrt2`, `cbrt2`, `cbrt4`, or any positive decimal (tagged by its text).
inline LatticeUnit parse_lattice_unit(std::string_view token) {
  const std::string tok(token);
  if (tok == "sqrt2") return {std::sqrt(2.0), "sqrt2"};
  if (tok == "cbrt2") return {std::cbrt(2.0), "cbrt2"};
  if (tok == "cbrt4") return {std::cbrt(4.0), "cbrt4"};
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw ParseError("unrecognised lattice unit token '" + tok + "'");
  }
  if (used != tok.size() || !(v > 0.0) || !std::isfinite(v))
    throw ParseError("lattice unit must be a positive number or a known token: '" + tok + "'");
  return {v, tok};
}

/// Neumaier-compensated accumulator. Sequential use gives results that do not
/// depend on how callers chunk their input to within a few ulps.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

/// `%.17g`: round-trips every double.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < count; ++i)
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return out;
}

}  // namespace symaudit
