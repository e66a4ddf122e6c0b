#pragma once

#include <boost/multiprecision/mpfr.hpp>
#include <string>

namespace linenet {

namespace mp = boost::multiprecision;

template <unsigned Digits>
using MpReal = mp::number<mp::mpfr_float_backend<Digits>, mp::et_off>;

// Storage type for mixtures leaving the solver; every tier widens into it exactly.
inline constexpr unsigned kWideDigits = 320;
using WideReal = MpReal<kWideDigits>;

enum class Precision { Auto, Double, Digits40, Digits80, Digits160, Digits320 };

unsigned precision_digits(Precision p);
Precision parse_precision(const std::string& s);
std::string to_string(Precision p);

template <class Real>
double to_double(const Real& x) {
  if constexpr (std::is_same_v<Real, double>) {
    return x;
  } else {
    return x.template convert_to<double>();
  }
}

}  // namespace linenet
