#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace swmsim {

using QueueId = std::int64_t;
using Slot = std::int64_t;
using Count = std::int64_t;
using Rational = mpq_class;

// Exit codes used by the command line front end map onto these.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-range input (instance files, parameters).
class InputError : public Error {
 public:
  using Error::Error;
};

// A policy or caller broke an engine contract.
class ContractError : public Error {
 public:
  using Error::Error;
};

// LP solve failures, including external solver problems.
class SolverError : public Error {
 public:
  using Error::Error;
};

template <typename Q>
struct QuantityTraits;

template <>
struct QuantityTraits<Count> {
  static Count from_count(Count c) { return c; }
  static Count one() { return 1; }
  static std::string to_string(Count q) { return std::to_string(q); }
  static double to_double(Count q) { return static_cast<double>(q); }
  static bool is_integral(Count) { return true; }
};

template <>
struct QuantityTraits<Rational> {
  static Rational from_count(Count c) { return Rational(static_cast<long>(c)); }
  static Rational one() { return Rational(1); }
  static std::string to_string(const Rational& q) {
    Rational r = q;
    r.canonicalize();
    return r.get_str();
  }
  static double to_double(const Rational& q) { return q.get_d(); }
  static bool is_integral(const Rational& q) {
    Rational r = q;
    r.canonicalize();
    return r.get_den() == 1;
  }
};

template <typename Q>
Q quantity(Count c) {
  return QuantityTraits<Q>::from_count(c);
}

template <typename Q>
std::string format_quantity(const Q& q) {
  return QuantityTraits<Q>::to_string(q);
}

}  // namespace swmsim
