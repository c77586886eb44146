#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace netdepth {

// Errors are split by stage so the CLI can map them to exit codes:
// input problems (parse/validation) versus analysis problems
// (overflow, path explosion, bad weight data).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    ParseError(int line, int col, const std::string& what)
        : Error("line " + std::to_string(line) + ", col " + std::to_string(col) + ": " + what),
          line(line),
          col(col) {}
    int line;
    int col;
};

struct ValidationError : Error {
    using Error::Error;
};

struct AnalysisError : Error {
    using Error::Error;
};

using u128 = unsigned __int128;

uint64_t checked_add(uint64_t a, uint64_t b, const char* context);
uint64_t checked_mul(uint64_t a, uint64_t b, const char* context);

std::string u128_to_string(u128 v);

// Round v/unit to `places` decimal digits with ties-to-even, rendered with a
// fixed number of decimals ("138.4", "2.0", "17.50").
std::string format_scaled(u128 v, u128 unit, int places);

// Fixed-point rendering of a double, ties-to-even.
std::string format_double(double v, int places);

// Exact nonnegative rational, kept reduced.
class Rational {
  public:
    Rational() = default;
    Rational(u128 num, u128 den);

    u128 num() const { return num_; }
    u128 den() const { return den_; }
    double value() const;
    bool is_integer() const { return den_ == 1; }

    std::string to_string() const;             // "35/2" or "16"
    std::string to_decimal(int places) const;  // half-even fixed point

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }

  private:
    u128 num_ = 0;
    u128 den_ = 1;
};

}  // namespace netdepth
