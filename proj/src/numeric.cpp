#include "netdepth/numeric.hpp"

#include <cmath>
#include <cstdio>

namespace netdepth {

uint64_t checked_add(uint64_t a, uint64_t b, const char* context) {
    uint64_t r = 0;
    if (__builtin_add_overflow(a, b, &r)) {
        throw AnalysisError(std::string(context) + " exceeds exact-integer capacity");
    }
    return r;
}

uint64_t checked_mul(uint64_t a, uint64_t b, const char* context) {
    uint64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw AnalysisError(std::string(context) + " exceeds exact-integer capacity");
    }
    return r;
}

std::string u128_to_string(u128 v) {
    if (v == 0) return "0";
    char buf[48];
    int n = 0;
    while (v > 0) {
        buf[n++] = static_cast<char>('0' + static_cast<int>(v % 10));
        v /= 10;
    }
    std::string out;
    out.reserve(n);
    while (n > 0) out.push_back(buf[--n]);
    return out;
}

namespace {

u128 pow10_u128(int n) {
    u128 p = 1;
    for (int i = 0; i < n; ++i) p *= 10;
    return p;
}

// floor(v/unit) with ties-to-even on the discarded remainder.
u128 div_half_even(u128 v, u128 unit) {
    u128 q = v / unit;
    u128 r = v % unit;
    if (2 * r > unit || (2 * r == unit && (q & 1) != 0)) ++q;
    return q;
}

std::string render_fixed(u128 scaled, int places) {
    u128 p = pow10_u128(places);
    std::string integral = u128_to_string(scaled / p);
    if (places == 0) return integral;
    std::string frac = u128_to_string(scaled % p);
    frac.insert(frac.begin(), places - static_cast<int>(frac.size()), '0');
    return integral + "." + frac;
}

}  // namespace

std::string format_scaled(u128 v, u128 unit, int places) {
    return render_fixed(div_half_even(v * pow10_u128(places), unit), places);
}

std::string format_double(double v, int places) {
    long double scale = 1.0L;
    for (int i = 0; i < places; ++i) scale *= 10.0L;
    long double scaled = rintl(static_cast<long double>(v) * scale);  // ties to even
    char buf[64];
    snprintf(buf, sizeof(buf), "%.*Lf", places, scaled / scale);
    return buf;
}

namespace {

u128 gcd_u128(u128 a, u128 b) {
    while (b != 0) {
        u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

}  // namespace

Rational::Rational(u128 num, u128 den) : num_(num), den_(den) {
    if (den_ == 0) throw AnalysisError("rational with zero denominator");
    u128 g = gcd_u128(num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
}

double Rational::value() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
}

std::string Rational::to_string() const {
    if (den_ == 1) return u128_to_string(num_);
    return u128_to_string(num_) + "/" + u128_to_string(den_);
}

std::string Rational::to_decimal(int places) const {
    return format_scaled(num_, den_, places);
}

}  // namespace netdepth
