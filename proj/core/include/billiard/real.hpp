#pragma once

// Configurable-precision scalar context. Every numeric kernel in this
// library runs on MPFR floats (through Boost.Multiprecision) whose working
// precision is chosen at runtime, so the same code paths serve quick looks
// at 64 bits and deep strip bisections at 512+.

#include <boost/multiprecision/mpfr.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace billiard {

using Real = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<0>,
    boost::multiprecision::et_off>;

struct Point {
    Real x;
    Real y;
};

/// Decimal digits that guarantee at least `bits` of mantissa when handed to
/// the mpfr backend (which converts digits10 back to bits internally).
inline unsigned digits10_for_bits(unsigned bits) {
    return static_cast<unsigned>((static_cast<unsigned long long>(bits) * 302 + 999) / 1000) + 1;
}

/// Shared numeric-tolerance configuration.
///
/// `corner_epsilon` is a *relative* tolerance on the side-intersection
/// parameter used to decide vertex hits; `position_tolerance` is the
/// absolute arc-length slack allowed when matching phase points for
/// periodicity. Directions are never compared numerically, so these two
/// knobs are the only numeric slack in the whole pipeline.
class PrecisionContext {
public:
    static PrecisionContext make(unsigned mantissa_bits = 256,
                                 std::string_view corner_epsilon = "1e-40",
                                 std::string_view position_tolerance = "1e-30");

    unsigned mantissa_bits() const { return bits_; }
    const Real& corner_epsilon() const { return corner_eps_; }
    const Real& position_tolerance() const { return position_tol_; }

    /// Install this context's working precision for the calling thread.
    /// Operations taking a context call this on entry.
    void activate() const { Real::default_precision(digits10_for_bits(bits_)); }

    /// 2^-(mantissa_bits - offset), the spec's standard drift tolerances.
    Real eps_bits(int offset) const;

private:
    PrecisionContext() = default;
    unsigned bits_ = 256;
    Real corner_eps_;
    Real position_tol_;
};

/// pi at the currently active working precision.
Real pi();
Real two_pi();

/// 2^e as a Real.
Real pow2(long e);

/// Reduce an angle to [0, 2*pi).
Real mod_two_pi(const Real& x);

/// Circular distance between two angles, in [0, pi].
Real angle_distance(const Real& a, const Real& b);

/// Parse a decimal string at the active precision; throws std::domain_error
/// on malformed input.
Real parse_real(std::string_view text);

/// Fixed-width scientific rendering with enough digits to round-trip
/// `bits` of mantissa. Used by the record writers.
std::string format_real(const Real& x, unsigned bits);

}  // namespace billiard
