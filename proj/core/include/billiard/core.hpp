#pragma once

// Canonical triangle geometry and the exact symbolic direction algebra.
//
// The triangle is pinned as: right angle O at the origin, longer leg OA on
// the positive x-axis with |OA| = 1, shorter leg OB up the y-axis with
// |OB| = tan(alpha). alpha is the angle at A, in (0, pi/4]. The three side
// lines then have angles 0 (LegH), pi/2 (LegV) and -alpha (Hyp).
//
// A direction is never stored as a float. It is the token (sigma, n, m)
// meaning the angle
//
//     sigma * theta0 + 2*n*alpha + m*pi   (mod 2*pi)
//
// for the orbit's base direction theta0. Reflections act on tokens by
// exact integer rules, so level bookkeeping over the unfolded surface is
// immune to floating drift; n changes only through hypotenuse reflections.

#include "billiard/real.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace billiard {

enum class SideId { LegH, LegV, Hyp };

enum class VertexId { O, A, B };

const char* to_string(SideId side);
const char* to_string(VertexId v);
std::optional<SideId> side_from_string(std::string_view name);

/// How the base direction theta0 relates to the triangle. Exact direction
/// equality is decidable only with this knowledge: for theta0 = pi/2 the
/// tokens (sigma,n,m) and (-sigma,n,1-m) name the same angle, and for the
/// hypotenuse perpendicular the matching twin is (-sigma, n-sigma, 1-m).
enum class Theta0Kind { Generic, PerpLeg, PerpHyp };

struct SymbolicDirection {
    int sigma = 1;     // +1 or -1
    std::int64_t n = 0;
    int m = 0;         // 0 or 1

    /// Index of the rhombus (level) this direction belongs to on the
    /// unfolded surface: sigma*n. Hypotenuse reflections move it by exactly
    /// one; leg reflections never touch it.
    std::int64_t level() const { return sigma > 0 ? n : -n; }

    /// Direction reversal (adds pi).
    SymbolicDirection opposite() const { return {sigma, n, 1 - m}; }

    friend bool operator==(const SymbolicDirection&, const SymbolicDirection&) = default;
};

enum class Irrationality { AssumedIrrational, RationalMultipleDetected, Unknown };

struct IrrationalityHint {
    Irrationality kind = Irrationality::AssumedIrrational;
    std::int64_t p = 0;  // alpha = (p/q)*pi when detected
    std::int64_t q = 0;
};

class RightTriangle {
public:
    const Real& alpha() const { return alpha_; }
    const Real& tan_alpha() const { return tan_alpha_; }
    const Real& hyp_length() const { return hyp_length_; }
    const IrrationalityHint& irrationality_hint() const { return hint_; }

    Real side_length(SideId side) const;

    /// Point at arc length s along a side. Orientations: LegH runs O->A,
    /// LegV runs O->B, Hyp runs A->B.
    Point side_point(SideId side, const Real& s) const;

    /// Angle of the side's supporting line: 0, pi/2, -alpha.
    Real line_angle(SideId side) const;

    /// Vertices at the two ends of a side, in arc-length order.
    static VertexId side_begin(SideId side);
    static VertexId side_end(SideId side);

    Point vertex(VertexId v) const;

    friend RightTriangle make_triangle(const Real& alpha, const PrecisionContext& ctx);

private:
    Real alpha_;
    Real tan_alpha_;
    Real hyp_length_;
    IrrationalityHint hint_;
};

/// Build the canonical triangle. Requires 0 < alpha <= pi/4; runs a
/// continued-fraction scan of alpha/pi up to denominator 10^6 to fill in
/// the irrationality hint.
RightTriangle make_triangle(const Real& alpha, const PrecisionContext& ctx);

/// Exact reflection action on direction tokens:
///   LegH: (s,n,m) -> (-s,-n,m)
///   LegV: (s,n,m) -> (-s,-n,1-m)
///   Hyp : (s,n,m) -> (-s,-n-1,m)
/// Each is an involution.
SymbolicDirection reflect_direction(const SymbolicDirection& d, SideId side);

/// Regularised pass through the right-angle corner O: the two leg
/// reflections compose to (s,n,m) -> (s,n,1-m), a direction reversal.
SymbolicDirection corner_pass(const SymbolicDirection& d);

/// Numeric angle of a token, reduced to [0, 2*pi) at the active precision.
Real direction_angle(const SymbolicDirection& d, const Real& theta0,
                     const RightTriangle& tri, const PrecisionContext& ctx);

/// Exact equality of the two represented angles mod 2*pi. Integer
/// arithmetic only: tuple equality, plus the congruences available when
/// alpha is a detected rational multiple of pi and/or theta0 is one of the
/// perpendicular base directions.
bool directions_equivalent(const SymbolicDirection& a, const SymbolicDirection& b,
                           const RightTriangle& tri, Theta0Kind kind);

/// Same test modulo pi (used for perpendicular-return detection).
bool direction_perpendicular_to_base(const SymbolicDirection& d,
                                     const RightTriangle& tri, Theta0Kind kind);

/// Two elastic point masses on a segment reduce to a billiard in a right
/// triangle with tan(alpha) = sqrt(m_light/m_heavy). Returns alpha in
/// (0, pi/4]; symmetric in its arguments; rejects nonpositive masses.
Real masses_to_alpha(const Real& m1, const Real& m2);

}  // namespace billiard
