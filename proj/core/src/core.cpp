#include "billiard/core.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace billiard {

PrecisionContext PrecisionContext::make(unsigned mantissa_bits,
                                        std::string_view corner_epsilon,
                                        std::string_view position_tolerance) {
    if (mantissa_bits < 64)
        throw std::domain_error("mantissa_bits must be at least 64");
    PrecisionContext ctx;
    ctx.bits_ = mantissa_bits;
    ctx.activate();
    ctx.corner_eps_ = parse_real(corner_epsilon);
    ctx.position_tol_ = parse_real(position_tolerance);
    if (ctx.corner_eps_ < 0 || !(ctx.corner_eps_ < ctx.position_tol_) || !(ctx.position_tol_ < 1))
        throw std::domain_error("tolerances must satisfy 0 <= corner_epsilon < position_tolerance < 1");
    return ctx;
}

Real PrecisionContext::eps_bits(int offset) const {
    return pow2(-static_cast<long>(bits_) + offset);
}

Real pi() {
    Real p;
    mpfr_const_pi(p.backend().data(), MPFR_RNDN);
    return p;
}

Real two_pi() {
    Real p;
    mpfr_const_pi(p.backend().data(), MPFR_RNDN);
    return p * 2;
}

Real pow2(long e) {
    Real r = 1;
    mpfr_mul_2si(r.backend().data(), r.backend().data(), e, MPFR_RNDN);
    return r;
}

Real mod_two_pi(const Real& x) {
    const Real tp = two_pi();
    Real r = fmod(x, tp);
    if (r < 0) r += tp;
    return r;
}

Real angle_distance(const Real& a, const Real& b) {
    const Real tp = two_pi();
    Real d = fmod(abs(a - b), tp);
    if (d < 0) d += tp;
    if (d > tp / 2) d = tp - d;
    return d;
}

Real parse_real(std::string_view text) {
    try {
        return Real(std::string(text));
    } catch (const std::exception&) {
        throw std::domain_error("cannot parse number: " + std::string(text));
    }
}

std::string format_real(const Real& x, unsigned bits) {
    return x.str(digits10_for_bits(bits), std::ios_base::scientific);
}

const char* to_string(SideId side) {
    switch (side) {
        case SideId::LegH: return "legH";
        case SideId::LegV: return "legV";
        case SideId::Hyp: return "hyp";
    }
    return "?";
}

const char* to_string(VertexId v) {
    switch (v) {
        case VertexId::O: return "O";
        case VertexId::A: return "A";
        case VertexId::B: return "B";
    }
    return "?";
}

std::optional<SideId> side_from_string(std::string_view name) {
    std::string low(name);
    for (auto& c : low) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (low == "legh") return SideId::LegH;
    if (low == "legv") return SideId::LegV;
    if (low == "hyp") return SideId::Hyp;
    return std::nullopt;
}

Real RightTriangle::side_length(SideId side) const {
    switch (side) {
        case SideId::LegH: return Real(1);
        case SideId::LegV: return tan_alpha_;
        case SideId::Hyp: return hyp_length_;
    }
    throw std::logic_error("bad side");
}

Point RightTriangle::side_point(SideId side, const Real& s) const {
    switch (side) {
        case SideId::LegH: return {s, Real(0)};
        case SideId::LegV: return {Real(0), s};
        case SideId::Hyp: {
            const Real tau = s / hyp_length_;
            return {1 - tau, tau * tan_alpha_};
        }
    }
    throw std::logic_error("bad side");
}

Real RightTriangle::line_angle(SideId side) const {
    switch (side) {
        case SideId::LegH: return Real(0);
        case SideId::LegV: return pi() / 2;
        case SideId::Hyp: return -alpha_;
    }
    throw std::logic_error("bad side");
}

VertexId RightTriangle::side_begin(SideId side) {
    switch (side) {
        case SideId::LegH: return VertexId::O;
        case SideId::LegV: return VertexId::O;
        case SideId::Hyp: return VertexId::A;
    }
    throw std::logic_error("bad side");
}

VertexId RightTriangle::side_end(SideId side) {
    switch (side) {
        case SideId::LegH: return VertexId::A;
        case SideId::LegV: return VertexId::B;
        case SideId::Hyp: return VertexId::B;
    }
    throw std::logic_error("bad side");
}

Point RightTriangle::vertex(VertexId v) const {
    switch (v) {
        case VertexId::O: return {Real(0), Real(0)};
        case VertexId::A: return {Real(1), Real(0)};
        case VertexId::B: return {Real(0), tan_alpha_};
    }
    throw std::logic_error("bad vertex");
}

namespace {

// Continued-fraction scan of x = alpha/pi. Reports p/q with q <= q_max when
// x sits within `accept` of the convergent; `suspect` marks inconclusive
// near-misses.
IrrationalityHint scan_rational_multiple(const Real& x, std::int64_t q_max,
                                         const Real& accept, const Real& suspect) {
    IrrationalityHint hint;
    hint.kind = Irrationality::AssumedIrrational;

    std::int64_t h0 = 0, h1 = 1;  // numerators
    std::int64_t k0 = 1, k1 = 0;  // denominators
    Real frac = x;
    for (int iter = 0; iter < 64; ++iter) {
        Real fl = floor(frac);
        if (fl > Real("9e17")) break;
        const auto a = fl.convert_to<std::int64_t>();
        if (k1 > 0 && (a > (std::numeric_limits<std::int64_t>::max() - k0) / std::max<std::int64_t>(k1, 1)))
            break;
        const std::int64_t h2 = a * h1 + h0;
        const std::int64_t k2 = a * k1 + k0;
        if (k2 > q_max) break;
        if (k2 > 0) {
            const Real err = abs(x - Real(h2) / Real(k2));
            if (err < accept) {
                hint.kind = Irrationality::RationalMultipleDetected;
                hint.p = h2;
                hint.q = k2;
                return hint;
            }
            if (err < suspect) hint.kind = Irrationality::Unknown;
        }
        h0 = h1; h1 = h2;
        k0 = k1; k1 = k2;
        const Real rem = frac - fl;
        if (rem == 0) break;
        frac = 1 / rem;
    }
    return hint;
}

}  // namespace

RightTriangle make_triangle(const Real& alpha, const PrecisionContext& ctx) {
    ctx.activate();
    const Real quarter_pi = pi() / 4;
    if (!(alpha > 0) || alpha > quarter_pi)
        throw std::domain_error("alpha must lie in (0, pi/4]");

    RightTriangle tri;
    tri.alpha_ = alpha;
    tri.tan_alpha_ = tan(alpha);
    tri.hyp_length_ = sqrt(1 + tri.tan_alpha_ * tri.tan_alpha_);
    tri.hint_ = scan_rational_multiple(alpha / pi(), 1000000,
                                       ctx.eps_bits(32), parse_real("1e-24"));
    return tri;
}

SymbolicDirection reflect_direction(const SymbolicDirection& d, SideId side) {
    switch (side) {
        case SideId::LegH: return {-d.sigma, -d.n, d.m};
        case SideId::LegV: return {-d.sigma, -d.n, 1 - d.m};
        case SideId::Hyp: return {-d.sigma, -d.n - 1, d.m};
    }
    throw std::logic_error("bad side");
}

SymbolicDirection corner_pass(const SymbolicDirection& d) {
    return {d.sigma, d.n, 1 - d.m};
}

Real direction_angle(const SymbolicDirection& d, const Real& theta0,
                     const RightTriangle& tri, const PrecisionContext& ctx) {
    ctx.activate();
    Real angle = Real(d.sigma) * theta0 + Real(2 * d.n) * tri.alpha();
    if (d.m) angle += pi();
    return mod_two_pi(angle);
}

namespace {

// (v mod m + m) mod m for possibly negative v.
inline std::int64_t imod(std::int64_t v, std::int64_t m) {
    std::int64_t r = v % m;
    return r < 0 ? r + m : r;
}

// Is 2*dn*alpha + c*pi ≡ 0 (mod 2*pi)? Exact, given what we know of alpha.
bool angle_combo_vanishes(std::int64_t dn, std::int64_t c, const IrrationalityHint& hint) {
    if (hint.kind == Irrationality::RationalMultipleDetected) {
        // alpha = (p/q)*pi: condition becomes 2*dn*p + c*q ≡ 0 (mod 2q).
        return imod(2 * dn * hint.p + c * hint.q, 2 * hint.q) == 0;
    }
    return dn == 0 && imod(c, 2) == 0;
}

}  // namespace

bool directions_equivalent(const SymbolicDirection& a, const SymbolicDirection& b,
                           const RightTriangle& tri, Theta0Kind kind) {
    if (a == b) return true;
    const auto& hint = tri.irrationality_hint();
    const std::int64_t dn = a.n - b.n;
    const std::int64_t dm = a.m - b.m;
    if (a.sigma == b.sigma)
        return angle_combo_vanishes(dn, dm, hint);

    // Opposite sigma: the difference picks up 2*sigma_a*theta0, which is only
    // resolvable for the perpendicular base directions.
    const std::int64_t s = a.sigma;
    switch (kind) {
        case Theta0Kind::PerpLeg:
            // theta0 = pi/2: 2*s*theta0 = s*pi.
            return angle_combo_vanishes(dn, s + dm, hint);
        case Theta0Kind::PerpHyp:
            // theta0 = 3*pi/2 - alpha: 2*s*theta0 = 3*s*pi - 2*s*alpha.
            return angle_combo_vanishes(dn - s, 3 * s + dm, hint);
        case Theta0Kind::Generic:
            return false;
    }
    return false;
}

bool direction_perpendicular_to_base(const SymbolicDirection& d,
                                     const RightTriangle& tri, Theta0Kind kind) {
    // angle(d) ≡ theta0 (mod pi)  ⇔  (sigma-1)*theta0 + 2*n*alpha ≡ 0 (mod pi).
    const auto& hint = tri.irrationality_hint();
    auto vanishes_mod_pi = [&hint](std::int64_t n_coeff) {
        // 2*n_coeff*alpha ≡ 0 (mod pi)
        if (hint.kind == Irrationality::RationalMultipleDetected)
            return imod(2 * n_coeff * hint.p, hint.q) == 0;
        return n_coeff == 0;
    };
    if (d.sigma == 1) return vanishes_mod_pi(d.n);
    switch (kind) {
        case Theta0Kind::PerpLeg:
            // -2*theta0 = -pi ≡ 0 (mod pi)
            return vanishes_mod_pi(d.n);
        case Theta0Kind::PerpHyp:
            // -2*theta0 = -3*pi + 2*alpha ≡ 2*alpha (mod pi)
            return vanishes_mod_pi(d.n + 1);
        case Theta0Kind::Generic:
            return false;
    }
    return false;
}

Real masses_to_alpha(const Real& m1, const Real& m2) {
    if (!(m1 > 0) || !(m2 > 0))
        throw std::domain_error("masses must be positive");
    const Real lighter = m1 < m2 ? m1 : m2;
    const Real heavier = m1 < m2 ? m2 : m1;
    return atan(sqrt(lighter / heavier));
}

}  // namespace billiard
