#pragma once

// The unfolded invariant surface as bookkeeping over the triangle tracer:
// level codes, the countable direction fiber over a point, center orbits of
// the rhombi, and windowed escape-orbit classification. The surface is
// never materialised as geometry; levels live in the symbolic tokens.

#include "billiard/flow.hpp"

#include <cstdint>
#include <vector>

namespace billiard {

std::vector<std::int64_t> level_code(const OrbitSegment& seg);

struct DirectionSample {
    SymbolicDirection token;
    Real angle;  // reduced to [0, 2*pi)
};

/// The 4*(2K+1) raw directions {sigma*theta0 + 2n*alpha + m*pi : |n| <= K},
/// deduplicated within 2^-(bits-16) and sorted by angle. The result is
/// closed under reversal and negation mod the dedup tolerance.
std::vector<DirectionSample> enumerate_directions(std::size_t K, const Real& theta0,
                                                  const RightTriangle& tri,
                                                  const PrecisionContext& ctx);

struct CenterOrbit {
    std::vector<std::int64_t> forward_code;
    std::vector<std::int64_t> backward_code;
    Termination forward_termination;
    Termination backward_termination;
};

/// Trace the orbit through the center of rhombus R_n (the right-angle
/// vertex O, a regular point of the surface) in direction theta_n and in
/// theta_n + pi, each for `window` reflections. The two branches retrace
/// the same billiard path through the retroreflecting corner, so the
/// bi-infinite code is a palindrome about the center; the consequence used
/// downstream is that center strips start and end on the same level.
CenterOrbit center_orbit(std::int64_t n, const BaseDirection& base, std::size_t window,
                         const RightTriangle& tri, const PrecisionContext& ctx);

enum class EscapeKind { ForwardEscapeCandidate, BackwardEscapeCandidate, BoundedWindow };

const char* to_string(EscapeKind k);

struct EscapeVerdict {
    EscapeKind kind = EscapeKind::BoundedWindow;
    std::size_t window = 0;        // number of observed hits
    double monotone_fraction = 0;  // fraction of level changes in the escape direction
};

/// Windowed heuristic for the escape dichotomy: a forward candidate attains
/// its maximum level only in the last decile of the window while its
/// minimum stays put (symmetrically for backward). Limits are uncheckable;
/// the verdict carries the window so callers can scale it.
EscapeVerdict classify_escape(const OrbitSegment& seg);

}  // namespace billiard
