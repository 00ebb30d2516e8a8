#pragma once

// Billiard orbit tracer: next-hit computation, reflection, corner handling
// (the right-angle vertex O is regularisable and passes the orbit straight
// through with a direction reversal; A and B terminate), orbit codes and
// periodic-orbit detection.

#include "billiard/core.hpp"

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

namespace billiard {

/// Base direction the symbolic tokens are anchored to.
struct BaseDirection {
    Real theta0;
    Theta0Kind kind = Theta0Kind::Generic;
};

struct PhasePoint {
    std::optional<SideId> side;  // nullopt for interior launches
    Real s;                      // arc length along side, valid when side is set
    Point pos;
    SymbolicDirection dir;
};

enum class TerminationKind { MaxSteps, SingularVertex, PeriodicDetected, Escaped };

struct Termination {
    TerminationKind kind = TerminationKind::MaxSteps;
    VertexId vertex = VertexId::O;  // SingularVertex only
    std::size_t hit_index = 0;      // SingularVertex: index the fatal hit would have had
    std::size_t period = 0;         // PeriodicDetected only
    std::int64_t level_bound = 0;   // Escaped only
};

struct OrbitHit {
    SideId side;
    Real s;
    bool corner = false;  // regularised pass through O
};

struct OrbitSegment {
    PhasePoint start;
    BaseDirection base;
    std::vector<OrbitHit> hits;
    std::vector<SymbolicDirection> dirs;   // outgoing token after hits[i]
    std::vector<std::int64_t> level_code;  // dirs[i].level()
    Termination termination;
};

struct TraceOptions {
    std::size_t max_steps = 1000;
    std::int64_t level_bound = 64;  // |level| beyond this terminates Escaped
};

/// Pure tracer over an immutable triangle/context/base-direction triple.
/// Direction vectors are memoised per token, so the hot loop is field
/// arithmetic only.
class Tracer {
public:
    Tracer(const RightTriangle& tri, const PrecisionContext& ctx, BaseDirection base);

    const RightTriangle& triangle() const { return tri_; }
    const PrecisionContext& context() const { return ctx_; }
    const BaseDirection& base() const { return base_; }

    struct StepOutcome {
        enum class Kind { Reflected, CornerPassed, Singular };
        Kind kind;
        PhasePoint next;   // valid unless Singular
        VertexId vertex;   // valid when Singular
        SideId hit_side;
        Real hit_s;
    };

    /// Advance to the next boundary hit. The state's direction must point
    /// into the (closed) triangle; tangent directions run into a vertex and
    /// resolve there.
    StepOutcome step(const PhasePoint& state) const;

    OrbitSegment trace(const PhasePoint& start, const TraceOptions& opt) const;

    /// Unit direction vector of a token (cached).
    const Point& direction_vector(const SymbolicDirection& d) const;

    PhasePoint on_side(SideId side, const Real& s, const SymbolicDirection& d) const;
    PhasePoint interior(Point pos, const SymbolicDirection& d) const;

    /// Launch from the right-angle vertex O: folds the token through the
    /// Klein group of the two legs so the ray enters the first quadrant,
    /// preserving the level. Returns the folded state at O.
    PhasePoint from_origin(const SymbolicDirection& d) const;

    /// Throws std::domain_error unless the direction points into the closed
    /// triangle from the state's location.
    void require_admissible(const PhasePoint& state) const;

private:
    const RightTriangle& tri_;
    const PrecisionContext& ctx_;
    BaseDirection base_;
    Real tan_alpha_;
    Real hyp_len_;
    mutable std::unordered_map<std::uint64_t, Point> dir_cache_;
};

struct PeriodCertificate {
    std::size_t period_reflections = 0;
    Real geometric_length;
    PhasePoint start;
    Real max_position_defect;
};

enum class PeriodFailure { MaxSteps, Singular };

struct PeriodSearchResult {
    std::optional<PeriodCertificate> certificate;
    PeriodFailure failure = PeriodFailure::MaxSteps;
    bool found() const { return certificate.has_value(); }
};

/// Find the smallest period k <= max_steps from `start` (stepped to the
/// boundary first if interior). A period requires the exact symbolic
/// direction to recur on the same side within position_tolerance, confirmed
/// by (a) tracing k further reflections and matching the whole code and
/// (b) re-tracing from start +- 1000*position_tolerance and requiring the
/// same (side, direction) code — periodic orbits come in parallel open
/// families, so an isolated near-return is rejected.
PeriodSearchResult detect_period(const Tracer& tracer, const PhasePoint& start,
                                 std::size_t max_steps);

/// Time-reversed segment, built by re-tracing from the final hit with the
/// reversed direction. Requires a nonsingular segment whose start lies on a
/// side; reverse(reverse(seg)) reproduces the hit sequence.
OrbitSegment reverse(const Tracer& tracer, const OrbitSegment& seg);

}  // namespace billiard
