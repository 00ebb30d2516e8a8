#pragma once

// Perpendicular-direction analysis: closed-form and simulated
// end-point-good classification, foliation scans over a good direction,
// and per-point periodic-direction density scans.
//
// Closed form: the perpendicular to the longer leg is end point good
// exactly when alpha lies in some (pi/(4n+2), pi/(4n)), n >= 1; the
// perpendicular to the hypotenuse when alpha lies in some
// (pi/(4n), pi/(4n-2)), n >= 2. The two interval families are disjoint and
// jointly cover (0, pi/4) minus the endpoints {pi/(2k)}.

#include "billiard/flow.hpp"
#include "billiard/surface.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace billiard {

enum class ClosedFormVerdict { Good, NotGood, Boundary };
enum class SimVerdict { Good, NotGood, Singular };

const char* to_string(ClosedFormVerdict v);
const char* to_string(SimVerdict v);

struct ClosedForm {
    ClosedFormVerdict verdict = ClosedFormVerdict::NotGood;
    std::optional<std::int64_t> n_witness;  // interval index when Good
};

/// Supported sides: LegH and Hyp (the two families above already cover
/// every alpha; the shorter leg is not analysed in closed form).
ClosedForm endpoint_good_closed_form(const Real& alpha, SideId side,
                                     const PrecisionContext& ctx);

/// Trace the perpendicular orbit of a side endpoint. Corner launches are
/// realised as one-sided limits: the orbit starts 8*corner_epsilon inside
/// the side, and the verdict must be stable under halving the offset
/// (instability means the limit orbit dies in a vertex and is reported
/// Singular). Good means some later hit lands on the launch side,
/// perpendicular again, strictly inside.
SimVerdict endpoint_good_simulated(const RightTriangle& tri, SideId side, VertexId endpoint,
                                   const PrecisionContext& ctx, std::size_t max_steps = 20000);

/// Side-level verdict: every tested endpoint of the side must be good
/// (both endpoints for the hypotenuse, both for the leg).
SimVerdict endpoint_good_simulated_side(const RightTriangle& tri, SideId side,
                                        const PrecisionContext& ctx,
                                        std::size_t max_steps = 20000);

struct GoodDirection {
    SideId side;
    Real theta_perp;   // inward perpendicular representative
    Theta0Kind kind;
    std::int64_t n_witness;
};

/// A side whose perpendicular is end point good for this triangle; throws
/// std::domain_error when alpha sits on an interval endpoint (caller should
/// perturb).
GoodDirection choose_good_direction(const RightTriangle& tri, const PrecisionContext& ctx);

struct ScanReport {
    std::size_t samples = 0;
    std::size_t periodic = 0;
    std::size_t singular = 0;
    std::size_t unresolved = 0;
    std::size_t max_period_seen = 0;
};

enum class SampleVerdict { Periodic, Singular, Unresolved };

const char* to_string(SampleVerdict v);

struct FoliationSample {
    SideId side;
    Real s;
    SymbolicDirection launch;
    SampleVerdict verdict;
    std::size_t period = 0;
};

struct FoliationResult {
    ScanReport report;
    std::vector<FoliationSample> rows;  // filled when keep_rows
};

/// Sample boundary points uniformly by arc length (excluding
/// corner_epsilon-neighbourhoods of A and B), launch each on the inward
/// lift of the good direction class with the smallest |n|, and run the
/// period detector. Deterministic for a fixed seed.
FoliationResult foliation_scan(const RightTriangle& tri, const GoodDirection& good,
                               std::size_t samples, std::size_t max_steps, std::uint64_t seed,
                               const PrecisionContext& ctx, bool keep_rows = false);

struct DirScanRow {
    SymbolicDirection token;
    Real angle;
    SampleVerdict verdict;
    std::size_t period = 0;
};

struct DirScanResult {
    ScanReport report;
    std::vector<DirScanRow> rows;
    Real max_gap_periodic;      // largest angular gap between periodic directions
    std::size_t periodic_count = 0;
};

/// For each direction in the fiber enumeration over p (built from every
/// good perpendicular base of this triangle, |n| <= K), detect a period
/// from (p, theta). p must not be a vertex.
DirScanResult periodic_direction_scan(const Point& p, std::size_t K, std::size_t max_steps,
                                      const RightTriangle& tri, const PrecisionContext& ctx);

}  // namespace billiard
