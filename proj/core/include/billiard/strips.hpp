#pragma once

// Strip decomposition of the compact window between levels 0 and N, the two
// exceptional strips, and nested-interval approximation of the unique
// forward/backward escape orbits.
//
// Transversal. Orbits enter the window through two caps: the crossings
// 0 -> 1 ("lower cap", the states that just climbed out of level 0) and the
// crossings N -> N-1 ("upper cap", the states that just dropped out of
// level N). Each cap is a full copy of the hypotenuse parameterised by arc
// length; a single hypotenuse side carries all crossings of one cap because
// only one of the two opposite token parities can hit it. The two caps are
// concatenated on one global coordinate: u in [0, 1/2] is the lower cap,
// u in [1/2, 1] the upper. A strip is a maximal parameter interval whose
// forward trace produces the same level code until absorption (level back
// to 0, or reaching N). Strips starting on the lower cap have start level
// 0, on the upper cap N; exactly two strips are exceptional (0 -> N and
// N -> 0) for simple directions, and each of the N-1 rhombus centers
// crosses exactly one of the remaining strips.

#include "billiard/flow.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace billiard {

/// Structural failure of a theorem-shaped check (counts, nesting, ...).
/// CLI maps this to exit code 3, distinct from bad-input domain errors.
class StructureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParallelToHypotenuse : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct Strip {
    Real u_lo, u_hi;                // global transversal coordinates
    std::vector<std::int64_t> code; // levels per reflection, cap entry to absorption
    int cap = 0;                    // 0 = lower (enters level 1), 1 = upper (enters N-1)
    std::int64_t start_level = 0;   // 0 on the lower cap, N on the upper
    std::int64_t end_level = 0;     // absorption level
    bool exceptional = false;       // start_level != end_level
    bool contains_center = false;
    std::int64_t center_index = 0;  // which c_k, when contains_center
    bool symmetric = false;         // code is a palindrome
    bool singular = false;          // the sampled trace died at A or B
};

struct CenterCrossing {
    std::int64_t k = 0;       // rhombus index, 1..N-1
    std::optional<Real> u;    // global coordinate; empty when the center orbit died
};

struct StripDecomposition {
    std::int64_t N = 0;
    std::vector<Strip> strips;          // sorted by u_lo; closures cover [0,1]
    std::vector<CenterCrossing> centers;
    bool nonsimple_warning = false;     // some sampled code hit A or B
};

struct StripOptions {
    unsigned bisect_depth = 96;          // boundaries located to width 2^-depth (cap-local)
    std::size_t initial_grid = 64;       // first-pass samples per cap
    unsigned max_grid_rounds = 4;        // x4 refinement rounds if strips look missing
    std::size_t max_absorption_steps = 200000;
    std::optional<std::int64_t> expected_count;  // refine until this many strips (default N+1)
};

StripDecomposition strip_decomposition(const BaseDirection& base, std::int64_t N,
                                       const RightTriangle& tri, const PrecisionContext& ctx,
                                       const StripOptions& opt = {});

/// The unique 0->N and N->0 strips. Throws StructureError unless exactly
/// two exceptional strips are present (nonsimple direction or tolerance
/// failure).
std::pair<Strip, Strip> exceptional_strips(const StripDecomposition& dec);

enum class EscapeDirection { Forward, Backward };

struct EscapeBracketRow {
    std::int64_t N;
    Real u_lo, u_hi;
    Real width() const { return u_hi - u_lo; }
};

struct EscapeBracket {
    EscapeDirection direction = EscapeDirection::Forward;
    std::vector<EscapeBracketRow> rows;  // N = 1..N_max, nested
    const EscapeBracketRow& last() const { return rows.back(); }
    Real midpoint() const { return (rows.back().u_lo + rows.back().u_hi) / 2; }
};

/// Nested intervals I_N of the exceptional strip that climbs from level 0
/// to level N (forward) or descends 0 to -N (backward); the midpoint of
/// I_{N_max} approximates the unique escape orbit. Throws StructureError
/// on a nesting violation beyond 4 * 2^-bisect_depth.
EscapeBracket escape_bracket(const BaseDirection& base, std::int64_t N_max,
                             const RightTriangle& tri, const PrecisionContext& ctx,
                             EscapeDirection direction = EscapeDirection::Forward,
                             const StripOptions& opt = {});

/// Phase state on the transversal at global coordinate u (the state that
/// just crossed into the window). Exposed for tracing from bracket
/// midpoints. `sign` +1 for the forward (levels up) window, -1 backward.
PhasePoint transversal_state(const Real& u_global, std::int64_t N, int sign,
                             const BaseDirection& base, const RightTriangle& tri,
                             const PrecisionContext& ctx);

}  // namespace billiard
