#include "billiard/surface.hpp"

#include <algorithm>
#include <stdexcept>

namespace billiard {

std::vector<std::int64_t> level_code(const OrbitSegment& seg) {
    return seg.level_code;
}

std::vector<DirectionSample> enumerate_directions(std::size_t K, const Real& theta0,
                                                  const RightTriangle& tri,
                                                  const PrecisionContext& ctx) {
    ctx.activate();
    std::vector<DirectionSample> raw;
    raw.reserve(4 * (2 * K + 1));
    const auto kmax = static_cast<std::int64_t>(K);
    for (std::int64_t n = -kmax; n <= kmax; ++n) {
        for (int sigma : {+1, -1}) {
            for (int m : {0, 1}) {
                SymbolicDirection d{sigma, n, m};
                raw.push_back({d, direction_angle(d, theta0, tri, ctx)});
            }
        }
    }
    std::sort(raw.begin(), raw.end(),
              [](const DirectionSample& a, const DirectionSample& b) { return a.angle < b.angle; });

    const Real tol = ctx.eps_bits(16);
    std::vector<DirectionSample> out;
    out.reserve(raw.size());
    for (auto& d : raw) {
        if (!out.empty() && angle_distance(out.back().angle, d.angle) < tol) continue;
        out.push_back(std::move(d));
    }
    // Wrap-around duplicate (angles near 0 and near 2*pi).
    while (out.size() > 1 && angle_distance(out.front().angle, out.back().angle) < tol)
        out.pop_back();
    return out;
}

CenterOrbit center_orbit(std::int64_t n, const BaseDirection& base, std::size_t window,
                         const RightTriangle& tri, const PrecisionContext& ctx) {
    if (window < 1) throw std::domain_error("window must be at least 1");
    Tracer tracer(tri, ctx, base);
    TraceOptions opt;
    opt.max_steps = window;
    opt.level_bound = std::numeric_limits<std::int64_t>::max() / 4;

    CenterOrbit result;
    {
        OrbitSegment fwd = tracer.trace(tracer.from_origin({+1, n, 0}), opt);
        result.forward_code = fwd.level_code;
        result.forward_termination = fwd.termination;
    }
    {
        OrbitSegment bwd = tracer.trace(tracer.from_origin({+1, n, 1}), opt);
        result.backward_code = bwd.level_code;
        result.backward_termination = bwd.termination;
    }
    return result;
}

const char* to_string(EscapeKind k) {
    switch (k) {
        case EscapeKind::ForwardEscapeCandidate: return "forward-escape-candidate";
        case EscapeKind::BackwardEscapeCandidate: return "backward-escape-candidate";
        case EscapeKind::BoundedWindow: return "bounded-window";
    }
    return "?";
}

EscapeVerdict classify_escape(const OrbitSegment& seg) {
    const auto& code = seg.level_code;
    if (code.size() < 10)
        throw std::domain_error("classify_escape needs at least 10 hits");

    const std::size_t M = code.size();
    const std::size_t split = (9 * M) / 10;
    std::int64_t max_head = code[0], min_head = code[0];
    for (std::size_t i = 0; i < split; ++i) {
        max_head = std::max(max_head, code[i]);
        min_head = std::min(min_head, code[i]);
    }
    std::int64_t max_tail = code[split], min_tail = code[split];
    for (std::size_t i = split; i < M; ++i) {
        max_tail = std::max(max_tail, code[i]);
        min_tail = std::min(min_tail, code[i]);
    }

    std::size_t ups = 0, downs = 0;
    for (std::size_t i = 0; i + 1 < M; ++i) {
        if (code[i + 1] > code[i]) ++ups;
        else if (code[i + 1] < code[i]) ++downs;
    }
    const std::size_t changes = ups + downs;

    EscapeVerdict v;
    v.window = M;
    const bool fwd = max_tail > max_head && min_tail >= min_head;
    const bool bwd = min_tail < min_head && max_tail <= max_head;
    if (fwd) {
        v.kind = EscapeKind::ForwardEscapeCandidate;
        v.monotone_fraction = changes ? static_cast<double>(ups) / changes : 0.0;
    } else if (bwd) {
        v.kind = EscapeKind::BackwardEscapeCandidate;
        v.monotone_fraction = changes ? static_cast<double>(downs) / changes : 0.0;
    } else {
        v.kind = EscapeKind::BoundedWindow;
        v.monotone_fraction =
            changes ? static_cast<double>(std::max(ups, downs)) / changes : 0.0;
    }
    return v;
}

}  // namespace billiard
