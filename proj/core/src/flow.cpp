#include "billiard/flow.hpp"

#include <algorithm>
#include <stdexcept>

namespace billiard {

namespace {

inline std::uint64_t token_key(const SymbolicDirection& d) {
    const std::uint64_t s = d.sigma > 0 ? 1u : 0u;
    const std::uint64_t m = static_cast<std::uint64_t>(d.m & 1);
    const std::uint64_t n = static_cast<std::uint64_t>(d.n + (1ll << 40));
    return (n << 2) | (s << 1) | m;
}

}  // namespace

Tracer::Tracer(const RightTriangle& tri, const PrecisionContext& ctx, BaseDirection base)
    : tri_(tri), ctx_(ctx), base_(std::move(base)) {
    ctx_.activate();
    tan_alpha_ = tri_.tan_alpha();
    hyp_len_ = tri_.hyp_length();
}

const Point& Tracer::direction_vector(const SymbolicDirection& d) const {
    const auto key = token_key(d);
    auto it = dir_cache_.find(key);
    if (it != dir_cache_.end()) return it->second;
    const Real angle = direction_angle(d, base_.theta0, tri_, ctx_);
    Point v;
    mpfr_sin_cos(v.y.backend().data(), v.x.backend().data(), angle.backend().data(), MPFR_RNDN);
    return dir_cache_.emplace(key, std::move(v)).first->second;
}

PhasePoint Tracer::on_side(SideId side, const Real& s, const SymbolicDirection& d) const {
    PhasePoint p;
    p.side = side;
    p.s = s;
    p.pos = tri_.side_point(side, s);
    p.dir = d;
    return p;
}

PhasePoint Tracer::interior(Point pos, const SymbolicDirection& d) const {
    PhasePoint p;
    p.side = std::nullopt;
    p.s = 0;
    p.pos = std::move(pos);
    p.dir = d;
    return p;
}

PhasePoint Tracer::from_origin(const SymbolicDirection& d) const {
    // Fold through {id, reflect LegV, rotate pi, reflect LegH} until the
    // ray points into the first quadrant. All four preserve the level.
    SymbolicDirection folded = d;
    const Real angle = direction_angle(d, base_.theta0, tri_, ctx_);
    const Real half = pi() / 2;
    if (angle <= half) {
        // keep
    } else if (angle <= 2 * half) {
        folded = reflect_direction(d, SideId::LegV);
    } else if (angle <= 3 * half) {
        folded = corner_pass(d);
    } else {
        folded = reflect_direction(d, SideId::LegH);
    }
    return interior({Real(0), Real(0)}, folded);
}

void Tracer::require_admissible(const PhasePoint& state) const {
    if (!state.side) return;
    const Point& v = direction_vector(state.dir);
    bool ok = false;
    switch (*state.side) {
        case SideId::LegH: ok = v.y >= 0; break;
        case SideId::LegV: ok = v.x >= 0; break;
        case SideId::Hyp: ok = tan_alpha_ * v.x + v.y <= 0; break;
    }
    if (!ok) throw std::domain_error("phase point direction leaves the triangle");
}

Tracer::StepOutcome Tracer::step(const PhasePoint& state) const {
    const Point& v = direction_vector(state.dir);
    const Real& x0 = state.pos.x;
    const Real& y0 = state.pos.y;

    bool have = false;
    Real best_t;
    Real best_s;
    SideId best_side = SideId::LegH;

    auto consider = [&](SideId side, const Real& t, const Real& s, const Real& len) {
        if (!(t > 0)) return;
        // Generous admission window; vertex classification happens below.
        const Real slack = len * pow2(-32);
        if (s < -slack || s > len + slack) return;
        if (!have || t < best_t) {
            have = true;
            best_t = t;
            best_s = s < 0 ? Real(0) : (s > len ? len : s);
            best_side = side;
        }
    };

    if (state.side != SideId::LegH && v.y != 0) {
        const Real t = -y0 / v.y;
        consider(SideId::LegH, t, x0 + t * v.x, Real(1));
    }
    if (state.side != SideId::LegV && v.x != 0) {
        const Real t = -x0 / v.x;
        consider(SideId::LegV, t, y0 + t * v.y, tan_alpha_);
    }
    if (state.side != SideId::Hyp) {
        const Real denom = tan_alpha_ * v.x + v.y;
        if (denom != 0) {
            const Real t = (tan_alpha_ - tan_alpha_ * x0 - y0) / denom;
            // tau runs A -> B; s = tau * |AB|
            const Real tau = 1 - (x0 + t * v.x);
            consider(SideId::Hyp, t, tau * hyp_len_, hyp_len_);
        }
    }

    if (!have)
        throw std::logic_error("tracer found no forward boundary hit (outward direction?)");

    const Real len = tri_.side_length(best_side);
    const Real u = best_s / len;

    StepOutcome out;
    out.hit_side = best_side;
    out.hit_s = best_s;

    const Real& eps = ctx_.corner_epsilon();
    VertexId vertex{};
    bool at_vertex = false;
    if (u < eps) {
        vertex = RightTriangle::side_begin(best_side);
        at_vertex = true;
    } else if (u > 1 - eps) {
        vertex = RightTriangle::side_end(best_side);
        at_vertex = true;
    }

    if (at_vertex && vertex != VertexId::O) {
        out.kind = StepOutcome::Kind::Singular;
        out.vertex = vertex;
        return out;
    }

    PhasePoint next;
    next.side = best_side;
    next.s = best_s;
    next.pos = tri_.side_point(best_side, best_s);
    if (at_vertex) {
        out.kind = StepOutcome::Kind::CornerPassed;
        next.dir = corner_pass(state.dir);
    } else {
        out.kind = StepOutcome::Kind::Reflected;
        next.dir = reflect_direction(state.dir, best_side);
    }
    out.next = std::move(next);
    return out;
}

OrbitSegment Tracer::trace(const PhasePoint& start, const TraceOptions& opt) const {
    if (opt.max_steps < 1)
        throw std::domain_error("max_steps must be at least 1");
    require_admissible(start);

    OrbitSegment seg;
    seg.start = start;
    seg.base = base_;
    seg.hits.reserve(std::min<std::size_t>(opt.max_steps, 4096));

    PhasePoint state = start;
    for (std::size_t i = 0; i < opt.max_steps; ++i) {
        StepOutcome out = step(state);
        if (out.kind == StepOutcome::Kind::Singular) {
            seg.termination = {TerminationKind::SingularVertex, out.vertex, seg.hits.size(), 0, 0};
            return seg;
        }
        seg.hits.push_back({out.hit_side, out.hit_s, out.kind == StepOutcome::Kind::CornerPassed});
        seg.dirs.push_back(out.next.dir);
        seg.level_code.push_back(out.next.dir.level());
        state = std::move(out.next);
        const std::int64_t lvl = seg.level_code.back();
        if (lvl > opt.level_bound || lvl < -opt.level_bound) {
            seg.termination = {TerminationKind::Escaped, VertexId::O, 0, 0, opt.level_bound};
            return seg;
        }
    }
    seg.termination = {TerminationKind::MaxSteps, VertexId::O, 0, 0, 0};
    return seg;
}

namespace {

struct HistoryEntry {
    SideId side;
    Real s;
    SymbolicDirection dir;  // outgoing
    Point pos;
};

// Trace `steps` reflections from `state`, recording (side, token) only;
// returns false on singular termination.
bool code_of(const Tracer& tracer, PhasePoint state, std::size_t steps,
             std::vector<std::pair<SideId, SymbolicDirection>>& out) {
    out.clear();
    out.reserve(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        auto o = tracer.step(state);
        if (o.kind == Tracer::StepOutcome::Kind::Singular) return false;
        out.emplace_back(o.hit_side, o.next.dir);
        state = std::move(o.next);
    }
    return true;
}

}  // namespace

PeriodSearchResult detect_period(const Tracer& tracer, const PhasePoint& start,
                                 std::size_t max_steps) {
    if (max_steps < 2)
        throw std::domain_error("max_steps must be at least 2");
    tracer.require_admissible(start);
    const RightTriangle& tri = tracer.triangle();
    const PrecisionContext& ctx = tracer.context();
    const Theta0Kind kind = tracer.base().kind;

    PeriodSearchResult result;

    // Anchor on the first boundary state.
    PhasePoint anchor = start;
    if (!anchor.side) {
        auto o = tracer.step(anchor);
        if (o.kind == Tracer::StepOutcome::Kind::Singular) {
            result.failure = PeriodFailure::Singular;
            return result;
        }
        anchor = std::move(o.next);
    }

    std::vector<HistoryEntry> history;  // states after reflections 1..k from anchor
    history.reserve(256);

    PhasePoint state = anchor;
    Real path_length = 0;
    std::vector<Real> cumulative;  // geometric length after each reflection
    cumulative.reserve(256);

    std::size_t matched_k = 0;
    while (history.size() < max_steps) {
        auto o = tracer.step(state);
        if (o.kind == Tracer::StepOutcome::Kind::Singular) {
            result.failure = PeriodFailure::Singular;
            return result;
        }
        const Point& prev = state.pos;
        const Real dx = o.next.pos.x - prev.x;
        const Real dy = o.next.pos.y - prev.y;
        path_length += sqrt(dx * dx + dy * dy);
        state = std::move(o.next);
        history.push_back({*state.side, state.s, state.dir, state.pos});
        cumulative.push_back(path_length);

        const std::size_t k = history.size();
        if (*anchor.side == *state.side &&
            directions_equivalent(anchor.dir, state.dir, tri, kind) &&
            abs(state.s - anchor.s) < ctx.position_tolerance()) {
            matched_k = k;
            break;
        }
    }
    if (matched_k == 0) {
        result.failure = PeriodFailure::MaxSteps;
        return result;
    }

    const std::size_t k = matched_k;
    Real defect = abs(history[k - 1].s - anchor.s);

    // Confirmation (a): the next k reflections repeat the code.
    {
        PhasePoint probe = tracer.on_side(*anchor.side, history[k - 1].s, history[k - 1].dir);
        for (std::size_t j = 0; j < k; ++j) {
            auto o = tracer.step(probe);
            if (o.kind == Tracer::StepOutcome::Kind::Singular) {
                result.failure = PeriodFailure::Singular;
                return result;
            }
            probe = std::move(o.next);
            if (*probe.side != history[j].side ||
                !directions_equivalent(probe.dir, history[j].dir, tri, kind) ||
                !(abs(probe.s - history[j].s) < ctx.position_tolerance())) {
                result.failure = PeriodFailure::MaxSteps;
                return result;
            }
            const Real d = abs(probe.s - history[j].s);
            if (d > defect) defect = d;
        }
    }

    // Confirmation (b): open-strip membership via +-delta relaunches.
    {
        const Real delta = 1000 * ctx.position_tolerance();
        const Real len = tri.side_length(*anchor.side);
        std::vector<std::pair<SideId, SymbolicDirection>> shifted;
        for (int sgn : {+1, -1}) {
            const Real s = anchor.s + sgn * delta;
            if (!(s > 0) || !(s < len)) continue;
            if (!code_of(tracer, tracer.on_side(*anchor.side, s, anchor.dir), k, shifted)) {
                result.failure = PeriodFailure::MaxSteps;
                return result;
            }
            for (std::size_t j = 0; j < k; ++j) {
                if (shifted[j].first != history[j].side ||
                    !directions_equivalent(shifted[j].second, history[j].dir, tri, kind)) {
                    result.failure = PeriodFailure::MaxSteps;
                    return result;
                }
            }
        }
    }

    PeriodCertificate cert;
    cert.period_reflections = k;
    cert.geometric_length = cumulative[k - 1];
    cert.start = anchor;
    cert.max_position_defect = defect;
    result.certificate = std::move(cert);
    return result;
}

OrbitSegment reverse(const Tracer& tracer, const OrbitSegment& seg) {
    if (seg.termination.kind == TerminationKind::SingularVertex)
        throw std::domain_error("cannot reverse a singular segment");
    if (seg.hits.empty())
        throw std::domain_error("cannot reverse an empty segment");
    if (!seg.start.side)
        throw std::domain_error("reverse requires a boundary start point");

    const std::size_t k = seg.hits.size();
    const SymbolicDirection incoming = k >= 2 ? seg.dirs[k - 2] : seg.start.dir;
    PhasePoint rev_start = tracer.on_side(seg.hits.back().side, seg.hits.back().s,
                                          incoming.opposite());
    TraceOptions opt;
    opt.max_steps = k;
    opt.level_bound = std::numeric_limits<std::int64_t>::max() / 4;
    return tracer.trace(rev_start, opt);
}

}  // namespace billiard
