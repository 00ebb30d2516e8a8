#include "billiard/periodicity.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace billiard {

const char* to_string(ClosedFormVerdict v) {
    switch (v) {
        case ClosedFormVerdict::Good: return "good";
        case ClosedFormVerdict::NotGood: return "not-good";
        case ClosedFormVerdict::Boundary: return "boundary";
    }
    return "?";
}

const char* to_string(SimVerdict v) {
    switch (v) {
        case SimVerdict::Good: return "good";
        case SimVerdict::NotGood: return "not-good";
        case SimVerdict::Singular: return "singular";
    }
    return "?";
}

const char* to_string(SampleVerdict v) {
    switch (v) {
        case SampleVerdict::Periodic: return "periodic";
        case SampleVerdict::Singular: return "singular";
        case SampleVerdict::Unresolved: return "unresolved";
    }
    return "?";
}

ClosedForm endpoint_good_closed_form(const Real& alpha, SideId side,
                                     const PrecisionContext& ctx) {
    if (side == SideId::LegV)
        throw std::domain_error("closed form covers LegH and Hyp only");
    ctx.activate();
    const Real p = pi();
    if (!(alpha > 0) || alpha > p / 4)
        throw std::domain_error("alpha must lie in (0, pi/4]");

    const Real x = p / alpha;  // in [4, inf)
    const Real half = x / 2;
    const Real k_near = floor(half + Real(1) / 2);  // nearest integer to x/2
    if (k_near >= 2 && abs(alpha - p / (2 * k_near)) < ctx.eps_bits(16))
        return {ClosedFormVerdict::Boundary, std::nullopt};

    const auto h = static_cast<std::int64_t>(floor(half).convert_to<long long>());
    // x in (2h, 2h+2): even h = 2n means the leg interval (pi/(4n+2), pi/4n),
    // odd h = 2n-1 the hypotenuse interval (pi/4n, pi/(4n-2)).
    if (h % 2 == 0) {
        const std::int64_t n = h / 2;
        if (side == SideId::LegH) return {ClosedFormVerdict::Good, n};
        return {ClosedFormVerdict::NotGood, std::nullopt};
    }
    const std::int64_t n = (h + 1) / 2;
    if (side == SideId::Hyp) return {ClosedFormVerdict::Good, n};
    return {ClosedFormVerdict::NotGood, std::nullopt};
}

namespace {

BaseDirection perpendicular_base(const RightTriangle& tri, SideId side) {
    switch (side) {
        case SideId::LegH: return {pi() / 2, Theta0Kind::PerpLeg};
        case SideId::Hyp: return {3 * pi() / 2 - tri.alpha(), Theta0Kind::PerpHyp};
        case SideId::LegV: return {Real(0), Theta0Kind::Generic};
    }
    throw std::logic_error("bad side");
}

struct SimRun {
    SimVerdict verdict = SimVerdict::NotGood;
    std::vector<SideId> sides;      // hit side sequence
    std::size_t return_index = 0;   // first perpendicular interior return
};

SimRun simulate_endpoint(const RightTriangle& tri, SideId side, VertexId endpoint,
                         const PrecisionContext& ctx, std::size_t max_steps,
                         unsigned offset_multiple) {
    const Real len = tri.side_length(side);
    const Real offset = offset_multiple * ctx.corner_epsilon() * len;
    const bool from_begin = RightTriangle::side_begin(side) == endpoint;
    if (!from_begin && RightTriangle::side_end(side) != endpoint)
        throw std::domain_error("endpoint is not a vertex of the chosen side");
    const Real s0 = from_begin ? offset : len - offset;

    BaseDirection base = perpendicular_base(tri, side);
    Tracer tracer(tri, ctx, base);
    PhasePoint state = tracer.on_side(side, s0, {+1, 0, 0});

    SimRun run;
    run.sides.reserve(256);
    SymbolicDirection incoming = state.dir;
    for (std::size_t i = 0; i < max_steps; ++i) {
        auto o = tracer.step(state);
        if (o.kind == Tracer::StepOutcome::Kind::Singular) {
            run.verdict = SimVerdict::Singular;
            return run;
        }
        run.sides.push_back(o.hit_side);
        const bool corner = o.kind == Tracer::StepOutcome::Kind::CornerPassed;
        // For the exploratory LegV case theta0 = 0, so sigma drops out and
        // perpendicularity is just n == 0.
        const bool perp = side == SideId::LegV
                              ? incoming.n == 0
                              : direction_perpendicular_to_base(incoming, tri, base.kind);
        if (!corner && o.hit_side == side && perp) {
            run.verdict = SimVerdict::Good;
            run.return_index = i;
            return run;
        }
        state = std::move(o.next);
        incoming = state.dir;
    }
    run.verdict = SimVerdict::NotGood;
    return run;
}

}  // namespace

SimVerdict endpoint_good_simulated(const RightTriangle& tri, SideId side, VertexId endpoint,
                                   const PrecisionContext& ctx, std::size_t max_steps) {
    ctx.activate();
    const SimRun a = simulate_endpoint(tri, side, endpoint, ctx, max_steps, 8);
    const SimRun b = simulate_endpoint(tri, side, endpoint, ctx, max_steps, 4);
    if (a.verdict != b.verdict) return SimVerdict::Singular;
    if (a.verdict == SimVerdict::Good) {
        // The one-sided limit exists only if both offsets follow the same
        // combinatorial path to the same return.
        if (a.return_index != b.return_index) return SimVerdict::Singular;
        for (std::size_t i = 0; i <= a.return_index; ++i)
            if (a.sides[i] != b.sides[i]) return SimVerdict::Singular;
    }
    return a.verdict;
}

SimVerdict endpoint_good_simulated_side(const RightTriangle& tri, SideId side,
                                        const PrecisionContext& ctx, std::size_t max_steps) {
    const VertexId ends[2] = {RightTriangle::side_begin(side), RightTriangle::side_end(side)};
    SimVerdict result = SimVerdict::Good;
    for (VertexId v : ends) {
        const SimVerdict sv = endpoint_good_simulated(tri, side, v, ctx, max_steps);
        if (sv == SimVerdict::Singular) return SimVerdict::Singular;
        if (sv == SimVerdict::NotGood) result = SimVerdict::NotGood;
    }
    return result;
}

GoodDirection choose_good_direction(const RightTriangle& tri, const PrecisionContext& ctx) {
    const ClosedForm leg = endpoint_good_closed_form(tri.alpha(), SideId::LegH, ctx);
    if (leg.verdict == ClosedFormVerdict::Boundary)
        throw std::domain_error("alpha lies on a good-interval endpoint; perturb it");
    if (leg.verdict == ClosedFormVerdict::Good) {
        BaseDirection b = perpendicular_base(tri, SideId::LegH);
        return {SideId::LegH, b.theta0, b.kind, *leg.n_witness};
    }
    const ClosedForm hyp = endpoint_good_closed_form(tri.alpha(), SideId::Hyp, ctx);
    if (hyp.verdict == ClosedFormVerdict::Boundary)
        throw std::domain_error("alpha lies on a good-interval endpoint; perturb it");
    if (hyp.verdict == ClosedFormVerdict::Good) {
        BaseDirection b = perpendicular_base(tri, SideId::Hyp);
        return {SideId::Hyp, b.theta0, b.kind, *hyp.n_witness};
    }
    throw std::logic_error("interval families failed to cover alpha");
}

namespace {

// Deterministic uniform draw in [0,1) from a seeded engine; avoids
// std::uniform_real_distribution whose output is implementation-defined.
Real draw_unit(std::mt19937_64& rng) {
    return Real(rng()) / pow2(64);
}

// Inward direction at a boundary point: strictly positive inner product
// with the inward normal.
bool points_inward(const Tracer& tracer, SideId side, const SymbolicDirection& d,
                   const Real& margin) {
    const Point& v = tracer.direction_vector(d);
    const RightTriangle& tri = tracer.triangle();
    switch (side) {
        case SideId::LegH: return v.y > margin;
        case SideId::LegV: return v.x > margin;
        case SideId::Hyp: return tri.tan_alpha() * v.x + v.y < -margin;
    }
    return false;
}

std::optional<SymbolicDirection> inward_lift(const Tracer& tracer, SideId side,
                                             const Real& margin) {
    for (std::int64_t absn = 0; absn <= 2; ++absn) {
        for (std::int64_t n : {absn, -absn}) {
            for (int sigma : {+1, -1}) {
                for (int m : {0, 1}) {
                    SymbolicDirection d{sigma, n, m};
                    if (points_inward(tracer, side, d, margin)) return d;
                }
            }
            if (absn == 0) break;
        }
    }
    return std::nullopt;
}

}  // namespace

FoliationResult foliation_scan(const RightTriangle& tri, const GoodDirection& good,
                               std::size_t samples, std::size_t max_steps, std::uint64_t seed,
                               const PrecisionContext& ctx, bool keep_rows) {
    ctx.activate();
    Tracer tracer(tri, ctx, BaseDirection{good.theta_perp, good.kind});

    const Real len_h = 1;
    const Real len_v = tri.tan_alpha();
    const Real len_y = tri.hyp_length();
    const Real perimeter = len_h + len_v + len_y;
    const Real eps = ctx.corner_epsilon();
    const Real margin = ctx.eps_bits(20);

    std::mt19937_64 rng(seed);
    FoliationResult result;
    result.report.samples = samples;

    for (std::size_t i = 0; i < samples; ++i) {
        SideId side{};
        Real s;
        // Rejection-sample away from the singular vertices A and B.
        for (;;) {
            const Real arc = draw_unit(rng) * perimeter;
            if (arc < len_h) {
                side = SideId::LegH;
                s = arc;
                if (s > (1 - eps) * len_h) continue;  // near A
            } else if (arc < len_h + len_v) {
                side = SideId::LegV;
                s = arc - len_h;
                if (s > (1 - eps) * len_v) continue;  // near B
            } else {
                side = SideId::Hyp;
                s = arc - len_h - len_v;
                if (s < eps * len_y || s > (1 - eps) * len_y) continue;  // near A or B
            }
            break;
        }

        FoliationSample row;
        row.side = side;
        row.s = s;
        auto lift = inward_lift(tracer, side, margin);
        if (!lift) {
            row.verdict = SampleVerdict::Singular;
        } else {
            row.launch = *lift;
            auto res = detect_period(tracer, tracer.on_side(side, s, *lift), max_steps);
            if (res.found()) {
                row.verdict = SampleVerdict::Periodic;
                row.period = res.certificate->period_reflections;
            } else {
                row.verdict = res.failure == PeriodFailure::Singular ? SampleVerdict::Singular
                                                                     : SampleVerdict::Unresolved;
            }
        }

        switch (row.verdict) {
            case SampleVerdict::Periodic:
                ++result.report.periodic;
                result.report.max_period_seen =
                    std::max(result.report.max_period_seen, row.period);
                break;
            case SampleVerdict::Singular: ++result.report.singular; break;
            case SampleVerdict::Unresolved: ++result.report.unresolved; break;
        }
        if (keep_rows) result.rows.push_back(std::move(row));
    }
    return result;
}

DirScanResult periodic_direction_scan(const Point& p, std::size_t K, std::size_t max_steps,
                                      const RightTriangle& tri, const PrecisionContext& ctx) {
    ctx.activate();
    for (VertexId v : {VertexId::O, VertexId::A, VertexId::B}) {
        const Point q = tri.vertex(v);
        const Real d2 = (p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y);
        if (d2 < ctx.corner_epsilon() * ctx.corner_epsilon())
            throw std::domain_error("scan point coincides with a vertex");
    }

    std::vector<GoodDirection> bases;
    {
        const ClosedForm leg = endpoint_good_closed_form(tri.alpha(), SideId::LegH, ctx);
        if (leg.verdict == ClosedFormVerdict::Good)
            bases.push_back({SideId::LegH, pi() / 2, Theta0Kind::PerpLeg, *leg.n_witness});
        const ClosedForm hyp = endpoint_good_closed_form(tri.alpha(), SideId::Hyp, ctx);
        if (hyp.verdict == ClosedFormVerdict::Good)
            bases.push_back(
                {SideId::Hyp, 3 * pi() / 2 - tri.alpha(), Theta0Kind::PerpHyp, *hyp.n_witness});
        if (bases.empty())
            throw std::domain_error("alpha lies on a good-interval endpoint; perturb it");
    }

    DirScanResult result;
    std::vector<Real> periodic_angles;

    for (const auto& good : bases) {
        Tracer tracer(tri, ctx, BaseDirection{good.theta_perp, good.kind});
        auto dirs = enumerate_directions(K, good.theta_perp, tri, ctx);
        for (const auto& d : dirs) {
            DirScanRow row;
            row.token = d.token;
            row.angle = d.angle;
            auto res = detect_period(tracer, tracer.interior(p, d.token), max_steps);
            if (res.found()) {
                row.verdict = SampleVerdict::Periodic;
                row.period = res.certificate->period_reflections;
                ++result.report.periodic;
                result.report.max_period_seen =
                    std::max(result.report.max_period_seen, row.period);
                periodic_angles.push_back(row.angle);
            } else if (res.failure == PeriodFailure::Singular) {
                row.verdict = SampleVerdict::Singular;
                ++result.report.singular;
            } else {
                row.verdict = SampleVerdict::Unresolved;
                ++result.report.unresolved;
            }
            ++result.report.samples;
            result.rows.push_back(std::move(row));
        }
    }

    result.periodic_count = periodic_angles.size();
    if (periodic_angles.size() >= 2) {
        std::sort(periodic_angles.begin(), periodic_angles.end());
        Real max_gap = two_pi() - periodic_angles.back() + periodic_angles.front();
        for (std::size_t i = 0; i + 1 < periodic_angles.size(); ++i)
            max_gap = std::max(max_gap, periodic_angles[i + 1] - periodic_angles[i]);
        result.max_gap_periodic = max_gap;
    } else {
        result.max_gap_periodic = two_pi();
    }
    return result;
}

}  // namespace billiard
