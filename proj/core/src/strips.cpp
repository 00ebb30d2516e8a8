#include "billiard/strips.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace billiard {

namespace {

struct AbsorptionCode {
    std::vector<std::int64_t> levels;
    bool singular = false;
    friend bool operator==(const AbsorptionCode&, const AbsorptionCode&) = default;
};

// sin(angle + alpha) > 0 is the exact condition for a ray of this token to
// hit the hypotenuse from inside.
Real hyp_incidence(const SymbolicDirection& d, const BaseDirection& base,
                   const RightTriangle& tri, const PrecisionContext& ctx) {
    const Real angle = direction_angle(d, base.theta0, tri, ctx);
    return sin(angle + tri.alpha());
}

// Pre-crossing token of a cap: level 0 moving by `sign` (cap 0), or level
// sign*N moving by -sign (cap 1). The parity m is forced by hittability.
SymbolicDirection cap_pre_token(int cap, std::int64_t N, int sign, const BaseDirection& base,
                                const RightTriangle& tri, const PrecisionContext& ctx) {
    const int sigma = cap == 0 ? sign : -sign;
    const std::int64_t n = cap == 0 ? 0 : (sigma > 0 ? sign * N : -sign * N);
    const Real tol = ctx.eps_bits(16);
    for (int m : {0, 1}) {
        SymbolicDirection d{sigma, n, m};
        const Real inc = hyp_incidence(d, base, tri, ctx);
        if (inc > tol) return d;
        if (abs(inc) <= tol)
            throw ParallelToHypotenuse("base direction class contains the hypotenuse direction");
    }
    throw std::logic_error("no hypotenuse-hitting parity found");
}

void check_not_parallel(const BaseDirection& base, std::int64_t N,
                        const RightTriangle& tri, const PrecisionContext& ctx) {
    const Real tol = ctx.eps_bits(16);
    const std::int64_t bound = std::max<std::int64_t>(N + 2, 8);
    for (std::int64_t n = -bound; n <= bound; ++n)
        for (int sigma : {+1, -1}) {
            if (abs(hyp_incidence({sigma, n, 0}, base, tri, ctx)) <= tol)
                throw ParallelToHypotenuse(
                    "base direction class contains the hypotenuse direction");
        }
}

struct CapMachine {
    const Tracer& tracer;
    std::int64_t N;
    int sign;
    int cap;
    SymbolicDirection pre_token;
    SymbolicDirection post_token;
    std::size_t max_steps;
    bool saw_singular = false;

    CapMachine(const Tracer& t, std::int64_t N_, int sign_, int cap_, std::size_t max_steps_)
        : tracer(t), N(N_), sign(sign_), cap(cap_),
          pre_token(cap_pre_token(cap_, N_, sign_, t.base(), t.triangle(), t.context())),
          post_token(reflect_direction(pre_token, SideId::Hyp)),
          max_steps(max_steps_) {}

    PhasePoint entry_state(const Real& u_local) const {
        return tracer.on_side(SideId::Hyp, u_local * tracer.triangle().hyp_length(), post_token);
    }

    bool absorbed(std::int64_t lvl) const { return lvl == 0 || lvl == sign * N; }

    AbsorptionCode evaluate(const Real& u_local) {
        AbsorptionCode code;
        PhasePoint state = entry_state(u_local);
        code.levels.push_back(state.dir.level());
        if (absorbed(code.levels.back())) return code;
        for (std::size_t i = 0; i < max_steps; ++i) {
            auto o = tracer.step(state);
            if (o.kind == Tracer::StepOutcome::Kind::Singular) {
                code.singular = true;
                saw_singular = true;
                return code;
            }
            state = std::move(o.next);
            code.levels.push_back(state.dir.level());
            if (absorbed(code.levels.back())) return code;
        }
        throw StructureError("absorption trace exceeded step budget");
    }
};

struct LocalStrip {
    Real u_lo, u_hi;  // cap-local
    AbsorptionCode code;
};

std::vector<LocalStrip> decompose_cap(CapMachine& machine, const StripOptions& opt,
                                      std::size_t grid) {
    const Real width_tol = pow2(-static_cast<long>(opt.bisect_depth));

    std::vector<std::pair<Real, AbsorptionCode>> samples;
    samples.reserve(grid);
    for (std::size_t j = 0; j < grid; ++j) {
        Real u = (Real(2 * static_cast<long>(j)) + 1) / Real(2 * static_cast<long>(grid));
        samples.emplace_back(u, machine.evaluate(u));
    }

    struct Bracket {
        Real lo, hi;
        AbsorptionCode clo, chi;
    };
    std::deque<Bracket> work;
    for (std::size_t j = 0; j + 1 < samples.size(); ++j)
        if (!(samples[j].second == samples[j + 1].second))
            work.push_back({samples[j].first, samples[j + 1].first,
                            samples[j].second, samples[j + 1].second});

    std::vector<Real> boundaries;
    while (!work.empty()) {
        Bracket b = std::move(work.front());
        work.pop_front();
        while (b.hi - b.lo >= width_tol) {
            const Real mid = (b.lo + b.hi) / 2;
            AbsorptionCode cmid = machine.evaluate(mid);
            if (cmid == b.clo) {
                b.lo = mid;
            } else if (cmid == b.chi) {
                b.hi = mid;
            } else {
                work.push_back({mid, b.hi, cmid, b.chi});
                b.hi = mid;
                b.chi = std::move(cmid);
            }
        }
        boundaries.push_back((b.lo + b.hi) / 2);
    }
    std::sort(boundaries.begin(), boundaries.end());

    std::vector<LocalStrip> strips;
    Real lo = 0;
    for (std::size_t i = 0; i <= boundaries.size(); ++i) {
        const Real hi = i < boundaries.size() ? boundaries[i] : Real(1);
        LocalStrip s;
        s.u_lo = lo;
        s.u_hi = hi;
        s.code = machine.evaluate((lo + hi) / 2);
        strips.push_back(std::move(s));
        lo = hi;
    }
    return strips;
}

bool palindrome(const std::vector<std::int64_t>& v) {
    for (std::size_t i = 0, j = v.size(); i < j; ++i, --j)
        if (v[i] != v[j - 1]) return false;
    return true;
}

}  // namespace

PhasePoint transversal_state(const Real& u_global, std::int64_t N, int sign,
                             const BaseDirection& base, const RightTriangle& tri,
                             const PrecisionContext& ctx) {
    ctx.activate();
    Tracer tracer(tri, ctx, base);
    const bool lower = u_global <= Real(1) / 2;
    const int cap = lower ? 0 : 1;
    const Real u_local = lower ? u_global * 2 : u_global * 2 - 1;
    CapMachine machine(tracer, N, sign, cap, 1);
    return machine.entry_state(u_local);
}

StripDecomposition strip_decomposition(const BaseDirection& base, std::int64_t N,
                                       const RightTriangle& tri, const PrecisionContext& ctx,
                                       const StripOptions& opt) {
    if (N < 1) throw std::domain_error("N must be at least 1");
    ctx.activate();
    check_not_parallel(base, N, tri, ctx);

    Tracer tracer(tri, ctx, base);
    const std::int64_t expected = opt.expected_count.value_or(N + 1);

    StripDecomposition dec;
    dec.N = N;

    std::size_t grid = opt.initial_grid;
    for (unsigned round = 0;; ++round) {
        dec.strips.clear();
        dec.nonsimple_warning = false;

        for (int cap : {0, 1}) {
            CapMachine machine(tracer, N, +1, cap, opt.max_absorption_steps);
            auto locals = decompose_cap(machine, opt, grid);
            if (machine.saw_singular) dec.nonsimple_warning = true;
            for (auto& ls : locals) {
                Strip s;
                s.cap = cap;
                s.u_lo = cap == 0 ? ls.u_lo / 2 : (ls.u_lo + 1) / 2;
                s.u_hi = cap == 0 ? ls.u_hi / 2 : (ls.u_hi + 1) / 2;
                s.singular = ls.code.singular;
                s.code = std::move(ls.code.levels);
                s.start_level = cap == 0 ? 0 : N;
                s.end_level = s.code.empty() ? 0 : s.code.back();
                s.exceptional = !s.singular && s.end_level != s.start_level;
                s.symmetric = palindrome(s.code);
                dec.strips.push_back(std::move(s));
            }
        }

        if (static_cast<std::int64_t>(dec.strips.size()) >= expected ||
            round >= opt.max_grid_rounds)
            break;
        grid *= 4;
    }

    // Center crossings: run each center orbit backwards to the window
    // boundary it came in through.
    TraceOptions copt;
    copt.level_bound = std::numeric_limits<std::int64_t>::max() / 4;
    for (std::int64_t k = 1; k <= N - 1; ++k) {
        CenterCrossing cc;
        cc.k = k;
        PhasePoint state = tracer.from_origin({+1, k, 1});
        bool found = false;
        for (std::size_t i = 0; i < opt.max_absorption_steps; ++i) {
            auto o = tracer.step(state);
            if (o.kind == Tracer::StepOutcome::Kind::Singular) break;
            state = std::move(o.next);
            const std::int64_t lvl = state.dir.level();
            if (lvl == 0 || lvl == N) {
                const Real u_local = o.hit_s / tri.hyp_length();
                cc.u = lvl == 0 ? u_local / 2 : (u_local + 1) / 2;
                found = true;
                break;
            }
        }
        if (!found) dec.nonsimple_warning = true;
        dec.centers.push_back(std::move(cc));
    }

    for (auto& strip : dec.strips) {
        for (const auto& cc : dec.centers) {
            if (cc.u && strip.u_lo < *cc.u && *cc.u < strip.u_hi) {
                strip.contains_center = true;
                strip.center_index = cc.k;
                break;
            }
        }
    }

    std::sort(dec.strips.begin(), dec.strips.end(),
              [](const Strip& a, const Strip& b) { return a.u_lo < b.u_lo; });
    return dec;
}

std::pair<Strip, Strip> exceptional_strips(const StripDecomposition& dec) {
    std::vector<const Strip*> ex;
    for (const auto& s : dec.strips)
        if (s.exceptional) ex.push_back(&s);
    if (ex.size() != 2) {
        std::ostringstream msg;
        msg << "expected exactly 2 exceptional strips, found " << ex.size()
            << (dec.nonsimple_warning ? " (nonsimple direction suspected)" : "");
        throw StructureError(msg.str());
    }
    const Strip* up = nullptr;
    const Strip* down = nullptr;
    for (const Strip* s : ex) {
        if (s->start_level == 0 && s->end_level == dec.N) up = s;
        if (s->start_level == dec.N && s->end_level == 0) down = s;
    }
    if (!up || !down)
        throw StructureError("exceptional strips do not form a 0->N / N->0 pair");
    return {*up, *down};
}

EscapeBracket escape_bracket(const BaseDirection& base, std::int64_t N_max,
                             const RightTriangle& tri, const PrecisionContext& ctx,
                             EscapeDirection direction, const StripOptions& opt) {
    if (N_max < 1) throw std::domain_error("N_max must be at least 1");
    ctx.activate();
    const int sign = direction == EscapeDirection::Forward ? +1 : -1;
    check_not_parallel(base, N_max, tri, ctx);

    Tracer tracer(tri, ctx, base);
    EscapeBracket bracket;
    bracket.direction = direction;
    const Real nest_tol = 4 * pow2(-static_cast<long>(opt.bisect_depth));

    for (std::int64_t N = 1; N <= N_max; ++N) {
        CapMachine machine(tracer, N, sign, 0, opt.max_absorption_steps);
        std::size_t grid = opt.initial_grid;
        std::vector<LocalStrip> locals;
        std::vector<LocalStrip> escapers;
        for (unsigned round = 0;; ++round) {
            locals = decompose_cap(machine, opt, grid);
            escapers.clear();
            for (auto& ls : locals)
                if (!ls.code.singular && !ls.code.levels.empty() &&
                    ls.code.levels.back() == sign * N)
                    escapers.push_back(ls);
            if (escapers.size() == 1 || round >= opt.max_grid_rounds) break;
            grid *= 4;
        }
        if (escapers.size() != 1) {
            std::ostringstream msg;
            msg << "expected one escaping strip at N=" << N << ", found " << escapers.size();
            throw StructureError(msg.str());
        }
        EscapeBracketRow row;
        row.N = N;
        row.u_lo = escapers[0].u_lo / 2;
        row.u_hi = escapers[0].u_hi / 2;
        if (!bracket.rows.empty()) {
            const auto& prev = bracket.rows.back();
            if (row.u_lo < prev.u_lo - nest_tol || row.u_hi > prev.u_hi + nest_tol) {
                std::ostringstream msg;
                msg << "escape intervals fail to nest at N=" << N
                    << " (insufficient precision or bisect depth)";
                throw StructureError(msg.str());
            }
        }
        bracket.rows.push_back(row);
    }
    return bracket;
}

}  // namespace billiard
