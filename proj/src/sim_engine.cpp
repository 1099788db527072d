#include "wqm/sim_engine.hpp"

#include "wqm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace wqm {

namespace {

constexpr std::uint64_t kMemoryStream = 1;

struct StationGates {
    GateMemory plus;
    GateMemory minus;
};

InitialMemories make_initial_memories(MemoryInit init, double u, std::uint64_t seed)
{
    switch (init) {
    case MemoryInit::Half: return {u / 2, u / 2, u / 2, u / 2};
    case MemoryInit::Zero: return {};
    case MemoryInit::Random: {
        Rng rng(derive_seed(seed, kMemoryStream));
        InitialMemories m;
        m.a_plus = rng.uniform(0.0, u);
        m.a_minus = rng.uniform(0.0, u);
        m.b_plus = rng.uniform(0.0, u);
        m.b_minus = rng.uniform(0.0, u);
        return m;
    }
    }
    return {};
}

bool finite(double x) { return std::isfinite(x); }

Station other(Station s) { return s == Station::A ? Station::B : Station::A; }

// Time at which a photon leaving the source towards `x_target` first lies on or
// above the past light cone of a detection at (x_event, t_event).
double cone_entry(const StationGeometry& g, double x_target, double x_event, double t_event)
{
    const double v = g.speed;
    const double dir = x_target > g.x_source ? 1.0 : (x_target < g.x_source ? -1.0 : 0.0);
    const double d0 = std::abs(x_event - g.x_source);
    const double lag = t_event - g.t0;  // cone apex, relative to emission

    if (d0 - lag >= 0.0) return g.t0;

    // sign of the rate at which the photon moves away from x_event
    const double away = (x_event - g.x_source) * dir <= 0.0 ? 1.0 : -1.0;
    const double slope = 1.0 + away * dir * dir * v;
    const double kink = (away < 0.0) ? d0 / v : std::numeric_limits<double>::infinity();

    if (slope > 0.0) {
        const double tau = (lag - d0) / slope;
        if (tau <= kink) return g.t0 + tau;
    }
    // past the event's position the photon recedes from it
    const double tau = (lag + v * kink) / (1.0 + v);
    return g.t0 + std::max(tau, kink);
}

}  // namespace

SettingPair block_pairing(std::size_t i, std::size_t n_slots) noexcept
{
    const std::size_t q = (4 * i) / n_slots;
    return kBlockOrder[std::min<std::size_t>(q, 3)];
}

bool is_block_sequence(std::span<const SettingPair> slots)
{
    std::size_t block = 0;
    std::size_t i = 0;
    for (; block < 4; ++block) {
        const std::size_t start = i;
        while (i < slots.size() && slots[i] == kBlockOrder[block]) ++i;
        if (i == start) return false;
    }
    return i == slots.size();
}

SettingsSchedule SettingsSchedule::block(std::size_t n_slots)
{
    SettingsSchedule s;
    s.kind_ = Kind::Block;
    s.slots_.resize(n_slots);
    for (std::size_t i = 0; i < n_slots; ++i) s.slots_[i] = block_pairing(i, n_slots);
    return s;
}

SettingsSchedule SettingsSchedule::random(std::size_t n_slots, std::uint64_t seed)
{
    SettingsSchedule s;
    s.kind_ = Kind::Random;
    s.seed_ = seed;
    s.slots_.resize(n_slots);
    Rng rng(seed);
    for (auto& p : s.slots_) {
        p.a = rng.coin() ? SettingA::AlphaPrime : SettingA::Alpha;
        p.b = rng.coin() ? SettingB::BetaPrime : SettingB::Beta;
    }
    return s;
}

SettingsSchedule SettingsSchedule::fixed(std::size_t n_slots, SettingPair pair)
{
    SettingsSchedule s;
    s.kind_ = Kind::Fixed;
    s.slots_.assign(n_slots, pair);
    return s;
}

SettingsSchedule SettingsSchedule::custom(std::vector<SettingPair> slots)
{
    SettingsSchedule s;
    s.kind_ = Kind::Custom;
    s.slots_ = std::move(slots);
    return s;
}

RolePolicy RolePolicy::master(Station s)
{
    RolePolicy p;
    p.kind = s == Station::A ? Kind::MasterA : Kind::MasterB;
    return p;
}

RolePolicy RolePolicy::switch_at(std::vector<std::uint64_t> slots)
{
    RolePolicy p;
    p.kind = Kind::SwitchAtSlots;
    p.switch_slots = std::move(slots);
    return p;
}

RolePolicy RolePolicy::switch_every_slot()
{
    RolePolicy p;
    p.kind = Kind::SwitchEverySlot;
    return p;
}

RolePolicy RolePolicy::from_geometry(const StationGeometry& g)
{
    RolePolicy p;
    p.kind = Kind::FromGeometry;
    p.geometry = g;
    return p;
}

RoleAssignment assign_roles(const StationGeometry& g)
{
    if (!finite(g.x_source) || !finite(g.x_a) || !finite(g.x_b) || !finite(g.t0))
        throw ConfigError("station geometry must be finite");
    if (g.x_a == g.x_b) throw ConfigError("station geometry is degenerate: x_a == x_b");
    if (!(g.speed > 0.0 && g.speed <= 1.0))
        throw ConfigError("photon speed must be in (0, 1] (units of c)");

    RoleAssignment r;
    r.detect_a = g.t0 + std::abs(g.x_a - g.x_source) / g.speed;
    r.detect_b = g.t0 + std::abs(g.x_b - g.x_source) / g.speed;
    r.t_b = cone_entry(g, g.x_b, g.x_a, r.detect_a);
    r.t_a = cone_entry(g, g.x_a, g.x_b, r.detect_b);
    r.master = r.t_b <= r.t_a ? Station::A : Station::B;
    return r;
}

Station master_at(const RolePolicy& policy, std::uint64_t slot)
{
    switch (policy.kind) {
    case RolePolicy::Kind::MasterA: return Station::A;
    case RolePolicy::Kind::MasterB: return Station::B;
    case RolePolicy::Kind::SwitchEverySlot: return slot % 2 == 1 ? Station::B : Station::A;
    case RolePolicy::Kind::SwitchAtSlots: {
        const auto& s = policy.switch_slots;
        const auto flips = std::upper_bound(s.begin(), s.end(), slot) - s.begin();
        return flips % 2 == 1 ? Station::B : Station::A;
    }
    case RolePolicy::Kind::FromGeometry: return assign_roles(policy.geometry).master;
    }
    return Station::A;
}

void RunConfig::validate() const
{
    if (n_slots < 1) throw ConfigError("n_slots must be >= 1");
    if (schedule.empty()) throw ConfigError("settings schedule is empty");
    if (schedule.size() != n_slots)
        throw ConfigError("schedule length " + std::to_string(schedule.size()) +
                          " does not match n_slots " + std::to_string(n_slots));
    if (!(threshold > 0.0) || !finite(threshold)) throw ConfigError("threshold u must be positive");
    for (double a : {angles.alpha, angles.alpha_prime, angles.beta, angles.beta_prime})
        if (!finite(a)) throw ConfigError("angles must be finite");

    if (source.angle_law.kind == AngleLaw::Kind::Fixed && !finite(source.angle_law.angle))
        throw ConfigError("fixed source angle must be finite");
    const auto& ml = source.modulus_law;
    if (ml.lo && (!(*ml.lo >= 0.0) || !finite(*ml.lo)))
        throw ConfigError("modulus law bounds must be finite and >= 0");
    if (ml.kind == ModulusLaw::Kind::Uniform && !(finite(ml.hi) && ml.hi >= ml.lo.value_or(0.0)))
        throw ConfigError("uniform modulus law needs lo <= hi");

    if (role_policy.kind == RolePolicy::Kind::SwitchAtSlots) {
        std::uint64_t prev = 0;
        for (auto s : role_policy.switch_slots) {
            if (s <= prev || s > n_slots)
                throw ConfigError("malformed switch list: slots must be strictly increasing within 1.." +
                                  std::to_string(n_slots));
            prev = s;
        }
    }
    if (role_policy.kind == RolePolicy::Kind::FromGeometry) (void)assign_roles(role_policy.geometry);
}

void simulate(const RunConfig& config, const HvTrace* replay, HvTrace* record, const SlotSink& sink)
{
    config.validate();
    if (replay && replay->vectors.size() != config.n_slots)
        throw ReplayError("trace holds " + std::to_string(replay->vectors.size()) +
                          " slots but the run needs " + std::to_string(config.n_slots));

    const double u = config.threshold;
    const InitialMemories init =
        replay ? replay->memories : make_initial_memories(config.memory_init, u, config.source.seed);
    StationGates st[2] = {{{init.a_plus, u}, {init.a_minus, u}}, {{init.b_plus, u}, {init.b_minus, u}}};

    if (record) {
        record->memories = init;
        record->vectors.clear();
        record->vectors.reserve(config.n_slots);
    }

    Rng rng(config.source.seed);

    Station master = Station::A;
    const auto& policy = config.role_policy;
    if (policy.kind == RolePolicy::Kind::MasterB) master = Station::B;
    if (policy.kind == RolePolicy::Kind::FromGeometry) master = assign_roles(policy.geometry).master;
    std::size_t next_switch = 0;

    for (std::uint64_t t = 1; t <= config.n_slots; ++t) {
        const PolarizationVector emitted =
            replay ? replay->vectors[t - 1] : emit_pair(config.source, u, rng).first;
        if (record) record->vectors.push_back(emitted);

        if (policy.kind == RolePolicy::Kind::SwitchEverySlot) {
            master = other(master);
        } else if (policy.kind == RolePolicy::Kind::SwitchAtSlots) {
            while (next_switch < policy.switch_slots.size() && policy.switch_slots[next_switch] == t) {
                master = other(master);
                ++next_switch;
            }
        }

        const SettingPair sp = config.schedule[t - 1];
        const AnalyzerAxis axis[2] = {AnalyzerAxis(config.angles.of(sp.a)),
                                      AnalyzerAxis(config.angles.of(sp.b))};
        const int m = master == Station::A ? 0 : 1;
        const int s = 1 - m;

        const StationMeasurement mm = station_measure(emitted, axis[m], st[m].plus, st[m].minus);
        PolarizationVector slave_vec = emitted;
        if (config.contextual && mm.fired_axis)
            slave_vec = PolarizationVector(emitted.modulus(), mm.fired_axis->angle());
        const StationMeasurement sm = station_measure(slave_vec, axis[s], st[s].plus, st[s].minus);

        st[m] = {mm.plus, mm.minus};
        st[s] = {sm.plus, sm.minus};

        SlotRecord rec;
        rec.slot = t;
        rec.setting = sp;
        rec.a = m == 0 ? mm.outcome : sm.outcome;
        rec.b = m == 0 ? sm.outcome : mm.outcome;
        sink(rec);
    }
}

RunLog run(const RunConfig& config)
{
    RunLog log;
    log.config = config;
    log.slots.reserve(config.n_slots);
    HvTrace trace;
    simulate(config, nullptr, &trace, [&](const SlotRecord& r) { log.slots.push_back(r); });
    log.trace = std::move(trace);
    return log;
}

RunLog run_with_trace(const RunConfig& config, const HvTrace& trace)
{
    RunLog log;
    log.config = config;
    log.slots.reserve(config.n_slots);
    simulate(config, &trace, nullptr, [&](const SlotRecord& r) { log.slots.push_back(r); });
    log.trace = trace;
    return log;
}

RunLog counterfactual_replay(const RunLog& log, const Angles& alt_angles,
                             const std::optional<SettingsSchedule>& alt_schedule)
{
    if (!log.trace) throw ReplayError("run log has no hidden-variable trace to replay");
    RunConfig cfg = log.config;
    cfg.angles = alt_angles;
    if (alt_schedule) cfg.schedule = *alt_schedule;
    return run_with_trace(cfg, *log.trace);
}

RunLog switch_roles_midrun(const RunConfig& config)
{
    const auto k = config.role_policy.kind;
    if (k != RolePolicy::Kind::SwitchAtSlots && k != RolePolicy::Kind::SwitchEverySlot)
        throw ConfigError("switch_roles_midrun needs a switch-at-slots role policy");
    return run(config);
}

}  // namespace wqm
