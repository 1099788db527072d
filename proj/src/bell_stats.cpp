#include "wqm/bell_stats.hpp"

#include "wqm/errors.hpp"

#include <cmath>
#include <string>

namespace wqm {

namespace {

std::size_t pairing_index(SettingPair p) noexcept
{
    return static_cast<std::size_t>(p.a) * 2 + static_cast<std::size_t>(p.b);
}

SettingPair pairing_from_index(std::size_t i) noexcept
{
    return {static_cast<SettingA>(i / 2), static_cast<SettingB>(i % 2)};
}

std::string pairing_name(SettingPair p)
{
    std::string s = p.a == SettingA::Alpha ? "(alpha," : "(alpha',";
    s += p.b == SettingB::Beta ? "beta)" : "beta')";
    return s;
}

CountsByPairing to_map(const std::array<CoincidenceCounts, 4>& acc)
{
    CountsByPairing out;
    for (std::size_t i = 0; i < 4; ++i)
        if (acc[i].total > 0) out.emplace(pairing_from_index(i), acc[i]);
    return out;
}

void add(SinglesCounts& s, Outcome o)
{
    switch (o) {
    case Outcome::Plus: ++s.plus; break;
    case Outcome::Minus: ++s.minus; break;
    case Outcome::None: ++s.zero; break;
    }
}

}  // namespace

CoincidenceCounts& CoincidenceCounts::operator+=(const CoincidenceCounts& o) noexcept
{
    pp += o.pp;
    pm += o.pm;
    mp += o.mp;
    mm += o.mm;
    zero += o.zero;
    total += o.total;
    return *this;
}

void tally(CoincidenceCounts& c, Outcome a, Outcome b) noexcept
{
    ++c.total;
    if (a == Outcome::None || b == Outcome::None) {
        ++c.zero;
    } else if (a == Outcome::Plus) {
        ++(b == Outcome::Plus ? c.pp : c.pm);
    } else {
        ++(b == Outcome::Plus ? c.mp : c.mm);
    }
}

CountsByPairing count_coincidences_serial(std::span<const SlotRecord> slots)
{
    std::array<CoincidenceCounts, 4> acc{};
    for (const auto& r : slots) tally(acc[pairing_index(r.setting)], r.a, r.b);
    return to_map(acc);
}

CountsByPairing count_coincidences(std::span<const SlotRecord> slots)
{
    std::array<CoincidenceCounts, 4> acc{};
    const auto n = static_cast<std::int64_t>(slots.size());
#pragma omp parallel
    {
        std::array<CoincidenceCounts, 4> local{};
#pragma omp for schedule(static) nowait
        for (std::int64_t i = 0; i < n; ++i) {
            const auto& r = slots[static_cast<std::size_t>(i)];
            tally(local[pairing_index(r.setting)], r.a, r.b);
        }
#pragma omp critical(wqm_count_merge)
        for (std::size_t k = 0; k < 4; ++k) acc[k] += local[k];
    }
    return to_map(acc);
}

double correlator(const CoincidenceCounts& c)
{
    const auto n = c.detected();
    if (n == 0) throw AnalysisError("correlator undefined: no slot with two +-1 outcomes");
    const double same = static_cast<double>(c.pp + c.mm);
    const double diff = static_cast<double>(c.pm + c.mp);
    return (same - diff) / static_cast<double>(n);
}

double correlator_sigma(const CoincidenceCounts& c)
{
    const double e = correlator(c);
    return std::sqrt(std::max(0.0, 1.0 - e * e) / static_cast<double>(c.detected()));
}

ChshResult chsh(const CountsByPairing& counts)
{
    ChshResult r;
    double var = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        const auto it = counts.find(kChshOrder[i]);
        if (it == counts.end())
            throw AnalysisError("CHSH needs all four setting pairs; missing " + pairing_name(kChshOrder[i]));
        r.counts[i] = it->second;
        r.E[i] = correlator(it->second);
        const double s = correlator_sigma(it->second);
        var += s * s;
    }
    r.S = std::abs(r.E[0] - r.E[1]) + std::abs(r.E[2] + r.E[3]);
    r.sigma = std::sqrt(var);
    return r;
}

ChshResult chsh(std::span<const SlotRecord> slots) { return chsh(count_coincidences(slots)); }

ChResult ch(std::span<const SlotRecord> slots)
{
    std::array<std::uint64_t, 4> pp{}, n{};
    std::uint64_t a_plus = 0, a_slots = 0, b_plus = 0, b_slots = 0;
    for (const auto& r : slots) {
        const auto k = pairing_index(r.setting);
        ++n[k];
        if (r.a == Outcome::Plus && r.b == Outcome::Plus) ++pp[k];
        if (r.setting.a == SettingA::Alpha) {
            ++a_slots;
            if (r.a == Outcome::Plus) ++a_plus;
        }
        if (r.setting.b == SettingB::Beta) {
            ++b_slots;
            if (r.b == Outcome::Plus) ++b_plus;
        }
    }

    std::array<double, 4> p{};
    for (std::size_t i = 0; i < 4; ++i) {
        const auto k = pairing_index(kChshOrder[i]);
        if (n[k] == 0)
            throw AnalysisError("CH needs all four setting pairs; missing " + pairing_name(kChshOrder[i]));
        p[i] = static_cast<double>(pp[k]) / static_cast<double>(n[k]);
    }

    ChResult r;
    r.p_ab = p[0];
    r.p_ab_prime = p[1];
    r.p_a_prime_b = p[2];
    r.p_a_prime_b_prime = p[3];
    r.p_a = static_cast<double>(a_plus) / static_cast<double>(a_slots);
    r.p_b = static_cast<double>(b_plus) / static_cast<double>(b_slots);
    r.J = r.p_ab + r.p_ab_prime + r.p_a_prime_b - r.p_a_prime_b_prime - r.p_a - r.p_b;
    return r;
}

double SinglesCounts::plus_fraction() const
{
    const auto n = plus + minus;
    if (n == 0) throw AnalysisError("singles fraction undefined: station has no detections");
    return static_cast<double>(plus) / static_cast<double>(n);
}

double SinglesCounts::sigma() const
{
    const auto n = plus + minus;
    if (n == 0) throw AnalysisError("singles fraction undefined: station has no detections");
    return 0.5 / std::sqrt(static_cast<double>(n));
}

Singles singles(std::span<const SlotRecord> slots)
{
    Singles s;
    for (const auto& r : slots) {
        add(s.a, r.a);
        add(s.b, r.b);
        add(s.a_by_setting[static_cast<std::size_t>(r.setting.a)], r.a);
        add(s.b_by_setting[static_cast<std::size_t>(r.setting.b)], r.b);
    }
    return s;
}

double plus_plus_rate(const RunConfig& config)
{
    std::uint64_t pp = 0;
    simulate(config, nullptr, nullptr, [&](const SlotRecord& r) {
        if (r.a == Outcome::Plus && r.b == Outcome::Plus) ++pp;
    });
    return static_cast<double>(pp) / static_cast<double>(config.n_slots);
}

RunConfig scan_point_config(const RunConfig& base, double delta, std::size_t index, bool contextual)
{
    RunConfig c = base;
    c.angles.beta = canonical_angle(base.angles.alpha - delta);
    c.schedule = SettingsSchedule::fixed(base.n_slots, {SettingA::Alpha, SettingB::Beta});
    c.contextual = contextual;
    c.source.seed = derive_seed(base.source.seed, 2 * index + (contextual ? 0 : 1) + 16);
    return c;
}

namespace {

void check_scan(const RunConfig& base, std::span<const double> deltas)
{
    if (deltas.empty()) throw ConfigError("scan needs at least one angle difference");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!std::isfinite(deltas[i])) throw ConfigError("scan angle differences must be finite");
        scan_point_config(base, deltas[i], i, true).validate();
    }
}

}  // namespace

std::vector<CurvePoint> curve_scan_serial(const RunConfig& base, std::span<const double> deltas)
{
    check_scan(base, deltas);
    std::vector<CurvePoint> out(deltas.size());
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        out[i].delta = deltas[i];
        out[i].rate_on = plus_plus_rate(scan_point_config(base, deltas[i], i, true));
        out[i].rate_off = plus_plus_rate(scan_point_config(base, deltas[i], i, false));
    }
    return out;
}

std::vector<CurvePoint> curve_scan(const RunConfig& base, std::span<const double> deltas)
{
    // validated up front: nothing may throw inside the parallel region
    check_scan(base, deltas);
    std::vector<CurvePoint> out(deltas.size());
    for (std::size_t i = 0; i < deltas.size(); ++i) out[i].delta = deltas[i];
    // one job per (delta, contextual flag); each run owns its seed and state
    const auto jobs = static_cast<std::int64_t>(2 * deltas.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t j = 0; j < jobs; ++j) {
        const auto i = static_cast<std::size_t>(j / 2);
        const bool on = j % 2 == 0;
        const double rate = plus_plus_rate(scan_point_config(base, deltas[i], i, on));
        (on ? out[i].rate_on : out[i].rate_off) = rate;
    }
    return out;
}

}  // namespace wqm
