#pragma once

// Estimators over outcome series: coincidence counts, correlators, CHSH and
// CH parameters, singles fractions and the (+1,+1) angle scan.
//
// count_coincidences and curve_scan run in parallel under OpenMP; the
// *_serial variants are the reference implementations they are tested against.

#include "wqm/sim_engine.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace wqm {

struct CoincidenceCounts {
    std::uint64_t pp = 0;
    std::uint64_t pm = 0;
    std::uint64_t mp = 0;
    std::uint64_t mm = 0;
    /// Slots where at least one station recorded 0.
    std::uint64_t zero = 0;
    std::uint64_t total = 0;

    std::uint64_t detected() const noexcept { return pp + pm + mp + mm; }

    CoincidenceCounts& operator+=(const CoincidenceCounts& o) noexcept;
    friend bool operator==(const CoincidenceCounts&, const CoincidenceCounts&) = default;
};

void tally(CoincidenceCounts& c, Outcome a, Outcome b) noexcept;

using CountsByPairing = std::map<SettingPair, CoincidenceCounts>;

CountsByPairing count_coincidences(std::span<const SlotRecord> slots);
CountsByPairing count_coincidences_serial(std::span<const SlotRecord> slots);

/// E = (N++ + N-- - N+- - N-+) / (N++ + N-- + N+- + N-+). Zero outcomes are
/// excluded. Throws AnalysisError when no slot has two +-1 outcomes.
double correlator(const CoincidenceCounts& c);

/// Binomial standard error of the correlator estimate.
double correlator_sigma(const CoincidenceCounts& c);

/// Pairing order used by ChshResult and ChResult: (a,b), (a,b'), (a',b), (a',b').
inline constexpr std::array<SettingPair, 4> kChshOrder{{
    {SettingA::Alpha, SettingB::Beta},
    {SettingA::Alpha, SettingB::BetaPrime},
    {SettingA::AlphaPrime, SettingB::Beta},
    {SettingA::AlphaPrime, SettingB::BetaPrime},
}};

struct ChshResult {
    std::array<double, 4> E{};
    /// S = |E(a,b) - E(a,b')| + |E(a',b) + E(a',b')|
    double S = 0.0;
    double sigma = 0.0;
    std::array<CoincidenceCounts, 4> counts{};
};

/// Each correlator is estimated on its own pairing's slots. Throws
/// AnalysisError if a pairing is missing.
ChshResult chsh(const CountsByPairing& counts);
ChshResult chsh(std::span<const SlotRecord> slots);

/// One-detector (+1 only) estimator with every term a per-pairing frequency:
/// J = p(a,b) + p(a,b') + p(a',b) - p(a',b') - p(a) - p(b).
struct ChResult {
    double J = 0.0;
    double p_ab = 0.0;
    double p_ab_prime = 0.0;
    double p_a_prime_b = 0.0;
    double p_a_prime_b_prime = 0.0;
    /// +1 frequency of A over every slot measured at alpha.
    double p_a = 0.0;
    /// +1 frequency of B over every slot measured at beta.
    double p_b = 0.0;
};

ChResult ch(std::span<const SlotRecord> slots);

struct SinglesCounts {
    std::uint64_t plus = 0;
    std::uint64_t minus = 0;
    std::uint64_t zero = 0;

    /// Share of +1 among the station's detections.
    double plus_fraction() const;
    /// Binomial sigma of plus_fraction around 1/2.
    double sigma() const;
};

struct Singles {
    SinglesCounts a;
    SinglesCounts b;
    std::array<SinglesCounts, 2> a_by_setting{};  // alpha, alpha'
    std::array<SinglesCounts, 2> b_by_setting{};  // beta, beta'
};

Singles singles(std::span<const SlotRecord> slots);

struct CurvePoint {
    double delta = 0.0;
    double rate_on = 0.0;
    double rate_off = 0.0;

    friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

/// N++ / n_slots of one run, streamed without storing the log.
double plus_plus_rate(const RunConfig& config);

/// Configuration of one scan point: alpha from `base`, beta = alpha - delta,
/// a fixed (alpha, beta) schedule and a seed derived from the base seed.
RunConfig scan_point_config(const RunConfig& base, double delta, std::size_t index, bool contextual);

/// For every delta runs the engine with the contextual collapse on and off.
std::vector<CurvePoint> curve_scan(const RunConfig& base, std::span<const double> deltas);
std::vector<CurvePoint> curve_scan_serial(const RunConfig& base, std::span<const double> deltas);

}  // namespace wqm
