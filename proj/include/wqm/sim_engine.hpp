#pragma once

// The run loop: pair emission, master/slave measurement with the contextual
// collapse, setting schedules, counterfactual replay and role assignment.

#include "wqm/core_model.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace wqm {

enum class Station : std::uint8_t { A, B };

enum class SettingA : std::uint8_t { Alpha, AlphaPrime };
enum class SettingB : std::uint8_t { Beta, BetaPrime };

struct SettingPair {
    SettingA a = SettingA::Alpha;
    SettingB b = SettingB::Beta;

    friend auto operator<=>(const SettingPair&, const SettingPair&) = default;
};

/// The four pairings in block-schedule order: (a,b'), (a,b), (a',b), (a',b').
inline constexpr std::array<SettingPair, 4> kBlockOrder{{
    {SettingA::Alpha, SettingB::BetaPrime},
    {SettingA::Alpha, SettingB::Beta},
    {SettingA::AlphaPrime, SettingB::Beta},
    {SettingA::AlphaPrime, SettingB::BetaPrime},
}};

struct Angles {
    double alpha = 0.0;
    double alpha_prime = kPi / 4;
    double beta = kPi / 8;
    double beta_prime = 3 * kPi / 8;

    double of(SettingA s) const noexcept { return s == SettingA::Alpha ? alpha : alpha_prime; }
    double of(SettingB s) const noexcept { return s == SettingB::Beta ? beta : beta_prime; }

    friend bool operator==(const Angles&, const Angles&) = default;
};

class SettingsSchedule {
public:
    enum class Kind { Block, Random, Fixed, Custom };

    SettingsSchedule() = default;

    /// Four contiguous quarters covering every pairing, in kBlockOrder.
    static SettingsSchedule block(std::size_t n_slots);
    /// Each station picks its setting by an independent fair coin per slot.
    static SettingsSchedule random(std::size_t n_slots, std::uint64_t seed);
    static SettingsSchedule fixed(std::size_t n_slots, SettingPair pair);
    static SettingsSchedule custom(std::vector<SettingPair> slots);

    Kind kind() const noexcept { return kind_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t size() const noexcept { return slots_.size(); }
    bool empty() const noexcept { return slots_.empty(); }
    const SettingPair& operator[](std::size_t i) const { return slots_[i]; }
    std::span<const SettingPair> slots() const noexcept { return slots_; }

    friend bool operator==(const SettingsSchedule&, const SettingsSchedule&) = default;

private:
    Kind kind_ = Kind::Custom;
    std::uint64_t seed_ = 0;
    std::vector<SettingPair> slots_;
};

/// Pairing of the 0-based slot `i` in an n-slot block schedule.
SettingPair block_pairing(std::size_t i, std::size_t n_slots) noexcept;

/// True when the slot sequence is four non-empty contiguous runs in kBlockOrder.
bool is_block_sequence(std::span<const SettingPair> slots);

/// Stations and source on a line; speed is the photon speed as a fraction of c
/// (c = 1 in the chosen units).
struct StationGeometry {
    double x_source = 0.0;
    double x_a = -1.0;
    double x_b = 1.0;
    double speed = 1.0;
    double t0 = 0.0;

    friend bool operator==(const StationGeometry&, const StationGeometry&) = default;
};

struct RoleAssignment {
    Station master = Station::A;
    /// Time the A-photon enters the collapsed region of the detection at B.
    double t_a = 0.0;
    /// Time the B-photon enters the collapsed region of the detection at A.
    double t_b = 0.0;
    double detect_a = 0.0;
    double detect_b = 0.0;
};

/// Light-cone role assignment: the station whose result reaches the other
/// photon first is master. Ties go to A.
RoleAssignment assign_roles(const StationGeometry& geom);

struct RolePolicy {
    enum class Kind { MasterA, MasterB, SwitchAtSlots, SwitchEverySlot, FromGeometry };
    Kind kind = Kind::MasterA;
    /// 1-based slots at which master and slave swap (SwitchAtSlots).
    std::vector<std::uint64_t> switch_slots;
    StationGeometry geometry;

    static RolePolicy master(Station s);
    static RolePolicy switch_at(std::vector<std::uint64_t> slots);
    static RolePolicy switch_every_slot();
    static RolePolicy from_geometry(const StationGeometry& g);

    friend bool operator==(const RolePolicy&, const RolePolicy&) = default;
};

/// Initial accumulator values of the four gates.
enum class MemoryInit {
    /// Every gate starts at u/2.
    Half,
    /// Every gate starts empty.
    Zero,
    /// Independent uniform draws on [0, u) from the run seed.
    Random,
};

struct RunConfig {
    std::uint64_t n_slots = 0;
    Angles angles;
    double threshold = 1.0;
    PairSourceConfig source;
    SettingsSchedule schedule;
    bool contextual = true;
    RolePolicy role_policy;
    MemoryInit memory_init = MemoryInit::Half;

    /// Throws ConfigError describing the first problem found.
    void validate() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct SlotRecord {
    std::uint64_t slot = 0;
    SettingPair setting;
    Outcome a = Outcome::None;
    Outcome b = Outcome::None;

    friend bool operator==(const SlotRecord&, const SlotRecord&) = default;
};

struct InitialMemories {
    double a_plus = 0.0;
    double a_minus = 0.0;
    double b_plus = 0.0;
    double b_minus = 0.0;

    friend bool operator==(const InitialMemories&, const InitialMemories&) = default;
};

/// Everything a replay needs besides the settings: the emitted vector of each
/// slot and the starting gate memories.
struct HvTrace {
    InitialMemories memories;
    std::vector<PolarizationVector> vectors;

    friend bool operator==(const HvTrace&, const HvTrace&) = default;
};

struct RunLog {
    RunConfig config;
    std::vector<SlotRecord> slots;
    std::optional<HvTrace> trace;

    friend bool operator==(const RunLog&, const RunLog&) = default;
};

using SlotSink = std::function<void(const SlotRecord&)>;

/// Streams slot records to `sink` without storing them. When `replay` is set
/// its vectors and memories are consumed instead of the generator; when
/// `record` is set the emitted stream is written into it.
void simulate(const RunConfig& config, const HvTrace* replay, HvTrace* record, const SlotSink& sink);

RunLog run(const RunConfig& config);

/// Runs `config` against a recorded trace instead of fresh draws.
RunLog run_with_trace(const RunConfig& config, const HvTrace& trace);

/// Re-runs the logged experiment on the same hidden variables and initial
/// memories with different angles (and optionally a different schedule).
RunLog counterfactual_replay(const RunLog& log, const Angles& alt_angles,
                             const std::optional<SettingsSchedule>& alt_schedule = std::nullopt);

/// Same loop as run(); requires a switching role policy.
RunLog switch_roles_midrun(const RunConfig& config);

/// The station that is master at 1-based `slot`. A holds the role before the
/// first flip; switch-every-slot flips at slot 1 as well.
Station master_at(const RolePolicy& policy, std::uint64_t slot);

}  // namespace wqm
