#pragma once

// Real-space vector hidden variables, the non-Boolean projection, and the
// threshold-memory detection mechanism of a single polarizer station.

#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <utility>

namespace wqm {

inline constexpr double kPi = std::numbers::pi;

/// Reduces an angle to the canonical polarization range [0, pi).
double canonical_angle(double radians) noexcept;

/// The hidden variable carried by a photon: a real vector orthogonal to the
/// propagation direction. A polarization axis has no orientation, so the
/// angle is stored in [0, pi).
class PolarizationVector {
public:
    PolarizationVector() = default;
    PolarizationVector(double modulus, double angle);

    double modulus() const noexcept { return modulus_; }
    double angle() const noexcept { return angle_; }
    double energy() const noexcept { return modulus_ * modulus_; }

    friend bool operator==(const PolarizationVector&, const PolarizationVector&) = default;

private:
    double modulus_ = 0.0;
    double angle_ = 0.0;
};

class AnalyzerAxis {
public:
    AnalyzerAxis() = default;
    explicit AnalyzerAxis(double angle) : angle_(canonical_angle(angle)) {}

    double angle() const noexcept { return angle_; }

    /// Axis of the companion (-1) gate.
    AnalyzerAxis orthogonal() const noexcept { return AnalyzerAxis(angle_ + kPi / 2); }

    friend bool operator==(const AnalyzerAxis&, const AnalyzerAxis&) = default;

private:
    double angle_ = 0.0;
};

/// Projection of `vec` onto `axis`: modulus scaled by |cos(gamma)|, direction
/// taken from the axis.
PolarizationVector project(const PolarizationVector& vec, const AnalyzerAxis& axis) noexcept;

struct GateMemory {
    double accumulator = 0.0;
    double threshold = 1.0;

    friend bool operator==(const GateMemory&, const GateMemory&) = default;
};

struct GateStep {
    GateMemory memory;
    bool fired = false;
    /// Accumulator after adding the energy, before any subtraction.
    double peak = 0.0;
};

/// Adds `energy` to the memory; fires once and subtracts the threshold when
/// the sum reaches it. An energy larger than the threshold still fires once
/// and may leave a remainder of u or more.
GateStep gate_step(const GateMemory& memory, double energy);

enum class Outcome : std::int8_t { Minus = -1, None = 0, Plus = 1 };

inline int value(Outcome o) noexcept { return static_cast<int>(o); }

struct StationMeasurement {
    Outcome outcome = Outcome::None;
    std::optional<AnalyzerAxis> fired_axis;
    GateMemory plus;
    GateMemory minus;
};

/// Deposits the projected energies into the +1 gate (analyzer axis) and the
/// -1 gate (orthogonal axis). If both gates reach the threshold in the same
/// step only the one with the larger accumulator fires (ties go to +1); the
/// other keeps its charge and fires on a later step.
StationMeasurement station_measure(const PolarizationVector& vec, const AnalyzerAxis& analyzer,
                                   const GateMemory& plus, const GateMemory& minus);

/// Deterministic 64-bit generator. Doubles are built from the top 53 bits so
/// streams are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    bool coin() { return (engine_() >> 63) != 0; }

private:
    std::mt19937_64 engine_;
};

/// Derives an independent stream seed from a run seed and a stream tag.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept;

struct AngleLaw {
    enum class Kind { Uniform, Fixed };
    Kind kind = Kind::Uniform;
    double angle = 0.0;  // Fixed only

    friend bool operator==(const AngleLaw&, const AngleLaw&) = default;
};

struct ModulusLaw {
    enum class Kind { Constant, Uniform };
    Kind kind = Kind::Constant;
    /// Constant: lo is the modulus; unset means sqrt(threshold).
    std::optional<double> lo;
    double hi = 0.0;

    friend bool operator==(const ModulusLaw&, const ModulusLaw&) = default;
};

struct PairSourceConfig {
    AngleLaw angle_law;
    ModulusLaw modulus_law;
    std::uint64_t seed = 1;

    friend bool operator==(const PairSourceConfig&, const PairSourceConfig&) = default;
};

using EmittedPair = std::pair<PolarizationVector, PolarizationVector>;

/// Draws one entangled pair; both photons carry the same vector. `threshold`
/// resolves the default constant modulus (V^2 = u).
EmittedPair emit_pair(const PairSourceConfig& source, double threshold, Rng& rng);

}  // namespace wqm
