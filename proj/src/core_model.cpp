#include "wqm/core_model.hpp"

#include <cmath>
#include <stdexcept>

namespace wqm {

double canonical_angle(double radians) noexcept
{
    double r = std::fmod(radians, kPi);
    if (r < 0.0) r += kPi;
    // fmod of a tiny negative value can round up to exactly pi
    if (r >= kPi) r = 0.0;
    return r;
}

PolarizationVector::PolarizationVector(double modulus, double angle)
    : modulus_(modulus), angle_(canonical_angle(angle))
{
    if (!(modulus >= 0.0) || !std::isfinite(modulus))
        throw std::invalid_argument("polarization vector modulus must be finite and >= 0");
    if (!std::isfinite(angle))
        throw std::invalid_argument("polarization vector angle must be finite");
}

PolarizationVector project(const PolarizationVector& vec, const AnalyzerAxis& axis) noexcept
{
    // modulus stays finite and non-negative, so the constructor cannot throw
    return PolarizationVector(vec.modulus() * std::abs(std::cos(vec.angle() - axis.angle())),
                              axis.angle());
}

GateStep gate_step(const GateMemory& memory, double energy)
{
    if (!(energy >= 0.0))
        throw std::invalid_argument("gate energy must be >= 0");
    GateStep step;
    step.memory = memory;
    step.memory.accumulator += energy;
    step.peak = step.memory.accumulator;
    if (step.memory.accumulator >= memory.threshold) {
        step.fired = true;
        step.memory.accumulator -= memory.threshold;
    }
    return step;
}

StationMeasurement station_measure(const PolarizationVector& vec, const AnalyzerAxis& analyzer,
                                   const GateMemory& plus, const GateMemory& minus)
{
    const AnalyzerAxis minus_axis = analyzer.orthogonal();
    const GateStep p = gate_step(plus, project(vec, analyzer).energy());
    const GateStep m = gate_step(minus, project(vec, minus_axis).energy());

    StationMeasurement out;
    out.plus = p.memory;
    out.minus = m.memory;
    if (p.fired && (!m.fired || p.peak >= m.peak)) {
        out.outcome = Outcome::Plus;
        out.fired_axis = analyzer;
        // one detection per step: the losing gate keeps its charge
        if (m.fired) out.minus.accumulator = m.peak;
    } else if (m.fired) {
        out.outcome = Outcome::Minus;
        out.fired_axis = minus_axis;
        if (p.fired) out.plus.accumulator = p.peak;
    }
    return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept
{
    // splitmix64 finalizer over the combined value
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

EmittedPair emit_pair(const PairSourceConfig& source, double threshold, Rng& rng)
{
    double angle = 0.0;
    switch (source.angle_law.kind) {
    case AngleLaw::Kind::Uniform: angle = rng.uniform(0.0, kPi); break;
    case AngleLaw::Kind::Fixed: angle = source.angle_law.angle; break;
    }

    double modulus = 0.0;
    switch (source.modulus_law.kind) {
    case ModulusLaw::Kind::Constant:
        modulus = source.modulus_law.lo.value_or(std::sqrt(threshold));
        break;
    case ModulusLaw::Kind::Uniform:
        modulus = rng.uniform(source.modulus_law.lo.value_or(0.0), source.modulus_law.hi);
        break;
    }

    const PolarizationVector v(modulus, angle);
    return {v, v};
}

}  // namespace wqm
