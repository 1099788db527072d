#include "wqm/core_model.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <stdexcept>

using namespace wqm;

TEST_SUITE("core_model") {

TEST_CASE("canonical angles stay in [0, pi)")
{
    CHECK(canonical_angle(0.0) == 0.0);
    CHECK(canonical_angle(kPi) == doctest::Approx(0.0));
    CHECK(canonical_angle(-kPi / 4) == doctest::Approx(3 * kPi / 4));
    CHECK(canonical_angle(5 * kPi / 2) == doctest::Approx(kPi / 2));
    CHECK(canonical_angle(-1e-18) < kPi);
    CHECK(PolarizationVector(1.0, -kPi / 8).angle() == doctest::Approx(7 * kPi / 8));
}

TEST_CASE("polarization vector rejects invalid values")
{
    CHECK_THROWS_AS(PolarizationVector(-0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(PolarizationVector(NAN, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(PolarizationVector(1.0, INFINITY), std::invalid_argument);
}

TEST_CASE("orthogonal gate axis wraps")
{
    CHECK(AnalyzerAxis(0.0).orthogonal().angle() == doctest::Approx(kPi / 2));
    CHECK(AnalyzerAxis(3 * kPi / 4).orthogonal().angle() == doctest::Approx(kPi / 4));
}

TEST_CASE("projection examples")
{
    const auto parallel = project({1.0, 0.0}, AnalyzerAxis(0.0));
    CHECK(parallel.modulus() == doctest::Approx(1.0));
    CHECK(parallel.angle() == 0.0);

    const auto crossed = project({1.0, 0.0}, AnalyzerAxis(kPi / 2));
    CHECK(crossed.modulus() == doctest::Approx(0.0));
    CHECK(crossed.angle() == doctest::Approx(kPi / 2));

    const auto third = project({2.0, kPi / 3}, AnalyzerAxis(0.0));
    CHECK(third.modulus() == doctest::Approx(1.0));
    CHECK(third.angle() == 0.0);
}

TEST_CASE("projection properties over a grid")
{
    for (int i = 0; i < 40; ++i) {
        for (int j = 0; j < 40; ++j) {
            const PolarizationVector v(0.25 + 0.05 * i, i * 0.173);
            const AnalyzerAxis a(j * 0.0911), b(j * 0.0911 + 0.4);
            const auto pa = project(v, a);
            // idempotence
            const auto paa = project(pa, a);
            CHECK(paa.modulus() == doctest::Approx(pa.modulus()));
            CHECK(paa.angle() == pa.angle());
            // energy split between a gate and its orthogonal companion
            const double split = pa.energy() + project(v, a.orthogonal()).energy();
            CHECK(split == doctest::Approx(v.energy()));
            // composition order matters unless an intermediate modulus vanishes
            const auto ab = project(pa, b);
            const auto ba = project(project(v, b), a);
            if (ab.modulus() > 1e-9 && ba.modulus() > 1e-9) CHECK(ab.angle() != doctest::Approx(ba.angle()));
        }
    }
}

TEST_CASE("gate step examples")
{
    const auto s1 = gate_step({0.9, 1.0}, 0.2);
    CHECK(s1.fired);
    CHECK(s1.memory.accumulator == doctest::Approx(0.1));
    CHECK(s1.peak == doctest::Approx(1.1));

    const auto s2 = gate_step({0.0, 1.0}, 0.0);
    CHECK_FALSE(s2.fired);
    CHECK(s2.memory.accumulator == 0.0);

    GateMemory m{0.0, 1.0};
    for (int k = 1; k <= 10; ++k) {
        const auto s = gate_step(m, 0.5);
        CHECK(s.fired == (k % 2 == 0));
        m = s.memory;
    }

    const auto big = gate_step({0.5, 1.0}, 2.0);
    CHECK(big.fired);
    CHECK(big.memory.accumulator == doctest::Approx(1.5));

    CHECK_THROWS_AS(gate_step({0.0, 1.0}, -1.0), std::invalid_argument);
}

TEST_CASE("firing count tracks accumulated energy")
{
    Rng rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        const double u = 0.5 + rng.uniform();
        GateMemory m{0.0, u};
        double total = 0.0;
        int fires = 0;
        for (int k = 0; k < 1000; ++k) {
            const double e = rng.uniform(0.0, u);
            total += e;
            const auto s = gate_step(m, e);
            fires += s.fired;
            m = s.memory;
            CHECK(m.accumulator < u);
        }
        const double q = total / u;
        CHECK(fires >= static_cast<int>(std::floor(q + 1e-9)));
        CHECK(fires <= static_cast<int>(std::ceil(q - 1e-9)));
    }
}

TEST_CASE("station measure examples")
{
    const GateMemory half{0.5, 1.0};
    const auto r = station_measure({1.0, 0.0}, AnalyzerAxis(0.0), half, half);
    CHECK(r.outcome == Outcome::Plus);
    REQUIRE(r.fired_axis);
    CHECK(r.fired_axis->angle() == 0.0);
    CHECK(r.plus.accumulator == doctest::Approx(0.5));
    CHECK(r.minus.accumulator == doctest::Approx(0.5));

    const GateMemory empty{0.0, 1.0};
    const auto z = station_measure({1.0, kPi / 4}, AnalyzerAxis(0.0), empty, empty);
    CHECK(z.outcome == Outcome::None);
    CHECK_FALSE(z.fired_axis);
    CHECK(z.plus.accumulator == doctest::Approx(0.5));
    CHECK(z.minus.accumulator == doctest::Approx(0.5));

    const auto m = station_measure({1.0, kPi / 2}, AnalyzerAxis(0.0), half, half);
    CHECK(m.outcome == Outcome::Minus);
    REQUIRE(m.fired_axis);
    CHECK(m.fired_axis->angle() == doctest::Approx(kPi / 2));
}

TEST_CASE("both gates reaching the threshold fire only the fuller one")
{
    // 0.5 each into gates at 0.5 and 0.6: the -1 gate has the larger peak
    const auto r = station_measure({1.0, kPi / 4}, AnalyzerAxis(0.0), {0.5, 1.0}, {0.6, 1.0});
    CHECK(r.outcome == Outcome::Minus);
    CHECK(r.minus.accumulator == doctest::Approx(0.1));
    CHECK(r.plus.accumulator == doctest::Approx(1.0));

    const auto tie = station_measure({1.0, kPi / 4}, AnalyzerAxis(0.0), {0.5, 1.0}, {0.5, 1.0});
    CHECK(tie.outcome == Outcome::Plus);
    CHECK(tie.plus.accumulator == doctest::Approx(0.0));
    CHECK(tie.minus.accumulator == doctest::Approx(1.0));
    // the held charge fires on the next step
    const auto next = station_measure({0.0, 0.0}, AnalyzerAxis(0.0), tie.plus, tie.minus);
    CHECK(next.outcome == Outcome::Minus);
}

TEST_CASE("unpolarized stream gives equal +1 and -1 firing")
{
    Rng rng(7);
    PairSourceConfig src;
    for (double analyzer : {0.0, 0.3, kPi / 4, 1.2}) {
        GateMemory p{0.5, 1.0}, m{0.5, 1.0};
        int plus = 0, minus = 0;
        const int n = 100000;
        for (int k = 0; k < n; ++k) {
            const auto r = station_measure(emit_pair(src, 1.0, rng).first, AnalyzerAxis(analyzer), p, m);
            p = r.plus;
            m = r.minus;
            plus += r.outcome == Outcome::Plus;
            minus += r.outcome == Outcome::Minus;
        }
        const double frac = static_cast<double>(plus) / (plus + minus);
        CHECK(std::abs(frac - 0.5) < 4 * 0.5 / std::sqrt(plus + minus));
    }
}

TEST_CASE("emitted pairs are equal and reproducible")
{
    PairSourceConfig src;
    src.seed = 99;
    Rng r1(src.seed), r2(src.seed);
    for (int k = 0; k < 1000; ++k) {
        const auto [x, y] = emit_pair(src, 1.0, r1);
        CHECK(x == y);
        CHECK(x.modulus() == doctest::Approx(1.0));
        CHECK(emit_pair(src, 1.0, r2) == std::pair{x, y});
    }

    PairSourceConfig fixed;
    fixed.angle_law = {AngleLaw::Kind::Fixed, kPi / 3};
    fixed.modulus_law.lo = 2.0;
    Rng r3(1);
    const auto p = emit_pair(fixed, 1.0, r3);
    CHECK(p.first.angle() == doctest::Approx(kPi / 3));
    CHECK(p.first.modulus() == 2.0);

    PairSourceConfig uni;
    uni.modulus_law = {ModulusLaw::Kind::Uniform, 0.5, 1.5};
    Rng r4(5);
    for (int k = 0; k < 1000; ++k) {
        const double v = emit_pair(uni, 1.0, r4).first.modulus();
        CHECK(v >= 0.5);
        CHECK(v < 1.5);
    }
}

TEST_CASE("emitted angles are uniform on [0, pi)")
{
    // chi-square over 20 bins, 19 dof: mean 19, sd sqrt(38); 4 sd bound
    constexpr int kBins = 20;
    constexpr int kDraws = 100000;
    std::array<int, kBins> hist{};
    PairSourceConfig src;
    Rng rng(2024);
    for (int k = 0; k < kDraws; ++k) {
        const double a = emit_pair(src, 1.0, rng).first.angle();
        REQUIRE(a >= 0.0);
        REQUIRE(a < kPi);
        ++hist[static_cast<std::size_t>(a / kPi * kBins)];
    }
    const double expected = static_cast<double>(kDraws) / kBins;
    double chi2 = 0.0;
    for (int h : hist) chi2 += (h - expected) * (h - expected) / expected;
    CHECK(chi2 < 19 + 4 * std::sqrt(38.0));
}

TEST_CASE("derived seeds differ by tag and are stable")
{
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(1, 0) == derive_seed(1, 0));
    Rng a(3), b(3);
    for (int k = 0; k < 100; ++k) CHECK(a.next() == b.next());
}

}
