#pragma once

// Small hand-built outcome series shared by the unit and acceptance tests.

#include "wqm/sim_engine.hpp"

#include <vector>

namespace wqm::fixture {

inline SlotRecord rec(std::uint64_t slot, SettingA a, SettingB b, int oa, int ob)
{
    return {slot, {a, b}, static_cast<Outcome>(oa), static_cast<Outcome>(ob)};
}

constexpr auto kA = SettingA::Alpha;
constexpr auto kAp = SettingA::AlphaPrime;
constexpr auto kB = SettingB::Beta;
constexpr auto kBp = SettingB::BetaPrime;

/// Condensed four-column table: rows a, b, a', b'.
struct Columns {
    std::vector<int> a{-1, +1, -1, +1};
    std::vector<int> b{-1, +1, -1, +1};
    std::vector<int> ap{-1, +1, +1, -1};
    std::vector<int> bp{+1, -1, +1, -1};
};

/// Sixteen-slot block series (four slots per pairing) whose four blocks are
/// within-block permutations of the condensed columns above. Slots 1-4 hold
/// (alpha,beta'), 5-8 (alpha,beta), 9-12 (alpha',beta), 13-16 (alpha',beta').
inline std::vector<SlotRecord> condensable_series()
{
    const Columns c;
    std::vector<SlotRecord> s;
    std::uint64_t slot = 1;
    // each block visits the columns in a different order
    for (int i : {2, 0, 3, 1}) s.push_back(rec(slot++, kA, kBp, c.a[i], c.bp[i]));
    for (int i : {1, 3, 0, 2}) s.push_back(rec(slot++, kA, kB, c.a[i], c.b[i]));
    for (int i : {3, 2, 1, 0}) s.push_back(rec(slot++, kAp, kB, c.ap[i], c.b[i]));
    for (int i : {0, 1, 2, 3}) s.push_back(rec(slot++, kAp, kBp, c.ap[i], c.bp[i]));
    return s;
}

/// Two slots per pairing with E(a,b) = E(a',b) = E(a',b') = 1 and
/// E(a,b') = -1, so S = 4.
inline std::vector<SlotRecord> maximal_series()
{
    return {
        rec(1, kA, kBp, -1, +1), rec(2, kA, kBp, +1, -1),
        rec(3, kA, kB, -1, -1),  rec(4, kA, kB, +1, +1),
        rec(5, kAp, kB, -1, -1), rec(6, kAp, kB, +1, +1),
        rec(7, kAp, kBp, -1, -1), rec(8, kAp, kBp, +1, +1),
    };
}

}  // namespace wqm::fixture
