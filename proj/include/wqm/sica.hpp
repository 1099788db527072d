#pragma once

// Outcome tables with empty boxes, condensation by legitimate reordering, and
// executable checks of the CHSH / CH arithmetic bounds on full tables.
//
// A legitimate reordering permutes the columns of each setting-pair block,
// moving the two simultaneous outcomes together. A table condenses when the
// blocks can be reordered so that every station's series is the same under
// both remote settings. That holds exactly when some multiset of 4-tuples
// (a, b, a', b') reproduces all four observed pair-count matrices, which is
// what feasibility_by_counts decides.

#include "wqm/sim_engine.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace wqm {

/// Empty marks a measurement that was never performed; Zero a performed
/// measurement in which no detector fired.
enum class Cell : std::int8_t { Minus = -1, Zero = 0, Plus = 1, Empty = 2 };

/// Row order of both table types.
enum class Row : std::uint8_t { A = 0, B = 1, APrime = 2, BPrime = 3 };

struct OutcomeTable {
    std::array<std::vector<Cell>, 4> rows;

    std::size_t columns() const noexcept { return rows[0].size(); }
    std::vector<Cell>& operator[](Row r) { return rows[static_cast<std::size_t>(r)]; }
    const std::vector<Cell>& operator[](Row r) const { return rows[static_cast<std::size_t>(r)]; }

    /// Throws FormatError unless every column holds exactly one of {a, a'}
    /// and one of {b, b'}.
    void validate() const;

    friend bool operator==(const OutcomeTable&, const OutcomeTable&) = default;
};

/// A table without empty boxes; every cell is +1 or -1 (stored as int8).
struct CondensedTable {
    std::array<std::vector<std::int8_t>, 4> rows;

    std::size_t columns() const noexcept { return rows[0].size(); }
    std::vector<std::int8_t>& operator[](Row r) { return rows[static_cast<std::size_t>(r)]; }
    const std::vector<std::int8_t>& operator[](Row r) const { return rows[static_cast<std::size_t>(r)]; }

    friend bool operator==(const CondensedTable&, const CondensedTable&) = default;
};

/// counts[k][x][y] for pairing kChshOrder[k]; x is the A-side outcome, y the
/// B-side one, index 0 meaning +1 and 1 meaning -1.
struct PairCountMatrix {
    std::array<std::array<std::array<std::uint64_t, 2>, 2>, 4> counts{};

    std::uint64_t total(std::size_t k) const noexcept;

    friend bool operator==(const PairCountMatrix&, const PairCountMatrix&) = default;
};

/// Joint counts over (a, b, a', b'); index = 8a + 4b + 2a' + b' with 0 for +1
/// and 1 for -1.
using JointCounts = std::array<std::uint64_t, 16>;

inline constexpr std::size_t joint_index(int a, int b, int a_prime, int b_prime) noexcept
{
    auto bit = [](int v) { return v > 0 ? 0u : 1u; };
    return 8 * bit(a) + 4 * bit(b) + 2 * bit(a_prime) + bit(b_prime);
}

/// Lays a block-schedule series out as a four-row table. Throws FormatError
/// for any other schedule.
OutcomeTable build_table(std::span<const SlotRecord> slots);

struct TableCounts {
    PairCountMatrix counts;
    /// Columns holding a 0 outcome; they carry no +-1 product and are skipped.
    std::uint64_t dropped_zero_slots = 0;
};

TableCounts pair_counts(const OutcomeTable& table);

struct Feasibility {
    bool feasible = false;
    std::optional<JointCounts> joint;
    /// Empty when feasible; otherwise the first violated margin condition.
    std::string witness;
};

/// Exact integer decision. Throws AnalysisError if the four pairings do not
/// have the same number of columns.
Feasibility feasibility_by_counts(const PairCountMatrix& counts);

/// Pair-count matrices implied by a joint.
PairCountMatrix margins_of(const JointCounts& joint);

/// One column per unit of count, in joint index order.
CondensedTable table_from_joint(const JointCounts& joint);

/// For each pairing (kChshOrder), the original table columns in the order
/// they take after reordering; entry i lines up with condensed column i.
struct Reordering {
    std::array<std::vector<std::size_t>, 4> columns;
};

struct Condensed {
    CondensedTable table;
    Reordering reordering;
    std::uint64_t dropped_zero_slots = 0;
};

struct Infeasible {
    std::string witness;
    std::uint64_t dropped_zero_slots = 0;
};

using CondenseResult = std::variant<Condensed, Infeasible>;

CondenseResult condense(const OutcomeTable& table);

/// Raised by the bound verifiers. Reaching it means a defect, since the
/// bounds hold for every +-1 table.
class BoundViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct ChshBound {
    double S = 0.0;
    std::int64_t sum_ab = 0;
    std::int64_t sum_ab_prime = 0;
    std::int64_t sum_a_prime_b = 0;
    std::int64_t sum_a_prime_b_prime = 0;
};

/// S from the shared-index sums, with the per-column certificate
/// |b - b'| + |b + b'| = 2 checked on every column.
ChshBound verify_chsh_bound(const CondensedTable& table);

/// T = a(b + b') + a'(b - b') - a - b for 0/1 outcomes.
int ch_term(int a, int a_prime, int b, int b_prime) noexcept;

struct ChBound {
    std::int64_t J = 0;
    std::vector<int> terms;
};

/// Re-encodes the table to {0,1} (+1 -> 1, -1 -> 0) and checks T_i <= 0 per column.
ChBound verify_ch_bound(const CondensedTable& table);

struct LocalityDiff {
    /// The station whose settings are identical in both runs.
    Station fixed_station = Station::B;
    /// Slots where that station's outcome differs between the runs.
    std::vector<std::uint64_t> slots;
};

/// Both logs must come from the same hidden-variable trace. If neither
/// station's settings changed, both stations are compared and B is reported.
LocalityDiff sica_locality_diff(const RunLog& original, const RunLog& replay);

}  // namespace wqm
