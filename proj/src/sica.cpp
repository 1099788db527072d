#include "wqm/sica.hpp"

#include "wqm/errors.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <limits>
#include <sstream>

namespace wqm {

namespace {

constexpr std::array<const char*, 4> kPairingLabel{
    "(alpha,beta)", "(alpha,beta')", "(alpha',beta)", "(alpha',beta')"};
constexpr std::array<const char*, 4> kCorrelatorLabel{
    "E(alpha,beta)", "E(alpha,beta')", "E(alpha',beta)", "E(alpha',beta')"};

// Rows (A side, B side) of each pairing in kChshOrder.
constexpr std::array<std::pair<Row, Row>, 4> kPairingRows{{
    {Row::A, Row::B},
    {Row::A, Row::BPrime},
    {Row::APrime, Row::B},
    {Row::APrime, Row::BPrime},
}};

std::size_t outcome_index(Cell c) { return c == Cell::Plus ? 0 : 1; }

Cell to_cell(Outcome o)
{
    switch (o) {
    case Outcome::Plus: return Cell::Plus;
    case Outcome::Minus: return Cell::Minus;
    case Outcome::None: return Cell::Zero;
    }
    return Cell::Zero;
}

// Pairing (kChshOrder index) of a validated table column.
std::size_t column_pairing(const OutcomeTable& t, std::size_t col)
{
    const bool a = t[Row::A][col] != Cell::Empty;
    const bool b = t[Row::B][col] != Cell::Empty;
    return (a ? 0 : 2) + (b ? 0 : 1);
}

using I64 = std::int64_t;

struct Interval {
    I64 lo = 0;
    I64 hi = -1;
    bool empty() const { return lo > hi; }
};

// Cells of a 2x2x2 table n[i][j][k] whose three 2-way margins are fixed:
// x[i][k] over (i,k), p[i][j] over (i,j), q[k][j] over (k,j). One free
// parameter s = n[0][0][0]; each cell is c + coef * s.
struct ThreeWay {
    std::array<I64, 8> c{};
    std::array<I64, 8> coef{};

    static std::size_t at(int i, int j, int k) { return static_cast<std::size_t>(4 * i + 2 * j + k); }

    I64 cell(int i, int j, int k, I64 s) const { return c[at(i, j, k)] + coef[at(i, j, k)] * s; }

    Interval range() const
    {
        Interval r{0, std::numeric_limits<I64>::max()};
        for (std::size_t n = 0; n < 8; ++n) {
            if (coef[n] > 0) r.lo = std::max(r.lo, -c[n]);
            else r.hi = std::min(r.hi, c[n]);
        }
        return r;
    }
};

using M2 = std::array<std::array<I64, 2>, 2>;

ThreeWay solve_three_way(const M2& x, const M2& p, const M2& q)
{
    ThreeWay t;
    auto set = [&](int i, int j, int k, I64 c, I64 coef) {
        t.c[ThreeWay::at(i, j, k)] = c;
        t.coef[ThreeWay::at(i, j, k)] = coef;
    };
    set(0, 0, 0, 0, 1);
    set(0, 0, 1, p[0][0], -1);
    set(0, 1, 0, x[0][0], -1);
    set(0, 1, 1, x[0][1] - p[0][0], 1);
    set(1, 0, 0, q[0][0], -1);
    set(1, 0, 1, q[1][0] - p[0][0], 1);
    set(1, 1, 0, x[1][0] - q[0][0], 1);
    set(1, 1, 1, x[1][1] - q[1][0] + p[0][0], -1);
    return t;
}

M2 as_signed(const std::array<std::array<std::uint64_t, 2>, 2>& m)
{
    M2 out{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out[i][j] = static_cast<I64>(m[i][j]);
    return out;
}

std::string fmt_count_mismatch(const char* series, const char* under1, I64 n1, const char* under2, I64 n2)
{
    std::ostringstream os;
    os << "single margin of " << series << " differs: " << n1 << " x (+1) under " << under1 << " but " << n2
       << " x (+1) under " << under2;
    return os.str();
}

std::string chsh_witness(const PairCountMatrix& counts)
{
    const I64 m = static_cast<I64>(counts.total(0));
    std::array<I64, 4> d{};
    for (std::size_t k = 0; k < 4; ++k) {
        const auto& c = counts.counts[k];
        d[k] = static_cast<I64>(c[0][0] + c[1][1]) - static_cast<I64>(c[0][1] + c[1][0]);
    }
    for (std::size_t neg = 0; neg < 4; ++neg) {
        I64 sum = 0;
        for (std::size_t k = 0; k < 4; ++k) sum += k == neg ? -d[k] : d[k];
        if (std::abs(sum) > 2 * m) {
            std::ostringstream os;
            os << "M*[";
            for (std::size_t k = 0; k < 4; ++k) {
                if (k > 0) os << (k == neg ? " - " : " + ");
                else if (k == neg) os << "-";
                os << kCorrelatorLabel[k];
            }
            os << "] = " << sum << " but |.| <= 2M = " << 2 * m << " for any reorderable table";
            return os.str();
        }
    }
    return {};
}

}  // namespace

void OutcomeTable::validate() const
{
    const std::size_t n = rows[0].size();
    for (const auto& r : rows)
        if (r.size() != n) throw FormatError("outcome table rows have different lengths");
    for (std::size_t col = 0; col < n; ++col) {
        const bool a = rows[0][col] != Cell::Empty;
        const bool ap = rows[2][col] != Cell::Empty;
        const bool b = rows[1][col] != Cell::Empty;
        const bool bp = rows[3][col] != Cell::Empty;
        if (a == ap || b == bp)
            throw FormatError("outcome table column " + std::to_string(col + 1) +
                              " must hold exactly one of a/a' and one of b/b'");
    }
}

std::uint64_t PairCountMatrix::total(std::size_t k) const noexcept
{
    const auto& c = counts[k];
    return c[0][0] + c[0][1] + c[1][0] + c[1][1];
}

OutcomeTable build_table(std::span<const SlotRecord> slots)
{
    std::vector<SettingPair> settings(slots.size());
    std::transform(slots.begin(), slots.end(), settings.begin(), [](const SlotRecord& r) { return r.setting; });
    if (!is_block_sequence(settings))
        throw FormatError("table layout needs a block schedule: four contiguous blocks "
                          "(alpha,beta'), (alpha,beta), (alpha',beta), (alpha',beta')");

    OutcomeTable t;
    for (auto& r : t.rows) r.assign(slots.size(), Cell::Empty);
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const auto& s = slots[i];
        t[s.setting.a == SettingA::Alpha ? Row::A : Row::APrime][i] = to_cell(s.a);
        t[s.setting.b == SettingB::Beta ? Row::B : Row::BPrime][i] = to_cell(s.b);
    }
    return t;
}

TableCounts pair_counts(const OutcomeTable& table)
{
    table.validate();
    TableCounts out;
    for (std::size_t col = 0; col < table.columns(); ++col) {
        const std::size_t k = column_pairing(table, col);
        const Cell x = table[kPairingRows[k].first][col];
        const Cell y = table[kPairingRows[k].second][col];
        if (x == Cell::Zero || y == Cell::Zero) {
            ++out.dropped_zero_slots;
            continue;
        }
        ++out.counts.counts[k][outcome_index(x)][outcome_index(y)];
    }
    return out;
}

PairCountMatrix margins_of(const JointCounts& joint)
{
    PairCountMatrix m;
    for (std::size_t idx = 0; idx < 16; ++idx) {
        const std::size_t a = (idx >> 3) & 1, b = (idx >> 2) & 1, ap = (idx >> 1) & 1, bp = idx & 1;
        m.counts[0][a][b] += joint[idx];
        m.counts[1][a][bp] += joint[idx];
        m.counts[2][ap][b] += joint[idx];
        m.counts[3][ap][bp] += joint[idx];
    }
    return m;
}

Feasibility feasibility_by_counts(const PairCountMatrix& counts)
{
    const std::uint64_t m_total = counts.total(0);
    for (std::size_t k = 1; k < 4; ++k)
        if (counts.total(k) != m_total)
            throw AnalysisError("pair-count matrices have unequal totals: " + std::to_string(m_total) + " vs " +
                                std::to_string(counts.total(k)));

    const M2 ab = as_signed(counts.counts[0]);
    const M2 abp = as_signed(counts.counts[1]);
    const M2 apb = as_signed(counts.counts[2]);
    const M2 apbp = as_signed(counts.counts[3]);
    const I64 m = static_cast<I64>(m_total);

    auto row0 = [](const M2& x) { return x[0][0] + x[0][1]; };
    auto col0 = [](const M2& x) { return x[0][0] + x[1][0]; };

    Feasibility f;
    if (row0(ab) != row0(abp)) {
        f.witness = fmt_count_mismatch("a", "beta", row0(ab), "beta'", row0(abp));
        return f;
    }
    if (col0(ab) != col0(apb)) {
        f.witness = fmt_count_mismatch("b", "alpha", col0(ab), "alpha'", col0(apb));
        return f;
    }
    if (row0(apb) != row0(apbp)) {
        f.witness = fmt_count_mismatch("a'", "beta", row0(apb), "beta'", row0(apbp));
        return f;
    }
    if (col0(abp) != col0(apbp)) {
        f.witness = fmt_count_mismatch("b'", "alpha", col0(abp), "alpha'", col0(apbp));
        return f;
    }

    // Choose the (a, a') table X (one free count t), then the (a, b, a') and
    // (a, b', a') tables, each with one free count given X.
    const I64 ra = row0(ab), rap = row0(apb);
    const I64 t_lo = std::max<I64>(0, ra + rap - m);
    const I64 t_hi = std::min(ra, rap);
    for (I64 t = t_lo; t <= t_hi; ++t) {
        const M2 x{{{t, ra - t}, {rap - t, m - ra - rap + t}}};
        const ThreeWay with_b = solve_three_way(x, ab, apb);
        const ThreeWay with_bp = solve_three_way(x, abp, apbp);
        const Interval r1 = with_b.range();
        const Interval r2 = with_bp.range();
        if (r1.empty() || r2.empty()) continue;

        const I64 s1 = r1.lo, s2 = r2.lo;
        JointCounts joint{};
        for (int i = 0; i < 2; ++i) {
            for (int k = 0; k < 2; ++k) {
                // couple b and b' inside each (a, a') cell: north-west corner rule
                const I64 r_b0 = with_b.cell(i, 0, k, s1), r_b1 = with_b.cell(i, 1, k, s1);
                const I64 c_bp0 = with_bp.cell(i, 0, k, s2);
                const I64 z00 = std::min(r_b0, c_bp0);
                const I64 z01 = r_b0 - z00;
                const I64 z10 = c_bp0 - z00;
                const I64 z11 = r_b1 - z10;
                const std::size_t base = static_cast<std::size_t>(8 * i + 2 * k);
                joint[base + 0] = static_cast<std::uint64_t>(z00);
                joint[base + 1] = static_cast<std::uint64_t>(z01);
                joint[base + 4] = static_cast<std::uint64_t>(z10);
                joint[base + 5] = static_cast<std::uint64_t>(z11);
            }
        }
        if (!(margins_of(joint) == counts))
            throw std::logic_error("feasibility search produced a joint with the wrong margins");
        f.feasible = true;
        f.joint = joint;
        return f;
    }

    f.witness = chsh_witness(counts);
    if (f.witness.empty()) f.witness = "no non-negative integer joint reproduces the four pair-count matrices";
    return f;
}

CondensedTable table_from_joint(const JointCounts& joint)
{
    CondensedTable t;
    for (std::size_t idx = 0; idx < 16; ++idx) {
        for (std::uint64_t n = 0; n < joint[idx]; ++n) {
            t[Row::A].push_back(((idx >> 3) & 1) ? -1 : 1);
            t[Row::B].push_back(((idx >> 2) & 1) ? -1 : 1);
            t[Row::APrime].push_back(((idx >> 1) & 1) ? -1 : 1);
            t[Row::BPrime].push_back((idx & 1) ? -1 : 1);
        }
    }
    return t;
}

CondenseResult condense(const OutcomeTable& table)
{
    const TableCounts tc = pair_counts(table);
    const std::uint64_t m = tc.counts.total(0);
    for (std::size_t k = 1; k < 4; ++k) {
        if (tc.counts.total(k) != m) {
            std::ostringstream os;
            os << "blocks have different lengths after dropping " << tc.dropped_zero_slots
               << " zero-outcome columns: " << kPairingLabel[0] << " has " << m << ", " << kPairingLabel[k]
               << " has " << tc.counts.total(k);
            return Infeasible{os.str(), tc.dropped_zero_slots};
        }
    }

    const Feasibility f = feasibility_by_counts(tc.counts);
    if (!f.feasible) return Infeasible{f.witness, tc.dropped_zero_slots};

    Condensed out;
    out.table = table_from_joint(*f.joint);
    out.dropped_zero_slots = tc.dropped_zero_slots;

    // queues of original columns per pairing and joint outcome pair
    std::array<std::array<std::deque<std::size_t>, 4>, 4> pool;
    for (std::size_t col = 0; col < table.columns(); ++col) {
        const std::size_t k = column_pairing(table, col);
        const Cell x = table[kPairingRows[k].first][col];
        const Cell y = table[kPairingRows[k].second][col];
        if (x == Cell::Zero || y == Cell::Zero) continue;
        pool[k][2 * outcome_index(x) + outcome_index(y)].push_back(col);
    }
    for (std::size_t k = 0; k < 4; ++k) {
        const auto& xs = out.table[kPairingRows[k].first];
        const auto& ys = out.table[kPairingRows[k].second];
        for (std::size_t i = 0; i < out.table.columns(); ++i) {
            auto& q = pool[k][2 * (xs[i] > 0 ? 0 : 1) + (ys[i] > 0 ? 0 : 1)];
            out.reordering.columns[k].push_back(q.front());
            q.pop_front();
        }
    }
    return out;
}

ChshBound verify_chsh_bound(const CondensedTable& table)
{
    const std::size_t n = table.columns();
    if (n == 0) throw AnalysisError("CHSH bound needs at least one column");
    ChshBound r;
    for (std::size_t i = 0; i < n; ++i) {
        const int a = table[Row::A][i], b = table[Row::B][i];
        const int ap = table[Row::APrime][i], bp = table[Row::BPrime][i];
        for (int v : {a, b, ap, bp})
            if (v != 1 && v != -1) throw FormatError("condensed table cells must be +1 or -1");
        if (std::abs(b - bp) + std::abs(b + bp) != 2)
            throw BoundViolation("column certificate |b - b'| + |b + b'| = 2 failed at column " +
                                 std::to_string(i + 1));
        r.sum_ab += a * b;
        r.sum_ab_prime += a * bp;
        r.sum_a_prime_b += ap * b;
        r.sum_a_prime_b_prime += ap * bp;
    }
    const I64 total = std::abs(r.sum_ab - r.sum_ab_prime) + std::abs(r.sum_a_prime_b + r.sum_a_prime_b_prime);
    if (total > 2 * static_cast<I64>(n)) throw BoundViolation("CHSH sum exceeds 2N on a full table");
    r.S = static_cast<double>(total) / static_cast<double>(n);
    return r;
}

int ch_term(int a, int a_prime, int b, int b_prime) noexcept
{
    return a * (b + b_prime) + a_prime * (b - b_prime) - a - b;
}

ChBound verify_ch_bound(const CondensedTable& table)
{
    ChBound r;
    r.terms.reserve(table.columns());
    auto bit = [](std::int8_t v) {
        if (v != 1 && v != -1) throw FormatError("condensed table cells must be +1 or -1");
        return v > 0 ? 1 : 0;
    };
    for (std::size_t i = 0; i < table.columns(); ++i) {
        const int t = ch_term(bit(table[Row::A][i]), bit(table[Row::APrime][i]), bit(table[Row::B][i]),
                              bit(table[Row::BPrime][i]));
        if (t > 0) throw BoundViolation("CH term T > 0 at column " + std::to_string(i + 1));
        r.terms.push_back(t);
        r.J += t;
    }
    return r;
}

LocalityDiff sica_locality_diff(const RunLog& original, const RunLog& replay)
{
    if (!original.trace || !replay.trace || !(*original.trace == *replay.trace))
        throw ReplayError("logs are not replay-compatible: hidden-variable traces differ or are missing");
    if (original.slots.size() != replay.slots.size())
        throw ReplayError("logs are not replay-compatible: slot counts differ");

    bool fixed_a = true, fixed_b = true;
    for (std::size_t i = 0; i < original.slots.size(); ++i) {
        const auto& o = original.slots[i];
        const auto& r = replay.slots[i];
        if (o.slot != r.slot) throw ReplayError("logs are not replay-compatible: slot indices differ");
        if (original.config.angles.of(o.setting.a) != replay.config.angles.of(r.setting.a)) fixed_a = false;
        if (original.config.angles.of(o.setting.b) != replay.config.angles.of(r.setting.b)) fixed_b = false;
    }
    if (!fixed_a && !fixed_b)
        throw ReplayError("logs are not replay-compatible: settings changed at both stations");

    LocalityDiff d;
    d.fixed_station = fixed_b ? Station::B : Station::A;
    for (std::size_t i = 0; i < original.slots.size(); ++i) {
        const auto& o = original.slots[i];
        const auto& r = replay.slots[i];
        bool differs = false;
        if (fixed_a && fixed_b) differs = o.a != r.a || o.b != r.b;
        else if (fixed_b) differs = o.b != r.b;
        else differs = o.a != r.a;
        if (differs) d.slots.push_back(o.slot);
    }
    return d;
}

}  // namespace wqm
