#include "wqm/io.hpp"

#include "wqm/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <system_error>

namespace wqm {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<std::string_view> lines_of(std::string_view text)
{
    auto lines = split(text, '\n');
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    for (auto& l : lines)
        if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    return lines;
}

std::optional<double> to_double(std::string_view s)
{
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

std::optional<std::uint64_t> to_u64(std::string_view s)
{
    s = trim(s);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

double require_double(std::string_view s, const std::string& what)
{
    const auto v = to_double(s);
    if (!v || !std::isfinite(*v)) throw ConfigError(what + ": expected a finite number, got '" + std::string(s) + "'");
    return *v;
}

std::string fixed6(double x)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, 6);
    return std::string(buf, r.ptr);
}

const char* label(SettingA s) { return s == SettingA::Alpha ? "alpha" : "alpha'"; }
const char* label(SettingB s) { return s == SettingB::Beta ? "beta" : "beta'"; }

const char* outcome_text(Outcome o)
{
    switch (o) {
    case Outcome::Plus: return "+1";
    case Outcome::Minus: return "-1";
    case Outcome::None: return "0";
    }
    return "0";
}

std::string pair_key(SettingPair p)
{
    std::string s = p.a == SettingA::Alpha ? "alpha" : "alpha_prime";
    s += p.b == SettingB::Beta ? "_beta" : "_beta_prime";
    return s;
}

SettingA parse_setting_a(std::string_view s)
{
    if (s == "alpha") return SettingA::Alpha;
    if (s == "alpha'") return SettingA::AlphaPrime;
    throw FormatError("unknown A setting label '" + std::string(s) + "'");
}

SettingB parse_setting_b(std::string_view s)
{
    if (s == "beta") return SettingB::Beta;
    if (s == "beta'") return SettingB::BetaPrime;
    throw FormatError("unknown B setting label '" + std::string(s) + "'");
}

Outcome parse_outcome(std::string_view s)
{
    if (s == "+1") return Outcome::Plus;
    if (s == "-1") return Outcome::Minus;
    if (s == "0") return Outcome::None;
    throw FormatError("outcome must be +1, -1 or 0, got '" + std::string(s) + "'");
}

bool parse_bool(std::string_view s)
{
    if (s == "true") return true;
    if (s == "false") return false;
    throw ConfigError("expected true or false, got '" + std::string(s) + "'");
}

std::string_view after_prefix(std::string_view s, std::string_view prefix)
{
    return s.substr(prefix.size());
}

SettingPair parse_fixed_pair(std::string_view s)
{
    const auto parts = split(s, ',');
    if (parts.size() != 2) throw ConfigError("schedule fixed:<a-label>,<b-label> expected");
    try {
        return {parse_setting_a(trim(parts[0])), parse_setting_b(trim(parts[1]))};
    } catch (const FormatError& e) {
        throw ConfigError(e.what());
    }
}

struct ScheduleSpec {
    SettingsSchedule::Kind kind = SettingsSchedule::Kind::Block;
    SettingPair fixed;
};

ScheduleSpec parse_schedule(std::string_view v)
{
    if (v == "block") return {SettingsSchedule::Kind::Block, {}};
    if (v == "random") return {SettingsSchedule::Kind::Random, {}};
    if (v.starts_with("fixed:")) return {SettingsSchedule::Kind::Fixed, parse_fixed_pair(after_prefix(v, "fixed:"))};
    throw ConfigError("schedule must be block, random or fixed:<a>,<b>; got '" + std::string(v) + "'");
}

RolePolicy parse_role_policy(std::string_view v)
{
    if (v == "a-master") return RolePolicy::master(Station::A);
    if (v == "b-master") return RolePolicy::master(Station::B);
    if (v == "switch:every") return RolePolicy::switch_every_slot();
    if (v.starts_with("switch:")) {
        std::vector<std::uint64_t> slots;
        for (auto p : split(after_prefix(v, "switch:"), ',')) {
            const auto k = to_u64(p);
            if (!k) throw ConfigError("switch slot list must hold positive integers; got '" + std::string(p) + "'");
            slots.push_back(*k);
        }
        return RolePolicy::switch_at(std::move(slots));
    }
    if (v.starts_with("geometry:")) {
        const auto parts = split(after_prefix(v, "geometry:"), ',');
        if (parts.size() < 3 || parts.size() > 5)
            throw ConfigError("geometry:<x_source>,<x_a>,<x_b>[,<speed>[,<t0>]] expected");
        StationGeometry g;
        g.x_source = require_double(parts[0], "geometry x_source");
        g.x_a = require_double(parts[1], "geometry x_a");
        g.x_b = require_double(parts[2], "geometry x_b");
        if (parts.size() > 3) g.speed = require_double(parts[3], "geometry speed");
        if (parts.size() > 4) g.t0 = require_double(parts[4], "geometry t0");
        return RolePolicy::from_geometry(g);
    }
    throw ConfigError("role_policy must be a-master, b-master, switch:every, switch:<slots> or geometry:...; got '" +
                      std::string(v) + "'");
}

AngleLaw parse_angle_law(std::string_view v)
{
    if (v == "uniform") return {};
    if (v.starts_with("fixed:")) return {AngleLaw::Kind::Fixed, parse_angle(after_prefix(v, "fixed:"))};
    throw ConfigError("source.angle_law must be uniform or fixed:<angle>; got '" + std::string(v) + "'");
}

ModulusLaw parse_modulus_law(std::string_view v)
{
    ModulusLaw m;
    if (v == "constant") return m;
    if (v.starts_with("constant:")) {
        m.lo = require_double(after_prefix(v, "constant:"), "source.modulus_law");
        return m;
    }
    if (v.starts_with("uniform:")) {
        const auto parts = split(after_prefix(v, "uniform:"), ',');
        if (parts.size() != 2) throw ConfigError("source.modulus_law uniform:<lo>,<hi> expected");
        m.kind = ModulusLaw::Kind::Uniform;
        m.lo = require_double(parts[0], "source.modulus_law lo");
        m.hi = require_double(parts[1], "source.modulus_law hi");
        return m;
    }
    throw ConfigError("source.modulus_law must be constant, constant:<V> or uniform:<lo>,<hi>; got '" +
                      std::string(v) + "'");
}

MemoryInit parse_memory_init(std::string_view v)
{
    if (v == "half") return MemoryInit::Half;
    if (v == "zero") return MemoryInit::Zero;
    if (v == "random") return MemoryInit::Random;
    throw ConfigError("memory_init must be half, zero or random; got '" + std::string(v) + "'");
}

std::string schedule_text(const SettingsSchedule& s)
{
    switch (s.kind()) {
    case SettingsSchedule::Kind::Block: return "block";
    case SettingsSchedule::Kind::Random: return "random";
    case SettingsSchedule::Kind::Fixed:
        return std::string("fixed:") + label(s[0].a) + "," + label(s[0].b);
    case SettingsSchedule::Kind::Custom: break;
    }
    throw ConfigError("custom schedules cannot be written to a config file");
}

std::string role_policy_text(const RolePolicy& p)
{
    switch (p.kind) {
    case RolePolicy::Kind::MasterA: return "a-master";
    case RolePolicy::Kind::MasterB: return "b-master";
    case RolePolicy::Kind::SwitchEverySlot: return "switch:every";
    case RolePolicy::Kind::SwitchAtSlots: {
        std::string s = "switch:";
        for (std::size_t i = 0; i < p.switch_slots.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(p.switch_slots[i]);
        }
        return s;
    }
    case RolePolicy::Kind::FromGeometry: {
        const auto& g = p.geometry;
        return "geometry:" + format_double(g.x_source) + "," + format_double(g.x_a) + "," + format_double(g.x_b) +
               "," + format_double(g.speed) + "," + format_double(g.t0);
    }
    }
    return "a-master";
}

std::string modulus_law_text(const ModulusLaw& m)
{
    if (m.kind == ModulusLaw::Kind::Uniform)
        return "uniform:" + format_double(m.lo.value_or(0.0)) + "," + format_double(m.hi);
    return m.lo ? "constant:" + format_double(*m.lo) : "constant";
}

const char* memory_init_text(MemoryInit m)
{
    switch (m) {
    case MemoryInit::Half: return "half";
    case MemoryInit::Zero: return "zero";
    case MemoryInit::Random: return "random";
    }
    return "half";
}

/// Seed tag of the random settings stream, distinct from the pair source and
/// the memory initialisation streams.
constexpr std::uint64_t kScheduleSeedTag = 2;

}  // namespace

std::string format_double(double x)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

double parse_angle(std::string_view text)
{
    const auto s = trim(text);
    if (s.empty()) throw ConfigError("empty angle");
    if (s.find("deg") != std::string_view::npos || s.find("\xC2\xB0") != std::string_view::npos ||
        s.back() == 'd' || s.back() == 'D')
        throw ConfigError("angle '" + std::string(s) + "' looks like degrees; angles are given in radians");

    const auto pi_pos = s.find("pi");
    if (pi_pos == std::string_view::npos) return require_double(s, "angle");

    // [sign][coef][*]pi[/den]
    std::string_view coef = trim(s.substr(0, pi_pos));
    std::string_view rest = trim(s.substr(pi_pos + 2));
    if (!coef.empty() && coef.back() == '*') coef = trim(coef.substr(0, coef.size() - 1));
    double c = 1.0;
    if (coef == "-") c = -1.0;
    else if (coef == "+" || coef.empty()) c = 1.0;
    else c = require_double(coef, "angle coefficient");
    double den = 1.0;
    if (!rest.empty()) {
        if (rest.front() != '/') throw ConfigError("malformed angle '" + std::string(s) + "'");
        den = require_double(rest.substr(1), "angle denominator");
        if (den == 0.0) throw ConfigError("angle denominator is zero in '" + std::string(s) + "'");
    }
    const double v = c * kPi / den;
    if (!std::isfinite(v)) throw ConfigError("angle '" + std::string(s) + "' is not finite");
    return v;
}

std::vector<double> parse_angle_list(std::string_view text)
{
    std::vector<double> out;
    for (auto p : split(text, ',')) out.push_back(parse_angle(p));
    return out;
}

RunConfig parse_config(std::string_view text)
{
    std::map<std::string, std::pair<std::string, std::size_t>> kv;
    static const std::set<std::string, std::less<>> known{
        "n_slots",  "alpha",     "alpha_prime", "beta",       "beta_prime",        "threshold_u",
        "seed",     "contextual", "schedule",   "role_policy", "source.angle_law", "source.modulus_law",
        "memory_init"};

    const auto lines = lines_of(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto line = lines[i];
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto where = "line " + std::to_string(i + 1);
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (!known.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
        if (kv.contains(key)) throw ConfigError(where + ": key '" + key + "' given twice");
        kv.emplace(key, std::pair{value, i + 1});
    }

    auto get = [&](const char* key) -> const std::string* {
        const auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second.first;
    };
    auto wrap = [&](const char* key, auto&& fn) {
        try {
            fn(*get(key));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(kv.at(key).second) + " (" + key + "): " + e.what());
        }
    };

    RunConfig c;
    if (!get("n_slots")) throw ConfigError("missing required key 'n_slots'");
    wrap("n_slots", [&](const std::string& v) {
        const auto n = to_u64(v);
        if (!n || *n == 0) throw ConfigError("n_slots must be a positive integer");
        c.n_slots = *n;
    });
    auto angle = [&](const char* key, double& dst) {
        if (get(key)) wrap(key, [&](const std::string& v) { dst = parse_angle(v); });
    };
    angle("alpha", c.angles.alpha);
    angle("alpha_prime", c.angles.alpha_prime);
    angle("beta", c.angles.beta);
    angle("beta_prime", c.angles.beta_prime);
    if (get("threshold_u"))
        wrap("threshold_u", [&](const std::string& v) { c.threshold = require_double(v, "threshold_u"); });
    if (get("seed"))
        wrap("seed", [&](const std::string& v) {
            const auto s = to_u64(v);
            if (!s) throw ConfigError("seed must be a non-negative integer");
            c.source.seed = *s;
        });
    if (get("contextual")) wrap("contextual", [&](const std::string& v) { c.contextual = parse_bool(v); });
    if (get("role_policy")) wrap("role_policy", [&](const std::string& v) { c.role_policy = parse_role_policy(v); });
    if (get("source.angle_law"))
        wrap("source.angle_law", [&](const std::string& v) { c.source.angle_law = parse_angle_law(v); });
    if (get("source.modulus_law"))
        wrap("source.modulus_law", [&](const std::string& v) { c.source.modulus_law = parse_modulus_law(v); });
    if (get("memory_init")) wrap("memory_init", [&](const std::string& v) { c.memory_init = parse_memory_init(v); });

    ScheduleSpec sched;
    if (get("schedule")) wrap("schedule", [&](const std::string& v) { sched = parse_schedule(v); });
    switch (sched.kind) {
    case SettingsSchedule::Kind::Block: c.schedule = SettingsSchedule::block(c.n_slots); break;
    case SettingsSchedule::Kind::Random:
        c.schedule = SettingsSchedule::random(c.n_slots, derive_seed(c.source.seed, kScheduleSeedTag));
        break;
    case SettingsSchedule::Kind::Fixed: c.schedule = SettingsSchedule::fixed(c.n_slots, sched.fixed); break;
    case SettingsSchedule::Kind::Custom: break;
    }

    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

std::string serialize_config(const RunConfig& c)
{
    std::string s;
    auto put = [&](const char* key, const std::string& value) {
        s += key;
        s += " = ";
        s += value;
        s += '\n';
    };
    put("n_slots", std::to_string(c.n_slots));
    put("alpha", format_double(c.angles.alpha));
    put("alpha_prime", format_double(c.angles.alpha_prime));
    put("beta", format_double(c.angles.beta));
    put("beta_prime", format_double(c.angles.beta_prime));
    put("threshold_u", format_double(c.threshold));
    put("seed", std::to_string(c.source.seed));
    put("contextual", c.contextual ? "true" : "false");
    put("schedule", schedule_text(c.schedule));
    put("role_policy", role_policy_text(c.role_policy));
    put("source.angle_law", c.source.angle_law.kind == AngleLaw::Kind::Uniform
                                ? "uniform"
                                : "fixed:" + format_double(c.source.angle_law.angle));
    put("source.modulus_law", modulus_law_text(c.source.modulus_law));
    put("memory_init", memory_init_text(c.memory_init));
    return s;
}

void write_timestamps(std::ostream& os, std::span<const SlotRecord> slots)
{
    os << kTimeStampHeader << '\n';
    for (const auto& r : slots)
        os << r.slot << '\t' << label(r.setting.a) << '\t' << label(r.setting.b) << '\t' << outcome_text(r.a)
           << '\t' << outcome_text(r.b) << '\n';
}

std::string format_timestamps(std::span<const SlotRecord> slots)
{
    std::string s;
    s.reserve(slots.size() * 24 + 16);
    s += kTimeStampHeader;
    s += '\n';
    for (const auto& r : slots) {
        s += std::to_string(r.slot);
        s += '\t';
        s += label(r.setting.a);
        s += '\t';
        s += label(r.setting.b);
        s += '\t';
        s += outcome_text(r.a);
        s += '\t';
        s += outcome_text(r.b);
        s += '\n';
    }
    return s;
}

std::vector<SlotRecord> parse_timestamps(std::string_view text)
{
    const auto lines = lines_of(text);
    if (lines.empty() || lines[0] != kTimeStampHeader)
        throw FormatError("time-stamp file must start with '" + std::string(kTimeStampHeader) + "'");
    std::vector<SlotRecord> out;
    out.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto where = "line " + std::to_string(i + 1) + ": ";
        const auto f = split(lines[i], '\t');
        if (f.size() != 5) throw FormatError(where + "expected 5 tab-separated fields, got " + std::to_string(f.size()));
        SlotRecord r;
        const auto slot = to_u64(f[0]);
        if (!slot || *slot == 0) throw FormatError(where + "slot must be a positive integer");
        if (!out.empty() && *slot <= out.back().slot) throw FormatError(where + "slots must be strictly increasing");
        r.slot = *slot;
        try {
            r.setting = {parse_setting_a(f[1]), parse_setting_b(f[2])};
            r.a = parse_outcome(f[3]);
            r.b = parse_outcome(f[4]);
        } catch (const FormatError& e) {
            throw FormatError(where + e.what());
        }
        out.push_back(r);
    }
    return out;
}

std::vector<SlotRecord> read_timestamps(std::istream& is)
{
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_timestamps(ss.str());
}

std::string format_trace(const RunConfig& config, const HvTrace& trace)
{
    std::string s(kTraceHeader);
    s += '\n';
    const auto config_text = serialize_config(config);
    for (auto line : lines_of(config_text)) {
        s += "@config ";
        s += line;
        s += '\n';
    }
    const auto& m = trace.memories;
    s += "@memory " + format_double(m.a_plus) + ' ' + format_double(m.a_minus) + ' ' + format_double(m.b_plus) +
         ' ' + format_double(m.b_minus) + '\n';
    for (std::size_t i = 0; i < trace.vectors.size(); ++i) {
        s += std::to_string(i + 1);
        s += '\t';
        s += format_double(trace.vectors[i].modulus());
        s += '\t';
        s += format_double(trace.vectors[i].angle());
        s += '\n';
    }
    return s;
}

TraceFile parse_trace(std::string_view text)
{
    const auto lines = lines_of(text);
    if (lines.empty() || lines[0] != kTraceHeader)
        throw FormatError("trace file must start with '" + std::string(kTraceHeader) + "'");
    std::string config_text;
    std::optional<InitialMemories> memories;
    TraceFile tf;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto line = lines[i];
        const auto where = "trace line " + std::to_string(i + 1) + ": ";
        if (line.starts_with("@config ")) {
            if (memories) throw FormatError(where + "@config after @memory");
            config_text += line.substr(8);
            config_text += '\n';
        } else if (line.starts_with("@memory ")) {
            if (memories) throw FormatError(where + "@memory given twice");
            const auto f = split(line.substr(8), ' ');
            if (f.size() != 4) throw FormatError(where + "@memory needs four values");
            std::array<double, 4> v{};
            for (std::size_t k = 0; k < 4; ++k) {
                const auto d = to_double(f[k]);
                if (!d || !std::isfinite(*d)) throw FormatError(where + "bad memory value");
                v[k] = *d;
            }
            memories = InitialMemories{v[0], v[1], v[2], v[3]};
        } else {
            if (!memories) throw FormatError(where + "vector rows must follow @memory");
            const auto f = split(line, '\t');
            if (f.size() != 3) throw FormatError(where + "expected slot, modulus, angle");
            const auto slot = to_u64(f[0]);
            if (!slot || *slot != tf.trace.vectors.size() + 1) throw FormatError(where + "slots must count up from 1");
            const auto mod = to_double(f[1]);
            const auto ang = to_double(f[2]);
            if (!mod || !ang) throw FormatError(where + "bad vector value");
            try {
                tf.trace.vectors.emplace_back(*mod, *ang);
            } catch (const std::invalid_argument& e) {
                throw FormatError(where + e.what());
            }
        }
    }
    if (!memories) throw FormatError("trace file has no @memory line");
    tf.trace.memories = *memories;
    try {
        tf.config = parse_config(config_text);
    } catch (const ConfigError& e) {
        throw FormatError(std::string("trace config: ") + e.what());
    }
    if (tf.trace.vectors.size() != tf.config.n_slots)
        throw FormatError("trace holds " + std::to_string(tf.trace.vectors.size()) + " vectors for " +
                          std::to_string(tf.config.n_slots) + " slots");
    return tf;
}

std::string format_summary(std::span<const SlotRecord> slots)
{
    std::string s(kSummaryHeader);
    s += '\n';
    auto put = [&](const std::string& key, const std::string& value) {
        s += key;
        s += " = ";
        s += value;
        s += '\n';
    };
    auto put_or_undefined = [&](const std::string& key, auto&& compute) {
        try {
            put(key, fixed6(compute()));
        } catch (const AnalysisError&) {
            put(key, "undefined");
        }
    };

    put("slots", std::to_string(slots.size()));
    const auto counts = count_coincidences_serial(slots);
    for (const auto& p : kChshOrder) {
        const auto it = counts.find(p);
        const CoincidenceCounts c = it == counts.end() ? CoincidenceCounts{} : it->second;
        const auto k = "pair." + pair_key(p);
        put(k + ".total", std::to_string(c.total));
        put(k + ".pp", std::to_string(c.pp));
        put(k + ".pm", std::to_string(c.pm));
        put(k + ".mp", std::to_string(c.mp));
        put(k + ".mm", std::to_string(c.mm));
        put(k + ".zero", std::to_string(c.zero));
        put_or_undefined("E." + pair_key(p), [&] {
            if (it == counts.end()) throw AnalysisError("missing");
            return correlator(c);
        });
    }

    std::optional<ChshResult> chsh_result;
    try {
        chsh_result = chsh(counts);
    } catch (const AnalysisError&) {
    }
    put("S", chsh_result ? fixed6(chsh_result->S) : "undefined");
    put("S.sigma", chsh_result ? fixed6(chsh_result->sigma) : "undefined");
    put_or_undefined("J", [&] { return ch(slots).J; });

    const auto sg = singles(slots);
    auto put_singles = [&](const std::string& key, const SinglesCounts& c) {
        put(key + ".plus", std::to_string(c.plus));
        put(key + ".minus", std::to_string(c.minus));
        put(key + ".zero", std::to_string(c.zero));
        put_or_undefined(key + ".plus_fraction", [&] { return c.plus_fraction(); });
    };
    put_singles("singles.a", sg.a);
    put_singles("singles.b", sg.b);
    return s;
}

std::string format_scan(std::span<const CurvePoint> points)
{
    std::string s(kScanHeader);
    s += "\ndelta\trate_contextual_on\trate_contextual_off\n";
    for (const auto& p : points) s += format_double(p.delta) + '\t' + fixed6(p.rate_on) + '\t' + fixed6(p.rate_off) + '\n';
    return s;
}

std::string format_diff(const LocalityDiff& diff)
{
    std::string s(kDiffHeader);
    s += "\nfixed_station = ";
    s += diff.fixed_station == Station::A ? "A" : "B";
    s += "\ndiffering_slots = " + std::to_string(diff.slots.size()) + '\n';
    for (auto k : diff.slots) s += std::to_string(k) + '\n';
    return s;
}

std::string format_condense(const CondenseResult& result)
{
    if (const auto* inf = std::get_if<Infeasible>(&result)) {
        std::string s = "INFEASIBLE\nwitness = " + inf->witness + '\n';
        s += "dropped_zero_slots = " + std::to_string(inf->dropped_zero_slots) + '\n';
        return s;
    }
    const auto& c = std::get<Condensed>(result);
    static constexpr const char* names[4] = {"a", "b", "a'", "b'"};
    std::string s = "CONDENSED\ncolumns = " + std::to_string(c.table.columns()) + '\n';
    for (std::size_t r = 0; r < 4; ++r) {
        s += names[r];
        for (auto v : c.table.rows[r]) s += v > 0 ? "\t+" : "\t-";
        s += '\n';
    }
    if (c.table.columns() > 0) {
        const auto chsh_b = verify_chsh_bound(c.table);
        const auto ch_b = verify_ch_bound(c.table);
        s += "S = " + fixed6(chsh_b.S) + '\n';
        s += "J = " + std::to_string(ch_b.J) + '\n';
    }
    s += "dropped_zero_slots = " + std::to_string(c.dropped_zero_slots) + '\n';
    return s;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot rename onto '" + path.string() + "': " + ec.message());
    }
}

}  // namespace wqm
