#include "wqm/cli.hpp"

#include "wqm/bell_stats.hpp"
#include "wqm/errors.hpp"
#include "wqm/io.hpp"
#include "wqm/sica.hpp"

#include <CLI11.hpp>

#include <ostream>
#include <sstream>

namespace wqm::cli {

namespace {

std::filesystem::path with_suffix(const std::filesystem::path& p, const char* suffix)
{
    auto out = p;
    out += suffix;
    return out;
}

template <class Fn>
int guarded(std::ostream& log, Fn&& fn)
{
    try {
        fn();
        return 0;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace

int cmd_simulate(const std::filesystem::path& config, const std::filesystem::path& out,
                 const std::filesystem::path& trace, std::ostream& log)
{
    return guarded(log, [&] {
        const auto cfg = load_config(config);
        const auto result = run(cfg);
        write_file_atomic(out, format_timestamps(result.slots));
        write_file_atomic(with_suffix(out, ".summary"), format_summary(result.slots));
        if (!trace.empty()) write_file_atomic(trace, format_trace(cfg, *result.trace));
    });
}

int cmd_scan(const std::filesystem::path& config, const std::string& deltas, const std::filesystem::path& out,
             std::ostream& log)
{
    return guarded(log, [&] {
        const auto cfg = load_config(config);
        const auto ds = parse_angle_list(deltas);
        write_file_atomic(out, format_scan(curve_scan(cfg, ds)));
    });
}

int cmd_chsh(const std::filesystem::path& tsv, std::ostream& out, std::ostream& log)
{
    return guarded(log, [&] { out << format_summary(parse_timestamps(read_file(tsv))); });
}

int cmd_replay(const std::filesystem::path& tsv, const std::filesystem::path& trace, const std::string& angles,
               const std::filesystem::path& out, std::ostream& log)
{
    return guarded(log, [&] {
        const auto slots = parse_timestamps(read_file(tsv));
        const auto tf = parse_trace(read_file(trace));
        const auto original = run_with_trace(tf.config, tf.trace);
        if (original.slots != slots)
            throw ReplayError("trace/log mismatch: the trace does not reproduce '" + tsv.string() + "'");

        const auto a = parse_angle_list(angles);
        if (a.size() != 4) throw ConfigError("--angles needs four values: alpha,alpha',beta,beta'");
        const Angles alt{a[0], a[1], a[2], a[3]};
        const auto replayed = counterfactual_replay(original, alt);
        write_file_atomic(out, format_timestamps(replayed.slots));
        write_file_atomic(with_suffix(out, ".diff"), format_diff(sica_locality_diff(original, replayed)));
    });
}

int cmd_condense(const std::filesystem::path& tsv, std::ostream& out, std::ostream& log)
{
    return guarded(log, [&] {
        const auto slots = parse_timestamps(read_file(tsv));
        out << format_condense(condense(build_table(slots)));
    });
}

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Event-by-event Bell-test simulator"};
    app.require_subcommand(1);

    std::string config, out_path, trace, deltas, angles, tsv;

    auto* sim = app.add_subcommand("simulate", "Run a simulation; writes <out>, <out>.summary and an optional trace");
    sim->add_option("--config", config, "Configuration file")->required();
    sim->add_option("--out", out_path, "Time-stamp file to write")->required();
    sim->add_option("--trace", trace, "Hidden-variable trace file to write");

    auto* scan = app.add_subcommand("scan", "Tabulate the (+1,+1) rate against alpha - beta");
    scan->add_option("--config", config, "Configuration file")->required();
    scan->add_option("--deltas", deltas, "Comma-separated angle differences in radians")->required();
    scan->add_option("--out", out_path, "Table to write")->required();

    auto* chsh_cmd = app.add_subcommand("chsh", "Print the summary statistics of a time-stamp file");
    chsh_cmd->add_option("tsv", tsv, "Time-stamp file")->required();

    auto* replay = app.add_subcommand("replay", "Replay a run on its recorded hidden variables with new angles");
    replay->add_option("tsv", tsv, "Original time-stamp file")->required();
    replay->add_option("--trace", trace, "Trace written by simulate")->required();
    replay->add_option("--angles", angles, "alpha,alpha',beta,beta' in radians")->required();
    replay->add_option("--out", out_path, "Replay time-stamp file; the diff goes to <out>.diff")->required();

    auto* cond = app.add_subcommand("condense", "Condense a block-schedule time-stamp file");
    cond->add_option("tsv", tsv, "Time-stamp file")->required();

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    if (sim->parsed()) return cmd_simulate(config, out_path, trace, err);
    if (scan->parsed()) return cmd_scan(config, deltas, out_path, err);
    if (chsh_cmd->parsed()) return cmd_chsh(tsv, out, err);
    if (replay->parsed()) return cmd_replay(tsv, trace, angles, out_path, err);
    return cmd_condense(tsv, out, err);
}

}  // namespace wqm::cli
