// Command-line front end: reproduces the purification study as CSV data
// (fidelity trajectories, F_min / F_infinity sweeps) and reports the gate
// noise threshold.
//
// Exit codes: 0 ok, 2 usage, 3 I/O failure, 4 threshold bracket invalid.

#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "entpur/entpur.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitBracket = 4;

std::string fmt10(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt10(*v) : "NA"; }

std::string iso_timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

/// Sink that writes to a file or stdout ("-"); failures map to exit 3.
struct Output {
    std::ofstream file;
    std::ostream* stream = nullptr;
    bool ok = true;

    explicit Output(const std::string& path) {
        if (path == "-") {
            stream = &std::cout;
            return;
        }
        file.open(path);
        if (!file) {
            std::cerr << "entpur: cannot open '" << path << "' for writing\n";
            ok = false;
            return;
        }
        stream = &file;
    }

    std::ostream& out() { return *stream; }

    bool finish() {
        stream->flush();
        return static_cast<bool>(*stream);
    }
};

void write_manifest(std::ostream& os, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& params) {
    os << "# entpur " << command << "\n";
    os << "# version: " << entpur::kVersion << "\n";
    for (const auto& [key, value] : params) os << "# " << key << ": " << value << "\n";
    os << "# generated: " << iso_timestamp() << "\n";
}

bool parse_colon_list(const std::string& text, std::vector<double>& out, std::size_t count) {
    std::stringstream ss(text);
    std::string part;
    out.clear();
    while (std::getline(ss, part, ':')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(part, &used));
            if (used != part.size()) return false;
        } catch (const std::exception&) {
            return false;
        }
    }
    return out.size() == count;
}

int run_trajectories(double p_gate, int n_states, int rounds, unsigned long long seed,
                     const std::string& out_path) {
    Output output(out_path);
    if (!output.ok) return kExitIo;

    write_manifest(output.out(), "trajectories",
                   {{"p_gate", fmt10(p_gate)},
                    {"states", std::to_string(n_states)},
                    {"rounds", std::to_string(rounds)},
                    {"seed", std::to_string(seed)},
                    {"rng", "mt19937_64, q = (draw >> 11) * 2^-53"}});
    output.out() << "state_index,round,fidelity\n";

    entpur::ProtocolConfig config;
    config.noise.p_gate = p_gate;
    config.max_rounds = rounds;
    config.convergence_tol = 1e-15;  // run all requested rounds

    std::mt19937_64 rng(seed);
    for (int i = 0; i < n_states; ++i) {
        const entpur::DensityMatrix rho0 = entpur::random_input_state(rng);
        const entpur::TrajectoryRecord record = entpur::iterate_trajectory(rho0, config);
        output.out() << i << ",0," << fmt10(record.input_fidelity) << "\n";
        for (std::size_t k = 0; k < record.fidelities.size(); ++k)
            output.out() << i << "," << (k + 1) << "," << fmt10(record.fidelities[k]) << "\n";
    }
    return output.finish() ? kExitOk : kExitIo;
}

int run_sweep(const std::string& grid, double f_tol, const std::string& out_path) {
    std::vector<double> parsed;
    if (!parse_colon_list(grid, parsed, 3)) {
        std::cerr << "entpur sweep: --grid expects start:stop:step\n";
        return kExitUsage;
    }
    const double start = parsed[0], stop = parsed[1], step = parsed[2];
    if (!(start >= 0.0 && start < stop && stop <= 0.2 && step > 0.0)) {
        std::cerr << "entpur sweep: need 0 <= start < stop <= 0.2 and step > 0\n";
        return kExitUsage;
    }

    std::vector<double> p_values;
    for (double p = start; p <= stop + 1e-9 * step; p += step) p_values.push_back(p);
    const std::vector<entpur::SweepRow> rows = entpur::sweep(p_values, f_tol);

    Output output(out_path);
    if (!output.ok) return kExitIo;
    write_manifest(output.out(), "sweep",
                   {{"grid", grid}, {"f_tol", fmt10(f_tol)}});
    output.out() << "p_gate,f_min,f_infty\n";
    for (const entpur::SweepRow& row : rows)
        output.out() << fmt10(row.p_gate) << "," << fmt_opt(row.f_min) << ","
                     << fmt_opt(row.f_infty) << "\n";
    return output.finish() ? kExitOk : kExitIo;
}

int run_threshold(const std::string& bracket, double p_tol, double f_tol,
                  const std::string& out_path) {
    std::vector<double> parsed;
    if (!parse_colon_list(bracket, parsed, 2)) {
        std::cerr << "entpur threshold: --bracket expects lo:hi\n";
        return kExitUsage;
    }
    const double p_lo = parsed[0], p_hi = parsed[1];
    if (!(p_lo >= 0.0 && p_lo < p_hi && p_hi <= 1.0) || !(p_tol > 0.0)) {
        std::cerr << "entpur threshold: need 0 <= lo < hi <= 1 and --p-tol > 0\n";
        return kExitUsage;
    }

    entpur::ThresholdReport report;
    try {
        report = entpur::find_threshold(p_lo, p_hi, p_tol, f_tol);
    } catch (const entpur::BracketError& e) {
        std::cerr << "entpur threshold: " << e.what() << "\n";
        return kExitBracket;
    }

    std::cout << "p_th = " << fmt10(report.p_th) << "\n";
    std::cout << "f_at_threshold = " << fmt10(report.f_at_threshold) << "\n";

    if (!out_path.empty()) {
        Output output(out_path);
        if (!output.ok) return kExitIo;
        write_manifest(output.out(), "threshold",
                       {{"bracket", bracket},
                        {"p_tol", fmt10(p_tol)},
                        {"f_tol", fmt10(f_tol)},
                        {"p_th", fmt10(report.p_th)},
                        {"f_at_threshold", fmt10(report.f_at_threshold)}});
        output.out() << "p_gate,f_min,f_infty\n";
        for (const entpur::SweepRow& row : report.rows)
            output.out() << fmt10(row.p_gate) << "," << fmt_opt(row.f_min) << ","
                         << fmt_opt(row.f_infty) << "\n";
        if (!output.finish()) return kExitIo;
    }
    return kExitOk;
}

int run_round(double f0, double p_gate) {
    entpur::ProtocolConfig config;
    config.noise.p_gate = p_gate;
    const entpur::RoundOutcome outcome =
        entpur::purification_round(entpur::werner_from_fidelity(f0), config);
    std::cout << "input_fidelity = " << fmt10(f0) << "\n";
    std::cout << "output_fidelity = " << fmt10(outcome.output_fidelity) << "\n";
    std::cout << "success_probability = " << fmt10(outcome.success_probability) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entanglement purification under depolarizing gate noise"};
    app.require_subcommand(1);

    double traj_p_gate = 0.0;
    int traj_states = 50;
    int traj_rounds = 20;
    unsigned long long traj_seed = 1;
    std::string traj_out = "-";
    CLI::App* traj = app.add_subcommand(
        "trajectories", "Fidelity trajectories of random input states (CSV)");
    traj->add_option("--p-gate", traj_p_gate, "gate error rate")
        ->check(CLI::Range(0.0, 1.0))->capture_default_str();
    traj->add_option("--states", traj_states, "number of random input states")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    traj->add_option("--rounds", traj_rounds, "purification rounds per state")
        ->check(CLI::PositiveNumber)->capture_default_str();
    traj->add_option("--seed", traj_seed, "random seed")->capture_default_str();
    traj->add_option("--out", traj_out, "output CSV path, '-' for stdout")
        ->capture_default_str();

    std::string sweep_grid = "0:0.1:0.01";
    double sweep_f_tol = 5e-4;
    std::string sweep_out = "-";
    CLI::App* swp = app.add_subcommand(
        "sweep", "F_min and F_infinity against gate error rate (CSV)");
    swp->add_option("--grid", sweep_grid, "error-rate grid start:stop:step")
        ->capture_default_str();
    swp->add_option("--f-tol", sweep_f_tol, "F_min bisection tolerance")
        ->capture_default_str();
    swp->add_option("--out", sweep_out, "output CSV path, '-' for stdout")
        ->capture_default_str();

    std::string th_bracket = "0:0.2";
    double th_p_tol = 2e-3;
    double th_f_tol = 5e-4;
    std::string th_out;
    CLI::App* th = app.add_subcommand(
        "threshold", "Locate the gate noise threshold by bisection");
    th->add_option("--bracket", th_bracket, "error-rate bracket lo:hi")
        ->capture_default_str();
    th->add_option("--p-tol", th_p_tol, "bisection tolerance on the error rate")
        ->capture_default_str();
    th->add_option("--f-tol", th_f_tol, "F_min bisection tolerance")
        ->capture_default_str();
    th->add_option("--out", th_out, "also write the sweep rows visited (CSV)");

    double round_f0 = 0.0;
    double round_p_gate = 0.0;
    CLI::App* rnd = app.add_subcommand(
        "round", "One purification round on a Werner input (debug probe)");
    rnd->add_option("--f0", round_f0, "input Werner fidelity")
        ->required()->check(CLI::Range(0.25, 1.0));
    rnd->add_option("--p-gate", round_p_gate, "gate error rate")
        ->check(CLI::Range(0.0, 1.0))->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*traj) return run_trajectories(traj_p_gate, traj_states, traj_rounds, traj_seed,
                                           traj_out);
        if (*swp) return run_sweep(sweep_grid, sweep_f_tol, sweep_out);
        if (*th) return run_threshold(th_bracket, th_p_tol, th_f_tol, th_out);
        if (*rnd) return run_round(round_f0, round_p_gate);
    } catch (const entpur::DomainError& e) {
        std::cerr << "entpur: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "entpur: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}
