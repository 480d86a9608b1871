// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line driver: protocol runs, attack games, bound evaluation,
// parameter sweeps, and the brute-force verifier oracle.
//
// Exit codes: 0 success, 2 config/schema errors (message names the field),
// 1 any other failure.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qpufid/adversaries.hpp"
#include "qpufid/analysis.hpp"
#include "qpufid/protocol.hpp"
#include "qpufid/serialization.hpp"

namespace {

constexpr const char *kVersion = "0.1.0";

using qpufid::Json;

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::string mode = "sampled";
    int n = 0;
    int K = 0;
    int N = 0;
    int M = 0;
    int trials = 0;
    int threads = 0;
    int d = 0;
    std::uint64_t seed = 0;
    std::uint64_t transit_budget = 0;
    double tau = 0.0;
    double kappa = 0.5;
    double p = 0.5;
    double alpha = 0.75;
};

/// Registers the shared config options on a subcommand. Presence is checked
/// via count() after parsing, so defaults stay distinguishable.
void add_config_flags(CLI::App *cmd, CommonFlags &flags) {
    cmd->add_option("--config", flags.config_path, "JSON config file mirroring the run schema");
    cmd->add_option("--n", flags.n, "Security parameter: qubits per state");
    cmd->add_option("--K", flags.K, "Stored challenge-response pairs (defaults to N)");
    cmd->add_option("--N", flags.N, "Identification rounds");
    cmd->add_option("--M", flags.M, "Response copies per challenge (hrv)");
    cmd->add_option("--tau", flags.tau, "Trap-count tolerance (lrv)");
    cmd->add_option("--kappa", flags.kappa, "Expected 1-rate on trap positions (lrv)");
    cmd->add_option("--p", flags.p, "Valid-position fraction (lrv)");
    cmd->add_option("--mode", flags.mode, "Outcome sampling: exact or sampled");
    cmd->add_option("--seed", flags.seed, "Root seed (default: QPUFID_SEED env, then 0)");
    cmd->add_option("--transit-budget", flags.transit_budget,
                    "Adversary queries allowed while the device is in transit");
    cmd->add_option("--out", flags.out_dir, "Output directory (default: print to stdout only)");
}

std::uint64_t env_seed() {
    const char *env = std::getenv("QPUFID_SEED");
    if (env == nullptr) return 0;
    return std::strtoull(env, nullptr, 10);
}

qpufid::SampleMode parse_mode(const std::string &mode) {
    if (mode == "exact") return qpufid::SampleMode::exact;
    if (mode == "sampled") return qpufid::SampleMode::sampled;
    throw std::invalid_argument("config field 'mode' must be 'exact' or 'sampled'");
}

Json load_config_file(const std::string &path) {
    std::ifstream file(path);
    if (!file) throw std::invalid_argument("config file '" + path + "' cannot be opened");
    return Json::parse(file);
}

/// Effective config: defaults, then config file, then explicit CLI flags.
qpufid::ProtocolConfig build_config(CLI::App *cmd, const CommonFlags &flags) {
    qpufid::ProtocolConfig cfg;
    cfg.dim = qpufid::Dimension::from_qubits(3);
    cfg.database_size = 4;
    cfg.rounds = 4;
    cfg.copies = 1;
    cfg.seed = env_seed();

    bool k_given = false;
    if (cmd->count("--config") > 0) {
        const Json file = load_config_file(flags.config_path);
        cfg = qpufid::protocol_config_from_json(file);
        if (cfg.seed == 0 && !file.contains("seed")) cfg.seed = env_seed();
        k_given = file.contains("K");
    }
    if (cmd->count("--n") > 0) cfg.dim = qpufid::Dimension::from_qubits(flags.n);
    if (cmd->count("--K") > 0) {
        cfg.database_size = flags.K;
        k_given = true;
    }
    if (cmd->count("--N") > 0) cfg.rounds = flags.N;
    if (cmd->count("--M") > 0) cfg.copies = flags.M;
    if (cmd->count("--tau") > 0) cfg.tau = flags.tau;
    if (cmd->count("--kappa") > 0) cfg.kappa = flags.kappa;
    if (cmd->count("--p") > 0) cfg.valid_fraction = flags.p;
    if (cmd->count("--mode") > 0) cfg.mode = parse_mode(flags.mode);
    if (cmd->count("--seed") > 0) cfg.seed = flags.seed;
    if (cmd->count("--transit-budget") > 0) cfg.transit_budget = flags.transit_budget;
    if (!k_given) cfg.database_size = std::max(cfg.database_size, cfg.rounds);
    return cfg;
}

std::string joined_command(int argc, char **argv) {
    std::string cmd;
    for (int i = 0; i < argc; ++i) {
        if (i != 0) cmd.push_back(' ');
        cmd += argv[i];
    }
    return cmd;
}

class OutputSink {
  public:
    OutputSink(std::string out_dir, std::string command, Json config, std::uint64_t seed)
        : out_dir_(std::move(out_dir)), command_(std::move(command)), config_(std::move(config)),
          seed_(seed), start_(std::chrono::steady_clock::now()) {
        if (!out_dir_.empty()) std::filesystem::create_directories(out_dir_);
    }

    [[nodiscard]] bool enabled() const { return !out_dir_.empty(); }

    void write_text(const std::string &name, const std::string &content) {
        if (!enabled()) return;
        const auto path = std::filesystem::path(out_dir_) / name;
        std::ofstream file(path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
        file << content;
        outputs_.push_back(name);
    }

    void write_json(const std::string &name, const Json &value) {
        write_text(name, value.dump(2) + "\n");
    }

    /// Writes manifest.json listing every file produced by this command.
    void finish() {
        if (!enabled()) return;
        qpufid::RunManifest manifest;
        manifest.command = command_;
        manifest.config = config_;
        manifest.seed = seed_;
        manifest.version = kVersion;
        manifest.outputs = outputs_;
        manifest.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        const auto path = std::filesystem::path(out_dir_) / "manifest.json";
        std::ofstream file(path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
        file << qpufid::to_json(manifest).dump(2) << "\n";
    }

  private:
    std::string out_dir_;
    std::string command_;
    Json config_;
    std::uint64_t seed_;
    std::vector<std::string> outputs_;
    std::chrono::steady_clock::time_point start_;
};

std::string bits_to_string(std::uint32_t mask, int rounds) {
    std::string s(static_cast<std::size_t>(rounds), '0');
    for (int i = 0; i < rounds; ++i)
        if ((mask >> i) & 1u) s[static_cast<std::size_t>(i)] = '1';
    return s;
}

int cmd_run(CLI::App *cmd, const CommonFlags &flags, int trials, int transcript_count,
            const std::string &protocol, const std::string &command_line) {
    const qpufid::ProtocolKind kind = qpufid::protocol_from_name(protocol);
    const qpufid::ProtocolConfig cfg = build_config(cmd, flags);
    cfg.validate(kind);

    qpufid::AttackerSpec honest;
    qpufid::AttackGameOptions options;
    const qpufid::AttackGameRecord record =
        qpufid::run_attack_game(kind, honest, cfg, trials, options);

    Json summary = qpufid::to_json(record);
    summary["config"] = qpufid::to_json(cfg);

    // Replay the leading trials through the same substreams to persist
    // full transcripts; draws match the aggregate game exactly.
    Json transcripts = Json::array();
    const int replay = std::min(trials, transcript_count);
    if (replay > 0) {
        const qpufid::RngStream base(cfg.seed);
        qpufid::RngStream setup_rng = base.substream(0);
        if (kind == qpufid::ProtocolKind::lrv) {
            qpufid::LrvSession session = qpufid::lrv_setup(cfg, setup_rng);
            qpufid::HonestLrvProver prover(session.device, cfg.mode);
            for (int t = 0; t < replay; ++t) {
                qpufid::reset_database(session.database, cfg, kind);
                qpufid::RngStream rng = base.substream(static_cast<std::uint64_t>(t) + 1);
                transcripts.push_back(qpufid::to_json(qpufid::lrv_run(session, prover, rng)));
            }
        } else {
            qpufid::HrvSession session = qpufid::hrv_setup(kind, cfg, setup_rng);
            qpufid::HonestHrvProver prover(session.device);
            for (int t = 0; t < replay; ++t) {
                qpufid::reset_database(session.database, cfg, kind);
                qpufid::RngStream rng = base.substream(static_cast<std::uint64_t>(t) + 1);
                transcripts.push_back(qpufid::to_json(qpufid::hrv_run(session, prover, rng)));
            }
        }
    }

    std::cout << "protocol " << protocol << ": accept_rate " << record.empirical_rate << " ["
              << record.ci.low << ", " << record.ci.high << "] over " << trials << " trials\n";
    if (!std::isnan(record.analytic_bound))
        std::cout << "  " << record.bound_id << " = " << record.analytic_bound << "\n";

    OutputSink sink(flags.out_dir, command_line, qpufid::to_json(cfg), cfg.seed);
    sink.write_json("run_summary.json", summary);
    if (replay > 0) sink.write_json("transcripts.json", transcripts);
    sink.finish();
    return 0;
}

int cmd_attack(CLI::App *cmd, const CommonFlags &flags, int trials, const std::string &protocol,
               const std::string &attacker, const std::string &rule_name,
               const std::string &command_line) {
    const qpufid::ProtocolKind kind = qpufid::protocol_from_name(protocol);
    const qpufid::ProtocolConfig cfg = build_config(cmd, flags);

    qpufid::AttackerSpec spec;
    spec.kind = qpufid::attacker_from_name(attacker);
    spec.alpha = flags.alpha;
    spec.learn_queries = flags.d;
    if (rule_name == "accept-means-valid") {
        spec.rule = qpufid::TrapDecisionRule::accept_means_valid;
    } else if (rule_name == "always-valid") {
        spec.rule = qpufid::TrapDecisionRule::always_valid;
    } else if (rule_name == "coin-flip") {
        spec.rule = qpufid::TrapDecisionRule::coin_flip;
    } else {
        throw std::invalid_argument("field 'rule' must be accept-means-valid, always-valid, or "
                                    "coin-flip");
    }

    qpufid::AttackGameOptions options;
    options.threads = flags.threads > 0 ? static_cast<unsigned>(flags.threads) : 1;
    const qpufid::AttackGameRecord record = qpufid::run_attack_game(kind, spec, cfg, trials, options);

    std::cout << attacker << " vs " << protocol << ": rate " << record.empirical_rate << " ["
              << record.ci.low << ", " << record.ci.high << "] over " << trials << " trials\n";
    if (!std::isnan(record.analytic_bound))
        std::cout << "  bound " << record.bound_id << " = " << record.analytic_bound << "\n";
    if (!std::isnan(record.predicted_rate))
        std::cout << "  predicted " << record.prediction_id << " = " << record.predicted_rate
                  << "\n";
    if (!std::isnan(record.per_round_guess_accuracy))
        std::cout << "  per-round guess accuracy " << record.per_round_guess_accuracy
                  << " vs bound " << record.per_round_accuracy_bound << "\n";
    if (!std::isnan(record.mean_forgery_fidelity_sq))
        std::cout << "  mean forgery F^2 " << record.mean_forgery_fidelity_sq << "\n";

    OutputSink sink(flags.out_dir, command_line, qpufid::to_json(cfg), cfg.seed);
    Json record_json = qpufid::to_json(record);
    record_json["config"] = qpufid::to_json(cfg);
    sink.write_json("attack_record.json", record_json);
    if (sink.enabled()) {
        qpufid::CsvWriter csv({"trial", "success"});
        for (std::size_t t = 0; t < record.per_trial_success.size(); ++t)
            csv.add_row({std::to_string(t), std::to_string(int(record.per_trial_success[t]))});
        sink.write_text("attack_trials.csv", csv.str());
    }
    sink.finish();
    return 0;
}

void bound_row(qpufid::CsvWriter &csv, const qpufid::BoundValue &b, int N, double tau, double p,
               int M, double alpha) {
    csv.add_row({b.formula_id, std::to_string(N), qpufid::format_double(tau),
                 qpufid::format_double(p), std::to_string(M), qpufid::format_double(alpha),
                 qpufid::format_double(b.value), qpufid::format_double(b.log2_value),
                 b.flagged ? "1" : "0"});
}

int cmd_analyze(const std::string &target, const CommonFlags &flags, int Nmax,
                const std::vector<int> &n_list, double delta, double epsilon,
                const std::string &command_line) {
    const std::vector<std::string> bound_columns = {"formula_id", "N", "tau",   "p",
                                                    "M",          "alpha", "value", "log2_value",
                                                    "flagged"};
    OutputSink sink(flags.out_dir, command_line, Json::object(), 0);

    if (target == "bounds") {
        const int N = flags.N > 0 ? flags.N : 16;
        const int M = flags.M > 0 ? flags.M : 3;
        qpufid::CsvWriter csv(bound_columns);
        bound_row(csv, qpufid::swap_soundness_bound(N, M, delta), N, flags.tau, flags.p, M,
                  flags.alpha);
        bound_row(csv, qpufid::gswap_soundness_bound(N, M, delta), N, flags.tau, flags.p, M,
                  flags.alpha);
        bound_row(csv, qpufid::cver_completeness_bound(N, flags.tau), N, flags.tau, flags.p, M,
                  flags.alpha);
        if (N % 4 == 0) {
            bound_row(csv, qpufid::independent_success(N, flags.tau, flags.alpha), N, flags.tau,
                      flags.p, M, flags.alpha);
            bound_row(csv, qpufid::independent_success_approx(N, flags.tau, flags.alpha), N,
                      flags.tau, flags.p, M, flags.alpha);
            bound_row(csv, qpufid::global_success(N, flags.tau), N, flags.tau, flags.p, M,
                      flags.alpha);
            bound_row(csv, qpufid::global_strategy_expected_rate(N, flags.tau), N, flags.tau,
                      flags.p, M, flags.alpha);
        }
        if (N % 2 == 0) {
            bound_row(csv, qpufid::guess_set_success(N), N, flags.tau, flags.p, M, flags.alpha);
            const qpufid::GlobalSuccessP gp = qpufid::global_success_p(N, flags.p);
            bound_row(csv, gp.conditional, N, flags.tau, flags.p, M, flags.alpha);
            bound_row(csv, gp.hidden, N, flags.tau, flags.p, M, flags.alpha);
        }
        if (sink.enabled()) {
            sink.write_text("bounds.csv", csv.str());
        } else {
            std::cout << csv.str();
        }
    } else if (target == "sweep-strategies") {
        // Classical strategy success against the round count: exact and
        // approximate per-position rates plus the set-guessing forms.
        qpufid::CsvWriter csv(bound_columns);
        for (int N = 4; N <= Nmax; N += 4) {
            bound_row(csv, qpufid::independent_success(N, flags.tau, flags.alpha), N, flags.tau,
                      0.5, 1, flags.alpha);
            bound_row(csv, qpufid::independent_success_approx(N, flags.tau, flags.alpha), N,
                      flags.tau, 0.5, 1, flags.alpha);
            bound_row(csv, qpufid::global_success(N, flags.tau), N, flags.tau, 0.5, 1,
                      flags.alpha);
            bound_row(csv, qpufid::global_strategy_expected_rate(N, flags.tau), N, flags.tau, 0.5,
                      1, flags.alpha);
            bound_row(csv, qpufid::guess_set_success(N), N, flags.tau, 0.5, 1, flags.alpha);
        }
        if (sink.enabled()) {
            sink.write_text("sweep_strategies.csv", csv.str());
        } else {
            std::cout << csv.str();
        }
    } else if (target == "sweep-valid-fraction") {
        // Success of the set-guessing attack as the valid fraction varies,
        // one curve per round count, plus the uniform-prior average.
        qpufid::CsvWriter csv(bound_columns);
        for (const int N : n_list) {
            for (int z = 0; z * 2 <= N; ++z) {
                const double p = static_cast<double>(N - 2 * z) / N;
                const qpufid::GlobalSuccessP gp = qpufid::global_success_p(N, p);
                bound_row(csv, gp.conditional, N, 0.0, p, 1, flags.alpha);
                bound_row(csv, gp.hidden, N, 0.0, p, 1, flags.alpha);
            }
            const qpufid::AvgSuccessUniformP avg = qpufid::avg_success_uniform_p(N);
            qpufid::BoundValue series;
            series.formula_id = "avg_success_uniform_p";
            series.value = series.raw_value = avg.series_value;
            series.log2_value = std::log2(avg.series_value);
            bound_row(csv, series, N, 0.0, -1.0, 1, flags.alpha);
            qpufid::BoundValue asym;
            asym.formula_id = "avg_success_asymptote";
            asym.value = asym.raw_value = avg.asymptote;
            asym.log2_value = std::log2(avg.asymptote);
            bound_row(csv, asym, N, 0.0, -1.0, 1, flags.alpha);
        }
        if (sink.enabled()) {
            sink.write_text("sweep_valid_fraction.csv", csv.str());
        } else {
            std::cout << csv.str();
        }
    } else if (target == "resources") {
        const int M = flags.M > 0 ? flags.M : 3;
        qpufid::CsvWriter csv({"protocol", "epsilon", "security_formula", "verifier_memory",
                               "prover_memory", "verifier_compute", "prover_compute",
                               "quantum_rounds", "classical_rounds"});
        for (const auto &row : qpufid::resource_table(epsilon, M)) {
            csv.add_row({row.protocol, qpufid::format_double(row.epsilon), row.security_formula,
                         std::to_string(row.verifier_memory), std::to_string(row.prover_memory),
                         row.verifier_compute, row.prover_compute,
                         std::to_string(row.quantum_rounds),
                         std::to_string(row.classical_rounds)});
        }
        if (sink.enabled()) {
            sink.write_text("resources.csv", csv.str());
        } else {
            std::cout << csv.str();
        }
    } else {
        throw std::invalid_argument("field 'target' must be bounds, sweep-strategies, "
                                    "sweep-valid-fraction, or resources");
    }
    sink.finish();
    return 0;
}

int cmd_oracle(const CommonFlags &flags, const std::string &strategy_name,
               const std::string &command_line) {
    qpufid::OracleStrategy strategy = qpufid::OracleStrategy::global;
    if (strategy_name == "independent") {
        strategy = qpufid::OracleStrategy::independent;
    } else if (strategy_name == "global") {
        strategy = qpufid::OracleStrategy::global;
    } else if (strategy_name == "guess-set") {
        strategy = qpufid::OracleStrategy::guess_set;
    } else if (strategy_name == "optimal") {
        strategy = qpufid::OracleStrategy::optimal;
    } else {
        throw std::invalid_argument("field 'strategy' must be independent, global, guess-set, or "
                                    "optimal");
    }
    const int N = flags.N > 0 ? flags.N : 8;
    const qpufid::CverOracleResult r =
        qpufid::brute_force_cver(N, flags.tau, flags.p, strategy, flags.alpha, flags.kappa);
    Json j{{"N", N},
           {"tau", flags.tau},
           {"p", flags.p},
           {"kappa", flags.kappa},
           {"alpha", flags.alpha},
           {"strategy", strategy_name},
           {"strategy_rate", r.strategy_rate},
           {"event_space_sum", r.event_space_sum},
           {"per_c1_max", r.per_c1_max},
           {"optimal_rate", r.optimal_rate},
           {"optimal_string", bits_to_string(r.optimal_string, N)},
           {"max_rate_outside_window", r.max_rate_outside_window},
           {"placements", r.placements},
           {"window", Json::array({r.window_low, r.window_high})}};
    std::cout << j.dump(2) << "\n";
    OutputSink sink(flags.out_dir, command_line, Json::object(), 0);
    sink.write_json("oracle.json", j);
    sink.finish();
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Simulator and analysis toolkit for qPUF identification protocols"};
    app.require_subcommand(1);
    const std::string command_line = joined_command(argc, argv);

    CommonFlags flags;
    int trials = 100;
    int transcript_count = 1;
    int Nmax = 64;
    std::vector<int> n_list = {16, 32, 64};
    double delta = 0.0;
    double epsilon = std::exp2(-20.0);
    std::string protocol;
    std::string attacker;
    std::string target;
    std::string rule_name = "accept-means-valid";
    std::string strategy_name = "global";

    CLI::App *run_cmd = app.add_subcommand("run", "Run the protocol with an honest prover");
    run_cmd->add_option("protocol", protocol, "hrv-swap, hrv-gswap, or lrv")->required();
    add_config_flags(run_cmd, flags);
    run_cmd->add_option("--trials", trials, "Independent protocol executions");
    run_cmd->add_option("--transcripts", transcript_count, "Full transcripts to persist");

    CLI::App *attack_cmd = app.add_subcommand("attack", "Run an attack game");
    attack_cmd->add_option("protocol", protocol, "hrv-swap, hrv-gswap, or lrv")->required();
    attack_cmd->add_option("attacker", attacker, "Adversary model")->required();
    add_config_flags(attack_cmd, flags);
    attack_cmd->add_option("--trials", trials, "Attack-game trials");
    attack_cmd->add_option("--alpha", flags.alpha, "Per-position 0-guess probability");
    attack_cmd->add_option("--d", flags.d, "Transit-window queries to spend on learning");
    attack_cmd->add_option("--rule", rule_name, "Trap decision rule");
    attack_cmd->add_option("--threads", flags.threads, "Worker threads for stateless trials");

    CLI::App *analyze_cmd = app.add_subcommand("analyze", "Evaluate bounds and sweeps to CSV");
    analyze_cmd
        ->add_option("target", target,
                     "bounds, sweep-strategies, sweep-valid-fraction, or resources")
        ->required();
    add_config_flags(analyze_cmd, flags);
    analyze_cmd->add_option("--alpha", flags.alpha, "Per-position 0-guess probability");
    analyze_cmd->add_option("--delta", delta, "Response fidelity bound for soundness rows");
    analyze_cmd->add_option("--epsilon", epsilon, "Target soundness error for resources");
    analyze_cmd->add_option("--Nmax", Nmax, "Largest round count for sweep-strategies");
    analyze_cmd->add_option("--N-list", n_list, "Round counts for sweep-valid-fraction")
        ->delimiter(',');

    CLI::App *oracle_cmd = app.add_subcommand("oracle", "Brute-force verifier oracle");
    add_config_flags(oracle_cmd, flags);
    oracle_cmd->add_option("--alpha", flags.alpha, "Per-position 0-guess probability");
    oracle_cmd->add_option("--strategy", strategy_name,
                           "independent, global, guess-set, or optimal");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(run_cmd))
            return cmd_run(run_cmd, flags, trials, transcript_count, protocol, command_line);
        if (app.got_subcommand(attack_cmd))
            return cmd_attack(attack_cmd, flags, trials, protocol, attacker, rule_name,
                              command_line);
        if (app.got_subcommand(analyze_cmd))
            return cmd_analyze(target, flags, Nmax, n_list, delta, epsilon, command_line);
        if (app.got_subcommand(oracle_cmd)) return cmd_oracle(flags, strategy_name, command_line);
    } catch (const Json::exception &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
