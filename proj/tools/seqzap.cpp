// seqzap: benchmark and single-run driver for the online ZAP solver.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seqzap/bench.hpp"
#include "seqzap/errors.hpp"
#include "seqzap/online.hpp"
#include "seqzap/probgen.hpp"
#include "seqzap/zap.hpp"

namespace {

void add_zap_options(CLI::App& cmd, seqzap::ZapConfig& zap) {
    cmd.add_option("--alpha", zap.alpha, "Penalty sharpness")->capture_default_str();
    cmd.add_option("--kappa0", zap.kappa0, "Initial step size")->capture_default_str();
    cmd.add_option("--eta1", zap.eta1, "Step decay per sample")->capture_default_str();
    cmd.add_option("--eta2", zap.eta2, "Step decay on l1 increase")->capture_default_str();
    cmd.add_option("--t-max", zap.t_max, "Inner iteration bound")->capture_default_str();
    cmd.add_option("--q-divisor", zap.q_divisor, "Step floor divisor")->capture_default_str();
    cmd.add_option("--epsilon", zap.epsilon, "Stop threshold")->capture_default_str();
}

seqzap::StopKind parse_stop(const std::string& s) {
    return s == "proxy" ? seqzap::StopKind::ProxyChange : seqzap::StopKind::OracleMsd;
}

int run_bench(seqzap::SweepConfig cfg, Eigen::Index m_min, Eigen::Index m_max,
              Eigen::Index m_step, const std::string& stop, double tau,
              const std::string& algorithms, const std::string& out_csv,
              const std::string& out_svg, const std::string& out_time_svg,
              const std::string& out_records) {
    cfg.stop = {parse_stop(stop), cfg.zap.epsilon};
    if (m_max <= 0) m_max = cfg.spec.n;
    for (Eigen::Index m = m_min; m <= m_max; m += m_step) cfg.m_values.push_back(m);
    if (cfg.m_values.empty() || cfg.m_values.back() != m_max) cfg.m_values.push_back(m_max);

    cfg.algorithms.clear();
    std::stringstream ss(algorithms);
    for (std::string name; std::getline(ss, name, ',');)
        cfg.algorithms.push_back(seqzap::parse_algorithm(name));

    const auto records = seqzap::run_sweep(cfg);
    const auto summaries = seqzap::aggregate(records, tau);
    seqzap::write_summary_csv(summaries, out_csv);
    if (!out_svg.empty()) seqzap::write_svg(summaries, out_svg, seqzap::PlotMetric::MsdLog);
    if (!out_time_svg.empty())
        seqzap::write_svg(summaries, out_time_svg, seqzap::PlotMetric::TimeLinear);
    if (!out_records.empty()) seqzap::write_records_csv(records, out_records);

    std::size_t failures = 0;
    for (const auto& r : records) {
        if (!r.failed) continue;
        ++failures;
        std::cerr << "error: " << seqzap::to_string(r.algorithm) << " trial " << r.trial << ' '
                  << r.error << '\n';
    }
    for (const auto& s : summaries) {
        std::cout << std::left << std::setw(18) << seqzap::to_string(s.algorithm) << " m="
                  << std::setw(4) << s.m << " msd_median=" << std::setw(12) << std::setprecision(4)
                  << s.msd_median << " success=" << s.success_rate << '\n';
    }
    return failures ? 2 : 0;
}

int run_solve(const std::string& fixture, const seqzap::ZapConfig& zap, const std::string& stop,
              std::size_t m_cap, const std::string& algorithm, const std::string& out_estimate) {
    seqzap::SparseProblem problem = seqzap::load_fixture(fixture);
    const Eigen::Index n = problem.spec().n;
    Eigen::VectorXd estimate;

    if (seqzap::parse_algorithm(algorithm) == seqzap::Algorithm::OnlineZap) {
        const seqzap::StopMode mode{parse_stop(stop), zap.epsilon};
        seqzap::OnlineState state =
            seqzap::run_online(n, problem.source(), zap, mode, m_cap, problem.x_true());
        estimate = state.estimate();
        std::size_t skipped = 0;
        for (const auto& h : state.history()) skipped += h.skipped_degenerate;
        std::cout << "algorithm OnlineZap\n"
                  << "m " << state.m() << "\n"
                  << "skipped " << skipped << "\n"
                  << "converged " << (state.converged() ? 1 : 0) << "\n"
                  << "total_inner_iterations " << state.total_inner_iterations() << "\n";
    } else {
        if (m_cap == 0) m_cap = static_cast<std::size_t>(n);
        seqzap::GramInverse gram(n);
        Eigen::VectorXd y(static_cast<Eigen::Index>(m_cap));
        for (std::size_t i = 0; i < m_cap; ++i) {
            seqzap::Measurement s = problem.next_measurement();
            gram.append_row(s.a);
            y[static_cast<Eigen::Index>(i)] = s.y;
        }
        const seqzap::InnerResult res = seqzap::batch_solve(gram, y, zap);
        estimate = res.x;
        std::cout << "algorithm BatchZapColdStart\n"
                  << "m " << m_cap << "\n"
                  << "total_inner_iterations " << res.iterations << "\n"
                  << "stop_cause " << seqzap::to_string(res.stop_cause) << "\n";
    }
    std::cout << std::setprecision(17) << "msd_normalized "
              << seqzap::msd_normalized(estimate, problem.x_true()) << "\n"
              << "msd_raw " << seqzap::msd_raw(estimate, problem.x_true()) << "\n";

    if (!out_estimate.empty()) {
        std::ofstream out(out_estimate);
        if (!out) throw std::runtime_error("cannot open for writing: " + out_estimate);
        out << std::setprecision(17);
        for (Eigen::Index i = 0; i < estimate.size(); ++i) out << estimate[i] << '\n';
        if (!out) throw std::runtime_error("write failed: " + out_estimate);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online zero-point attracting projection for sequential compressive sensing"};
    app.require_subcommand(1);

    // bench
    seqzap::SweepConfig sweep;
    sweep.zap = seqzap::ZapConfig{};
    Eigen::Index m_min = 1, m_max = 120, m_step = 1;
    std::string stop = "oracle", algorithms = "online,batch";
    std::string out_csv, out_svg, out_time_svg, out_records;
    double tau = 1e-4;
    auto* bench = app.add_subcommand("bench", "Sweep the measurement count and aggregate trials");
    bench->add_option("--n", sweep.spec.n, "Signal length")->capture_default_str();
    bench->add_option("--k", sweep.spec.k, "Sparsity")->capture_default_str();
    bench->add_option("--m-min", m_min, "Smallest measurement count")->capture_default_str();
    auto* m_max_opt = bench->add_option("--m-max", m_max, "Largest measurement count (0 = n)")
                          ->capture_default_str();
    bench->add_option("--m-step", m_step, "Measurement count step")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    bench->add_option("--trials", sweep.trials, "Trials per measurement count")
        ->capture_default_str();
    bench->add_option("--seed", sweep.spec.seed, "Base seed")->capture_default_str();
    bench->add_flag("--unit-rows", sweep.spec.unit_norm_rows, "Normalize measurement rows");
    bench->add_option("--threads", sweep.threads, "Worker threads (0 = all cores)")
        ->capture_default_str();
    add_zap_options(*bench, sweep.zap);
    bench->add_option("--stop", stop, "Stop rule")
        ->check(CLI::IsMember({"oracle", "proxy"}))
        ->capture_default_str();
    bench->add_option("--tau", tau, "Success threshold on normalized MSD")->capture_default_str();
    bench->add_option("--algorithms", algorithms, "Comma list of online,batch")
        ->capture_default_str();
    bench->add_option("--out-csv", out_csv, "Summary CSV path")->required();
    bench->add_option("--out-svg", out_svg, "MSD vs M plot");
    bench->add_option("--out-time-svg", out_time_svg, "Wall time vs M plot");
    bench->add_option("--out-records", out_records, "Per-trial records CSV");

    // solve
    seqzap::ZapConfig solve_zap;
    std::string fixture, solve_stop = "oracle", solve_alg = "online", out_estimate;
    std::size_t m_cap = 0;
    auto* solve = app.add_subcommand("solve", "Run one problem from a fixture file");
    solve->add_option("--fixture", fixture, "Problem fixture")->required()->check(CLI::ExistingFile);
    add_zap_options(*solve, solve_zap);
    solve->add_option("--stop", solve_stop, "Stop rule")
        ->check(CLI::IsMember({"oracle", "proxy"}))
        ->capture_default_str();
    solve->add_option("--m-cap", m_cap, "Maximum samples (0 = n)")->capture_default_str();
    solve->add_option("--algorithm", solve_alg, "online or batch")->capture_default_str();
    solve->add_option("--out-estimate", out_estimate, "Write the estimate, one value per line");

    // gen
    seqzap::ProblemSpec gen_spec;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "Write a problem fixture");
    gen->add_option("--n", gen_spec.n, "Signal length")->capture_default_str();
    gen->add_option("--k", gen_spec.k, "Sparsity")->capture_default_str();
    gen->add_option("--seed", gen_spec.seed, "Seed")->capture_default_str();
    gen->add_flag("--unit-rows", gen_spec.unit_norm_rows, "Normalize measurement rows");
    gen->add_option("--out", gen_out, "Fixture path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*bench) {
            // the default of 120 only applies when the signal is long enough
            if (m_max_opt->count() == 0) m_max = std::min<Eigen::Index>(m_max, sweep.spec.n);
            return run_bench(sweep, m_min, m_max, m_step, stop, tau, algorithms, out_csv, out_svg,
                             out_time_svg, out_records);
        }
        if (*solve) return run_solve(fixture, solve_zap, solve_stop, m_cap, solve_alg, out_estimate);
        if (*gen) {
            seqzap::save_fixture(seqzap::SparseProblem::generate(gen_spec), gen_out);
            return 0;
        }
    } catch (const seqzap::SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
