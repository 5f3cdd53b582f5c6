#include "seqzap/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "parse.hpp"
#include "seqzap/errors.hpp"

namespace seqzap {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr const char* kCsvHeader =
    "algorithm,m,trials,msd_mean,msd_median,time_mean_s,success_rate";

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

struct TrialData {
    SparseProblem problem;
    Eigen::MatrixXd rows;  // m_max x N
    Eigen::VectorXd y;
};

TrialData draw_trial(const SweepConfig& cfg, std::size_t trial) {
    ProblemSpec spec = cfg.spec;
    spec.seed = trial_seed(cfg.spec.seed, trial);
    TrialData data{SparseProblem::generate(spec), {}, {}};
    const Eigen::Index m_max = cfg.m_values.back();
    data.rows.resize(m_max, spec.n);
    data.y.resize(m_max);
    for (Eigen::Index i = 0; i < m_max; ++i) {
        Measurement s = data.problem.next_measurement();
        data.rows.row(i) = s.a.transpose();
        data.y[i] = s.y;
    }
    return data;
}

TrialRecord blank_record(const TrialData& data, std::size_t trial, Eigen::Index m,
                         Algorithm algorithm) {
    TrialRecord r;
    r.seed = data.problem.spec().seed;
    r.trial = trial;
    r.m = m;
    r.algorithm = algorithm;
    return r;
}

void fill_error(TrialRecord& r, const std::string& what) {
    r.failed = true;
    r.error = what;
    r.msd_normalized = std::numeric_limits<double>::quiet_NaN();
    r.msd_raw = std::numeric_limits<double>::quiet_NaN();
}

// Writes one record per requested m into `out` (same order as cfg.m_values).
void run_online_trial(const SweepConfig& cfg, const TrialData& data, std::size_t trial,
                      std::vector<TrialRecord>& out) {
    const Eigen::VectorXd& truth = data.problem.x_true();
    OnlineState state(cfg.spec.n, cfg.zap);
    ProxyChangeMonitor proxy(cfg.stop.threshold);
    bool stopped = false;
    double elapsed = 0.0;
    std::size_t next = 0;
    std::string error;

    for (Eigen::Index m = 1; m <= cfg.m_values.back(); ++m) {
        if (error.empty()) {
            try {
                const auto start = Clock::now();
                state.ingest_sample(data.rows.row(m - 1).transpose(), data.y[m - 1]);
                elapsed += seconds_since(start);
                const bool fired =
                    cfg.stop.kind == StopKind::OracleMsd
                        ? msd_normalized(state.estimate(), truth) < cfg.stop.threshold
                        : proxy.update(state.estimate(), state.previous_estimate());
                stopped = stopped || fired;
            } catch (const std::exception& e) {
                error = "m=" + std::to_string(m) + ": " + e.what();
            }
        }
        if (m != cfg.m_values[next]) continue;

        TrialRecord r = blank_record(data, trial, m, Algorithm::OnlineZap);
        if (!error.empty()) {
            fill_error(r, error);
        } else {
            r.msd_raw = msd_raw(state.estimate(), truth);
            r.msd_normalized = msd_normalized(state.estimate(), truth);
            r.total_inner_iterations = state.total_inner_iterations();
            r.wall_time = elapsed;
            r.converged = stopped;
        }
        out[next++] = std::move(r);
    }
}

void run_batch_trial(const SweepConfig& cfg, const TrialData& data, std::size_t trial,
                     std::vector<TrialRecord>& out) {
    const Eigen::VectorXd& truth = data.problem.x_true();
    ProxyChangeMonitor proxy(cfg.stop.threshold);
    Eigen::VectorXd previous = Eigen::VectorXd::Zero(cfg.spec.n);
    bool stopped = false;

    for (std::size_t idx = 0; idx < cfg.m_values.size(); ++idx) {
        const Eigen::Index m = cfg.m_values[idx];
        TrialRecord r = blank_record(data, trial, m, Algorithm::BatchZapColdStart);
        try {
            const auto start = Clock::now();
            GramInverse gram(cfg.spec.n);
            for (Eigen::Index i = 0; i < m; ++i) gram.append_row(data.rows.row(i).transpose());
            const InnerResult res = batch_solve(gram, data.y.head(m), cfg.zap);
            r.wall_time = seconds_since(start);
            r.msd_raw = msd_raw(res.x, truth);
            r.msd_normalized = msd_normalized(res.x, truth);
            r.total_inner_iterations = res.iterations;
            const bool fired = cfg.stop.kind == StopKind::OracleMsd
                                   ? r.msd_normalized < cfg.stop.threshold
                                   : proxy.update(res.x, previous);
            stopped = stopped || fired;
            r.converged = stopped;
            previous = res.x;
        } catch (const std::exception& e) {
            fill_error(r, "m=" + std::to_string(m) + ": " + e.what());
        }
        out[idx] = std::move(r);
    }
}

double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

} // namespace

const char* to_string(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::OnlineZap: return "OnlineZap";
        case Algorithm::BatchZapColdStart: return "BatchZapColdStart";
    }
    return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
    if (name == "online" || name == "OnlineZap") return Algorithm::OnlineZap;
    if (name == "batch" || name == "BatchZapColdStart") return Algorithm::BatchZapColdStart;
    throw std::invalid_argument("unknown algorithm '" + name + "'");
}

void SweepConfig::validate() const {
    spec.validate();
    zap.validate();
    stop.validate();
    if (trials < 1) throw std::invalid_argument("SweepConfig: trials must be >= 1");
    if (m_values.empty()) throw std::invalid_argument("SweepConfig: no m values");
    if (m_values.front() < 1) throw std::invalid_argument("SweepConfig: m values must be >= 1");
    for (std::size_t i = 1; i < m_values.size(); ++i)
        if (m_values[i] <= m_values[i - 1])
            throw std::invalid_argument("SweepConfig: m values must be strictly increasing");
    if (m_values.back() > spec.n)
        throw std::invalid_argument("SweepConfig: largest m exceeds n");
    if (algorithms.empty()) throw std::invalid_argument("SweepConfig: no algorithms");
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t trial) {
    return mix_seed(base_seed, static_cast<std::uint64_t>(trial));
}

std::vector<TrialRecord> run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    std::vector<Algorithm> algorithms = cfg.algorithms;
    std::sort(algorithms.begin(), algorithms.end());
    algorithms.erase(std::unique(algorithms.begin(), algorithms.end()), algorithms.end());

    const std::size_t n_m = cfg.m_values.size();
    // results[alg][trial] holds one record per m.
    std::vector<std::vector<std::vector<TrialRecord>>> results(
        algorithms.size(),
        std::vector<std::vector<TrialRecord>>(cfg.trials, std::vector<TrialRecord>(n_m)));

    const std::size_t tasks = algorithms.size() * cfg.trials;
    std::atomic<std::size_t> next_task{0};
    auto worker = [&] {
        for (std::size_t task; (task = next_task++) < tasks;) {
            const std::size_t alg = task % algorithms.size();
            const std::size_t trial = task / algorithms.size();
            auto& out = results[alg][trial];
            TrialData data = draw_trial(cfg, trial);
            if (algorithms[alg] == Algorithm::OnlineZap)
                run_online_trial(cfg, data, trial, out);
            else
                run_batch_trial(cfg, data, trial, out);
        }
    };

    unsigned threads = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(tasks)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    }

    std::vector<TrialRecord> records;
    records.reserve(tasks * n_m);
    for (std::size_t alg = 0; alg < algorithms.size(); ++alg)
        for (std::size_t mi = 0; mi < n_m; ++mi)
            for (std::size_t t = 0; t < cfg.trials; ++t)
                records.push_back(std::move(results[alg][t][mi]));
    return records;
}

std::vector<CellSummary> aggregate(const std::vector<TrialRecord>& records, double tau) {
    if (records.empty()) throw std::invalid_argument("aggregate: no records");
    std::map<std::pair<Algorithm, Eigen::Index>, std::vector<const TrialRecord*>> cells;
    for (const TrialRecord& r : records) cells[{r.algorithm, r.m}].push_back(&r);

    std::vector<CellSummary> out;
    out.reserve(cells.size());
    for (const auto& [key, group] : cells) {
        CellSummary s;
        s.algorithm = key.first;
        s.m = key.second;
        s.trials = group.size();
        std::vector<double> msd;
        double time_total = 0.0;
        std::size_t successes = 0;
        for (const TrialRecord* r : group) {
            time_total += r->wall_time;
            if (r->failed) continue;
            msd.push_back(r->msd_normalized);
            if (r->msd_normalized < tau) ++successes;
        }
        double sum = 0.0;
        for (double v : msd) sum += v;
        s.msd_mean = msd.empty() ? std::numeric_limits<double>::quiet_NaN()
                                 : sum / static_cast<double>(msd.size());
        s.msd_median = median_of(std::move(msd));
        s.time_mean_s = time_total / static_cast<double>(group.size());
        s.success_rate = static_cast<double>(successes) / static_cast<double>(group.size());
        out.push_back(s);
    }
    return out;
}

void write_summary_csv(const std::vector<CellSummary>& summaries,
                       const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    out << kCsvHeader << '\n';
    for (const CellSummary& s : summaries) {
        out << to_string(s.algorithm) << ',' << s.m << ',' << s.trials << ','
            << format_double(s.msd_mean) << ',' << format_double(s.msd_median) << ','
            << format_double(s.time_mean_s) << ',' << format_double(s.success_rate) << '\n';
    }
    finish_output(out, path);
}

std::vector<CellSummary> read_summary_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw std::runtime_error(path.string() + ": unexpected CSV header");

    std::vector<CellSummary> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
        if (fields.size() != 7)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected 7 fields");
        auto fail = [&](const std::string& what) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
        };
        auto number = [&]<typename T>(std::size_t i, T& out) {
            const auto v = detail::parse_number<T>(fields[i]);
            if (!v) fail("bad number '" + fields[i] + "'");
            out = *v;
        };
        CellSummary s;
        try {
            s.algorithm = parse_algorithm(fields[0]);
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
        number(1, s.m);
        number(2, s.trials);
        number(3, s.msd_mean);
        number(4, s.msd_median);
        number(5, s.time_mean_s);
        number(6, s.success_rate);
        out.push_back(s);
    }
    return out;
}

void write_records_csv(const std::vector<TrialRecord>& records,
                       const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    out << "algorithm,m,trial,seed,msd_normalized,msd_raw,total_inner_iterations,"
           "wall_time_s,converged,failed,error\n";
    for (const TrialRecord& r : records) {
        std::string error = r.error;
        std::replace(error.begin(), error.end(), ',', ';');
        out << to_string(r.algorithm) << ',' << r.m << ',' << r.trial << ',' << r.seed << ','
            << format_double(r.msd_normalized) << ',' << format_double(r.msd_raw) << ','
            << r.total_inner_iterations << ',' << format_double(r.wall_time) << ','
            << (r.converged ? 1 : 0) << ',' << (r.failed ? 1 : 0) << ',' << error << '\n';
    }
    finish_output(out, path);
}

void write_svg(const std::vector<CellSummary>& summaries, const std::filesystem::path& path,
               PlotMetric metric) {
    constexpr double width = 720, height = 480;
    constexpr double left = 80, right = 170, top = 30, bottom = 60;
    constexpr double plot_w = width - left - right, plot_h = height - top - bottom;
    constexpr double log_floor = 1e-20;
    const bool log_scale = metric == PlotMetric::MsdLog;

    auto value_of = [&](const CellSummary& s) {
        const double v = log_scale ? s.msd_median : s.time_mean_s;
        return log_scale ? std::log10(std::max(v, log_floor)) : v;
    };

    std::map<Algorithm, std::vector<std::pair<double, double>>> series;
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
    bool first = true;
    for (const CellSummary& s : summaries) {
        const double v = value_of(s);
        if (!std::isfinite(v)) continue;
        const double m = static_cast<double>(s.m);
        series[s.algorithm].emplace_back(m, v);
        if (first) {
            x_min = x_max = m;
            y_min = y_max = v;
            first = false;
        }
        x_min = std::min(x_min, m);
        x_max = std::max(x_max, m);
        y_min = std::min(y_min, v);
        y_max = std::max(y_max, v);
    }
    if (log_scale) {
        y_min = std::floor(y_min);
        y_max = std::ceil(y_max);
    } else {
        y_min = 0.0;
    }
    if (x_max <= x_min) x_max = x_min + 1;
    if (y_max <= y_min) y_max = y_min + 1;

    auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
    auto py = [&](double y) { return top + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h; };

    std::ofstream out = open_output(path);
    out << std::setprecision(6);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n"
        << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";

    // y ticks
    const int y_ticks = log_scale ? static_cast<int>(y_max - y_min) : 5;
    const int y_step = std::max(1, y_ticks / 10);
    for (int i = 0; i <= y_ticks; i += log_scale ? y_step : 1) {
        const double v = y_min + (y_max - y_min) * i / std::max(1, y_ticks);
        std::ostringstream label;
        if (log_scale)
            label << "1e" << static_cast<int>(std::lround(v));
        else
            label << std::setprecision(3) << v;
        out << "<line x1=\"" << left - 5 << "\" y1=\"" << py(v) << "\" x2=\"" << left
            << "\" y2=\"" << py(v) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << left - 8 << "\" y=\"" << py(v) + 4
            << "\" font-size=\"11\" text-anchor=\"end\">" << label.str() << "</text>\n";
    }
    // x ticks
    for (int i = 0; i <= 5; ++i) {
        const double v = x_min + (x_max - x_min) * i / 5.0;
        out << "<line x1=\"" << px(v) << "\" y1=\"" << top + plot_h << "\" x2=\"" << px(v)
            << "\" y2=\"" << top + plot_h + 5 << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << px(v) << "\" y=\"" << top + plot_h + 18
            << "\" font-size=\"11\" text-anchor=\"middle\">" << std::lround(v) << "</text>\n";
    }
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 15
        << "\" font-size=\"13\" text-anchor=\"middle\">measurements M</text>\n"
        << "<text x=\"20\" y=\"" << top + plot_h / 2
        << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
        << top + plot_h / 2 << ")\">"
        << (log_scale ? "median normalized MSD" : "mean wall time (s)") << "</text>\n";

    static constexpr const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    std::size_t idx = 0;
    for (const auto& [algorithm, points] : series) {
        const char* color = colors[idx % 4];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : points) out << px(x) << ',' << py(y) << ' ';
        out << "\"/>\n";
        const double ly = top + 20 + 20.0 * static_cast<double>(idx);
        out << "<line x1=\"" << left + plot_w + 10 << "\" y1=\"" << ly << "\" x2=\""
            << left + plot_w + 30 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << left + plot_w + 35 << "\" y=\"" << ly + 4
            << "\" font-size=\"11\">" << to_string(algorithm) << "</text>\n";
        ++idx;
    }
    out << "</svg>\n";
    finish_output(out, path);
}

} // namespace seqzap
