#include "seqzap/probgen.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "parse.hpp"

namespace seqzap {

namespace {

constexpr std::uint64_t kSignalSalt = 0x5349474e414cULL;  // "SIGNAL"
constexpr std::uint64_t kRowSalt = 0x524f5753ULL;         // "ROWS"

} // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double NormalStream::uniform_open() {
    // (k + 0.5) / 2^53 never hits 0 or 1.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double NormalStream::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_open()));
    const double phi = 2.0 * std::numbers::pi * uniform_open();
    cached_ = r * std::sin(phi);
    has_cached_ = true;
    return r * std::cos(phi);
}

std::uint64_t NormalStream::below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("NormalStream::below: zero bound");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw;
    do {
        draw = engine_();
    } while (draw >= limit);
    return draw % bound;
}

void ProblemSpec::validate() const {
    if (n < 1) throw std::invalid_argument("ProblemSpec: n must be >= 1");
    if (k < 1 || k > n)
        throw std::invalid_argument("ProblemSpec: k must lie in [1, n], got k=" +
                                    std::to_string(k) + " n=" + std::to_string(n));
}

SparseProblem SparseProblem::generate(const ProblemSpec& spec) {
    spec.validate();
    NormalStream rng(mix_seed(spec.seed, kSignalSalt));

    // Partial Fisher-Yates: the first k slots are a uniform k-subset.
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(spec.n));
    for (Eigen::Index i = 0; i < spec.n; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (Eigen::Index i = 0; i < spec.k; ++i) {
        const auto j = i + static_cast<Eigen::Index>(
                               rng.below(static_cast<std::uint64_t>(spec.n - i)));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    std::vector<Eigen::Index> support(perm.begin(), perm.begin() + spec.k);
    std::vector<double> values(static_cast<std::size_t>(spec.k));
    for (double& v : values) v = rng.normal();
    return SparseProblem(spec, std::move(support), std::move(values));
}

SparseProblem::SparseProblem(const ProblemSpec& spec, std::vector<Eigen::Index> support,
                             std::vector<double> values)
    : spec_(spec),
      support_(std::move(support)),
      values_(std::move(values)),
      x_true_(Eigen::VectorXd::Zero(spec.n)),
      rows_(mix_seed(spec.seed, kRowSalt)) {
    spec_.validate();
    if (support_.size() != static_cast<std::size_t>(spec_.k) || values_.size() != support_.size())
        throw std::invalid_argument("SparseProblem: expected " + std::to_string(spec_.k) +
                                    " support indices and values");
    std::unordered_set<Eigen::Index> seen;
    for (std::size_t i = 0; i < support_.size(); ++i) {
        const Eigen::Index idx = support_[i];
        if (idx < 0 || idx >= spec_.n)
            throw std::invalid_argument("SparseProblem: support index out of range");
        if (!seen.insert(idx).second)
            throw std::invalid_argument("SparseProblem: duplicate support index");
        if (!std::isfinite(values_[i]))
            throw std::invalid_argument("SparseProblem: non-finite value");
        x_true_[idx] = values_[i];
    }
}

Measurement SparseProblem::next_measurement() {
    Measurement out;
    out.a.resize(spec_.n);
    for (Eigen::Index i = 0; i < spec_.n; ++i) out.a[i] = rows_.normal();
    if (spec_.unit_norm_rows) out.a.normalize();
    out.y = out.a.dot(x_true_);
    ++rows_drawn_;
    return out;
}

MeasurementSource SparseProblem::source() {
    return [this]() -> std::optional<Measurement> { return next_measurement(); };
}

void save_fixture(const SparseProblem& problem, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open fixture for writing: " + path.string());
    const ProblemSpec& spec = problem.spec();
    out << "seqzap-problem 1\n"
        << "n " << spec.n << "\n"
        << "k " << spec.k << "\n"
        << "seed " << spec.seed << "\n"
        << "unit_norm_rows " << (spec.unit_norm_rows ? 1 : 0) << "\n"
        << "support";
    for (Eigen::Index idx : problem.support()) out << ' ' << idx;
    out << "\nvalues" << std::setprecision(17);
    for (double v : problem.values()) out << ' ' << v;
    out << "\n";
    if (!out) throw std::runtime_error("failed writing fixture: " + path.string());
}

SparseProblem load_fixture(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open fixture: " + path.string());
    auto fail = [&](const std::string& msg) -> void {
        throw std::runtime_error("fixture " + path.string() + ": " + msg);
    };

    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != "seqzap-problem" || version != 1)
        fail("missing 'seqzap-problem 1' header");

    ProblemSpec spec;
    auto expect_key = [&](const char* key) {
        std::string word;
        if (!(in >> word) || word != key) fail(std::string("expected key '") + key + "'");
    };
    int unit = 0;
    expect_key("n");
    in >> spec.n;
    expect_key("k");
    in >> spec.k;
    expect_key("seed");
    in >> spec.seed;
    expect_key("unit_norm_rows");
    in >> unit;
    if (!in) fail("malformed header fields");
    spec.unit_norm_rows = unit != 0;
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }

    std::vector<Eigen::Index> support(static_cast<std::size_t>(spec.k));
    std::vector<double> values(static_cast<std::size_t>(spec.k));
    expect_key("support");
    for (auto& idx : support) in >> idx;
    expect_key("values");
    for (auto& v : values) {
        std::string token;
        in >> token;
        const auto parsed = detail::parse_number<double>(token);
        if (!parsed) fail("bad value '" + token + "'");
        v = *parsed;
    }
    if (!in) fail("truncated support/values");
    return SparseProblem(spec, std::move(support), std::move(values));
}

} // namespace seqzap
