#include "admsched/traffic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace admsched {

DiscreteDist DiscreteDist::deterministic(std::uint64_t value)
{
    DiscreteDist d;
    d.kind_ = Kind::Deterministic;
    d.param_ = static_cast<double>(value);
    d.table_ = {{value, 1.0}};
    return d;
}

DiscreteDist DiscreteDist::poisson(double mean)
{
    if (!(mean >= 0.0 && mean <= 500.0))
        throw std::invalid_argument("poisson mean must lie in [0, 500]");
    DiscreteDist d;
    d.kind_ = Kind::Poisson;
    d.param_ = mean;
    return d;
}

DiscreteDist DiscreteDist::geometric(double mean)
{
    if (!(mean >= 0.0 && std::isfinite(mean)))
        throw std::invalid_argument("geometric mean must be finite and non-negative");
    DiscreteDist d;
    d.kind_ = Kind::Geometric;
    d.param_ = mean;
    return d;
}

DiscreteDist DiscreteDist::categorical(std::vector<std::pair<std::uint64_t, double>> table)
{
    if (table.empty())
        throw std::invalid_argument("categorical table is empty");
    double sum = 0.0;
    for (auto [v, p] : table) {
        if (!(p >= 0.0))
            throw std::invalid_argument("categorical probabilities must be non-negative");
        sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("categorical probabilities sum to " + std::to_string(sum) + ", not 1");
    DiscreteDist d;
    d.kind_ = Kind::Categorical;
    d.table_ = std::move(table);
    double acc = 0.0;
    for (auto [v, p] : d.table_) {
        acc += p / sum;
        d.cumulative_.push_back(acc);
    }
    d.cumulative_.back() = 1.0;
    return d;
}

double DiscreteDist::mean() const
{
    switch (kind_) {
    case Kind::Deterministic:
    case Kind::Poisson:
    case Kind::Geometric:
        return param_;
    case Kind::Categorical: {
        double m = 0.0;
        for (auto [v, p] : table_)
            m += static_cast<double>(v) * p;
        return m;
    }
    }
    return 0.0;
}

double DiscreteDist::cdf(std::uint64_t k) const
{
    switch (kind_) {
    case Kind::Deterministic:
        return static_cast<double>(k) >= param_ ? 1.0 : 0.0;
    case Kind::Poisson: {
        double term = std::exp(-param_), acc = term;
        for (std::uint64_t i = 1; i <= k; ++i) {
            term *= param_ / static_cast<double>(i);
            acc += term;
        }
        return std::min(acc, 1.0);
    }
    case Kind::Geometric: {
        const double q = param_ / (1.0 + param_);
        return 1.0 - std::pow(q, static_cast<double>(k + 1));
    }
    case Kind::Categorical: {
        double acc = 0.0;
        for (auto [v, p] : table_)
            if (v <= k)
                acc += p;
        return acc;
    }
    }
    return 0.0;
}

std::uint64_t DiscreteDist::sample(Engine& eng) const
{
    switch (kind_) {
    case Kind::Deterministic:
        return table_.front().first;
    case Kind::Poisson:
        return admsched::poisson(eng, param_);
    case Kind::Geometric:
        return admsched::geometric(eng, param_ / (1.0 + param_));
    case Kind::Categorical: {
        const double u = uniform01(eng);
        for (std::size_t i = 0; i < table_.size(); ++i)
            if (u < cumulative_[i])
                return table_[i].first;
        return table_.back().first;
    }
    }
    return 0;
}

std::optional<std::vector<std::pair<std::uint64_t, double>>> DiscreteDist::finite_support() const
{
    if (kind_ == Kind::Deterministic || kind_ == Kind::Categorical) {
        std::vector<std::pair<std::uint64_t, double>> atoms;
        for (auto [v, p] : table_)
            if (p > 0.0)
                atoms.emplace_back(v, p);
        return atoms;
    }
    if (kind_ == Kind::Poisson && param_ == 0.0)
        return std::vector<std::pair<std::uint64_t, double>>{{0, 1.0}};
    return std::nullopt;
}

DiscreteDist DiscreteDist::with_mean(double mean) const
{
    if (kind_ == Kind::Poisson)
        return poisson(mean);
    if (kind_ == Kind::Geometric)
        return geometric(mean);
    throw std::invalid_argument("only poisson and geometric distributions can be re-parameterized by their mean");
}

std::string DiscreteDist::describe() const
{
    std::ostringstream os;
    switch (kind_) {
    case Kind::Deterministic:
        os << "deterministic(" << table_.front().first << ")";
        break;
    case Kind::Poisson:
        os << "poisson(" << param_ << ")";
        break;
    case Kind::Geometric:
        os << "geometric(mean=" << param_ << ")";
        break;
    case Kind::Categorical:
        os << "categorical(";
        for (std::size_t i = 0; i < table_.size(); ++i)
            os << (i ? "," : "") << table_[i].first << ":" << table_[i].second;
        os << ")";
        break;
    }
    return os.str();
}

void ArrivalSpec::validate() const
{
    if (!(lambda() > 0.0))
        throw std::invalid_argument("arrivals: batch_count mean (lambda) must be positive");
    if (!(beta() > 0.0))
        throw std::invalid_argument("arrivals: batch_size mean (beta) must be positive");
    if (!(batch_size.cdf(1) > 0.0))
        throw std::invalid_argument("arrivals: batch_size must be <= 1 with positive probability");
}

ArrivalBatchList sample_arrivals(const ArrivalSpec& spec, Engine& eng)
{
    const std::uint64_t count = spec.batch_count.sample(eng);
    ArrivalBatchList out;
    out.reserve(count);
    for (std::uint64_t b = 0; b < count; ++b) {
        Batch batch;
        batch.location = Location(uniform01(eng));
        batch.size = spec.batch_size.sample(eng);
        out.push_back(batch);
    }
    return out;
}

std::uint64_t total_particles(const ArrivalBatchList& batches)
{
    std::uint64_t n = 0;
    for (const auto& b : batches)
        n += b.size;
    return n;
}

double expected_per_region(const ArrivalSpec& spec, const Partition& p)
{
    return spec.lambda() * spec.beta() / p.K();
}

} // namespace admsched
