#pragma once

#include "admsched/geometry.hpp"
#include "admsched/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace admsched {

/// Non-negative integer distribution from a fixed menu. Every entry has a
/// finite mean and a finite E[A log A | A > 0].
class DiscreteDist {
public:
    enum class Kind { Deterministic, Poisson, Geometric, Categorical };

    static DiscreteDist deterministic(std::uint64_t value);
    /// Throws std::invalid_argument unless 0 <= mean <= 500.
    static DiscreteDist poisson(double mean);
    /// Geometric on {0,1,2,...} with the given mean, P(k) = (1-q) q^k, q = mean/(1+mean).
    static DiscreteDist geometric(double mean);
    /// Finite table of (value, probability); probabilities must sum to 1 within 1e-9.
    static DiscreteDist categorical(std::vector<std::pair<std::uint64_t, double>> table);

    Kind kind() const { return kind_; }
    double mean() const;
    /// P(X <= k).
    double cdf(std::uint64_t k) const;
    std::uint64_t sample(Engine& eng) const;

    /// Atoms with positive probability, for finite-support kinds.
    std::optional<std::vector<std::pair<std::uint64_t, double>>> finite_support() const;

    /// Same kind with the mean replaced; Poisson and Geometric only.
    DiscreteDist with_mean(double mean) const;

    std::string describe() const;

private:
    Kind kind_ = Kind::Deterministic;
    double param_ = 0.0;
    std::vector<std::pair<std::uint64_t, double>> table_;
    std::vector<double> cumulative_;
};

struct ArrivalSpec {
    DiscreteDist batch_count = DiscreteDist::poisson(1.0);
    DiscreteDist batch_size = DiscreteDist::deterministic(1);
    std::string stream = "arrivals";

    double lambda() const { return batch_count.mean(); }
    double beta() const { return batch_size.mean(); }

    /// Throws std::invalid_argument unless lambda > 0, beta > 0 and
    /// P(batch size <= 1) > 0.
    void validate() const;
};

struct Batch {
    Location location;
    std::uint64_t size = 0;
};

using ArrivalBatchList = std::vector<Batch>;

/// One slot of arrivals: a batch count, then for each batch a uniform
/// location followed by its size.
ArrivalBatchList sample_arrivals(const ArrivalSpec& spec, Engine& eng);

std::uint64_t total_particles(const ArrivalBatchList& batches);

/// Mean number of particles arriving per slot in one region: lambda*beta/K.
double expected_per_region(const ArrivalSpec& spec, const Partition& p);

} // namespace admsched
