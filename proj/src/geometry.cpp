#include "admsched/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace admsched {

Location::Location(double v)
{
    if (!std::isfinite(v))
        throw std::invalid_argument("location must be finite");
    double x = v - std::floor(v);
    if (x >= 1.0) // v slightly below an integer
        x = 0.0;
    x_ = x;
}

double circ_distance(Location x, Location w)
{
    const double d = std::fabs(x.value() - w.value());
    return std::min(d, 1.0 - d);
}

bool inverse_is_integer(double r)
{
    const double inv = 1.0 / r;
    return std::fabs(inv - std::round(inv)) <= 1e-9 * inv;
}

int mu_for_radius(double r)
{
    if (!(r > 0.0 && r < 1.0))
        throw std::invalid_argument("radius must lie in (0,1), got " + std::to_string(r));
    const double inv = 1.0 / r;
    if (inverse_is_integer(r))
        return static_cast<int>(std::lround(inv)) - 1;
    return static_cast<int>(std::floor(inv));
}

Partition::Partition(int mu, std::vector<Interval> regions, std::vector<std::vector<int>> blocks)
    : mu_(mu), layout_(Layout::Custom), regions_(std::move(regions)), blocks_(std::move(blocks))
{
    if (mu_ < 1)
        throw std::invalid_argument("mu must be positive");
    if (regions_.empty())
        throw std::invalid_argument("partition needs at least one region");
    block_index_.assign(regions_.size(), -1);
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        for (int i : blocks_[b]) {
            if (i < 0 || i >= K())
                throw std::invalid_argument("block refers to region " + std::to_string(i) + " outside 0.." +
                                            std::to_string(K() - 1));
            if (block_index_[static_cast<std::size_t>(i)] < 0)
                block_index_[static_cast<std::size_t>(i)] = static_cast<int>(b);
        }
    }
    order_by_lo_.resize(regions_.size());
    std::iota(order_by_lo_.begin(), order_by_lo_.end(), 0);
    std::sort(order_by_lo_.begin(), order_by_lo_.end(),
              [&](int a, int b) { return regions_[static_cast<std::size_t>(a)].lo < regions_[static_cast<std::size_t>(b)].lo; });
}

Partition Partition::contiguous(int K, int mu)
{
    if (K < 1 || mu < 1 || K % mu != 0)
        throw std::invalid_argument("contiguous partition needs K a positive multiple of mu");
    Partition p;
    p.mu_ = mu;
    p.layout_ = Layout::Contiguous;
    for (int i = 0; i < K; ++i)
        p.regions_.push_back({static_cast<double>(i) / K, static_cast<double>(i + 1) / K});
    for (int b = 0; b < K / mu; ++b) {
        std::vector<int> block;
        for (int j = 0; j < mu; ++j)
            block.push_back(b * mu + j);
        p.blocks_.push_back(std::move(block));
    }
    p.block_index_.resize(static_cast<std::size_t>(K));
    for (int i = 0; i < K; ++i)
        p.block_index_[static_cast<std::size_t>(i)] = i / mu;
    return p;
}

const std::vector<int>& Partition::block_of(int i) const
{
    const int b = block_index_.at(static_cast<std::size_t>(i));
    if (b < 0)
        throw std::out_of_range("region " + std::to_string(i) + " belongs to no block");
    return blocks_[static_cast<std::size_t>(b)];
}

int Partition::region_of(Location loc) const
{
    const double x = loc.value();
    if (layout_ == Layout::Custom) {
        auto it = std::upper_bound(order_by_lo_.begin(), order_by_lo_.end(), x, [&](double v, int i) {
            return v < regions_[static_cast<std::size_t>(i)].lo;
        });
        if (it != order_by_lo_.begin()) {
            const int i = *std::prev(it);
            if (regions_[static_cast<std::size_t>(i)].contains(x))
                return i;
        }
        throw std::out_of_range("location " + std::to_string(x) + " not covered by the partition");
    }

    // Cell c covers [c/K, (c+1)/K); correct the floor() guess against the
    // exact interval bounds so membership is always half-open consistent.
    const int k = K();
    int c = std::clamp(static_cast<int>(std::floor(x * k)), 0, k - 1);
    while (c > 0 && x < static_cast<double>(c) / k)
        --c;
    while (c + 1 < k && x >= static_cast<double>(c + 1) / k)
        ++c;
    if (layout_ == Layout::Contiguous)
        return c;
    const int stride = k / mu_;
    return mu_ * (c % stride) + c / stride;
}

int minimal_region_count(double r)
{
    const int mu = mu_for_radius(r);
    const double slack = 1.0 - mu * r;
    if (!(slack > 0.0))
        throw std::invalid_argument("1 - mu*r must be positive");
    const double bound = 2.0 * mu / slack;
    // Tolerate rounding in mu*r: 2*3/(1-0.9) evaluates to 60.000000000000014.
    const double target = bound * (1.0 - 1e-9);
    const long long k = static_cast<long long>(std::ceil(target / mu)) * mu;
    if (k > 100'000'000)
        throw std::invalid_argument("required region count is impractically large");
    return static_cast<int>(std::max<long long>(k, mu));
}

Partition build_partition(double r, std::optional<int> K)
{
    const int mu = mu_for_radius(r);
    const int kmin = minimal_region_count(r);
    int k = kmin;
    if (K) {
        if (*K % mu != 0)
            throw std::invalid_argument("K=" + std::to_string(*K) + " is not a multiple of mu=" + std::to_string(mu));
        if (*K < kmin)
            throw std::invalid_argument("K=" + std::to_string(*K) + " is below the bound 2mu/(1-mu r); need K >= " +
                                        std::to_string(kmin));
        k = *K;
    }

    Partition p;
    p.mu_ = mu;
    p.layout_ = Partition::Layout::Interleaved;
    const int stride = k / mu;
    p.regions_.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        const int cell = i / mu + stride * (i % mu);
        p.regions_.push_back({static_cast<double>(cell) / k, static_cast<double>(cell + 1) / k});
    }
    for (int b = 0; b < k / mu; ++b) {
        std::vector<int> block;
        for (int j = 0; j < mu; ++j)
            block.push_back(b * mu + j);
        p.blocks_.push_back(std::move(block));
    }
    p.block_index_.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        p.block_index_[static_cast<std::size_t>(i)] = i / mu;
    return p;
}

double min_region_distance(const Partition& p, int i, int j)
{
    if (i == j)
        throw std::invalid_argument("min_region_distance needs two distinct regions");
    Interval a = p.region(i);
    Interval b = p.region(j);
    if (b.lo < a.lo)
        std::swap(a, b);
    if (b.lo <= a.hi) // closures touch or overlap
        return 0.0;
    const double direct = b.lo - a.hi;
    const double around = 1.0 - (b.hi - a.lo);
    return std::max(0.0, std::min(direct, around));
}

} // namespace admsched
