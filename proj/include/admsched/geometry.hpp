#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace admsched {

/// A point on the unit circle, stored as a coordinate in [0,1).
/// Construction reduces the argument mod 1.
class Location {
public:
    Location() = default;
    explicit Location(double v);

    double value() const { return x_; }

    friend bool operator==(Location a, Location b) { return a.x_ == b.x_; }
    friend auto operator<=>(Location a, Location b) { return a.x_ <=> b.x_; }

private:
    double x_ = 0.0;
};

/// Circular distance min(|x-w|, 1-|x-w|), in [0, 1/2].
double circ_distance(Location x, Location w);

/// True when 1/r is an integer (up to a relative tolerance of 1e-9).
bool inverse_is_integer(double r);

/// Maximum admissible-set size for the protocol model with radius r:
/// floor(1/r), or 1/r - 1 when 1/r is an integer (sets of size 1/r are
/// excluded). Throws std::invalid_argument unless 0 < r < 1.
int mu_for_radius(double r);

/// Half-open interval [lo, hi) inside [0,1).
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const { return lo <= x && x < hi; }
    double length() const { return hi - lo; }
};

/// Equal-measure partition of the circle into K regions with K/mu blocks of
/// mu regions each. Region and block indices are 0-based.
class Partition {
public:
    enum class Layout { Interleaved, Contiguous, Custom };

    /// Hand-built partition; regions need not be valid (see validate_partition).
    Partition(int mu, std::vector<Interval> regions, std::vector<std::vector<int>> blocks);

    /// K regions [i/K, (i+1)/K) with blocks {b*mu, ..., b*mu+mu-1}.
    static Partition contiguous(int K, int mu);

    int K() const { return static_cast<int>(regions_.size()); }
    int mu() const { return mu_; }
    Layout layout() const { return layout_; }

    const std::vector<Interval>& regions() const { return regions_; }
    const Interval& region(int i) const { return regions_.at(static_cast<std::size_t>(i)); }

    /// Distinct blocks (K/mu of them for a well-formed partition).
    const std::vector<std::vector<int>>& blocks() const { return blocks_; }

    /// The block S_i containing region i, i.e. {ceil((i+1)/mu)*mu - 1 - j}.
    const std::vector<int>& block_of(int i) const;

    /// Index of the region containing x. Throws std::out_of_range if the
    /// regions do not cover x.
    int region_of(Location x) const;

private:
    friend Partition build_partition(double r, std::optional<int> K);

    Partition() = default;

    int mu_ = 1;
    Layout layout_ = Layout::Custom;
    std::vector<Interval> regions_;
    std::vector<std::vector<int>> blocks_;
    std::vector<int> block_index_;     // region -> position in blocks_ (-1 if none)
    std::vector<int> order_by_lo_;     // Custom layout lookup
};

/// Smallest multiple of mu that is >= 2 mu / (1 - mu r).
int minimal_region_count(double r);

/// Interleaved circle partition: region i (0-based) is the cell
/// c = floor(i/mu) + (K/mu)(i mod mu), i.e. [c/K, (c+1)/K), and blocks group
/// regions mu at a time, so each block's regions are spaced 1/mu apart.
/// Throws std::invalid_argument if r is outside (0,1), if 1 - mu r <= 0, or if
/// a given K is below the bound or not a multiple of mu.
Partition build_partition(double r, std::optional<int> K = std::nullopt);

/// Infimum of the circular distance between the closures of regions i and j.
/// Throws std::invalid_argument when i == j.
double min_region_distance(const Partition& p, int i, int j);

} // namespace admsched
