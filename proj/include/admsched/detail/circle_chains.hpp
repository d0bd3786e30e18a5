#pragma once

// Counting and sampling of admissible particle subsets of the protocol model.
//
// Particles are sorted by (location, id). A nonempty admissible set has a
// unique first element a in that order (its anchor). With d(i,j) = p_j - p_i
// for i < j, a chain a = i_1 < ... < i_s is admissible iff consecutive gaps
// satisfy d >= r and the last element lies in [a, hi(a)], where hi(a) is the
// last index with 1 - d(a, .) >= r. Floating-point subtraction is monotone,
// so these local tests agree exactly with the all-pairs circ_distance test.
//
// Within the window [a, hi(a)] the number of chains of size s starting at i
// obeys h(i, s) = sum_{j in [nxt(i), hi]} h(j, s-1), with nxt(i) the first
// index at distance >= r after i; suffix sums make each anchor O(window * mu).

#include "admsched/bigint.hpp"
#include "admsched/rng.hpp"

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace admsched::detail {

template <class Int>
Int draw_below(Engine& eng, const Int& n)
{
    return uniform_below(eng, n);
}

class CircleChains {
public:
    /// `pos` sorted ascending, values in [0,1); `max_size` >= 1.
    CircleChains(std::span<const double> pos, double r, int max_size)
        : pos_(pos), r_(r), max_size_(max_size), nxt_(pos.size()), hi_(pos.size())
    {
        const std::size_t n = pos_.size();
        std::size_t j = 0;
        for (std::size_t i = 0; i < n; ++i) {
            j = std::max(j, i + 1);
            while (j < n && pos_[j] - pos_[i] < r_)
                ++j;
            nxt_[i] = j;
        }
        std::size_t h = 0;
        for (std::size_t a = 0; a < n; ++a) {
            h = std::max(h, a);
            while (h + 1 < n && 1.0 - (pos_[h + 1] - pos_[a]) >= r_)
                ++h;
            hi_[a] = h;
        }
    }

    std::size_t size() const { return pos_.size(); }
    int max_size() const { return max_size_; }
    std::size_t nxt(std::size_t i) const { return nxt_[i]; }
    std::size_t hi(std::size_t a) const { return hi_[a]; }

    /// Number of pairs anchored at a.
    std::size_t pair_count(std::size_t a) const
    {
        return nxt_[a] <= hi_[a] ? hi_[a] - nxt_[a] + 1 : 0;
    }

    /// Chains anchored at a, by size: out[s] for s = 0..max_size (out[0] = 0).
    template <class Int>
    std::vector<Int> anchor_counts(std::size_t a) const
    {
        std::vector<Int> out(static_cast<std::size_t>(max_size_) + 1, Int(0));
        out[1] = Int(1);
        if (max_size_ >= 2)
            out[2] = Int(static_cast<std::uint64_t>(pair_count(a)));
        if (max_size_ >= 3 && pair_count(a) > 0) {
            const auto table = suffix_table<Int>(a, max_size_);
            for (int s = 3; s <= max_size_; ++s)
                out[static_cast<std::size_t>(s)] = chains_from(table, a, a, s);
        }
        return out;
    }

    /// Indices of a uniformly drawn chain of size s anchored at a.
    /// Precondition: anchor_counts(a)[s] > 0.
    template <class Int>
    std::vector<std::size_t> sample_chain(std::size_t a, int s, Engine& eng) const
    {
        std::vector<std::size_t> chain{a};
        if (s == 1)
            return chain;
        if (s == 2) {
            const auto k = uniform_below(eng, static_cast<std::uint64_t>(pair_count(a)));
            chain.push_back(nxt_[a] + k);
            return chain;
        }
        const auto table = suffix_table<Int>(a, s);
        const std::size_t hi = hi_[a];
        std::size_t cur = a;
        for (int rem = s; rem > 1; --rem) {
            // successor j in [nxt(cur), hi] with weight h(j, rem-1)
            const Int total = chains_from(table, a, cur, rem);
            Int u = draw_below(eng, total);
            std::size_t j = nxt_[cur];
            for (; j <= hi; ++j) {
                const Int w = h_at(table, a, j, rem - 1);
                if (u < w)
                    break;
                u -= w;
            }
            if (j > hi)
                throw std::logic_error("chain sampling ran past the window");
            chain.push_back(j);
            cur = j;
        }
        return chain;
    }

private:
    // table[s][i - a] = sum_{j >= i, j <= hi} h(j, s); levels 1..smax.
    template <class Int>
    std::vector<std::vector<Int>> suffix_table(std::size_t a, int smax) const
    {
        const std::size_t hi = hi_[a];
        const std::size_t w = hi - a + 1;
        std::vector<std::vector<Int>> suf(static_cast<std::size_t>(smax) + 1, std::vector<Int>(w + 1, Int(0)));
        for (std::size_t k = w; k-- > 0;)
            suf[1][k] = suf[1][k + 1] + Int(1);
        for (int s = 2; s <= smax; ++s) {
            auto& level = suf[static_cast<std::size_t>(s)];
            const auto& below = suf[static_cast<std::size_t>(s) - 1];
            for (std::size_t k = w; k-- > 0;) {
                const std::size_t i = a + k;
                const std::size_t nx = nxt_[i];
                const Int here = nx <= hi ? below[nx - a] : Int(0);
                level[k] = level[k + 1] + here;
            }
        }
        return suf;
    }

    template <class Int>
    Int h_at(const std::vector<std::vector<Int>>& suf, std::size_t a, std::size_t i, int s) const
    {
        const auto& level = suf[static_cast<std::size_t>(s)];
        return level[i - a] - level[i - a + 1];
    }

    // h(i, s): chains of size s starting at i within the window of anchor a.
    template <class Int>
    Int chains_from(const std::vector<std::vector<Int>>& suf, std::size_t a, std::size_t i, int s) const
    {
        if (s == 1)
            return Int(1);
        const std::size_t nx = nxt_[i];
        if (nx > hi_[a])
            return Int(0);
        return suf[static_cast<std::size_t>(s) - 1][nx - a];
    }

    std::span<const double> pos_;
    double r_;
    int max_size_;
    std::vector<std::size_t> nxt_;
    std::vector<std::size_t> hi_;
};

} // namespace admsched::detail
