#include "admsched/partition_checks.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace admsched {

bool is_guaranteed(const Partition& p, const AdmissibilityModel& model, std::span<const int> S)
{
    if (S.empty())
        return true;
    std::set<int> distinct(S.begin(), S.end());
    if (distinct.size() != S.size())
        return false;
    if (const auto* g = std::get_if<RegionGraph>(&model)) {
        std::uint32_t mask = 0;
        for (int k : S) {
            if (k < 0 || k >= g->K())
                return false;
            mask |= 1U << k;
        }
        return g->independent(mask);
    }
    const auto& pw = std::get<PairwiseDistance>(model);
    if (!size_allowed(model, S.size()))
        return false;
    for (std::size_t a = 0; a < S.size(); ++a)
        for (std::size_t b = a + 1; b < S.size(); ++b)
            if (min_region_distance(p, S[a], S[b]) < pw.r)
                return false;
    return true;
}

bool PartitionReport::ok() const
{
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult* PartitionReport::find(const std::string& name) const
{
    for (const auto& c : checks)
        if (c.name == name)
            return &c;
    return nullptr;
}

namespace {

CheckResult check_cover(const Partition& p)
{
    CheckResult c{"cover", true, ""};
    auto regions = p.regions();
    std::sort(regions.begin(), regions.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    const double target = 1.0 / p.K();
    std::ostringstream why;
    if (regions.front().lo != 0.0)
        why << "first region starts at " << regions.front().lo << "; ";
    if (regions.back().hi != 1.0)
        why << "last region ends at " << regions.back().hi << "; ";
    for (std::size_t i = 0; i + 1 < regions.size(); ++i)
        if (regions[i].hi != regions[i + 1].lo) {
            why << (regions[i].hi > regions[i + 1].lo ? "overlap" : "gap") << " at " << regions[i].hi << "; ";
            break;
        }
    for (const auto& iv : regions)
        if (std::fabs(iv.length() - target) > 1e-12) {
            why << "region [" << iv.lo << "," << iv.hi << ") has measure " << iv.length() << " != 1/K; ";
            break;
        }
    c.detail = why.str();
    c.passed = c.detail.empty();
    if (c.passed)
        c.detail = std::to_string(p.K()) + " regions of measure 1/K";
    return c;
}

CheckResult check_divisibility(const Partition& p, const AdmissibilityModel& model)
{
    CheckResult c{"divisibility", true, ""};
    const int mu = max_admissible_size(model);
    std::ostringstream why;
    if (p.K() % p.mu() != 0)
        why << "K=" << p.K() << " is not a multiple of mu=" << p.mu() << "; ";
    if (p.mu() != mu)
        why << "partition mu=" << p.mu() << " differs from the model's " << mu << "; ";
    c.detail = why.str();
    c.passed = c.detail.empty();
    if (c.passed)
        c.detail = "K=" + std::to_string(p.K()) + ", mu=" + std::to_string(mu);
    return c;
}

CheckResult check_blocks(const Partition& p, const AdmissibilityModel& model)
{
    CheckResult c{"blocks", true, ""};
    std::ostringstream why;
    std::vector<int> seen(static_cast<std::size_t>(p.K()), 0);
    if (p.K() % p.mu() == 0 && p.blocks().size() != static_cast<std::size_t>(p.K() / p.mu()))
        why << "expected " << p.K() / p.mu() << " blocks, found " << p.blocks().size() << "; ";
    for (std::size_t b = 0; b < p.blocks().size(); ++b) {
        const auto& block = p.blocks()[b];
        std::set<int> distinct(block.begin(), block.end());
        if (block.size() != static_cast<std::size_t>(p.mu()) || distinct.size() != block.size())
            why << "block " << b << " does not hold " << p.mu() << " distinct regions; ";
        for (int k : block)
            ++seen[static_cast<std::size_t>(k)];
        if (!is_guaranteed(p, model, block)) {
            why << "block " << b << " is not guaranteed";
            if (block.size() >= 2 && std::holds_alternative<PairwiseDistance>(model))
                why << " (min region distance " << min_region_distance(p, block[0], block[1]) << ")";
            why << "; ";
        }
    }
    for (std::size_t k = 0; k < seen.size(); ++k)
        if (seen[k] != 1) {
            why << "region " << k << " lies in " << seen[k] << " blocks; ";
            break;
        }
    c.detail = why.str();
    c.passed = c.detail.empty();
    if (c.passed)
        c.detail = std::to_string(p.blocks().size()) + " guaranteed blocks";
    return c;
}

CheckResult check_exclusivity(const Partition& p, const AdmissibilityModel& model)
{
    CheckResult c{"exclusivity", true, "one removable particle per region"};
    if (const auto* pw = std::get_if<PairwiseDistance>(&model)) {
        // two points of a half-open region of length L are < L apart
        for (int i = 0; i < p.K(); ++i)
            if (p.region(i).length() > pw->r) {
                c.passed = false;
                c.detail = "region " + std::to_string(i) + " is longer than r";
                break;
            }
    }
    return c;
}

CheckResult check_forbidden_size(const AdmissibilityModel& model)
{
    CheckResult c{"forbidden_size", true, "not applicable"};
    const auto* pw = std::get_if<PairwiseDistance>(&model);
    if (!pw || !inverse_is_integer(pw->r))
        return c;
    const int n = static_cast<int>(std::lround(1.0 / pw->r));
    std::vector<double> xs;
    for (int i = 0; i < n; ++i)
        xs.push_back(static_cast<double>(i) / n);
    const auto evenly = Configuration::from_locations(xs);
    std::ostringstream why;
    if (!pw->forbid_size || *pw->forbid_size != n)
        why << "model does not forbid size " << n << "; ";
    if (pw->mu != n - 1)
        why << "mu=" << pw->mu << " but 1/r-1=" << n - 1 << "; ";
    if (is_admissible(model, evenly))
        why << "evenly spaced set of size " << n << " accepted; ";
    c.detail = why.str();
    c.passed = c.detail.empty();
    if (c.passed)
        c.detail = "sets of size " + std::to_string(n) + " rejected, mu=" + std::to_string(n - 1);
    return c;
}

} // namespace

PartitionReport validate_partition(const Partition& p, const AdmissibilityModel& model)
{
    PartitionReport report;
    report.checks.push_back(check_cover(p));
    report.checks.push_back(check_divisibility(p, model));
    report.checks.push_back(check_blocks(p, model));
    report.checks.push_back(check_exclusivity(p, model));
    report.checks.push_back(check_forbidden_size(model));
    return report;
}

} // namespace admsched
