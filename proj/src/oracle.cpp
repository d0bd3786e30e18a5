#include "admsched/oracle.hpp"

#include "admsched/diagnostics.hpp"
#include "admsched/partition_checks.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace admsched {

bool OracleReport::ok() const
{
    return std::all_of(checks.begin(), checks.end(), [](const OracleCheck& c) { return c.passed; });
}

CircleInstance random_circle_instance(Engine& eng, std::size_t n, std::span<const double> radii)
{
    if (radii.empty())
        throw std::invalid_argument("random_circle_instance: no radii given");
    const double r = radii[uniform_below(eng, radii.size())];
    const auto mode = uniform_below(eng, std::uint64_t{3});
    std::vector<double> xs;
    std::vector<double> centers;
    for (std::size_t c = 0, m = 1 + uniform_below(eng, std::uint64_t{3}); c < m; ++c)
        centers.push_back(uniform01(eng));
    for (std::size_t i = 0; i < n; ++i) {
        double x = 0.0;
        if (mode == 0)
            x = uniform01(eng);
        else if (mode == 1)
            x = static_cast<double>(uniform_below(eng, std::uint64_t{20})) / 20.0;
        else
            x = centers[uniform_below(eng, centers.size())] + 0.02 * uniform01(eng);
        xs.push_back(x - std::floor(x));
    }
    return CircleInstance{r, PairwiseDistance::make(r), build_partition(r), Configuration::from_locations(xs)};
}

namespace {

RegionGraph random_graph(Engine& eng)
{
    static constexpr std::array<std::pair<int, int>, 7> shapes{{{2, 1}, {2, 2}, {3, 1}, {4, 2}, {6, 2}, {6, 3}, {8, 2}}};
    for (;;) {
        const auto [K, mu] = shapes[uniform_below(eng, shapes.size())];
        std::vector<std::pair<int, int>> edges;
        for (int i = 0; i < K; ++i)
            for (int j = i + 1; j < K; ++j)
                if (i / mu != j / mu && uniform01(eng) < 0.75)
                    edges.emplace_back(i, j);
        try {
            RegionGraph g(K, edges);
            if (g.mu() == mu)
                return g;
        } catch (const std::invalid_argument&) {
        }
    }
}

// Uniform integer with roughly exp(log_mag) magnitude.
BigInt random_magnitude(Engine& eng, double log_mag)
{
    const auto bits = static_cast<unsigned>(std::max(2.0, std::ceil(log_mag / std::log(2.0))));
    const BigInt half = BigInt(1) << (bits - 1);
    return half + uniform_below(eng, half);
}

std::string vacuous()
{
    return "0 instances (vacuous)";
}

} // namespace

GraphState random_graph_state(Engine& eng)
{
    for (;;) {
        RegionGraph g = random_graph(eng);
        const double lambda_beta = g.mu() * (0.3 + 0.6 * uniform01(eng));
        const auto consts = load_constants(lambda_beta, g.mu(), omega_size(g.K()));
        const double per_region = consts.log_threshold / g.mu();
        std::vector<BigInt> x;
        for (int k = 0; k < g.K(); ++k) {
            if (uniform01(eng) < 0.25)
                x.emplace_back(uniform_below(eng, std::uint64_t{50}));
            else
                x.push_back(random_magnitude(eng, per_region * (1.0 + 1.5 * uniform01(eng))));
        }
        if (log_weight_check(g, x, consts.eps).in_B)
            return GraphState{std::move(g), std::move(x), lambda_beta, consts.eps};
    }
}

OracleCheck check_counting(const OracleLimits& limits, const SubsetCounter& counter)
{
    OracleCheck c{"counting equivalence", true, 0, ""};
    if (limits.n_max == 0 || limits.trials == 0) {
        c.detail = vacuous();
        return c;
    }
    Engine eng = make_stream(limits.seed, "oracle-counting");
    std::size_t failures = 0;
    std::string first;
    for (std::size_t t = 0; t < limits.trials; ++t) {
        const std::size_t n = std::min(uniform_below(eng, limits.n_max + 1), brute_force_limit);
        const auto inst = random_circle_instance(eng, n, limits.radii);
        const AdmissibilityModel model = inst.model;
        const auto all = brute_force_enumerate(model, inst.y);
        std::vector<BigInt> by_size(static_cast<std::size_t>(inst.model.mu) + 1, BigInt(0));
        for (const auto& s : all) {
            if (s.size() >= by_size.size())
                by_size.resize(s.size() + 1, BigInt(0));
            by_size[s.size()] += 1;
        }
        const auto got = counter(model, inst.y);
        auto padded = got.by_size;
        padded.resize(std::max(padded.size(), by_size.size()), BigInt(0));
        by_size.resize(padded.size(), BigInt(0));
        ++c.instances;
        if (got.total != BigInt(all.size()) || padded != by_size) {
            if (++failures == 1) {
                std::ostringstream os;
                os << "first mismatch: n=" << n << " r=" << inst.r << " fast=" << got.total
                   << " brute=" << all.size();
                first = os.str();
            }
        }
    }
    c.passed = failures == 0;
    c.detail = c.passed ? "all totals and size profiles agree" : first;
    return c;
}

OracleCheck check_marginals(const OracleLimits& limits)
{
    OracleCheck c{"marginal identity", true, 0, ""};
    if (limits.n_max == 0 || limits.trials == 0) {
        c.detail = vacuous();
        return c;
    }
    Engine eng = make_stream(limits.seed, "oracle-marginals");
    std::size_t failures = 0;
    for (std::size_t t = 0; t < limits.trials; ++t) {
        const std::size_t n = std::min(uniform_below(eng, limits.n_max + 1), brute_force_limit);
        const auto inst = random_circle_instance(eng, n, limits.radii);
        const AdmissibilityModel model = inst.model;
        const auto all = brute_force_enumerate(model, inst.y);
        const auto m = removal_marginals(model, inst.y, inst.partition);

        std::vector<BigInt> containing(n, BigInt(0));
        std::vector<BigInt> touching(static_cast<std::size_t>(inst.partition.K()), BigInt(0));
        for (const auto& s : all) {
            std::vector<int> regions;
            for (ParticleId id : s) {
                const auto i = *inst.y.index_of(id);
                containing[i] += 1;
                regions.push_back(inst.partition.region_of(inst.y[i].location));
            }
            std::sort(regions.begin(), regions.end());
            regions.erase(std::unique(regions.begin(), regions.end()), regions.end());
            for (int k : regions)
                touching[static_cast<std::size_t>(k)] += 1;
        }
        bool ok = m.total == BigInt(all.size()) && m.containing == containing;
        for (std::size_t k = 0; ok && k < touching.size(); ++k)
            ok = m.region[k] == Rational(touching[k], BigInt(all.size()));
        ++c.instances;
        if (!ok)
            ++failures;
    }
    c.passed = failures == 0;
    c.detail = c.passed ? "particle and region marginals exact" : std::to_string(failures) + " instances disagree";
    return c;
}

OracleCheck check_uniformity(const OracleLimits& limits)
{
    OracleCheck c{"sampler uniformity (chi-square)", true, 0, ""};
    const std::size_t n = std::min<std::size_t>(8, limits.n_max);
    if (n == 0 || limits.draws == 0) {
        c.detail = vacuous();
        return c;
    }
    const double r = 0.3;
    Engine setup = make_stream(limits.seed, "oracle-uniformity-setup");
    std::vector<double> xs;
    for (std::size_t i = 0; i < n; ++i)
        xs.push_back(uniform01(setup));
    const auto y = Configuration::from_locations(xs);
    const AdmissibilityModel model = PairwiseDistance::make(r);

    const auto all = brute_force_enumerate(model, y);
    std::map<std::vector<ParticleId>, std::size_t> index;
    for (std::size_t i = 0; i < all.size(); ++i)
        index.emplace(all[i], i);

    std::vector<double> observed(all.size(), 0.0);
    Engine eng = make_stream(limits.seed, "oracle-uniformity");
    for (std::size_t d = 0; d < limits.draws; ++d) {
        auto s = sample_admissible_subset(model, y, eng).removed;
        std::sort(s.begin(), s.end(), [&](ParticleId a, ParticleId b) { return *y.index_of(a) < *y.index_of(b); });
        const auto it = index.find(s);
        if (it == index.end()) {
            c.passed = false;
            c.detail = "sampler produced a non-admissible subset";
            return c;
        }
        observed[it->second] += 1;
    }
    c.instances = 1;
    const double expected = static_cast<double>(limits.draws) / static_cast<double>(all.size());
    double stat = 0.0;
    for (double o : observed)
        stat += (o - expected) * (o - expected) / expected;
    std::ostringstream os;
    if (all.size() < 2) {
        os << "single outcome";
    } else {
        const boost::math::chi_squared dist(static_cast<double>(all.size() - 1));
        const double pval = boost::math::cdf(boost::math::complement(dist, stat));
        c.passed = pval >= 1e-3;
        os << all.size() << " subsets, " << limits.draws << " draws, chi2=" << stat << ", p=" << pval;
    }
    c.detail = os.str();
    return c;
}

OracleCheck check_region_sets(const OracleLimits& limits)
{
    OracleCheck c{"q_S identities and v_S <= w_S", true, 0, ""};
    if (limits.n_max == 0 || limits.trials == 0) {
        c.detail = vacuous();
        return c;
    }
    Engine eng = make_stream(limits.seed, "oracle-region-sets");
    std::size_t failures = 0;
    std::string first;
    auto fail = [&](const std::string& why) {
        if (++failures == 1)
            first = why;
    };
    for (std::size_t t = 0; t < limits.trials; ++t) {
        const std::size_t n = std::min(uniform_below(eng, limits.n_max + 1), brute_force_limit);
        const auto inst = random_circle_instance(eng, n, limits.radii);
        const AdmissibilityModel model = inst.model;
        ++c.instances;
        std::map<RegionSet, BigInt> v;
        try {
            v = v_S_counts(model, inst.y, inst.partition);
        } catch (const std::logic_error& e) {
            fail(std::string("v_S: ") + e.what());
            continue;
        }
        const auto q = q_S_exact(model, inst.y, inst.partition);
        const auto m = removal_marginals(model, inst.y, inst.partition);
        const auto x = region_counts(inst.y, inst.partition);

        Rational qsum(0);
        std::vector<Rational> per_region(x.size(), Rational(0));
        for (const auto& [s, qs] : q) {
            qsum += qs;
            for (int k : s)
                per_region[static_cast<std::size_t>(k)] += qs;
        }
        if (qsum != Rational(1))
            fail("sum of q_S differs from 1");
        if (per_region != m.region)
            fail("sum_{S containing k} q_S differs from p_k");

        for (const auto& [s, vs] : v) {
            BigInt w(1);
            for (int k : s)
                w *= x[static_cast<std::size_t>(k)];
            if (vs > w)
                fail("v_S exceeds w_S");
        }

        // Guaranteed occupied sets must reach the product bound.
        std::vector<int> occupied;
        for (std::size_t k = 0; k < x.size(); ++k)
            if (x[k] > 0)
                occupied.push_back(static_cast<int>(k));
        RegionSet current;
        const auto mu = static_cast<std::size_t>(inst.model.mu);
        auto visit = [&](auto&& self, std::size_t from) -> void {
            if (!current.empty() && is_guaranteed(inst.partition, model, current)) {
                BigInt w(1);
                for (int k : current)
                    w *= x[static_cast<std::size_t>(k)];
                const auto it = v.find(current);
                if (it == v.end() || it->second != w)
                    fail("guaranteed set with v_S != w_S");
            }
            if (current.size() == mu)
                return;
            for (std::size_t i = from; i < occupied.size(); ++i) {
                current.push_back(occupied[i]);
                self(self, i + 1);
                current.pop_back();
            }
        };
        visit(visit, 0);
    }
    c.passed = failures == 0;
    c.detail = c.passed ? "sum q_S = 1, marginals match, v_S <= w_S with equality on guaranteed sets" : first;
    return c;
}

OracleCheck check_log_weight(const OracleLimits& limits)
{
    OracleCheck c{"log-weight inequality on B", true, 0, ""};
    if (limits.trials == 0) {
        c.detail = vacuous();
        return c;
    }
    Engine eng = make_stream(limits.seed, "oracle-graph-states");
    double worst = INFINITY;
    for (std::size_t t = 0; t < limits.trials; ++t) {
        const auto st = random_graph_state(eng);
        const auto res = log_weight_check(st.graph, st.x, st.eps);
        ++c.instances;
        c.passed = c.passed && res.in_B && res.holds;
        worst = std::min(worst, res.lhs - res.rhs);
    }
    std::ostringstream os;
    os << "min(lhs - rhs) = " << worst;
    c.detail = os.str();
    return c;
}

OracleCheck check_drift_bound(const OracleLimits& limits)
{
    OracleCheck c{"drift bound on B", true, 0, ""};
    if (limits.trials == 0) {
        c.detail = vacuous();
        return c;
    }
    Engine eng = make_stream(limits.seed, "oracle-graph-states");
    double worst = INFINITY;
    for (std::size_t t = 0; t < limits.trials; ++t) {
        const auto st = random_graph_state(eng);
        const auto res = drift_bound_check(st.graph, st.x, st.lambda_beta);
        ++c.instances;
        c.passed = c.passed && res.in_B && res.holds;
        worst = std::min(worst, res.bound - res.G);
    }
    std::ostringstream os;
    os << "min(bound - G) = " << worst;
    c.detail = os.str();
    return c;
}

OracleCheck check_partitions()
{
    OracleCheck c{"partition validation", true, 0, ""};
    std::ostringstream os;
    for (double r : {0.3, 0.49, 0.5}) {
        const auto p = build_partition(r);
        const auto rep = validate_partition(p, PairwiseDistance::make(r));
        ++c.instances;
        os << "r=" << r << " K=" << p.K() << " mu=" << p.mu() << (rep.ok() ? " ok; " : " FAILED; ");
        c.passed = c.passed && rep.ok();
    }
    c.detail = os.str();
    return c;
}

OracleReport run_oracle(const OracleLimits& limits)
{
    OracleReport rep;
    rep.checks.push_back(check_counting(limits));
    rep.checks.push_back(check_marginals(limits));
    rep.checks.push_back(check_uniformity(limits));
    rep.checks.push_back(check_region_sets(limits));
    rep.checks.push_back(check_log_weight(limits));
    rep.checks.push_back(check_drift_bound(limits));
    rep.checks.push_back(check_partitions());
    return rep;
}

void print_report(std::ostream& os, const OracleReport& report)
{
    for (const auto& c : report.checks)
        os << (c.passed ? "PASS" : "FAIL") << "  " << c.name << "  [" << c.instances << " instances]  " << c.detail
           << '\n';
    os << (report.ok() ? "oracle: all checks passed" : "oracle: FAILURES") << '\n';
}

} // namespace admsched
